//! The matrix-KdV soliton interaction as a Yang-Baxter map on rank-k
//! projectors, in subspace form and in rank-1 `(p, q)` form, with its Lax
//! matrix, monodromy invariants, the linear integral `J`, and the
//! Poisson-map check on the reduced phase space.

mod invariants;
mod map;
mod poisson;
mod state;

pub use invariants::{
    check_monodromy_invariance, check_scramble_invariance, integral_j, scramble,
    spectral_invariants, SpectralInvariants,
};
pub use map::{lax_from_projector, lax_matrix, lax_pencil, Rank1Map, RankKMap};
pub use poisson::{
    apply_flat, canonical_tensor, check_poisson_map, kron, leaf_bracket_tensor,
    lie_poisson_bracket, lie_poisson_linear, linear_bracket_from_tensor, normalize_flat,
    observables, poisson_residual, random_normalized_point, swap_tensor, PoissonSetup,
    PoissonSubject, ReductionLevel,
};
pub use state::{
    annihilator_basis, primitive_columns, primitive_vector, Involution, ProjectorState, Rank1State, SubspaceState,
};

use crate::error::Result;
use crate::report::CheckReport;
use crate::sampling::TrialRng;
use crate::scalar::Scalar;
use crate::ybcore::{check_lax_refactorization as lax_check, LaxAssignment, LaxMap, SiteTuple};

/// Refactorization `L(s1) L(s2) = L(s2~) L(s1~)` over random pairs; the
/// printed assignment is required.
pub fn check_lax_refactorization<T, M>(
    map: &M,
    trials: usize,
    seed: u64,
    zetas: &[T],
    tol: f64,
    gen: impl FnMut(&mut TrialRng) -> SiteTuple<M::Value, T>,
) -> CheckReport
where
    T: Scalar,
    M: LaxMap<T>,
{
    lax_check(
        map,
        trials,
        seed,
        zetas,
        tol,
        Some(LaxAssignment::Printed),
        gen,
    )
}

/// Monodromy matrix of a soliton tuple; see [`crate::ybcore::monodromy`].
pub fn monodromy<T, M>(
    map: &M,
    t: &SiteTuple<M::Value, T>,
    zeta: &T,
) -> Result<crate::matkit::Matrix<T>>
where
    T: Scalar,
    M: LaxMap<T>,
    M::Value: ProjectorState<T>,
{
    crate::ybcore::monodromy(map, t, zeta)
}
