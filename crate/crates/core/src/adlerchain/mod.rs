//! Adler's map with its 2x2 Lax matrix, the periodic dressing chain (odd
//! period) with its constant Poisson tensor and Hamiltonian flow, and the
//! leaf-algebra / gauge reduction that produces the chain's phase space.

mod chain;
mod leaf;
mod map;

pub use chain::{
    chain_invariants, chain_vector_field, check_adler_transfer_poisson, check_transfer_monodromy,
    dressing_chain_residuals, f_bracket, g_bracket, hamiltonian, hamiltonian_gradient,
    integrate_chain, printed_f_bracket, random_transfer_point, transfer_poisson_residual,
    ChainState, FBracket, Trajectory, TransferSubject, OVERFLOW_GUARD,
};
pub use leaf::{
    canonical_bracket, canonical_leaf_tensor, check_gauge_invariance, gauge_action,
    gauge_action_decoy, leaf_algebra_check, leaf_casimirs, reduced_brackets,
    reduced_invariants_check, LeafCoords, LinearPoisson,
};
pub use map::{adler_lax, check_adler_refactorization, settled_assignment, AdlerMap};
