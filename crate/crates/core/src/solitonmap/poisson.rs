//! Poisson-map verification of the rank-1 interaction on the reduced
//! phase space, plus the linear (Lie-Poisson) bracket on matrices.
//!
//! Each site `(p, q)` lives in `T*V` with the canonical bracket
//! `{F, G} = sum_a (dF/dq_a dG/dp_a - dF/dp_a dG/dq_a)`. Projector
//! observables are invariant under `(p, q) -> (s p, q / s)`, so they descend
//! to the reduced space at a fixed level `<p, q> = c`, where their bracket
//! scales like `1/c`. The level that reproduces the bracket induced by
//! `phi_lambda(S) = zeta I + lambda S` is `|c| = 2 lambda`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::map::Rank1Map;
use super::state::{ProjectorState, Rank1State};
use crate::error::{Error, Result};
use crate::matkit::{fd_jacobian, Matrix};
use crate::report::CheckReport;
use crate::sampling::uniform;
use crate::scalar::Scalar;

/// Momentum level `<p_i, q_i>` used for the reduction of site `i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReductionLevel {
    /// `<p, q> = 2 lambda`: matches the Lie-Poisson bracket pulled back by
    /// `phi_lambda`.
    #[default]
    TwiceLambda,
    /// `<p, q> = lambda^2`. Does not make the interaction a Poisson map
    /// unless the two parameters coincide; kept for comparison.
    LambdaSquared,
}

impl ReductionLevel {
    pub fn level(self, lambda: f64) -> f64 {
        match self {
            Self::TwiceLambda => 2.0 * lambda,
            Self::LambdaSquared => lambda * lambda,
        }
    }
}

/// The map whose Poisson property is tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PoissonSubject {
    Soliton,
    /// `p1~ = p1 + p2`, everything else fixed. Not Poisson.
    Decoy,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonSetup {
    pub n: usize,
    pub lambdas: (f64, f64),
    pub h: f64,
    pub tol: f64,
    pub level: ReductionLevel,
}

impl PoissonSetup {
    pub fn new(n: usize, lambdas: (f64, f64)) -> Self {
        Self {
            n,
            lambdas,
            h: crate::matkit::DEFAULT_FD_STEP,
            tol: 1e-6,
            level: ReductionLevel::TwiceLambda,
        }
    }

    fn levels(&self) -> [f64; 2] {
        [
            self.level.level(self.lambdas.0),
            self.level.level(self.lambdas.1),
        ]
    }
}

fn split(x: &[f64], n: usize) -> Result<(Rank1State<f64>, Rank1State<f64>)> {
    if x.len() != 4 * n {
        return Err(Error::InvalidInput(format!(
            "expected {} coordinates, got {}",
            4 * n,
            x.len()
        )));
    }
    Ok((
        Rank1State::from_flat(&x[..2 * n])?,
        Rank1State::from_flat(&x[2 * n..])?,
    ))
}

fn join(a: &Rank1State<f64>, b: &Rank1State<f64>) -> Vec<f64> {
    let mut v = a.to_flat();
    v.extend(b.to_flat());
    v
}

/// The subject map in flat coordinates `(p1, q1, p2, q2)`.
pub fn apply_flat(subject: PoissonSubject, x: &[f64], setup: &PoissonSetup) -> Result<Vec<f64>> {
    let (s1, s2) = split(x, setup.n)?;
    match subject {
        PoissonSubject::Soliton => {
            let (a, b) = Rank1Map.interact(&s1, &setup.lambdas.0, &s2, &setup.lambdas.1)?;
            Ok(join(&a, &b))
        }
        PoissonSubject::Decoy => {
            let a = Rank1State {
                p: s1.p.axpy(&1.0, &s2.p),
                q: s1.q.clone(),
            };
            Ok(join(&a, &s2))
        }
    }
}

/// Projector observables: entries of `P1` (= `tr(E_ba P1)`), entries of
/// `P2`, and `tr(P1 P2)`.
pub fn observables(x: &[f64], n: usize) -> Result<Vec<f64>> {
    let (s1, s2) = split(x, n)?;
    let p1 = s1.projector()?;
    let p2 = s2.projector()?;
    let mut out: Vec<f64> = p1.data().to_vec();
    out.extend_from_slice(p2.data());
    out.push(p1.mul(&p2)?.trace()?);
    Ok(out)
}

/// Canonical Poisson tensor on `sites` copies of `T*R^n`, coordinates
/// ordered `(p, q)` per site, with `{q_a, p_a} = 1`.
pub fn canonical_tensor(n: usize, sites: usize) -> Matrix<f64> {
    let dim = 2 * n * sites;
    let mut j = Matrix::zeros(dim, dim);
    for s in 0..sites {
        for a in 0..n {
            let p = 2 * n * s + a;
            let q = p + n;
            j.set(q, p, 1.0);
            j.set(p, q, -1.0);
        }
    }
    j
}

/// Rescales each `p_i` so that `<p_i, q_i> = levels[i]`.
pub fn normalize_flat(x: &[f64], n: usize, levels: &[f64]) -> Result<Vec<f64>> {
    let sites = x.len() / (2 * n);
    let mut out = Vec::with_capacity(x.len());
    for (s, level) in levels.iter().enumerate().take(sites) {
        let st = Rank1State::from_flat(&x[2 * n * s..2 * n * (s + 1)])?;
        out.extend(st.normalized_to(level)?.to_flat());
    }
    Ok(out)
}

/// Max-abs difference between `{F o R, G o R}(x)` and `{F, G}(R^(x))` over
/// all observable pairs, where `R^` is the map followed by level
/// normalization. `x` must already sit on the reduction level.
pub fn poisson_residual(subject: PoissonSubject, x: &[f64], setup: &PoissonSetup) -> Result<f64> {
    let n = setup.n;
    let j = canonical_tensor(n, 2);
    let composed = fd_jacobian(
        |y: &[f64]| apply_flat(subject, y, setup).and_then(|z| observables(&z, n)),
        x,
        setup.h,
    )?;
    let lhs = composed.mul(&j)?.mul(&composed.transpose())?;

    let image = normalize_flat(&apply_flat(subject, x, setup)?, n, &setup.levels())?;
    let direct = fd_jacobian(|y: &[f64]| observables(y, n), &image, setup.h)?;
    let rhs = direct.mul(&j)?.mul(&direct.transpose())?;
    lhs.max_abs_diff(&rhs)
}

fn well_conditioned(s: &Rank1State<f64>) -> bool {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    match s.p.pairing(&s.q) {
        Ok(c) => c.abs() >= 0.5 * norm(&s.p.0) * norm(&s.q.0),
        Err(_) => false,
    }
}

/// Random point on the reduction level, away from degenerate pairings and
/// with moderate projector entries before and after the map.
pub fn random_normalized_point(rng: &mut impl Rng, setup: &PoissonSetup) -> Option<Vec<f64>> {
    let n = setup.n;
    for _ in 0..1000 {
        let raw: Vec<f64> = (0..4 * n).map(|_| uniform(rng, -1.0, 1.0)).collect();
        let Ok((s1, s2)) = split(&raw, n) else {
            continue;
        };
        if !(well_conditioned(&s1) && well_conditioned(&s2)) {
            continue;
        }
        let Ok(x) = normalize_flat(&raw, n, &setup.levels()) else {
            continue;
        };
        let Ok(y) = apply_flat(PoissonSubject::Soliton, &x, setup) else {
            continue;
        };
        let Ok((t1, t2)) = split(&y, n) else { continue };
        if !(well_conditioned(&t1) && well_conditioned(&t2)) {
            continue;
        }
        let bounded = |z: &[f64]| observables(z, n).is_ok_and(|o| o.iter().all(|v| v.abs() <= 4.0));
        if bounded(&x) && bounded(&y) {
            return Some(x);
        }
    }
    None
}

/// Reduced-bracket test at each sample point.
pub fn check_poisson_map(
    subject: PoissonSubject,
    points: &[Vec<f64>],
    setup: &PoissonSetup,
) -> CheckReport {
    let name = match subject {
        PoissonSubject::Soliton => "soliton-rank1",
        PoissonSubject::Decoy => "decoy p1 += p2",
    };
    let mut report = CheckReport::new(
        format!(
            "poisson n={} lambda=({}, {}) [{name}]",
            setup.n, setup.lambdas.0, setup.lambdas.1
        ),
        false,
    );
    for (trial, x) in points.iter().enumerate() {
        match poisson_residual(subject, x, setup) {
            Ok(r) => {
                report.record_abs(trial, r, setup.tol, || {
                    format!("bracket residual {r:.3e} at {x:?}")
                });
            }
            Err(e) => report.record_error(trial, e.to_string()),
        }
    }
    report
}

/// `{tr(E A), tr(F A)}(A) = tr(A [E, F])`: the linear bracket of the leaf
/// `A + zeta I`.
pub fn lie_poisson_linear<T: Scalar>(a: &Matrix<T>, e: &Matrix<T>, f: &Matrix<T>) -> Result<T> {
    a.mul(&e.commutator(f)?)?.trace()
}

/// Bracket of `tr(E S)` and `tr(F S)` on the leaf `A = lambda S`:
/// `lambda^-1 tr(S [E, F])`.
pub fn lie_poisson_bracket<T: Scalar>(
    s: &Matrix<T>,
    e: &Matrix<T>,
    f: &Matrix<T>,
    lambda: &T,
) -> Result<T> {
    if lambda.is_zero() {
        return Err(Error::ParamCollision("lambda = 0".into()));
    }
    Ok(lie_poisson_linear(s, e, f)? / lambda.clone())
}

/// Kronecker product `a (x) b`.
pub fn kron<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (br, bc) = b.shape();
    Matrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)].clone() * b[(i % br, j % bc)].clone()
    })
}

/// Swap `P_12` on `R^n (x) R^n`.
pub fn swap_tensor<T: Scalar>(n: usize) -> Matrix<T> {
    Matrix::from_fn(n * n, n * n, |r, c| {
        let (i, k) = (r / n, r % n);
        let (ip, kp) = (c / n, c % n);
        if i == kp && k == ip {
            T::one()
        } else {
            T::zero()
        }
    })
}

/// `P_12 (A_1 B_2 - B_1 A_2)`, whose `((i,k), (j,l))` entry is the bracket
/// `{A_ij, A_kl}` of the leaf `A + zeta B`.
pub fn leaf_bracket_tensor<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    let n = a.rows();
    let id = Matrix::identity(n);
    let a1b2 = kron(a, &id).mul(&kron(&id, b))?;
    let b1a2 = kron(b, &id).mul(&kron(&id, a))?;
    swap_tensor(n).mul(&a1b2.sub(&b1a2)?)
}

/// Bracket of the linear observables `tr(E A)`, `tr(F A)` expanded from the
/// tensor form entry by entry.
pub fn linear_bracket_from_tensor<T: Scalar>(
    tensor: &Matrix<T>,
    e: &Matrix<T>,
    f: &Matrix<T>,
) -> T {
    let n = e.rows();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let coeff = e[(j, i)].clone() * f[(l, k)].clone();
                    if coeff.is_zero() {
                        continue;
                    }
                    acc = acc + coeff * tensor[(i * n + k, j * n + l)].clone();
                }
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{small_matrix, trial_rng};
    use crate::Rational as Q;

    #[test]
    fn sign_convention_from_tensor_expansion() {
        // n = 2, E = e11, F = e12: [E, F] = e12, so tr(A [E,F]) = A_21.
        let a = Matrix::<Q>::from_i64(&[&[3, -1], &[7, 2]]);
        let e = Matrix::unit(2, 0, 0);
        let f = Matrix::unit(2, 0, 1);
        let tensor = leaf_bracket_tensor(&a, &Matrix::identity(2)).unwrap();
        let expanded = linear_bracket_from_tensor(&tensor, &e, &f);
        assert_eq!(expanded, Q::from_i64(7));
        assert_eq!(lie_poisson_linear(&a, &e, &f).unwrap(), expanded);
    }

    #[test]
    fn tensor_form_matches_trace_formula() {
        let mut rng = trial_rng(41, 0);
        for n in [2, 3] {
            for _ in 0..5 {
                let a: Matrix<Q> = small_matrix(&mut rng, n, n);
                let e: Matrix<Q> = small_matrix(&mut rng, n, n);
                let f: Matrix<Q> = small_matrix(&mut rng, n, n);
                let tensor = leaf_bracket_tensor(&a, &Matrix::identity(n)).unwrap();
                assert_eq!(
                    linear_bracket_from_tensor(&tensor, &e, &f),
                    lie_poisson_linear(&a, &e, &f).unwrap()
                );
            }
        }
    }

    #[test]
    fn antisymmetric_and_commuting_cases() {
        let s = Matrix::<Q>::from_i64(&[&[1, 2], &[0, -1]]);
        let l = Q::from_i64(3);
        let e = Matrix::<Q>::from_i64(&[&[1, 4], &[2, 0]]);
        assert!(lie_poisson_bracket(&s, &e, &e, &l).unwrap().is_zero());
        let d1 = Matrix::diag(&[Q::from_i64(1), Q::from_i64(5)]);
        let d2 = Matrix::diag(&[Q::from_i64(-2), Q::from_i64(3)]);
        assert!(lie_poisson_bracket(&s, &d1, &d2, &l).unwrap().is_zero());
    }

    /// Canonical bracket of `tr(E S)`, `tr(F S)` for one site at `x`.
    fn reduced_s_bracket(x: &[f64], e: &Matrix<f64>, f: &Matrix<f64>) -> f64 {
        let n = x.len() / 2;
        let obs = |m: &Matrix<f64>| {
            let m = m.clone();
            move |y: &[f64]| -> Result<Vec<f64>> {
                let s = Rank1State::from_flat(y)?.involution()?;
                Ok(vec![m.mul(&s.0)?.trace()?])
            }
        };
        let ge = fd_jacobian(obs(e), x, 1e-5).unwrap();
        let gf = fd_jacobian(obs(f), x, 1e-5).unwrap();
        let j = canonical_tensor(n, 1);
        ge.mul(&j).unwrap().mul(&gf.transpose()).unwrap()[(0, 0)]
    }

    #[test]
    fn twice_lambda_level_reproduces_pulled_back_bracket() {
        let lambda = 1.5;
        let e = Matrix::<f64>::from_rows(vec![vec![0.3, -1.0], vec![0.5, 2.0]]).unwrap();
        let f = Matrix::<f64>::from_rows(vec![vec![1.0, 0.2], vec![-0.7, 0.4]]).unwrap();
        let base = Rank1State::<f64>::from_flat(&[0.8, -0.3, 1.1, 0.4]).unwrap();
        for (level, should_match) in [(2.0 * lambda, true), (lambda * lambda, false)] {
            let st = base.normalized_to(&level).unwrap();
            let x = st.to_flat();
            let reduced = reduced_s_bracket(&x, &e, &f);
            let s = st.involution().unwrap().0;
            let lp = lie_poisson_bracket(&s, &e, &f, &lambda).unwrap();
            let matches = (reduced - lp).abs() < 1e-6;
            assert_eq!(matches, should_match, "level {level}: {reduced} vs {lp}");
        }
    }

    #[test]
    fn identity_configuration_is_poisson() {
        // <p1,q2> = <p2,q1> = 0: the map is the identity.
        let setup = PoissonSetup::new(2, (2.0, 1.0));
        let raw = [1.0, 0.0, 1.0, 0.5, 1.0, -2.0, 0.0, 1.0];
        let x = normalize_flat(&raw, 2, &setup.levels()).unwrap();
        assert_eq!(apply_flat(PoissonSubject::Soliton, &x, &setup).unwrap(), x);
        assert!(poisson_residual(PoissonSubject::Soliton, &x, &setup).unwrap() < 1e-8);
    }

    #[test]
    fn soliton_is_poisson_and_decoy_is_not() {
        let setup = PoissonSetup::new(2, (2.0, 1.0));
        let mut rng = trial_rng(42, 0);
        let points: Vec<Vec<f64>> = (0..5)
            .map(|_| random_normalized_point(&mut rng, &setup).unwrap())
            .collect();
        let good = check_poisson_map(PoissonSubject::Soliton, &points, &setup);
        assert!(good.passed_all(), "{}", good.summary());
        let bad = check_poisson_map(PoissonSubject::Decoy, &points, &setup);
        assert!(bad.max_residual > 1e-2, "{}", bad.summary());
    }

    #[test]
    fn lambda_squared_level_is_not_poisson() {
        let mut setup = PoissonSetup::new(2, (2.0, 1.0));
        setup.level = ReductionLevel::LambdaSquared;
        let mut rng = trial_rng(43, 0);
        let points: Vec<Vec<f64>> = (0..3)
            .map(|_| random_normalized_point(&mut rng, &setup).unwrap())
            .collect();
        let r = check_poisson_map(PoissonSubject::Soliton, &points, &setup);
        assert!(!r.passed_all());
    }
}
