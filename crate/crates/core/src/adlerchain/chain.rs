use rand::Rng;
use serde::{Deserialize, Serialize};

use super::map::AdlerMap;
use crate::error::{Error, Result};
use crate::matkit::{fd_jacobian, Matrix, Vector};
use crate::report::CheckReport;
use crate::sampling::uniform;
use crate::scalar::Scalar;
use crate::ybcore::{monodromy_char_polys, transfer_map, SiteTuple};

/// Periodic dressing-chain point `(f_i, lambda_i)`, `f_{N+1} = f_1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainState<T> {
    pub f: Vec<T>,
    pub lambda: Vec<T>,
}

impl<T: Scalar> ChainState<T> {
    pub fn new(f: Vec<T>, lambda: Vec<T>) -> Result<Self> {
        if f.len() != lambda.len() || f.is_empty() {
            return Err(Error::InvalidInput(format!(
                "{} values but {} parameters",
                f.len(),
                lambda.len()
            )));
        }
        Ok(Self { f, lambda })
    }

    pub fn period(&self) -> usize {
        self.f.len()
    }

    /// The same point as a site tuple of Adler scalars.
    pub fn to_tuple(&self) -> SiteTuple<T, T> {
        SiteTuple::from_parts(self.f.clone(), self.lambda.clone()).expect("lengths checked")
    }

    pub fn from_tuple(t: &SiteTuple<T, T>) -> Self {
        Self {
            f: t.values().cloned().collect(),
            lambda: t.params(),
        }
    }
}

/// Constant Poisson tensor of the chain in `f` coordinates, with the data
/// it was derived from: `g = M f` (`g_i = f_i + f_{i+1}`) and the
/// `g`-bracket `{g_i, g_{i+1}} = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FBracket<T> {
    pub j_f: Matrix<T>,
    pub m: Matrix<T>,
    pub j_g: Matrix<T>,
}

impl<T: Scalar> FBracket<T> {
    /// `max |M J_f M^T - J_g|`.
    pub fn transformed_residual(&self) -> Result<T> {
        self.m
            .mul(&self.j_f)?
            .mul(&self.m.transpose())?
            .max_abs_diff(&self.j_g)
    }
}

fn require_odd(n: usize) -> Result<()> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::EvenPeriod(n));
    }
    Ok(())
}

/// `J_g` with `+1` at `(i, i+1)` and `-1` at `(i+1, i)`, cyclically.
pub fn g_bracket<T: Scalar>(n: usize) -> Matrix<T> {
    let mut j = Matrix::zeros(n, n);
    for i in 0..n {
        j.set(i, (i + 1) % n, T::one());
        j.set((i + 1) % n, i, -T::one());
    }
    j
}

/// `J_f = M^-1 J_g M^-T`. `M` is invertible exactly when `N` is odd.
pub fn f_bracket<T: Scalar>(n: usize) -> Result<FBracket<T>> {
    require_odd(n)?;
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        m.set(i, i, T::one());
        m.set(i, (i + 1) % n, T::one());
    }
    let j_g = g_bracket(n);
    let mi = m.inverse().map_err(|_| Error::EvenPeriod(n))?;
    let j_f = mi.mul(&j_g)?.mul(&mi.transpose())?;
    Ok(FBracket { j_f, m, j_g })
}

/// The sign rule `{f_i, f_j} = (-1)^((j - i + 1) mod N)` for `i < j`,
/// transcribed literally. Disagrees with [`f_bracket`] (e.g. `{f_1, f_3}` for
/// `N = 3`); kept as a reference and decoy.
pub fn printed_f_bracket<T: Scalar>(n: usize) -> Result<Matrix<T>> {
    require_odd(n)?;
    let mut j = Matrix::zeros(n, n);
    for i in 0..n {
        for k in i + 1..n {
            let v = if ((k - i + 1) % n) % 2 == 0 {
                T::one()
            } else {
                -T::one()
            };
            j.set(k, i, -v.clone());
            j.set(i, k, v);
        }
    }
    Ok(j)
}

/// `H = sum (f_i^3 / 3 + lambda_i f_i)`.
pub fn hamiltonian<T: Scalar>(s: &ChainState<T>) -> T {
    let third = T::from_ratio(1, 3);
    s.f.iter().zip(&s.lambda).fold(T::zero(), |acc, (f, l)| {
        acc + third.clone() * f.clone() * f.clone() * f.clone() + l.clone() * f.clone()
    })
}

/// `grad H = (f_i^2 + lambda_i)`.
pub fn hamiltonian_gradient<T: Scalar>(s: &ChainState<T>) -> Vector<T> {
    Vector(
        s.f.iter()
            .zip(&s.lambda)
            .map(|(f, l)| f.clone() * f.clone() + l.clone())
            .collect(),
    )
}

fn field_with<T: Scalar>(j_f: &Matrix<T>, s: &ChainState<T>) -> Result<Vec<T>> {
    let v = j_f.mul_vec(&hamiltonian_gradient(s))?;
    Ok(v.0.into_iter().map(|x| -x).collect())
}

/// `f' = {H, f} = -J_f grad H`; with this orientation
/// `(f_i + f_{i+1})' = f_i^2 - f_{i+1}^2 + lambda_i - lambda_{i+1}`.
pub fn chain_vector_field<T: Scalar>(s: &ChainState<T>) -> Result<Vec<T>> {
    let b = f_bracket::<T>(s.period())?;
    field_with(&b.j_f, s)
}

/// Residuals of the pairwise-sum equations at `s`, one per `i`.
pub fn dressing_chain_residuals<T: Scalar>(s: &ChainState<T>, fdot: &[T]) -> Vec<T> {
    let n = s.period();
    (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            let lhs = fdot[i].clone() + fdot[j].clone();
            let rhs = s.f[i].clone() * s.f[i].clone() - s.f[j].clone() * s.f[j].clone()
                + s.lambda[i].clone()
                - s.lambda[j].clone();
            lhs - rhs
        })
        .collect()
}

/// Ascending char-poly coefficients of `prod_i L(f_i, lambda_i; zeta)` at
/// each sample, concatenated.
pub fn chain_invariants<T: Scalar>(s: &ChainState<T>, zetas: &[T]) -> Result<Vec<T>> {
    let t = s.to_tuple();
    Ok(monodromy_char_polys(&AdlerMap, &t, zetas)?
        .into_iter()
        .flatten()
        .collect())
}

/// Monodromy spectrum of an Adler tuple before and after every `T_i`.
pub fn check_transfer_monodromy<T: Scalar>(
    t: &SiteTuple<T, T>,
    zetas: &[T],
    tol: f64,
) -> CheckReport {
    let mut report = CheckReport::for_scalar::<T>(format!("monodromy N={} [adler]", t.len()));
    let before = match chain_invariants(&ChainState::from_tuple(t), zetas) {
        Ok(b) => b,
        Err(e) => {
            report.record_error(0, e.to_string());
            return report;
        }
    };
    let scale = T::max_abs(&before);
    for i in 1..=t.len() {
        let after = transfer_map(&AdlerMap, i, t)
            .and_then(|u| chain_invariants(&ChainState::from_tuple(&u), zetas));
        match after {
            Ok(after) => {
                let diff: Vec<T> = after
                    .iter()
                    .zip(&before)
                    .map(|(a, b)| a.clone() - b.clone())
                    .collect();
                let dev = T::max_abs(&diff);
                report.record(i, &dev, &scale, tol, || {
                    format!("T{i} changed the spectrum by {dev}")
                });
            }
            Err(e) => report.record_error(i, format!("T{i}: {e}")),
        }
    }
    report
}

/// State norm above which an integration step is rejected.
pub const OVERFLOW_GUARD: f64 = 1e8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub hamiltonian: Vec<f64>,
    /// Monodromy char-poly coefficients per sample time.
    pub invariants: Vec<Vec<f64>>,
    pub zetas: Vec<f64>,
    pub h_drift: f64,
    pub invariant_drift: f64,
}

/// Classical RK4 with fixed step `dt` up to `t_end`; every step is recorded.
pub fn integrate_chain(
    s: &ChainState<f64>,
    dt: f64,
    t_end: f64,
    zetas: &[f64],
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite() && t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "bad time grid dt={dt}, t_end={t_end}"
        )));
    }
    let j_f = f_bracket::<f64>(s.period())?.j_f;
    let steps = (t_end / dt).round() as usize;
    let field = |f: &[f64]| -> Result<Vec<f64>> {
        field_with(
            &j_f,
            &ChainState {
                f: f.to_vec(),
                lambda: s.lambda.clone(),
            },
        )
    };
    let axpy = |x: &[f64], a: f64, k: &[f64]| -> Vec<f64> {
        x.iter().zip(k).map(|(x, k)| x + a * k).collect()
    };

    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        hamiltonian: Vec::with_capacity(steps + 1),
        invariants: Vec::with_capacity(steps + 1),
        zetas: zetas.to_vec(),
        h_drift: 0.0,
        invariant_drift: 0.0,
    };
    let push = |traj: &mut Trajectory, t: f64, f: Vec<f64>| -> Result<()> {
        let st = ChainState {
            f,
            lambda: s.lambda.clone(),
        };
        let h = hamiltonian(&st);
        let inv = chain_invariants(&st, zetas)?;
        if let (Some(h0), Some(i0)) = (traj.hamiltonian.first(), traj.invariants.first()) {
            traj.h_drift = traj.h_drift.max((h - h0).abs());
            for (a, b) in inv.iter().zip(i0) {
                traj.invariant_drift = traj.invariant_drift.max((a - b).abs());
            }
        }
        traj.times.push(t);
        traj.hamiltonian.push(h);
        traj.invariants.push(inv);
        traj.states.push(st.f);
        Ok(())
    };

    let mut f = s.f.clone();
    push(&mut traj, 0.0, f.clone())?;
    for step in 1..=steps {
        let k1 = field(&f)?;
        let k2 = field(&axpy(&f, dt / 2.0, &k1))?;
        let k3 = field(&axpy(&f, dt / 2.0, &k2))?;
        let k4 = field(&axpy(&f, dt, &k3))?;
        for i in 0..f.len() {
            f[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t = step as f64 * dt;
        let norm = f.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm <= OVERFLOW_GUARD) {
            return Err(Error::StepRejected { step, t, norm });
        }
        push(&mut traj, t, f.clone())?;
    }
    Ok(traj)
}

/// Which transfer map family is tested against `J_f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransferSubject {
    Adler,
    /// `T_i` followed by `f_1 <- 2 f_1`. Does not preserve `J_f`.
    Decoy,
}

fn transfer_flat(
    subject: TransferSubject,
    i: usize,
    f: &[f64],
    lambda: &[f64],
) -> Result<Vec<f64>> {
    let t = SiteTuple::from_parts(f.to_vec(), lambda.to_vec())?;
    let mut out: Vec<f64> = transfer_map(&AdlerMap, i, &t)?.values().copied().collect();
    if subject == TransferSubject::Decoy {
        out[0] *= 2.0;
    }
    Ok(out)
}

/// `max |dT_i J_f dT_i^T - J_f|` for one transfer map.
pub fn transfer_poisson_residual(
    subject: TransferSubject,
    i: usize,
    s: &ChainState<f64>,
    j_f: &Matrix<f64>,
    h: f64,
) -> Result<f64> {
    let d = fd_jacobian(|f: &[f64]| transfer_flat(subject, i, f, &s.lambda), &s.f, h)?;
    d.mul(j_f)?.mul(&d.transpose())?.max_abs_diff(j_f)
}

/// Each transfer map `T_1 .. T_N` must preserve the chain bracket `J_f`.
pub fn check_adler_transfer_poisson(
    subject: TransferSubject,
    points: &[ChainState<f64>],
    h: f64,
    tol: f64,
) -> CheckReport {
    let label = match subject {
        TransferSubject::Adler => "adler",
        TransferSubject::Decoy => "decoy f1 *= 2",
    };
    let n = points.first().map_or(0, ChainState::period);
    let mut report = CheckReport::new(format!("transfer-poisson N={n} [{label}]"), false);
    let j_f = match f_bracket::<f64>(n) {
        Ok(b) => b.j_f,
        Err(e) => {
            report.record_error(0, e.to_string());
            return report;
        }
    };
    for (trial, s) in points.iter().enumerate() {
        for i in 1..=s.period() {
            match transfer_poisson_residual(subject, i, s, &j_f, h) {
                Ok(r) => {
                    report.record_abs(trial, r, tol, || {
                        format!("T{i}: residual {r:.3e} at f={:?}", s.f)
                    });
                }
                Err(e) => report.record_error(trial, format!("T{i}: {e}")),
            }
        }
    }
    report
}

/// Random float chain point where every transfer map is defined and has a
/// moderate Jacobian (so finite differences are well conditioned).
pub fn random_transfer_point(
    rng: &mut impl Rng,
    lambda: &[f64],
    h: f64,
) -> Option<ChainState<f64>> {
    let n = lambda.len();
    'draw: for _ in 0..1000 {
        let f: Vec<f64> = (0..n).map(|_| uniform(rng, -2.0, 2.0)).collect();
        for i in 1..=n {
            let Ok(d) = fd_jacobian(
                |x: &[f64]| transfer_flat(TransferSubject::Adler, i, x, lambda),
                &f,
                h,
            ) else {
                continue 'draw;
            };
            if d.max_abs() > 10.0 {
                continue 'draw;
            }
        }
        return Some(ChainState {
            f,
            lambda: lambda.to_vec(),
        });
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{small_rational, small_rational_or_zero, spectral_samples, trial_rng};
    use crate::Rational as Q;

    fn qm(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_i64(rows)
    }

    /// `f_i = 1/2 sum_k (-1)^k g_{i+k}`, expanded through the g-bracket.
    fn oracle_f_bracket(n: usize) -> Matrix<Q> {
        let half = Q::from_ratio(1, 2);
        let coeff = |i: usize| -> Vec<Q> {
            let mut c = vec![Q::from_i64(0); n];
            for k in 0..n {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                c[(i + k) % n] = half.clone() * Q::from_i64(sign);
            }
            c
        };
        let jg = g_bracket::<Q>(n);
        Matrix::from_fn(n, n, |i, j| {
            let (a, b) = (coeff(i), coeff(j));
            let mut acc = Q::from_i64(0);
            for u in 0..n {
                for v in 0..n {
                    acc += a[u].clone() * b[v].clone() * jg[(u, v)].clone();
                }
            }
            acc
        })
    }

    #[test]
    fn derived_bracket_n3() {
        let b = f_bracket::<Q>(3).unwrap();
        assert_eq!(b.j_f, qm(&[&[0, 1, -1], &[-1, 0, 1], &[1, -1, 0]]));
        assert_eq!(b.j_f, oracle_f_bracket(3));
        assert!(b.transformed_residual().unwrap().is_zero());
    }

    #[test]
    fn derived_bracket_properties() {
        for n in [3, 5, 7, 9] {
            let b = f_bracket::<Q>(n).unwrap();
            assert_eq!(b.j_f, oracle_f_bracket(n));
            assert_eq!(b.j_f.transpose(), b.j_f.scale(&Q::from_i64(-1)));
            assert!(b.transformed_residual().unwrap().is_zero());
            let ones = Vector(vec![Q::from_i64(1); n]);
            assert!(b.j_f.mul_vec(&ones).unwrap().0.iter().all(|x| x.is_zero()));
            // cyclic shift invariance
            let c = Matrix::from_fn(n, n, |i, j| {
                if j == (i + 1) % n {
                    Q::from_i64(1)
                } else {
                    Q::from_i64(0)
                }
            });
            let shifted = c.mul(&b.j_f).unwrap().mul(&c.transpose()).unwrap();
            assert_eq!(shifted, b.j_f);
        }
    }

    #[test]
    fn even_period_rejected() {
        assert_eq!(f_bracket::<Q>(4).unwrap_err(), Error::EvenPeriod(4));
        let s = ChainState::new(vec![1.0; 4], vec![0.0; 4]).unwrap();
        assert_eq!(chain_vector_field(&s).unwrap_err(), Error::EvenPeriod(4));
    }

    #[test]
    fn printed_rule_differs_from_derived() {
        let printed = printed_f_bracket::<Q>(3).unwrap();
        assert_eq!(printed[(0, 2)], Q::from_i64(1));
        assert_ne!(printed, f_bracket::<Q>(3).unwrap().j_f);
    }

    #[test]
    fn stationary_point() {
        let s = ChainState::new(vec![Q::from_i64(1); 3], vec![Q::from_i64(0); 3]).unwrap();
        assert!(chain_vector_field(&s).unwrap().iter().all(|x| x.is_zero()));
    }

    #[test]
    fn vector_field_solves_pairwise_equations() {
        let mut rng = trial_rng(51, 0);
        for n in [3, 5, 7] {
            for _ in 0..20 {
                let s = ChainState::<Q>::new(
                    (0..n).map(|_| small_rational_or_zero(&mut rng)).collect(),
                    (0..n).map(|_| small_rational(&mut rng)).collect(),
                )
                .unwrap();
                let fdot = chain_vector_field(&s).unwrap();
                assert!(dressing_chain_residuals(&s, &fdot)
                    .iter()
                    .all(|r| r.is_zero()));
                let grad = hamiltonian_gradient(&s);
                assert!(grad.pairing(&Vector(fdot)).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn stationary_trajectory_is_constant() {
        let s = ChainState::new(vec![1.0; 3], vec![0.0; 3]).unwrap();
        let tr = integrate_chain(&s, 1e-2, 1.0, &spectral_samples(4)).unwrap();
        assert_eq!(tr.states.len(), 101);
        assert!(tr.states.iter().all(|f| f == &s.f));
        assert_eq!(tr.h_drift, 0.0);
    }

    #[test]
    fn rk4_conserves_h_and_monodromy() {
        let s = ChainState::new(vec![2.0, -1.0, 1.0], vec![1.0, 2.0, -3.0]).unwrap();
        let zetas = spectral_samples(4);
        let a = integrate_chain(&s, 1e-3, 1.0, &zetas).unwrap();
        let b = integrate_chain(&s, 5e-4, 1.0, &zetas).unwrap();
        assert!(a.h_drift < 1e-8, "{}", a.h_drift);
        assert!(a.invariant_drift < 1e-7, "{}", a.invariant_drift);
        let ratio = a.h_drift / b.h_drift;
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn blow_up_is_rejected() {
        let s = ChainState::new(vec![50.0, -40.0, 30.0], vec![0.0; 3]).unwrap();
        assert!(matches!(
            integrate_chain(&s, 0.1, 10.0, &[]),
            Err(Error::StepRejected { .. })
        ));
    }

    #[test]
    fn transfer_maps_preserve_bracket() {
        let mut rng = trial_rng(52, 0);
        for lambda in [vec![1.0, -2.0, 0.5], vec![1.0, -2.0, 0.5, 3.0, -1.5]] {
            let pts: Vec<_> = (0..3)
                .map(|_| random_transfer_point(&mut rng, &lambda, 1e-5).unwrap())
                .collect();
            let good = check_adler_transfer_poisson(TransferSubject::Adler, &pts, 1e-5, 1e-6);
            assert!(good.passed_all(), "{}", good.summary());
            let bad = check_adler_transfer_poisson(TransferSubject::Decoy, &pts, 1e-5, 1e-6);
            assert!(!bad.passed_all());
        }
    }

    #[test]
    fn transfer_maps_preserve_chain_monodromy() {
        let t = ChainState::<Q>::new(
            vec![Q::from_i64(2), Q::from_ratio(-1, 3), Q::from_i64(5)],
            vec![Q::from_i64(1), Q::from_i64(4), Q::from_ratio(-7, 2)],
        )
        .unwrap()
        .to_tuple();
        let r = check_transfer_monodromy(&t, &spectral_samples::<Q>(7), 0.0);
        assert!(r.passed_all(), "{}", r.summary());
    }

    #[test]
    fn equal_parameters_give_cyclic_shift() {
        let s = ChainState::new(vec![0.3, -1.2, 0.7], vec![2.0; 3]).unwrap();
        let j_f = f_bracket::<f64>(3).unwrap().j_f;
        let r = transfer_poisson_residual(TransferSubject::Adler, 1, &s, &j_f, 1e-5).unwrap();
        assert!(r < 1e-9);
    }
}
