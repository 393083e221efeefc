use serde::{Deserialize, Serialize};

use super::state::ProjectorState;
use crate::error::{Error, Result};
use crate::matkit::Matrix;
use crate::report::CheckReport;
use crate::scalar::Scalar;
use crate::ybcore::{
    lift_two_site, monodromy_char_polys, transfer_map, LaxMap, SiteTuple, SiteValue,
};

/// Char-poly coefficients of the monodromy matrix at each spectral sample,
/// plus the linear integral `J = sum lambda_i P_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralInvariants<T> {
    pub zetas: Vec<T>,
    /// `coefficients[s]` are the ascending coefficients of
    /// `det(M(zeta_s) - eta I)`, `n + 1` per sample.
    pub coefficients: Vec<Vec<T>>,
    pub j: Matrix<T>,
}

impl<T: Scalar> SpectralInvariants<T> {
    /// Largest difference in any coefficient or entry of `J`.
    pub fn deviation(&self, other: &Self) -> Result<T> {
        if self.zetas != other.zetas {
            return Err(Error::InvalidInput("different spectral samples".into()));
        }
        let mut dev = self.j.max_abs_diff(&other.j)?;
        for (a, b) in self.coefficients.iter().zip(&other.coefficients) {
            for (x, y) in a.iter().zip(b) {
                let d = (x.clone() - y.clone()).abs();
                if d > dev {
                    dev = d;
                }
            }
        }
        Ok(dev)
    }

    pub fn magnitude(&self) -> T {
        let mut m = self.j.max_abs();
        for c in &self.coefficients {
            let cm = T::max_abs(c);
            if cm > m {
                m = cm;
            }
        }
        m
    }
}

/// `J = sum_i lambda_i P_i`.
pub fn integral_j<T: Scalar, S: ProjectorState<T>>(t: &SiteTuple<S, T>) -> Result<Matrix<T>> {
    let n = t.sites()[0].value.dim();
    t.sites().iter().try_fold(Matrix::zeros(n, n), |acc, s| {
        acc.add(&s.value.projector()?.scale(&s.param))
    })
}

pub fn spectral_invariants<T, M>(
    map: &M,
    t: &SiteTuple<M::Value, T>,
    zetas: &[T],
) -> Result<SpectralInvariants<T>>
where
    T: Scalar,
    M: LaxMap<T>,
    M::Value: ProjectorState<T>,
{
    let coefficients = monodromy_char_polys(map, t, zetas)?;
    Ok(SpectralInvariants {
        zetas: zetas.to_vec(),
        coefficients,
        j: integral_j(t)?,
    })
}

/// Compares the invariants of `t` with those of `f(t)` and records one trial.
fn record_invariance<T, M>(
    report: &mut CheckReport,
    trial: usize,
    map: &M,
    before: &SpectralInvariants<T>,
    after: Result<SiteTuple<M::Value, T>>,
    tol: f64,
    label: &str,
) where
    T: Scalar,
    M: LaxMap<T>,
    M::Value: ProjectorState<T>,
{
    let inv = after.and_then(|a| spectral_invariants(map, &a, &before.zetas));
    match inv.and_then(|inv| Ok((before.deviation(&inv)?, before.magnitude()))) {
        Ok((dev, scale)) => {
            report.record(trial, &dev, &scale, tol, || {
                format!("invariants changed under {label} by {dev}")
            });
        }
        Err(e) => report.record_error(trial, format!("{label}: {e}")),
    }
}

/// Monodromy spectrum and `J` must be unchanged by every transfer map `T_i`.
pub fn check_monodromy_invariance<T, M>(
    map: &M,
    t: &SiteTuple<M::Value, T>,
    zetas: &[T],
    tol: f64,
) -> CheckReport
where
    T: Scalar,
    M: LaxMap<T>,
    M::Value: ProjectorState<T>,
{
    let mut report =
        CheckReport::for_scalar::<T>(format!("monodromy N={} [{}]", t.len(), map.name()));
    let before = match spectral_invariants(map, t, zetas) {
        Ok(b) => b,
        Err(e) => {
            report.record_error(0, e.to_string());
            return report;
        }
    };
    for i in 1..=t.len() {
        record_invariance(
            &mut report,
            i,
            map,
            &before,
            transfer_map(map, i, t),
            tol,
            &format!("T{i}"),
        );
    }
    report
}

/// A non-transfer scramble: `R_12`, then site 3 is overwritten by a
/// perturbed copy. Breaks the invariants.
pub fn scramble<T, M>(map: &M, t: &SiteTuple<M::Value, T>) -> Result<SiteTuple<M::Value, T>>
where
    T: Scalar,
    M: LaxMap<T>,
{
    if t.len() < 3 {
        return Err(Error::InvalidInput("scramble needs N >= 3".into()));
    }
    let s = lift_two_site(map, 1, 2, t)?;
    let v = s.site(3).value.perturbed();
    Ok(s.with_value(3, v))
}

/// Decoy variant of [`check_monodromy_invariance`]: must fail.
pub fn check_scramble_invariance<T, M>(
    map: &M,
    t: &SiteTuple<M::Value, T>,
    zetas: &[T],
    tol: f64,
) -> CheckReport
where
    T: Scalar,
    M: LaxMap<T>,
    M::Value: ProjectorState<T>,
{
    let mut report = CheckReport::for_scalar::<T>(format!("monodromy decoy [{}]", map.name()));
    match spectral_invariants(map, t, zetas) {
        Ok(before) => record_invariance(
            &mut report,
            0,
            map,
            &before,
            scramble(map, t),
            tol,
            "scramble",
        ),
        Err(e) => report.record_error(0, e.to_string()),
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::{char_poly, poly_eval};
    use crate::sampling::{spectral_samples, trial_rng};
    use crate::scalar::powi;
    use crate::solitonmap::{Rank1Map, Rank1State};
    use crate::ybcore::{monodromy, Site};
    use crate::Rational as Q;

    #[test]
    fn single_site_invariants() {
        let s = Rank1State::<Q>::from_i64(&[1, 2, 0], &[2, 1, 1]).unwrap();
        let l = Q::from_ratio(3, 2);
        let t = SiteTuple::new(vec![Site::new(s.clone(), l.clone())]).unwrap();
        let z = Q::from_i64(4);
        let m = monodromy(&Rank1Map, &t, &z).unwrap();
        assert_eq!(m, super::super::lax_matrix(&s, &l, &z).unwrap());
        let inv = spectral_invariants(&Rank1Map, &t, &[z.clone()]).unwrap();
        assert_eq!(inv.j, s.projector().unwrap().scale(&l));
        // det(M - eta I) = (z - l - eta)^2 (z + l - eta) for n = 3, k = 1
        for eta in [Q::from_i64(0), Q::from_i64(1), Q::from_ratio(-5, 7)] {
            let expected = powi(&(z.clone() - l.clone() - eta.clone()), 2)
                * (z.clone() + l.clone() - eta.clone());
            assert_eq!(poly_eval(&inv.coefficients[0], &eta), expected);
        }
    }

    #[test]
    fn identical_sites_give_power() {
        let s = Rank1State::<Q>::from_i64(&[1, 1], &[2, 1]).unwrap();
        let l = Q::from_i64(2);
        let t = SiteTuple::new(vec![Site::new(s.clone(), l.clone()); 3]).unwrap();
        let z = Q::from_i64(5);
        let m = monodromy(&Rank1Map, &t, &z).unwrap();
        let single = super::super::lax_matrix(&s, &l, &z).unwrap();
        assert_eq!(m, single.pow(3).unwrap());
        // eigenvalues (z - l)^3 = 27 and (z + l)^3 = 343
        let c = char_poly(&m).unwrap();
        assert!(poly_eval(&c, &Q::from_i64(27)).is_zero());
        assert!(poly_eval(&c, &Q::from_i64(343)).is_zero());
    }

    #[test]
    fn two_site_transfer_preserves_spectrum() {
        let mut rng = trial_rng(31, 0);
        let t = SiteTuple::new(vec![
            Site::new(Rank1State::<Q>::random(&mut rng, 2), Q::from_i64(3)),
            Site::new(Rank1State::<Q>::random(&mut rng, 2), Q::from_ratio(1, 2)),
        ])
        .unwrap();
        let zetas = spectral_samples::<Q>(5);
        let r = check_monodromy_invariance(&Rank1Map, &t, &zetas, 0.0);
        assert!(r.passed_all(), "{}", r.summary());
        assert_eq!(r.exact, Some(true));
    }

    #[test]
    fn scramble_is_detected() {
        let mut rng = trial_rng(32, 0);
        let t = SiteTuple::new(
            [Q::from_i64(3), Q::from_ratio(1, 2), Q::from_i64(-2)]
                .into_iter()
                .map(|l| Site::new(Rank1State::<Q>::random(&mut rng, 2), l))
                .collect(),
        )
        .unwrap();
        let zetas = spectral_samples::<Q>(7);
        let r = check_scramble_invariance(&Rank1Map, &t, &zetas, 0.0);
        assert!(!r.passed_all());
    }
}
