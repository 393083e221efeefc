use crate::error::{Error, Result};
use crate::matkit::Matrix;
use crate::report::CheckReport;
use crate::sampling::TrialRng;
use crate::scalar::Scalar;
use crate::ybcore::{check_lax_refactorization, LaxAssignment, LaxMap, SiteTuple, TwoSiteMap};

/// Adler's map on `X = R`:
///
/// ```text
/// x~ = y - (lambda - mu) / (x + y)
/// y~ = x - (mu - lambda) / (x + y)
/// ```
#[derive(Clone, Copy, Debug, Default)]
pub struct AdlerMap;

impl AdlerMap {
    pub fn interact<T: Scalar>(&self, x: &T, lambda: &T, y: &T, mu: &T) -> Result<(T, T)> {
        let s = x.clone() + y.clone();
        if s.is_zero() || s.is_negligible(&(x.abs() + y.abs())) {
            return Err(Error::SingularDenominator);
        }
        let d = (lambda.clone() - mu.clone()) / s;
        Ok((y.clone() - d.clone(), x.clone() + d))
    }
}

impl<T: Scalar> TwoSiteMap<T> for AdlerMap {
    type Value = T;

    fn apply(&self, x: &T, lambda: &T, y: &T, mu: &T) -> Result<(T, T)> {
        self.interact(x, lambda, y, mu)
    }

    fn name(&self) -> String {
        "adler".into()
    }
}

impl<T: Scalar> LaxMap<T> for AdlerMap {
    fn lax(&self, x: &T, lambda: &T, zeta: &T) -> Result<Matrix<T>> {
        Ok(adler_lax(x, lambda, zeta))
    }

    fn lax_pencil(&self, x: &T, lambda: &T) -> Result<Option<(Matrix<T>, Matrix<T>)>> {
        let b = Matrix::from_vec(2, 2, vec![T::zero(), -T::one(), T::zero(), T::zero()])?;
        Ok(Some((adler_lax(x, lambda, &T::zero()), b)))
    }
}

/// `L(x, lambda; zeta) = [[x, x^2 + lambda - zeta], [1, x]]`.
pub fn adler_lax<T: Scalar>(x: &T, lambda: &T, zeta: &T) -> Matrix<T> {
    let b = x.clone() * x.clone() + lambda.clone() - zeta.clone();
    Matrix::from_vec(2, 2, vec![x.clone(), b, T::one(), x.clone()]).expect("2x2")
}

/// Refactorization `L(x,lambda) L(y,mu) = L(y~,mu) L(x~,lambda)` for the
/// printed assignment versus the swapped one. Whichever holds is settled by
/// the first trial and noted in the report; later trials must agree.
pub fn check_adler_refactorization<T: Scalar>(
    trials: usize,
    seed: u64,
    zetas: &[T],
    tol: f64,
    gen: impl FnMut(&mut TrialRng) -> SiteTuple<T, T>,
) -> CheckReport {
    check_lax_refactorization(&AdlerMap, trials, seed, zetas, tol, None, gen)
}

/// The assignment recorded by [`check_adler_refactorization`], if any.
pub fn settled_assignment(report: &CheckReport) -> Option<LaxAssignment> {
    report
        .notes
        .iter()
        .find_map(|n| match n.strip_prefix("assignment: ")? {
            "printed" => Some(LaxAssignment::Printed),
            "swapped" => Some(LaxAssignment::Swapped),
            "both" => Some(LaxAssignment::Both),
            "neither" => Some(LaxAssignment::Neither),
            _ => None,
        })
}
