use super::state::{primitive_columns, ProjectorState, Rank1State, SubspaceState};
use crate::error::{Error, Result};
use crate::matkit::Matrix;
use crate::scalar::Scalar;
use crate::ybcore::{LaxMap, TwoSiteMap};

/// `L(P, lambda; zeta) = zeta I + lambda S = (zeta - lambda) I + 2 lambda P`.
pub fn lax_matrix<T: Scalar, S: ProjectorState<T>>(
    s: &S,
    lambda: &T,
    zeta: &T,
) -> Result<Matrix<T>> {
    let p = s.projector()?;
    lax_from_projector(&p, lambda, zeta)
}

/// `(lambda (2P - I), I)`: the Lax matrix is `A + zeta B`.
pub fn lax_pencil<T: Scalar, S: ProjectorState<T>>(
    s: &S,
    lambda: &T,
) -> Result<(Matrix<T>, Matrix<T>)> {
    let p = s.projector()?;
    let id = Matrix::identity(p.rows());
    Ok((lax_from_projector(&p, lambda, &T::zero())?, id))
}

pub fn lax_from_projector<T: Scalar>(p: &Matrix<T>, lambda: &T, zeta: &T) -> Result<Matrix<T>> {
    Matrix::identity(p.rows())
        .scale(&(zeta.clone() - lambda.clone()))
        .add(&p.scale(&(T::two() * lambda.clone())))
}

fn require_distinct<T: Scalar>(a: &T, b: &T, what: &str) -> Result<T> {
    let d = a.clone() - b.clone();
    let scale = a.abs() + b.abs();
    if d.is_zero() || d.is_negligible(&scale) {
        return Err(Error::ParamCollision(format!("{what}: {a} vs {b}")));
    }
    Ok(d)
}

/// Matrix-KdV soliton interaction map on rank-1 states `(p, q)`:
///
/// ```text
/// p1~ = p1 + 2 l2 <p1,q2> / ((l1 - l2) <p2,q2>) p2
/// q1~ = q1 + 2 l2 <p2,q1> / ((l1 - l2) <p2,q2>) q2
/// p2~ = p2 + 2 l1 <p2,q1> / ((l2 - l1) <p1,q1>) p1
/// q2~ = q2 + 2 l1 <p1,q2> / ((l2 - l1) <p1,q1>) q1
/// ```
///
/// Inputs are not normalized; the formulas are covariant under rescaling.
#[derive(Clone, Copy, Debug, Default)]
pub struct Rank1Map;

impl Rank1Map {
    pub fn interact<T: Scalar>(
        &self,
        s1: &Rank1State<T>,
        l1: &T,
        s2: &Rank1State<T>,
        l2: &T,
    ) -> Result<(Rank1State<T>, Rank1State<T>)> {
        let d12 = require_distinct(l1, l2, "lambda_1 = lambda_2")?;
        let c1 = s1.checked_pairing()?;
        let c2 = s2.checked_pairing()?;
        let p1q2 = s1.p.pairing(&s2.q)?;
        let p2q1 = s2.p.pairing(&s1.q)?;
        let two = T::two();

        let a = two.clone() * l2.clone() / (d12.clone() * c2);
        let b = two * l1.clone() / (-d12 * c1);
        let out1 = Rank1State {
            p: s1.p.axpy(&(a.clone() * p1q2.clone()), &s2.p),
            q: s1.q.axpy(&(a * p2q1.clone()), &s2.q),
        };
        let out2 = Rank1State {
            p: s2.p.axpy(&(b.clone() * p2q1), &s1.p),
            q: s2.q.axpy(&(b * p1q2), &s1.q),
        };
        out1.checked_pairing()?;
        out2.checked_pairing()?;
        Ok((out1, out2))
    }
}

impl<T: Scalar> TwoSiteMap<T> for Rank1Map {
    type Value = Rank1State<T>;

    fn apply(
        &self,
        x: &Rank1State<T>,
        lambda: &T,
        y: &Rank1State<T>,
        mu: &T,
    ) -> Result<(Rank1State<T>, Rank1State<T>)> {
        self.interact(x, lambda, y, mu)
    }

    fn name(&self) -> String {
        "soliton-rank1".into()
    }
}

impl<T: Scalar> LaxMap<T> for Rank1Map {
    fn lax(&self, x: &Rank1State<T>, lambda: &T, zeta: &T) -> Result<Matrix<T>> {
        lax_matrix(x, lambda, zeta)
    }

    fn lax_pencil(&self, x: &Rank1State<T>, lambda: &T) -> Result<Option<(Matrix<T>, Matrix<T>)>> {
        lax_pencil(x, lambda).map(Some)
    }
}

/// The same interaction on rank-k projectors, acting on kernel and image
/// bases:
///
/// ```text
/// K1~ = (I - 2 l2/(l1 + l2) P2) K1     L1~ = (I + 2 l2/(l1 - l2) P2) L1
/// K2~ = (I - 2 l1/(l1 + l2) P1) K2     L2~ = (I + 2 l1/(l2 - l1) P1) L2
/// ```
#[derive(Clone, Copy, Debug, Default)]
pub struct RankKMap;

impl RankKMap {
    pub fn interact<T: Scalar>(
        &self,
        s1: &SubspaceState<T>,
        l1: &T,
        s2: &SubspaceState<T>,
        l2: &T,
    ) -> Result<(SubspaceState<T>, SubspaceState<T>)> {
        let diff = require_distinct(l1, l2, "lambda_1 = lambda_2")?;
        let sum = require_distinct(l1, &-l2.clone(), "lambda_1 = -lambda_2")?;
        let p1 = s1.projector()?;
        let p2 = s2.projector()?;
        let n = p1.rows();
        let id = Matrix::<T>::identity(n);
        let two = T::two();
        let factor = |p: &Matrix<T>, c: T| id.add(&p.scale(&c));

        let k1 = factor(&p2, -(two.clone() * l2.clone() / sum.clone()))?.mul(&s1.kernel)?;
        let k2 = factor(&p1, -(two.clone() * l1.clone() / sum))?.mul(&s2.kernel)?;
        let i1 = factor(&p2, two.clone() * l2.clone() / diff.clone())?.mul(&s1.image)?;
        let i2 = factor(&p1, two * l1.clone() / -diff)?.mul(&s2.image)?;
        let span = |m: Matrix<T>| primitive_columns(&m);
        Ok((
            SubspaceState::new(span(i1), span(k1))?,
            SubspaceState::new(span(i2), span(k2))?,
        ))
    }
}

impl<T: Scalar> TwoSiteMap<T> for RankKMap {
    type Value = SubspaceState<T>;

    fn apply(
        &self,
        x: &SubspaceState<T>,
        lambda: &T,
        y: &SubspaceState<T>,
        mu: &T,
    ) -> Result<(SubspaceState<T>, SubspaceState<T>)> {
        self.interact(x, lambda, y, mu)
    }

    fn name(&self) -> String {
        "soliton-rankk".into()
    }
}

impl<T: Scalar> LaxMap<T> for RankKMap {
    fn lax(&self, x: &SubspaceState<T>, lambda: &T, zeta: &T) -> Result<Matrix<T>> {
        lax_matrix(x, lambda, zeta)
    }

    fn lax_pencil(
        &self,
        x: &SubspaceState<T>,
        lambda: &T,
    ) -> Result<Option<(Matrix<T>, Matrix<T>)>> {
        lax_pencil(x, lambda).map(Some)
    }
}
