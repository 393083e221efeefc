use dashu_int::ops::Gcd;
use dashu_int::UBig;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkit::integer::lcm;
use crate::matkit::{projector_from_subspaces, Matrix, Vector};
use crate::sampling::{small_matrix, small_vector};
use crate::scalar::Scalar;
use crate::ybcore::SiteValue;
use crate::{Integer, Rational};

/// A state carrying a projector `P` (the phase point) and its involution
/// `S = 2P - I`.
pub trait ProjectorState<T: Scalar>: SiteValue<T> {
    fn dim(&self) -> usize;

    fn rank(&self) -> usize;

    fn projector(&self) -> Result<Matrix<T>>;

    /// A representative of the same projector built from its rows and
    /// columns. Keeps rational heights from compounding when iterating.
    fn rebased(&self) -> Result<Self>
    where
        Self: Sized;

    fn involution(&self) -> Result<Involution<T>> {
        let p = self.projector()?;
        Ok(Involution(
            p.scale(&T::two()).sub(&Matrix::identity(self.dim()))?,
        ))
    }
}

/// `S = 2P - I`, satisfying `S^2 = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct Involution<T>(pub Matrix<T>);

impl<T: Scalar> Involution<T> {
    pub fn square_residual(&self) -> Result<T> {
        let n = self.0.rows();
        self.0.mul(&self.0)?.max_abs_diff(&Matrix::identity(n))
    }
}

/// Rank-1 soliton state: covector `p`, vector `q`, projector
/// `P = q p^T / <p, q>` (image `span q`, kernel the annihilator of `p`).
///
/// `(p, q)` and `(e^t p, e^-t q)` (or any rescaling) represent the same
/// point; equality of states is equality of projectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rank1State<T> {
    pub p: Vector<T>,
    pub q: Vector<T>,
}

impl<T: Scalar> Rank1State<T> {
    pub fn new(p: Vector<T>, q: Vector<T>) -> Result<Self> {
        let s = Self { p, q };
        s.checked_pairing()?;
        Ok(s)
    }

    pub fn from_i64(p: &[i64], q: &[i64]) -> Result<Self> {
        Self::new(Vector::from_i64(p), Vector::from_i64(q))
    }

    /// `<p, q>`, rejecting zero (negligible in float mode).
    pub fn checked_pairing(&self) -> Result<T> {
        let c = self.p.pairing(&self.q)?;
        let scale = self.p.max_abs() * self.q.max_abs();
        if c.is_zero() || c.is_negligible(&scale) {
            return Err(Error::DegeneratePairing);
        }
        Ok(c)
    }

    /// Rescales `p` so that `<p, q> = level`; the projector is unchanged.
    pub fn normalized_to(&self, level: &T) -> Result<Self> {
        let c = self.checked_pairing()?;
        Ok(Self {
            p: self.p.scale(&(level.clone() / c)),
            q: self.q.clone(),
        })
    }

    /// Random state with small rational entries and nonzero pairing.
    pub fn random(rng: &mut impl Rng, n: usize) -> Self {
        loop {
            if let Ok(s) = Self::new(small_vector(rng, n), small_vector(rng, n)) {
                return s;
            }
        }
    }

    /// `(p, q)` flattened as `p_1..p_n, q_1..q_n`.
    pub fn to_flat(&self) -> Vec<T> {
        self.p.0.iter().chain(&self.q.0).cloned().collect()
    }

    pub fn from_flat(x: &[T]) -> Result<Self> {
        if x.len() % 2 != 0 {
            return Err(Error::InvalidInput("odd-length (p, q) vector".into()));
        }
        let n = x.len() / 2;
        Self::new(Vector(x[..n].to_vec()), Vector(x[n..].to_vec()))
    }
}

impl<T: Scalar> ProjectorState<T> for Rank1State<T> {
    fn dim(&self) -> usize {
        self.q.dim()
    }

    fn rank(&self) -> usize {
        1
    }

    fn projector(&self) -> Result<Matrix<T>> {
        let c = self.checked_pairing()?;
        Ok(self.q.outer(&self.p).scale(&(T::one() / c)))
    }

    /// `P = q p^T / <p, q>` is rank one with `P^2 = P`, so column `j` and
    /// row `i` of `P` pair to `P_ij` and rebuild `P` whenever `P_ij != 0`.
    fn rebased(&self) -> Result<Self> {
        if T::EXACT {
            // Any rescaling represents the same projector; primitive integer
            // vectors keep every later operation denominator-free.
            return Self::new(primitive_vector(&self.p), primitive_vector(&self.q));
        }
        let p = self.projector()?;
        let n = p.rows();
        let (mut best, mut at) = (T::zero(), None);
        for i in 0..n {
            for j in 0..n {
                let v = p[(i, j)].abs();
                if v > best {
                    best = v;
                    at = Some((i, j));
                    if T::EXACT {
                        break;
                    }
                }
            }
            if T::EXACT && at.is_some() {
                break;
            }
        }
        let (i, j) = at.ok_or(Error::DegeneratePairing)?;
        Self::new(Vector::new(p.row(i).to_vec()), p.column(j))
    }
}

impl<T: Scalar> SiteValue<T> for Rank1State<T> {
    fn deviation(&self, other: &Self) -> Result<T> {
        self.projector()?.max_abs_diff(&other.projector()?)
    }

    fn magnitude(&self) -> T {
        self.projector()
            .map(|p| p.max_abs())
            .unwrap_or_else(|_| T::zero())
    }

    /// Moves `q` along a direction annihilated by `p`: the pairing is kept
    /// and the image changes.
    fn perturbed(&self) -> Self {
        let n = self.p.dim();
        let mut q = self.q.clone();
        'outer: for a in 0..n {
            for b in a + 1..n {
                let (pa, pb) = (self.p.0[a].clone(), self.p.0[b].clone());
                if !(pa.is_zero() && pb.is_zero()) {
                    q.0[a] = q.0[a].clone() + pb;
                    q.0[b] = q.0[b].clone() - pa;
                    break 'outer;
                }
            }
        }
        Self {
            p: self.p.clone(),
            q,
        }
    }
}

/// Rank-k soliton state given by bases of `L = Im P` (`n x k`) and
/// `K = Ker P` (`n x (n-k)`), with `K + L = R^n` direct.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceState<T> {
    pub image: Matrix<T>,
    pub kernel: Matrix<T>,
}

impl<T: Scalar> SubspaceState<T> {
    pub fn new(image: Matrix<T>, kernel: Matrix<T>) -> Result<Self> {
        let s = Self { image, kernel };
        s.projector()?;
        Ok(s)
    }

    /// Same projector as the rank-1 state: image `span q`, kernel `ann p`.
    pub fn from_rank1(s: &Rank1State<T>) -> Result<Self> {
        let kernel = annihilator_basis(&s.p)?;
        Self::new(s.q.to_column(), kernel)
    }

    pub fn random(rng: &mut impl Rng, n: usize, k: usize) -> Self {
        assert!(k >= 1 && k < n, "rank must satisfy 1 <= k < n");
        loop {
            if let Ok(s) = Self::new(small_matrix(rng, n, k), small_matrix(rng, n, n - k)) {
                return s;
            }
        }
    }
}

/// In exact mode, rescales every column to a primitive integer vector; the
/// spanned subspace is unchanged and entries stay short under iteration.
/// Floats are returned as is.
pub fn primitive_columns<T: Scalar>(m: &Matrix<T>) -> Matrix<T> {
    if !T::EXACT {
        return m.clone();
    }
    let cols: Vec<Vector<T>> = m.columns().iter().map(primitive_vector).collect();
    Matrix::from_columns(&cols).expect("same shape")
}

/// Exact mode: the primitive integer multiple of `v` (unchanged if zero).
/// Float mode: `v` itself.
pub fn primitive_vector<T: Scalar>(v: &Vector<T>) -> Vector<T> {
    if !T::EXACT {
        return v.clone();
    }
    let q: Vec<Rational> = v.0.iter().filter_map(Scalar::as_rational).collect();
    let den = q.iter().fold(UBig::ONE, |acc, x| lcm(&acc, x.denominator()));
    let ints: Vec<Integer> = q
        .iter()
        .map(|x| x.numerator() * Integer::from(&den / x.denominator()))
        .collect();
    let g = ints
        .iter()
        .filter(|x| !x.is_zero())
        .fold(UBig::ZERO, |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.clone();
    }
    let g = Integer::from(g);
    Vector(
        ints.into_iter()
            .map(|x| T::from_rational(Rational::from(x / &g)).expect("exact backend"))
            .collect(),
    )
}

/// Basis of `{v : <p, v> = 0}` as the columns of an `n x (n-1)` matrix.
pub fn annihilator_basis<T: Scalar>(p: &Vector<T>) -> Result<Matrix<T>> {
    let n = p.dim();
    let r =
        p.0.iter()
            .position(|x| !x.is_zero())
            .ok_or(Error::DegeneratePairing)?;
    let cols: Vec<Vector<T>> = (0..n)
        .filter(|&j| j != r)
        .map(|j| {
            let mut v = Vector::basis(n, j);
            v.0[r] = -(p.0[j].clone() / p.0[r].clone());
            v
        })
        .collect();
    Matrix::from_columns(&cols)
}

impl<T: Scalar> ProjectorState<T> for SubspaceState<T> {
    fn dim(&self) -> usize {
        self.image.rows()
    }

    fn rank(&self) -> usize {
        self.image.cols()
    }

    fn projector(&self) -> Result<Matrix<T>> {
        projector_from_subspaces(&self.image, &self.kernel)
    }

    /// Image from the columns of `P`, kernel from the columns of `I - P`.
    fn rebased(&self) -> Result<Self> {
        let p = self.projector()?;
        let q = Matrix::identity(p.rows()).sub(&p)?;
        Self::new(
            independent_columns(&p, self.rank())?,
            independent_columns(&q, p.rows() - self.rank())?,
        )
    }
}

/// The first `count` columns of `m` that are linearly independent of the
/// ones before them.
fn independent_columns<T: Scalar>(m: &Matrix<T>, count: usize) -> Result<Matrix<T>> {
    let mut chosen: Vec<Vector<T>> = Vec::with_capacity(count);
    for c in m.columns() {
        chosen.push(c);
        if Matrix::from_columns(&chosen)?.rank() < chosen.len() {
            chosen.pop();
        } else if chosen.len() == count {
            break;
        }
    }
    if chosen.len() < count {
        return Err(Error::NotTransversal);
    }
    Matrix::from_columns(&chosen)
}

impl<T: Scalar> SiteValue<T> for SubspaceState<T> {
    fn deviation(&self, other: &Self) -> Result<T> {
        self.projector()?.max_abs_diff(&other.projector()?)
    }

    fn magnitude(&self) -> T {
        self.projector()
            .map(|p| p.max_abs())
            .unwrap_or_else(|_| T::zero())
    }

    /// Adds the first kernel vector to the first image vector: a column
    /// operation on `[L | K]`, so transversality survives while `L` moves.
    fn perturbed(&self) -> Self {
        let mut image = self.image.clone();
        for i in 0..image.rows() {
            let v = image[(i, 0)].clone() + self.kernel[(i, 0)].clone();
            image.set(i, 0, v);
        }
        Self {
            image,
            kernel: self.kernel.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::trial_rng;
    use crate::Rational as Q;

    #[test]
    fn rank1_projector_convention() {
        let s = Rank1State::<Q>::from_i64(&[1, 1], &[0, 1]).unwrap();
        let p = s.projector().unwrap();
        // q p^T / <p,q> = (0,1)^T (1,1) / 1
        assert_eq!(p, Matrix::from_i64(&[&[0, 0], &[1, 1]]));
        assert_eq!(p.mul(&p).unwrap(), p);
    }

    #[test]
    fn zero_pairing_rejected() {
        assert_eq!(
            Rank1State::<Q>::from_i64(&[1, 0], &[0, 1]),
            Err(Error::DegeneratePairing)
        );
    }

    #[test]
    fn involutions_square_to_identity() {
        let mut rng = trial_rng(11, 0);
        for _ in 0..20 {
            let s = Rank1State::<Q>::random(&mut rng, 3);
            assert!(s.involution().unwrap().square_residual().unwrap().is_zero());
            let k = SubspaceState::<Q>::random(&mut rng, 4, 2);
            let p = k.projector().unwrap();
            assert_eq!(p.mul(&p).unwrap(), p);
            assert_eq!(p.rank(), 2);
            assert!(k.involution().unwrap().square_residual().unwrap().is_zero());
        }
    }

    #[test]
    fn subspace_from_rank1_has_same_projector() {
        let mut rng = trial_rng(12, 0);
        for _ in 0..20 {
            let s = Rank1State::<Q>::random(&mut rng, 3);
            let k = SubspaceState::from_rank1(&s).unwrap();
            assert_eq!(k.projector().unwrap(), s.projector().unwrap());
        }
    }

    #[test]
    fn rescaling_is_invisible() {
        let s = Rank1State::<Q>::from_i64(&[2, -1, 3], &[1, 1, 1]).unwrap();
        let t = s.normalized_to(&Q::from_i64(7)).unwrap();
        assert_eq!(t.p.pairing(&t.q).unwrap(), Q::from_i64(7));
        assert!(s.deviation(&t).unwrap().is_zero());
    }

    #[test]
    fn perturbation_moves_the_projector() {
        let s = Rank1State::<Q>::from_i64(&[2, -1, 3], &[1, 1, 1]).unwrap();
        let d = s.perturbed();
        assert_eq!(d.checked_pairing().unwrap(), s.checked_pairing().unwrap());
        assert!(!s.deviation(&d).unwrap().is_zero());
        let mut rng = trial_rng(13, 0);
        let k = SubspaceState::<Q>::random(&mut rng, 4, 2);
        assert!(!k.deviation(&k.perturbed()).unwrap().is_zero());
    }
}
