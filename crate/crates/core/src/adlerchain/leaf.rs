//! Reduction machinery behind the dressing chain: the 4-dimensional linear
//! Poisson algebra of 2x2 leaf matrices, the triangular gauge action on
//! products of leaf matrices, and its invariants `G_i`, `H_i`.

use serde::{Deserialize, Serialize};

use super::chain::g_bracket;
use crate::error::{Error, Result};
use crate::matkit::{Matrix, Vector};
use crate::report::CheckReport;
use crate::scalar::Scalar;

/// Linear Poisson structure on `(a, b, c, d)`:
/// `{x_i, x_j} = sum_k c[i][j][k] x_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearPoisson {
    pub c: [[[i64; 4]; 4]; 4],
    pub name: &'static str,
}

const A: usize = 0;
const B: usize = 1;
const C: usize = 2;
const D: usize = 3;

impl LinearPoisson {
    fn from_pairs(pairs: &[(usize, usize, usize, i64)], name: &'static str) -> Self {
        let mut c = [[[0; 4]; 4]; 4];
        for &(i, j, k, v) in pairs {
            c[i][j][k] = v;
            c[j][i][k] = -v;
        }
        Self { c, name }
    }

    /// `{a, b} = a, {a, d} = c, {b, d} = d`, all other brackets zero.
    pub fn leaf() -> Self {
        Self::from_pairs(&[(A, B, A, 1), (A, D, C, 1), (B, D, D, 1)], "leaf")
    }

    /// Same table with `{b, d} = -d`; violates the Jacobi identity.
    pub fn decoy() -> Self {
        Self::from_pairs(
            &[(A, B, A, 1), (A, D, C, 1), (B, D, D, -1)],
            "decoy {b,d}=-d",
        )
    }

    /// Poisson tensor `Pi_ij(x)` at a point.
    pub fn tensor<T: Scalar>(&self, x: &[T; 4]) -> Matrix<T> {
        Matrix::from_fn(4, 4, |i, j| {
            (0..4).fold(T::zero(), |acc, k| {
                acc + T::from_i64(self.c[i][j][k]) * x[k].clone()
            })
        })
    }

    /// `{F, G}(x) = grad F^T Pi(x) grad G`.
    pub fn bracket<T: Scalar>(&self, x: &[T; 4], df: &[T; 4], dg: &[T; 4]) -> T {
        let pi = self.tensor(x);
        let mut acc = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                acc = acc + df[i].clone() * pi[(i, j)].clone() * dg[j].clone();
            }
        }
        acc
    }

    /// Jacobiator `{x_i,{x_j,x_k}} + {x_j,{x_k,x_i}} + {x_k,{x_i,x_j}}` on
    /// coordinate functions.
    pub fn jacobiator<T: Scalar>(&self, x: &[T; 4], i: usize, j: usize, k: usize) -> T {
        let pi = self.tensor(x);
        let term = |u: usize, v: usize, w: usize| {
            (0..4).fold(T::zero(), |acc, l| {
                acc + pi[(u, l)].clone() * T::from_i64(self.c[v][w][l])
            })
        };
        term(i, j, k) + term(j, k, i) + term(k, i, j)
    }
}

/// `(C_1, C_2) = (c, ad - bc)`.
pub fn leaf_casimirs<T: Scalar>(x: &[T; 4]) -> (T, T) {
    let [a, b, c, d] = x.clone();
    (c.clone(), a * d - b * c)
}

fn casimir_gradients<T: Scalar>(x: &[T; 4]) -> [[T; 4]; 2] {
    let [a, b, c, d] = x.clone();
    [[T::zero(), T::zero(), T::one(), T::zero()], [d, -c, -b, a]]
}

/// Antisymmetry, Jacobi on coordinates, and `{x, C_1} = {x, C_2} = 0` for
/// every coordinate `x`, evaluated at each point.
pub fn leaf_algebra_check<T: Scalar>(structure: &LinearPoisson, points: &[[T; 4]]) -> CheckReport {
    let mut report = CheckReport::for_scalar::<T>(format!("leaf-algebra [{}]", structure.name));
    const NAMES: [&str; 4] = ["a", "b", "c", "d"];
    for (trial, x) in points.iter().enumerate() {
        let pi = structure.tensor(x);
        let sym = pi.add(&pi.transpose()).expect("square");
        report.record(trial, &sym.max_abs(), &pi.max_abs(), 0.0, || {
            format!("bracket not antisymmetric at {x:?}")
        });
        for i in 0..4 {
            for j in i + 1..4 {
                for k in j + 1..4 {
                    let jac = structure.jacobiator(x, i, j, k);
                    report.record(trial, &jac.abs(), &T::one(), 0.0, || {
                        format!(
                            "Jacobi({},{},{}) = {jac} at {x:?}",
                            NAMES[i], NAMES[j], NAMES[k]
                        )
                    });
                }
            }
        }
        for (m, grad) in casimir_gradients(x).iter().enumerate() {
            for (i, name) in NAMES.iter().enumerate() {
                let mut e = [T::zero(), T::zero(), T::zero(), T::zero()];
                e[i] = T::one();
                let v = structure.bracket(x, &e, grad);
                report.record(trial, &v.abs(), &T::one(), 0.0, || {
                    format!("{{{name}, C{}}} = {v} at {x:?}", m + 1)
                });
            }
        }
    }
    report
}

/// Per-site leaf coordinates; site `i` carries
/// `L_i(zeta) = [[a_i, a_i d_i + lambda_i - zeta], [1, d_i]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafCoords<T> {
    pub a: Vec<T>,
    pub d: Vec<T>,
    pub lambda: Vec<T>,
}

impl<T: Scalar> LeafCoords<T> {
    pub fn new(a: Vec<T>, d: Vec<T>, lambda: Vec<T>) -> Result<Self> {
        if a.len() != d.len() || a.len() != lambda.len() || a.is_empty() {
            return Err(Error::InvalidInput("leaf coordinate lengths differ".into()));
        }
        Ok(Self { a, d, lambda })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn leaf_matrix(&self, i: usize, zeta: &T) -> Matrix<T> {
        let (a, d, l) = (&self.a[i], &self.d[i], &self.lambda[i]);
        let b = a.clone() * d.clone() + l.clone() - zeta.clone();
        Matrix::from_vec(2, 2, vec![a.clone(), b, T::one(), d.clone()]).expect("2x2")
    }

    /// `G_i = a_i + d_{i-1}` (cyclic).
    pub fn g_invariants(&self) -> Vec<T> {
        let n = self.len();
        (0..n)
            .map(|i| self.a[i].clone() + self.d[(i + n - 1) % n].clone())
            .collect()
    }

    /// `H_i = a_{i-1} + d_i` (cyclic).
    pub fn h_functions(&self) -> Vec<T> {
        let n = self.len();
        (0..n)
            .map(|i| self.a[(i + n - 1) % n].clone() + self.d[i].clone())
            .collect()
    }
}

fn unipotent<T: Scalar>(t: &T) -> Matrix<T> {
    Matrix::from_vec(2, 2, vec![T::one(), t.clone(), T::zero(), T::one()]).expect("2x2")
}

/// Reads `(a, d)` back off a matrix, requiring the leaf shape at `zeta`.
fn read_leaf<T: Scalar>(m: &Matrix<T>, lambda: &T, zeta: &T) -> Result<(T, T)> {
    let (a, d) = (m[(0, 0)].clone(), m[(1, 1)].clone());
    let b = a.clone() * d.clone() + lambda.clone() - zeta.clone();
    let scale = m.max_abs();
    let off = |u: T, v: T| {
        let diff = u - v;
        diff.is_zero() || diff.is_negligible(&scale)
    };
    if !off(m[(1, 0)].clone(), T::one()) || !off(m[(0, 1)].clone(), b) {
        return Err(Error::InvalidInput(format!(
            "gauge image left the leaf: {m}"
        )));
    }
    Ok((a, d))
}

/// `L_i -> t^_i L_i t^_{i+1}^-1` with `t^ = [[1, t], [0, 1]]` (cyclic).
/// Computed from the matrix products at two spectral values; in coordinates
/// this is `a_i += t_i`, `d_{i-1} -= t_i`.
pub fn gauge_action<T: Scalar>(coords: &LeafCoords<T>, t: &[T]) -> Result<LeafCoords<T>> {
    let n = coords.len();
    if t.len() != n {
        return Err(Error::InvalidInput(format!(
            "{} gauge parameters for {n} sites",
            t.len()
        )));
    }
    let mut out = coords.clone();
    for i in 0..n {
        let right = unipotent(&-t[(i + 1) % n].clone());
        let mut read = None;
        for zeta in [T::zero(), T::one()] {
            let m = unipotent(&t[i])
                .mul(&coords.leaf_matrix(i, &zeta))?
                .mul(&right)?;
            let ad = read_leaf(&m, &coords.lambda[i], &zeta)?;
            if let Some(prev) = &read {
                if prev != &ad {
                    return Err(Error::InvalidInput("gauge image depends on zeta".into()));
                }
            }
            read = Some(ad);
        }
        let (a, d) = read.expect("two samples");
        out.a[i] = a;
        out.d[i] = d;
    }
    Ok(out)
}

/// Wrong-sign variant `a_i += t_i`, `d_{i-1} += t_i`; moves the `G_i`.
pub fn gauge_action_decoy<T: Scalar>(coords: &LeafCoords<T>, t: &[T]) -> LeafCoords<T> {
    let n = coords.len();
    let mut out = coords.clone();
    for i in 0..n {
        out.a[i] = out.a[i].clone() + t[i].clone();
        let j = (i + n - 1) % n;
        out.d[j] = out.d[j].clone() + t[i].clone();
    }
    out
}

/// `G_i` before and after a gauge transformation.
pub fn check_gauge_invariance<T: Scalar>(
    coords: &LeafCoords<T>,
    gauges: &[Vec<T>],
    act: impl Fn(&LeafCoords<T>, &[T]) -> Result<LeafCoords<T>>,
    label: &str,
) -> CheckReport {
    let mut report =
        CheckReport::for_scalar::<T>(format!("gauge-invariance N={} [{label}]", coords.len()));
    let g0 = coords.g_invariants();
    for (trial, t) in gauges.iter().enumerate() {
        match act(coords, t) {
            Ok(c) => {
                let g = c.g_invariants();
                let diff: Vec<T> = g
                    .iter()
                    .zip(&g0)
                    .map(|(x, y)| x.clone() - y.clone())
                    .collect();
                let dev = T::max_abs(&diff);
                report.record(trial, &dev, &T::max_abs(&g0), 0.0, || {
                    format!("G moved by {dev} under t={t:?}")
                });
            }
            Err(e) => report.record_error(trial, e.to_string()),
        }
    }
    report
}

/// Canonical tensor on `(a_1..a_N, d_1..d_N)` with `{a_i, d_i} = 1`.
pub fn canonical_leaf_tensor<T: Scalar>(n: usize) -> Matrix<T> {
    let mut j = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j.set(i, n + i, T::one());
        j.set(n + i, i, -T::one());
    }
    j
}

/// Gradient rows of `G_i = a_i + d_{i-1}` and `H_i = a_{i-1} + d_i`.
fn invariant_gradients<T: Scalar>(n: usize) -> (Matrix<T>, Matrix<T>) {
    let one = |b: bool| if b { T::one() } else { T::zero() };
    let g = Matrix::from_fn(n, 2 * n, |i, k| one(k == i || k == n + (i + n - 1) % n));
    let h = Matrix::from_fn(n, 2 * n, |i, k| one(k == (i + n - 1) % n || k == n + i));
    (g, h)
}

/// Brackets of the reduced coordinates under the canonical leaf bracket.
/// Returns `({G_i, G_j}, {H_i, H_j})` as matrices.
pub fn reduced_brackets<T: Scalar>(n: usize) -> Result<(Matrix<T>, Matrix<T>)> {
    let j = canonical_leaf_tensor::<T>(n);
    let (g, h) = invariant_gradients::<T>(n);
    Ok((
        g.mul(&j)?.mul(&g.transpose())?,
        h.mul(&j)?.mul(&h.transpose())?,
    ))
}

/// `{G_i, G_{i+1}} = 1`, `{G_i, G_j} = 0` otherwise, i.e. the `G`-bracket is
/// the dressing-chain `g`-bracket entry for entry; and `{H_i, H_{i-1}} = 1`.
pub fn reduced_invariants_check<T: Scalar>(n: usize) -> CheckReport {
    let mut report = CheckReport::for_scalar::<T>(format!("reduced-invariants N={n}"));
    if n < 3 {
        report.record_error(0, format!("need at least 3 sites, got {n}"));
        return report;
    }
    let (bg, bh) = match reduced_brackets::<T>(n) {
        Ok(b) => b,
        Err(e) => {
            report.record_error(0, e.to_string());
            return report;
        }
    };
    let jg = g_bracket::<T>(n);
    for i in 0..n {
        for k in 0..n {
            let dg = (bg[(i, k)].clone() - jg[(i, k)].clone()).abs();
            report.record(i, &dg, &T::one(), 0.0, || {
                format!(
                    "{{G{}, G{}}} = {} but g-bracket has {}",
                    i + 1,
                    k + 1,
                    bg[(i, k)],
                    jg[(i, k)]
                )
            });
            // {H_i, H_{i-1}} = 1 means the H-bracket is the transpose.
            let dh = (bh[(i, k)].clone() - jg[(k, i)].clone()).abs();
            report.record(i, &dh, &T::one(), 0.0, || {
                format!("{{H{}, H{}}} = {}", i + 1, k + 1, bh[(i, k)])
            });
        }
    }
    report
}

/// Bracket of two linear functions (given by gradients) under the canonical
/// leaf tensor.
pub fn canonical_bracket<T: Scalar>(df: &Vector<T>, dg: &Vector<T>) -> Result<T> {
    let n = df.dim() / 2;
    df.pairing(&canonical_leaf_tensor::<T>(n).mul_vec(dg)?)
}
