//! Fraction-free kernels for exact mode. Rational arithmetic reduces by a
//! gcd after every operation; clearing denominators once and working over
//! the integers avoids that cost on long entries.

use dashu_int::ops::Gcd;
use dashu_int::UBig;

use crate::error::{Error, Result};
use crate::matkit::Matrix;
use crate::scalar::Scalar;
use crate::{Integer, Rational};

pub(crate) type IntMatrix = Vec<Vec<Integer>>;

pub(crate) fn lcm(a: &UBig, b: &UBig) -> UBig {
    if a.is_one() {
        return b.clone();
    }
    a / a.gcd(b) * b
}

/// `(d, [d * m for m in ms])` with `d` the lcm of all entry denominators.
pub(crate) fn integer_form<T: Scalar>(ms: &[&Matrix<T>]) -> Result<(Integer, Vec<IntMatrix>)> {
    let qs: Vec<Vec<Rational>> = ms
        .iter()
        .map(|m| {
            m.data()
                .iter()
                .map(|x| {
                    x.as_rational()
                        .ok_or_else(|| Error::InvalidInput("not exact".into()))
                })
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let d = qs
        .iter()
        .flatten()
        .fold(UBig::ONE, |acc, x| lcm(&acc, x.denominator()));
    let ints = ms
        .iter()
        .zip(&qs)
        .map(|(m, q)| {
            let cols = m.cols();
            (0..m.rows())
                .map(|i| {
                    (0..cols)
                        .map(|j| {
                            let x = &q[i * cols + j];
                            x.numerator() * (&d / x.denominator())
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok((Integer::from(d), ints))
}

pub(crate) fn int_mul(a: &[Vec<Integer>], b: &[Vec<Integer>]) -> IntMatrix {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).sum())
                .collect()
        })
        .collect()
}

/// Fraction-free Gauss-Jordan (Bareiss) on `[a | I]`: returns `(x, d)` with
/// `a^{-1} = x / d`, or `None` for singular `a`. Every intermediate entry is
/// a minor of the augmented matrix, so the divisions are exact.
pub(crate) fn bareiss_inverse(a: &[Vec<Integer>]) -> Option<(IntMatrix, Integer)> {
    let n = a.len();
    let mut m: IntMatrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    Integer::ONE
                } else {
                    Integer::ZERO
                }
            }));
            r
        })
        .collect();
    let mut prev = Integer::ONE;
    for k in 0..n {
        let pivot = (k..n).find(|&r| !m[r][k].is_zero())?;
        m.swap(k, pivot);
        let pk = m[k].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let f = row[k].clone();
            for j in 0..2 * n {
                row[j] = (&pk[k] * &row[j] - &f * &pk[j]) / &prev;
            }
        }
        prev = pk[k].clone();
    }
    // The left block is now prev * I.
    let x = m.into_iter().map(|row| row[n..].to_vec()).collect();
    Some((x, prev))
}

/// `n / d` as a scalar of an exact backend.
pub(crate) fn ratio<T: Scalar>(n: Integer, d: &Integer) -> T {
    T::from_rational(Rational::from_parts_signed(n, d.clone())).expect("exact backend")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bareiss_matches_rational_inverse() {
        let a = Matrix::<Rational>::from_i64(&[&[0, 2, 1], &[3, 1, 2], &[1, 1, 5]]);
        let (_, ints) = integer_form(&[&a]).unwrap();
        let (x, d) = bareiss_inverse(&ints[0]).unwrap();
        let inv = a.inverse().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(ratio::<Rational>(x[i][j].clone(), &d), inv[(i, j)]);
            }
        }
        let singular = vec![
            vec![Integer::from(1), Integer::from(2)],
            vec![Integer::from(2), Integer::from(4)],
        ];
        assert!(bareiss_inverse(&singular).is_none());
    }
}
