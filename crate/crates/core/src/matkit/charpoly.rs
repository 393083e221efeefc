use crate::error::{Error, Result};
use crate::matkit::integer::{int_mul, integer_form, IntMatrix};
use crate::matkit::Matrix;
use crate::scalar::Scalar;
use crate::{Integer, Rational};

/// Coefficients of `det(a - eta*I)` in ascending powers of `eta`.
///
/// Faddeev-LeVerrier: with `M_0 = 0`, `c_n = 1`,
/// `M_k = a*M_{k-1} + c_{n-k+1} I` and `c_{n-k} = -tr(a*M_k)/k` give
/// `det(eta*I - a) = sum c_i eta^i`. The only divisions are by the integers
/// `k`, so rational mode stays exact. The result is multiplied by `(-1)^n`,
/// making the leading coefficient `(-1)^n`.
pub fn char_poly<T: Scalar>(a: &Matrix<T>) -> Result<Vec<T>> {
    if !a.is_square() {
        return Err(Error::NotSquare(a.rows(), a.cols()));
    }
    let n = a.rows();
    let mut coeffs = vec![T::zero(); n + 1];
    coeffs[n] = T::one();
    let identity = Matrix::<T>::identity(n);
    let mut m = Matrix::<T>::zeros(n, n);
    for k in 1..=n {
        m = a.mul(&m)?.add(&identity.scale(&coeffs[n - k + 1]))?;
        let tr = a.mul(&m)?.trace()?;
        coeffs[n - k] = -(tr / T::from_i64(k as i64));
    }
    if n % 2 == 1 {
        for c in &mut coeffs {
            *c = -c.clone();
        }
    }
    Ok(coeffs)
}

/// [`char_poly`] of the ordered product `ms[0] ms[1] ...`.
///
/// In exact mode every factor is first scaled to an integer matrix, so the
/// product and the recursion run over integers and each coefficient is
/// reduced once at the end. Rational arithmetic would otherwise spend almost
/// all of its time in intermediate gcds once entries get long.
pub fn char_poly_of_product<T: Scalar>(ms: &[Matrix<T>]) -> Result<Vec<T>> {
    let n = square_size(ms.iter())?;
    if !T::EXACT {
        let mut acc = ms[0].clone();
        for m in &ms[1..] {
            acc = acc.mul(m)?;
        }
        return char_poly(&acc);
    }
    let mut scale = Integer::ONE;
    let mut factors = Vec::with_capacity(ms.len());
    for m in ms {
        let (d, ints) = integer_form(&[m])?;
        scale *= d;
        factors.push(ints.into_iter().next().expect("one matrix"));
    }
    Ok(integer_char_poly(&factors, &scale, n))
}

/// [`char_poly_of_product`] of `prod_i (a_i + zeta b_i)` at every sample
/// `zeta`, for factors affine in `zeta`. Each pencil is cleared of
/// denominators once and reused for all samples.
pub fn char_poly_of_pencil_product<T: Scalar>(
    pencils: &[(Matrix<T>, Matrix<T>)],
    zetas: &[T],
) -> Result<Vec<Vec<T>>> {
    let n = square_size(pencils.iter().flat_map(|(a, b)| [a, b]))?;
    if !T::EXACT {
        return zetas
            .iter()
            .map(|z| {
                let ms = pencils
                    .iter()
                    .map(|(a, b)| a.add(&b.scale(z)))
                    .collect::<Result<Vec<_>>>()?;
                char_poly_of_product(&ms)
            })
            .collect();
    }
    let cleared = pencils
        .iter()
        .map(|(a, b)| integer_form(&[a, b]))
        .collect::<Result<Vec<_>>>()?;
    zetas
        .iter()
        .map(|z| {
            let z = z
                .as_rational()
                .ok_or_else(|| Error::InvalidInput("not exact".into()))?;
            // d (a + (u/v) b) = (v d a + u d b) / v
            let (u, v) = (z.numerator(), &Integer::from(z.denominator().clone()));
            let mut scale = Integer::ONE;
            let mut factors = Vec::with_capacity(cleared.len());
            for (d, ab) in &cleared {
                scale *= d * v;
                let f = ab[0]
                    .iter()
                    .zip(&ab[1])
                    .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x * v + y * u).collect())
                    .collect();
                factors.push(f);
            }
            Ok(integer_char_poly(&factors, &scale, n))
        })
        .collect()
}

fn square_size<'a, T: Scalar>(mut ms: impl Iterator<Item = &'a Matrix<T>>) -> Result<usize> {
    let first = ms
        .next()
        .ok_or_else(|| Error::InvalidInput("empty product".into()))?;
    if !first.is_square() {
        return Err(Error::NotSquare(first.rows(), first.cols()));
    }
    for m in ms {
        if m.shape() != first.shape() {
            return Err(Error::DimensionMismatch {
                op: "char_poly_of_product",
                lhs: first.shape(),
                rhs: m.shape(),
            });
        }
    }
    Ok(first.rows())
}

/// Char-poly of `(prod factors) / scale` over the integers; the
/// Faddeev-LeVerrier divisions by `k` are exact for integer matrices.
fn integer_char_poly<T: Scalar>(factors: &[IntMatrix], scale: &Integer, n: usize) -> Vec<T> {
    let p = factors[1..]
        .iter()
        .fold(factors[0].clone(), |acc, f| int_mul(&acc, f));
    let mut coeffs = vec![Integer::ZERO; n + 1];
    coeffs[n] = Integer::ONE;
    let mut m = vec![vec![Integer::ZERO; n]; n];
    for k in 1..=n {
        m = int_mul(&p, &m);
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        let pm = int_mul(&p, &m);
        let tr: Integer = (0..n).map(|i| &pm[i][i]).sum();
        coeffs[n - k] = -(tr / Integer::from(k));
    }
    // char(P / D) has coefficient c_i(P) / D^(n-i).
    let sign = if n % 2 == 1 {
        -Integer::ONE
    } else {
        Integer::ONE
    };
    let mut denom = Integer::ONE;
    let mut out = vec![T::zero(); n + 1];
    for i in (0..=n).rev() {
        let q = Rational::from_parts_signed(&coeffs[i] * &sign, denom.clone());
        out[i] = T::from_rational(q).expect("exact backend");
        denom *= scale;
    }
    out
}

/// Horner evaluation of ascending coefficients.
pub fn poly_eval<T: Scalar>(coeffs: &[T], x: &T) -> T {
    coeffs
        .iter()
        .rev()
        .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational as Q;

    #[test]
    fn integer_path_matches_rational_product() {
        let q = |a: i64, b: i64| Q::from_ratio(a, b);
        let a = Matrix::from_rows(vec![vec![q(1, 2), q(-3, 7)], vec![q(5, 3), q(2, 9)]]).unwrap();
        let b = Matrix::from_rows(vec![vec![q(4, 5), q(1, 1)], vec![q(-2, 11), q(7, 6)]]).unwrap();
        let c = Matrix::from_rows(vec![vec![q(0, 1), q(3, 4)], vec![q(1, 8), q(-5, 2)]]).unwrap();
        let direct = char_poly(&a.mul(&b).unwrap().mul(&c).unwrap()).unwrap();
        assert_eq!(
            char_poly_of_product(&[a.clone(), b.clone(), c.clone()]).unwrap(),
            direct
        );

        let f = |m: &Matrix<Q>| m.convert(Scalar::to_f64);
        let float = char_poly_of_product(&[f(&a), f(&b), f(&c)]).unwrap();
        for (x, y) in float.iter().zip(&direct) {
            assert!((x - Scalar::to_f64(y)).abs() < 1e-12);
        }
    }

    #[test]
    fn pencil_product_matches_pointwise() {
        let q = |a: i64, b: i64| Q::from_ratio(a, b);
        let a1 = Matrix::from_rows(vec![vec![q(1, 2), q(-3, 7)], vec![q(5, 3), q(2, 9)]]).unwrap();
        let b1 = Matrix::from_rows(vec![vec![q(0, 1), q(-1, 1)], vec![q(0, 1), q(0, 1)]]).unwrap();
        let a2 = Matrix::from_rows(vec![vec![q(4, 5), q(1, 1)], vec![q(-2, 11), q(7, 6)]]).unwrap();
        let b2 = Matrix::<Q>::identity(2);
        let zetas = [q(0, 1), q(1, 1), q(-3, 2), q(5, 7)];
        let got = char_poly_of_pencil_product(
            &[(a1.clone(), b1.clone()), (a2.clone(), b2.clone())],
            &zetas,
        )
        .unwrap();
        for (z, c) in zetas.iter().zip(&got) {
            let m = a1
                .add(&b1.scale(z))
                .unwrap()
                .mul(&a2.add(&b2.scale(z)).unwrap())
                .unwrap();
            assert_eq!(c, &char_poly(&m).unwrap());
        }
    }

    #[test]
    fn integer_path_odd_size() {
        let a = Matrix::<Q>::from_i64(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 1]]);
        let b = Matrix::<Q>::from_i64(&[&[1, 2, 0], &[0, 1, -1], &[3, 0, 1]])
            .scale(&Q::from_ratio(1, 3));
        let direct = char_poly(&a.mul(&b).unwrap()).unwrap();
        assert_eq!(char_poly_of_product(&[a, b]).unwrap(), direct);
    }

    #[test]
    fn zero_and_identity() {
        let z = char_poly(&Matrix::<Q>::zeros(2, 2)).unwrap();
        assert_eq!(z, vec![Q::from_i64(0), Q::from_i64(0), Q::from_i64(1)]);
        let i = char_poly(&Matrix::<Q>::identity(2)).unwrap();
        assert_eq!(i, vec![Q::from_i64(1), Q::from_i64(-2), Q::from_i64(1)]);
    }

    #[test]
    fn odd_size_leading_sign() {
        let c = char_poly(&Matrix::<Q>::identity(3)).unwrap();
        // det(I - eta I) = (1 - eta)^3
        assert_eq!(
            c,
            vec![
                Q::from_i64(1),
                Q::from_i64(-3),
                Q::from_i64(3),
                Q::from_i64(-1)
            ]
        );
    }

    #[test]
    fn vanishes_on_eigenvalues_of_similar_diagonal() {
        // a = S diag(2, -1/3, 5) S^-1
        let s = Matrix::<Q>::from_i64(&[&[1, 2, 0], &[0, 1, 3], &[1, 0, 1]]);
        let eig = [Q::from_i64(2), Q::from_ratio(-1, 3), Q::from_i64(5)];
        let a = s
            .mul(&Matrix::diag(&eig))
            .unwrap()
            .mul(&s.inverse().unwrap())
            .unwrap();
        let c = char_poly(&a).unwrap();
        for e in &eig {
            assert_eq!(poly_eval(&c, e), Q::from_i64(0));
        }
    }

    #[test]
    fn rejects_rectangular() {
        assert_eq!(
            char_poly(&Matrix::<f64>::zeros(2, 3)),
            Err(Error::NotSquare(2, 3))
        );
    }
}
