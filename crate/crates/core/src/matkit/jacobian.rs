use std::fmt::Display;

use crate::error::{Error, Result};
use crate::matkit::Matrix;

/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Central-difference Jacobian `J[i][j] = (f(x + h e_j) - f(x - h e_j))_i / 2h`.
pub fn fd_jacobian<F, E>(mut f: F, x: &[f64], h: f64) -> Result<Matrix<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>, E>,
    E: Display,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "fd step must be positive, got {h}"
        )));
    }
    let m = x.len();
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut probe = x.to_vec();
    let mut eval = |p: &[f64]| -> Result<Vec<f64>> {
        let y = f(p).map_err(|e| Error::EvaluationFailed(e.to_string()))?;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::EvaluationFailed("non-finite output".into()));
        }
        Ok(y)
    };
    for j in 0..m {
        probe[j] = x[j] + h;
        let plus = eval(&probe)?;
        probe[j] = x[j] - h;
        let minus = eval(&probe)?;
        probe[j] = x[j];
        if plus.len() != minus.len() || columns.first().is_some_and(|c| c.len() != plus.len()) {
            return Err(Error::EvaluationFailed("output dimension changed".into()));
        }
        columns.push(
            plus.iter()
                .zip(&minus)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect(),
        );
    }
    let k = columns.first().map_or(0, Vec::len);
    if k == 0 || m == 0 {
        return Err(Error::InvalidInput("empty Jacobian".into()));
    }
    Ok(Matrix::from_fn(k, m, |i, j| columns[j][i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_map_recovers_matrix() {
        let a = [[1.5, -2.0, 0.25], [3.0, 0.0, -1.0]];
        let f = |x: &[f64]| -> Result<Vec<f64>, String> {
            Ok(a.iter()
                .map(|r| r.iter().zip(x).map(|(u, v)| u * v).sum())
                .collect())
        };
        let j = fd_jacobian(f, &[0.3, -1.2, 2.0], DEFAULT_FD_STEP).unwrap();
        for i in 0..2 {
            for k in 0..3 {
                assert!((j[(i, k)] - a[i][k]).abs() <= 1e-10 * a[i][k].abs().max(1.0));
            }
        }
    }

    #[test]
    fn square_at_three() {
        let j = fd_jacobian(|x: &[f64]| Ok::<_, String>(vec![x[0] * x[0]]), &[3.0], 1e-5).unwrap();
        assert!((j[(0, 0)] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn failing_probe_is_reported() {
        let f = |x: &[f64]| {
            if x[0] > 1.0 {
                Err("out of domain")
            } else {
                Ok(vec![x[0]])
            }
        };
        assert!(matches!(
            fd_jacobian(f, &[1.0], 1e-3),
            Err(Error::EvaluationFailed(_))
        ));
    }

    #[test]
    fn cubic_within_truncation_bound() {
        // f(x, y) = (x^3 y, x y^2 - y^3); analytic Jacobian below.
        let f = |v: &[f64]| {
            Ok::<_, String>(vec![v[0].powi(3) * v[1], v[0] * v[1] * v[1] - v[1].powi(3)])
        };
        let (x, y): (f64, f64) = (1.3, -0.7);
        let exact = [
            [3.0 * x * x * y, x.powi(3)],
            [y * y, 2.0 * x * y - 3.0 * y * y],
        ];
        let h = 1e-3;
        let j = fd_jacobian(f, &[x, y], h).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                let rel = (j[(i, k)] - exact[i][k]).abs() / exact[i][k].abs().max(1.0);
                assert!(rel <= 10.0 * h * h, "entry ({i},{k}) rel err {rel}");
            }
        }
    }
}
