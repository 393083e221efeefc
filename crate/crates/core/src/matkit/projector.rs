use crate::error::{Error, Result};
use crate::matkit::integer::{bareiss_inverse, integer_form, ratio};
use crate::matkit::Matrix;
use crate::scalar::Scalar;
use crate::Integer;

/// The projector with image `span(image)` and kernel `span(kernel)`.
///
/// `image` is `n x k`, `kernel` is `n x (n-k)`. Solves `P [L | K] = [L | 0]`,
/// i.e. `P = [L | 0] [L | K]^-1`.
pub fn projector_from_subspaces<T: Scalar>(
    image: &Matrix<T>,
    kernel: &Matrix<T>,
) -> Result<Matrix<T>> {
    let n = image.rows();
    if kernel.rows() != n || image.cols() + kernel.cols() != n {
        return Err(Error::DimensionMismatch {
            op: "projector_from_subspaces",
            lhs: image.shape(),
            rhs: kernel.shape(),
        });
    }
    let basis = image.hstack(kernel)?;
    if T::EXACT {
        return exact_projector(&basis, image.cols());
    }
    let inv = match basis.inverse() {
        Ok(inv) => inv,
        Err(Error::Singular) => return Err(Error::NotTransversal),
        Err(e) => return Err(e),
    };
    image.hstack(&Matrix::zeros(n, kernel.cols()))?.mul(&inv)
}

/// `[L 0] B^{-1}` with `B = [L | K]`. Clearing `B` by a common denominator
/// `d` leaves the product unchanged: `[dL 0] (dB)^{-1}`.
fn exact_projector<T: Scalar>(basis: &Matrix<T>, k: usize) -> Result<Matrix<T>> {
    let (_, ints) = integer_form(&[basis])?;
    let b = &ints[0];
    let (x, det) = bareiss_inverse(b).ok_or(Error::NotTransversal)?;
    let n = b.len();
    Ok(Matrix::from_fn(n, n, |i, j| {
        let num: Integer = (0..k).map(|c| &b[i][c] * &x[c][j]).sum();
        ratio(num, &det)
    }))
}
