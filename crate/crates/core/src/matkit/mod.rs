//! Field-generic dense linear algebra for the small matrices in this crate.

mod charpoly;
pub(crate) mod integer;
mod jacobian;
mod matrix;
mod projector;

pub use charpoly::{char_poly, char_poly_of_pencil_product, char_poly_of_product, poly_eval};
pub use jacobian::{fd_jacobian, DEFAULT_FD_STEP};
pub use matrix::{ArithOp, Matrix, Vector};
pub use projector::projector_from_subspaces;
