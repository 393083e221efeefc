//! Yang-Baxter maps from refactorization of Lax matrices: the matrix-KdV
//! soliton interaction, Adler's map and the periodic dressing chain, with
//! exact (rational) and numeric (binary64) verification of their algebraic
//! and Hamiltonian properties.
//!
//! All math is generic over [`Scalar`]; the aliases below fix the backend.

pub mod adlerchain;
pub mod error;
pub mod matkit;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod solitonmap;
pub mod ybcore;

pub use error::{Error, Result};
pub use report::{CheckReport, Failure};
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Rational = dashu_ratio::RBig;
/// Arbitrary-precision integer used by the fraction-free kernels.
pub type Integer = dashu_int::IBig;

pub type MatrixQ = matkit::Matrix<Rational>;
pub type MatrixF = matkit::Matrix<f64>;
pub type VectorQ = matkit::Vector<Rational>;
pub type VectorF = matkit::Vector<f64>;

pub type Rank1StateQ = solitonmap::Rank1State<Rational>;
pub type Rank1StateF = solitonmap::Rank1State<f64>;
pub type SubspaceStateQ = solitonmap::SubspaceState<Rational>;
pub type SubspaceStateF = solitonmap::SubspaceState<f64>;

pub type SiteTupleQ<V> = ybcore::SiteTuple<V, Rational>;
pub type SiteTupleF<V> = ybcore::SiteTuple<V, f64>;

pub type ChainStateQ = adlerchain::ChainState<Rational>;
pub type ChainStateF = adlerchain::ChainState<f64>;
