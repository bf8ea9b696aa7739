//! Exact computations in the category of matrix factorizations `MF(W)`.

pub mod action;
pub mod equivariant;
pub mod error;
pub mod factorization;
pub mod homotopy;
pub mod linalg;
pub mod matrix;
pub mod poly;
pub mod scalar;
pub mod singcat;
pub mod suite;
pub mod weights;
pub mod workspace;

pub use error::{Error, Result};
pub use matrix::PolyMatrix;
pub use poly::{Monomial, Polynomial};
pub use scalar::{Field, Scalar};

#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
