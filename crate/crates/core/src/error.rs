use thiserror::Error;

use crate::poly::Polynomial;

#[derive(Debug, Error)]
pub enum Error {
    /// Operands live in different rings, or arguments are otherwise malformed.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("ring mismatch: {0}")]
    RingMismatch(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("the superpotential must be non-zero")]
    ZeroSuperpotential,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("not a matrix factorization: {0}")]
    NotFactorization(String),

    #[error("sum of products differs from the superpotential by {residual}")]
    KoszulResidual { residual: Polynomial },

    #[error("not a chain map: {0}")]
    NotChainMap(String),

    #[error("inconsistent grading: {0}")]
    Grading(String),

    #[error("no grading available; an explicit degree bound is required")]
    MissingGrading,

    #[error("the superpotential is not invariant under the group action")]
    NotInvariant,

    #[error("entry {which}[{row},{col}] mixes characters; no diagonal linearization, refine basis")]
    MixedCharacters { which: &'static str, row: usize, col: usize },

    #[error("equivariant structure mismatch: {0}")]
    StructureMismatch(String),

    #[error("unknown object {0:?}")]
    UnknownObject(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
