//! Exact matrix realizations of the q-Onsager algebra, its embedding into the
//! quantum loop algebra of sl₂, and its higher-rank split analogues in type A.
//!
//! Every algebraic statement is checked on concrete finite-dimensional modules
//! with coefficients in ℚ(q). A numeric layer specializes q to a complex value
//! where root extraction is unavoidable.

pub mod exec;
pub mod linmat;
pub mod loopsl2;
pub mod onsager;
pub mod ranka;
pub mod report;
pub mod scalars;
pub mod series;
pub mod spectra;

pub use exec::Exec;
pub use linmat::Matrix;
pub use report::{Check, Report};
pub use scalars::Scalar;

/// Errors raised by the library.
#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("grading error: {0}")]
    Grading(String),
    #[error("insufficient data: {0}")]
    Insufficient(String),
    #[error("ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
