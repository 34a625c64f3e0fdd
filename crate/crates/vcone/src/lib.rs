//! Simple Lie algebras over fields of odd prime characteristic in a
//! Chevalley basis, with the machinery needed to verify sl2-triple
//! uniqueness questions mechanically: exact linear algebra over `F_p`,
//! nilpotent-orbit partition calculus for the classical types, the
//! rank-of-ad^(p-1) partial order, and the three-step elimination pipeline
//! that certifies when a triple completion is unique up to centraliser
//! conjugacy.

pub mod catalog;
pub mod chevalley;
pub mod exactalg;
pub mod monogamy;
pub mod orbits;
pub mod rootsys;
pub mod sl2;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("invalid type: {0}")]
    InvalidType(String),
    #[error("bad prime: {0}")]
    BadPrime(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("inconsistent system: {0}")]
    InconsistentSystem(String),
    #[error("unknown orbit: {0}")]
    UnknownOrbit(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
