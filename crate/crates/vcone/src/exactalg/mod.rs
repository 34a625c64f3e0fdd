//! Exact linear algebra over `F_p` and sparse multivariate polynomial
//! arithmetic, including the rank-certificate machinery.

pub mod fp;
pub mod matrix;
pub mod poly;
pub mod polymat;

pub use matrix::MatrixFp;
pub use poly::{Mono, PolyFp};
pub use polymat::{
    find_rank_certificate, linear_constraints, vanishing_row_constraints, LinearOutcome,
    PolyMatrix, RankCertificate,
};
