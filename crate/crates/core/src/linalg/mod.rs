//! Small dense linear algebra in double precision, plus the randomized SVD
//! whose sketch products run under a finite-precision scheme.

mod jacobi;
mod matrix;
mod qr;
mod rsvd;

pub use jacobi::{economy_svd, hermitian_eigen, symmetric_eigen, HermitianEigen, Svd, SymmetricEigen};
pub use matrix::{ComplexMatrix, RealMatrix};
pub use qr::{economy_qr, householder_qr, RANK_TOLERANCE};
pub use rsvd::{randomized_svd, RandomizedSvd};

/// Largest principal angle (radians) between the column spans of `a` and
/// `b`, both with orthonormal columns and `b` of no larger rank than `a`.
/// Computed as `asin ||(I - A A^T) B||_2`, which stays accurate for tiny
/// angles.
pub fn max_principal_angle(a: &RealMatrix, b: &RealMatrix) -> f64 {
    let proj = a.matmul(&a.transpose().matmul(b).expect("matching row counts")).expect("shapes");
    let resid = b.sub(&proj);
    let svd = economy_svd(&resid.transpose()).expect("Jacobi SVD of a small matrix");
    svd.sigma[0].min(1.0).asin()
}
