use rand::Rng;
use rand_distr::StandardNormal;

use super::{economy_svd, householder_qr, RealMatrix};
use crate::error::{Error, Result};
use crate::kernels::{matmul_finite, CostLedger, Scheme};

#[derive(Debug, Clone, PartialEq)]
pub struct RandomizedSvd {
    /// `U_K = T U_hat`, M x K.
    pub left: RealMatrix,
    pub singular_values: Vec<f64>,
    /// The Gaussian test matrix that produced the accepted sketch.
    pub sketch: RealMatrix,
}

/// Rank-K randomized SVD of a square matrix without oversampling or power
/// iterations:
///
/// 1. draw `Omega` (M x K) with i.i.d. standard normal entries,
/// 2. `B = C Omega` under `scheme`,
/// 3. `T = qr(B)`,
/// 4. `D = T^T C` under `scheme`,
/// 5. `D = U_hat S V^T`,
/// 6. `U_K = T U_hat`.
///
/// Only the two products of steps 2 and 4 are metered and run in finite
/// precision. A sketch that is numerically zero is redrawn once; a sketch of
/// lower rank than `K` (as for an exactly rank-deficient `C`) is accepted and
/// `T` is completed to an orthonormal basis.
pub fn randomized_svd<R: Rng + ?Sized>(
    c: &RealMatrix,
    k: usize,
    scheme: &Scheme,
    ledger: &mut CostLedger,
    rng: &mut R,
) -> Result<RandomizedSvd> {
    let m = c.rows();
    if c.cols() != m {
        return Err(Error::DimensionMismatch(format!(
            "randomized SVD needs a square matrix, got {}x{}",
            m,
            c.cols()
        )));
    }
    if k == 0 || k > m {
        return Err(Error::InvalidParameter(format!("rank {k} outside 1..={m}")));
    }
    let mut attempt = 0;
    let (omega, t) = loop {
        let omega = RealMatrix::from_fn(m, k, |_, _| rng.sample(StandardNormal));
        let b = matmul_finite(c, &omega, scheme, ledger)?;
        let (t, rank, smallest) = householder_qr(&b)?;
        if rank > 0 {
            break (omega, t);
        }
        if attempt > 0 {
            return Err(Error::DegenerateSketch(smallest));
        }
        attempt += 1;
    };
    let d = matmul_finite(&t.transpose(), c, scheme, ledger)?;
    let svd = economy_svd(&d)?;
    let left = t.matmul(&svd.u)?;
    Ok(RandomizedSvd {
        left,
        singular_values: svd.sigma,
        sketch: omega,
    })
}
