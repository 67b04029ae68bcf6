//! Finite-precision inner products and the matrix products built on them.

mod adaptive;
mod ledger;
mod mixed;
mod scheme;
mod uniform;

pub use adaptive::{ap_a_priori_bound, ap_error_bound, assign_groups, dot_ap, ApConfig, GroupAssignment};
pub use ledger::{CostLedger, KernelCall, OpCounts};
pub use mixed::{dot_mp, MpConfig};
pub use scheme::{parse_scheme_list, predicted_costs, Scheme};
pub use uniform::dot_uniform;

use crate::error::{Error, Result};
use crate::linalg::RealMatrix;

/// `A B` with every entry evaluated as a scheme inner product of a row of
/// `A` and a column of `B`. Entries are produced row by row.
pub fn matmul_finite(
    a: &RealMatrix,
    b: &RealMatrix,
    scheme: &Scheme,
    ledger: &mut CostLedger,
) -> Result<RealMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} times {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let columns: Vec<Vec<f64>> = (0..b.cols()).map(|j| b.column(j)).collect();
    let mut out = RealMatrix::zeros(a.rows(), b.cols());
    for i in 0..a.rows() {
        let row = a.row(i);
        for (j, col) in columns.iter().enumerate() {
            out[(i, j)] = scheme.dot(row, col, ledger)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpemu::PrecisionFormat;

    fn sample(rows: usize, cols: usize, seed: u64) -> RealMatrix {
        RealMatrix::from_fn(rows, cols, |i, j| {
            let x = (seed as f64 + 1.7 * i as f64 + 0.31 * j as f64 * j as f64).sin();
            x * 3.0
        })
    }

    #[test]
    fn identity_is_exact_in_every_scheme() {
        let b = RealMatrix::from_fn(4, 3, |i, j| (i * 3 + j) as f64 - 5.5);
        let id = RealMatrix::identity(4);
        for s in ["uniform:fp16", "mp:fp16:fp64:B=2", "ap:fp64,fp32,fp16:gamma=2^-16"] {
            let scheme: Scheme = s.parse().unwrap();
            let mut l = CostLedger::new();
            assert_eq!(matmul_finite(&id, &b, &scheme, &mut l).unwrap(), b, "{s}");
            assert_eq!(l.calls(), 12);
        }
    }

    #[test]
    fn fp64_matches_plain_product() {
        let a = sample(5, 7, 1);
        let b = sample(7, 3, 2);
        let mut l = CostLedger::new();
        let fin = matmul_finite(&a, &b, &Scheme::fp64(), &mut l).unwrap();
        let plain = a.matmul(&b).unwrap();
        for (x, y) in fin.as_slice().iter().zip(plain.as_slice()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        assert_eq!(l.totals().adds_f64(), 15.0 * 4.0 * 6.0);
    }

    #[test]
    fn dimension_mismatch() {
        let mut l = CostLedger::new();
        let s = Scheme::Uniform(PrecisionFormat::fp32());
        assert!(matmul_finite(&sample(2, 3, 0), &sample(2, 3, 0), &s, &mut l).is_err());
    }
}
