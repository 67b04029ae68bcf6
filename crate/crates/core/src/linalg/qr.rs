use super::RealMatrix;
use crate::error::{Error, Result};

/// Relative size of `|r_kk|` below which the input counts as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Thin orthonormal factor `T` (M x K) of a Householder QR of `b`, with
/// column signs chosen so that `diag(R) > 0`. Rank deficiency is an error.
pub fn economy_qr(b: &RealMatrix) -> Result<RealMatrix> {
    let (t, rank, smallest) = householder_qr(b)?;
    if rank < b.cols() {
        return Err(Error::DegenerateSketch(smallest));
    }
    Ok(t)
}

/// Householder QR that tolerates rank deficiency: a column whose remaining
/// norm is below `RANK_TOLERANCE * ||b||_F` gets no reflector, so `T` stays
/// orthonormal and its extra columns complete the basis. Returns `T`, the
/// numerical rank and the smallest remaining column norm seen.
pub fn householder_qr(b: &RealMatrix) -> Result<(RealMatrix, usize, f64)> {
    let (m, k) = (b.rows(), b.cols());
    if k == 0 || m < k {
        return Err(Error::DimensionMismatch(format!(
            "economy QR needs M >= K >= 1, got {m}x{k}"
        )));
    }
    let scale = b.frobenius_norm();
    let mut a = b.clone();
    let mut reflectors: Vec<Option<Vec<f64>>> = Vec::with_capacity(k);
    let mut diag = Vec::with_capacity(k);
    let mut smallest = f64::INFINITY;

    for j in 0..k {
        let x: Vec<f64> = (j..m).map(|i| a[(i, j)]).collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        smallest = smallest.min(norm);
        if norm <= RANK_TOLERANCE * scale || scale == 0.0 {
            diag.push(1.0);
            reflectors.push(None);
            continue;
        }
        let alpha = if x[0] >= 0.0 { -norm } else { norm };
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        for t in &mut v {
            *t /= vnorm;
        }
        // A[j.., j..] -= 2 v (v^T A[j.., j..])
        for col in j..k {
            let dot: f64 = v.iter().enumerate().map(|(r, vr)| vr * a[(j + r, col)]).sum();
            for (r, vr) in v.iter().enumerate() {
                a[(j + r, col)] -= 2.0 * vr * dot;
            }
        }
        diag.push(alpha);
        reflectors.push(Some(v));
    }

    // T = H_0 H_1 ... H_(k-1) [I_k; 0]
    let mut t = RealMatrix::from_fn(m, k, |i, j| if i == j { 1.0 } else { 0.0 });
    for (j, v) in reflectors.iter().enumerate().rev() {
        let Some(v) = v else { continue };
        for col in 0..k {
            let dot: f64 = v.iter().enumerate().map(|(r, vr)| vr * t[(j + r, col)]).sum();
            for (r, vr) in v.iter().enumerate() {
                t[(j + r, col)] -= 2.0 * vr * dot;
            }
        }
    }
    for (j, &r) in diag.iter().enumerate() {
        if r < 0.0 {
            for i in 0..m {
                t[(i, j)] = -t[(i, j)];
            }
        }
    }
    let rank = reflectors.iter().filter(|r| r.is_some()).count();
    Ok((t, rank, smallest))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_basis_is_reproduced() {
        let b = RealMatrix::from_fn(4, 2, |i, j| if i == j { 1.0 } else { 0.0 });
        let t = economy_qr(&b).unwrap();
        for i in 0..4 {
            for j in 0..2 {
                assert!((t[(i, j)].abs() - b[(i, j)]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn orthonormal_input_comes_back_up_to_sign() {
        let s = 0.5f64.sqrt();
        let b = RealMatrix::from_row_major(3, 2, vec![s, 0.0, s, 0.0, 0.0, -1.0]).unwrap();
        let t = economy_qr(&b).unwrap();
        for j in 0..2 {
            let dot: f64 = (0..3).map(|i| t[(i, j)] * b[(i, j)]).sum();
            assert!((dot.abs() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let b = RealMatrix::from_fn(5, 3, |i, j| if j == 2 { i as f64 } else { (i + j) as f64 });
        // third column equals the first
        assert!(matches!(economy_qr(&b), Err(Error::DegenerateSketch(_))));
        assert!(economy_qr(&RealMatrix::zeros(4, 2)).is_err());
        assert!(economy_qr(&RealMatrix::zeros(2, 4)).is_err());
        let (t, rank, _) = householder_qr(&b).unwrap();
        assert_eq!(rank, 2);
        assert!(t.orthonormality_residual() < 1e-14);
        let proj = t.matmul(&t.transpose().matmul(&b).unwrap()).unwrap();
        assert!(b.sub(&proj).frobenius_norm() < 1e-12 * b.frobenius_norm());
        let (_, rank, _) = householder_qr(&RealMatrix::zeros(4, 2)).unwrap();
        assert_eq!(rank, 0);
    }
}
