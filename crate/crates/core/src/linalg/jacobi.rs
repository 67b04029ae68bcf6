//! Jacobi-type decompositions: one-sided SVD of a short-and-wide matrix and
//! two-sided eigensolvers for real symmetric and complex Hermitian matrices.

use num_complex::Complex64;

use super::{ComplexMatrix, RealMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Thin SVD `D = U diag(sigma) V^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    /// K x K.
    pub u: RealMatrix,
    /// Descending, nonnegative.
    pub sigma: Vec<f64>,
    /// M x K, orthonormal columns.
    pub v: RealMatrix,
}

/// Economy SVD of a `K x M` matrix with `K <= M` by one-sided Jacobi on the
/// columns of `D^T`.
pub fn economy_svd(d: &RealMatrix) -> Result<Svd> {
    let (k, m) = (d.rows(), d.cols());
    if k == 0 || k > m {
        return Err(Error::DimensionMismatch(format!(
            "economy SVD expects K <= M, got {k}x{m}"
        )));
    }
    // columns of D^T are the rows of D
    let mut cols: Vec<Vec<f64>> = (0..k).map(|i| d.row(i).to_vec()).collect();
    let mut w: Vec<Vec<f64>> = (0..k)
        .map(|j| (0..k).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let tol = f64::EPSILON * m as f64;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha: f64 = cols[p].iter().map(|x| x * x).sum();
                let beta: f64 = cols[q].iter().map(|x| x * x).sum();
                let gamma: f64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut cols, p, q, c, s);
                rotate_pair(&mut w, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence("one-sided Jacobi SVD"));
    }

    let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));

    let mut u = RealMatrix::zeros(k, k);
    let mut v = RealMatrix::zeros(m, k);
    let mut sigma = Vec::with_capacity(k);
    let mut missing = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        u.set_column(dst, &w[src]);
        let s = norms[src];
        sigma.push(s);
        if s > f64::MIN_POSITIVE {
            let col: Vec<f64> = cols[src].iter().map(|x| x / s).collect();
            v.set_column(dst, &col);
        } else {
            missing.push(dst);
        }
    }
    complete_orthonormal(&mut v, &missing);
    Ok(Svd { u, sigma, v })
}

fn rotate_pair(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    let (a, b) = (&mut lo[p], &mut hi[0]);
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// Fills the listed columns of `v` with unit vectors orthogonal to every
/// other column, by Gram-Schmidt over the canonical basis.
fn complete_orthonormal(v: &mut RealMatrix, missing: &[usize]) {
    let m = v.rows();
    let mut filled: Vec<usize> = (0..v.cols()).filter(|j| !missing.contains(j)).collect();
    let mut candidate = 0;
    for &j in missing {
        while candidate < m {
            let mut x = vec![0.0; m];
            x[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for &f in &filled {
                    let col = v.column(f);
                    let dot: f64 = col.iter().zip(&x).map(|(a, b)| a * b).sum();
                    for (xi, ci) in x.iter_mut().zip(&col) {
                        *xi -= dot * ci;
                    }
                }
            }
            let n = x.iter().map(|t| t * t).sum::<f64>().sqrt();
            if n > 1e-8 {
                let x: Vec<f64> = x.iter().map(|t| t / n).collect();
                v.set_column(j, &x);
                filled.push(j);
                break;
            }
        }
    }
}

/// Off-diagonal entry small enough to leave alone: relative to the diagonal
/// pair, with an absolute floor for (near-)zero diagonals.
fn negligible(off: f64, app: f64, aqq: f64, scale: f64) -> bool {
    off == 0.0
        || off <= f64::EPSILON * (app * aqq).abs().sqrt()
        || off <= f64::EPSILON * f64::EPSILON * scale
}

/// Eigenpairs, eigenvalues in descending order and eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: RealMatrix,
}

/// Cyclic Jacobi eigendecomposition of a real symmetric matrix.
pub fn symmetric_eigen(a: &RealMatrix) -> Result<SymmetricEigen> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::DimensionMismatch("eigendecomposition needs a square matrix".into()));
    }
    let mut a = a.clone();
    let mut v = RealMatrix::identity(n);
    let scale = a.frobenius_norm();
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (apq, app, aqq) = (a[(p, q)], a[(p, p)], a[(q, q)]);
                if negligible(apq.abs(), app, aqq, scale) {
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_finite() {
                    let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sgn / (theta.abs() + (theta * theta + 1.0).sqrt())
                } else {
                    0.0
                };
                if t == 0.0 {
                    continue;
                }
                rotated = true;
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (kp, kq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * kp - s * kq;
                    a[(k, q)] = s * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * pk - s * qk;
                    a[(q, k)] = s * pk + c * qk;
                }
                for k in 0..n {
                    let (kp, kq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * kp - s * kq;
                    v[(k, q)] = s * kp + c * kq;
                }
                // the annihilated pair, free of the update's roundoff
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence("symmetric Jacobi eigensolver"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = RealMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(SymmetricEigen { values, vectors })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Jacobi eigendecomposition of a complex Hermitian matrix. Each rotation
/// first makes `a_pq` real with a diagonal phase, then applies a real Givens
/// rotation.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::DimensionMismatch("eigendecomposition needs a square matrix".into()));
    }
    let mut a = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if negligible(mag, a[(p, p)].re, a[(q, q)].re, scale) {
                    continue;
                }
                let phase = apq.conj() / mag; // e^{-i phi}
                for k in 0..n {
                    a[(k, q)] *= phase;
                }
                for k in 0..n {
                    a[(q, k)] *= phase.conj();
                }
                for k in 0..n {
                    v[(k, q)] *= phase;
                }
                a[(p, q)] = Complex64::new(mag, 0.0);
                a[(q, p)] = Complex64::new(mag, 0.0);

                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta.is_finite() {
                    let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sgn / (theta.abs() + (theta * theta + 1.0).sqrt())
                } else {
                    0.0
                };
                if t == 0.0 {
                    continue;
                }
                rotated = true;
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (kp, kq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = kp * c - kq * s;
                    a[(k, q)] = kp * s + kq * c;
                }
                for k in 0..n {
                    let (pk, qk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = pk * c - qk * s;
                    a[(q, k)] = pk * s + qk * c;
                }
                for k in 0..n {
                    let (kp, kq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = kp * c - kq * s;
                    v[(k, q)] = kp * s + kq * c;
                }
                a[(p, p)] = Complex64::new(app - t * mag, 0.0);
                a[(q, q)] = Complex64::new(aqq + t * mag, 0.0);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence("Hermitian Jacobi eigensolver"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(svd: &Svd) -> RealMatrix {
        let k = svd.sigma.len();
        let us = RealMatrix::from_fn(k, k, |i, j| svd.u[(i, j)] * svd.sigma[j]);
        us.matmul(&svd.v.transpose()).unwrap()
    }

    #[test]
    fn diagonal_input() {
        let d = RealMatrix::from_row_major(2, 3, vec![1.0, 0.0, 0.0, 0.0, 3.0, 0.0]).unwrap();
        let svd = economy_svd(&d).unwrap();
        assert_eq!(svd.sigma, vec![3.0, 1.0]);
        assert!(reconstruct(&svd).sub(&d).frobenius_norm() < 1e-15);
    }

    #[test]
    fn zero_matrix() {
        let svd = economy_svd(&RealMatrix::zeros(3, 5)).unwrap();
        assert_eq!(svd.sigma, vec![0.0; 3]);
        assert_eq!(svd.u, RealMatrix::identity(3));
        assert!(svd.v.orthonormality_residual() < 1e-14);
    }

    #[test]
    fn rank_one_gets_completed_basis() {
        let d = RealMatrix::from_fn(3, 4, |i, j| (i + 1) as f64 * (j as f64 - 1.5));
        let svd = economy_svd(&d).unwrap();
        assert!(svd.sigma[1] < 1e-12 * svd.sigma[0]);
        assert!(svd.v.orthonormality_residual() < 1e-12);
        assert!(reconstruct(&svd).sub(&d).frobenius_norm() < 1e-12 * d.frobenius_norm());
    }

    #[test]
    fn symmetric_eigen_of_small_matrix() {
        let a = RealMatrix::from_row_major(2, 2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let e = symmetric_eigen(&a).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        assert!(e.vectors.orthonormality_residual() < 1e-14);
    }

    #[test]
    fn hermitian_eigen_of_small_matrix() {
        // [[2, i], [-i, 2]] has eigenvalues 3 and 1
        let a = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => Complex64::new(0.0, 1.0),
            (1, 0) => Complex64::new(0.0, -1.0),
            _ => Complex64::new(2.0, 0.0),
        });
        let e = hermitian_eigen(&a).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let av = a.matmul(&e.vectors).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((av[(i, j)] - e.vectors[(i, j)] * e.values[j]).norm() < 1e-14);
            }
        }
    }
}
