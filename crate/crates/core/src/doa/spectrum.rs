use serde::{Deserialize, Serialize};

use super::array::{steering_complex, steering_real, ArrayConfig};
use crate::error::{Error, Result};
use crate::kernels::{CostLedger, Scheme};
use crate::linalg::{ComplexMatrix, RealMatrix};

/// Relative denominator floor; the absolute floor is this times `M`.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

/// Orthonormality tolerance for subspaces handed to the classic spectrum.
pub const ORTHONORMALITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub angles_deg: Vec<f64>,
    pub values: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values in dB relative to the maximum.
    pub fn normalized_db(&self) -> Vec<f64> {
        let max = self.values.iter().cloned().fold(f64::MIN, f64::max);
        self.values.iter().map(|v| 10.0 * (v / max).log10()).collect()
    }
}

/// `count` equally spaced angles covering [-90, 90] degrees inclusive.
pub fn angle_grid(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let step = 180.0 / (count - 1) as f64;
            (0..count)
                .map(|i| if i == count - 1 { 90.0 } else { -90.0 + step * i as f64 })
                .collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceKind {
    /// `P = 1 / (a^H (I - U_s U_s^H) a)`.
    Signal,
    /// `P = 1 / (a^H U_n U_n^H a)`.
    Noise,
}

fn floored_inverse(denominator: f64, m: usize) -> f64 {
    1.0 / denominator.max(DENOMINATOR_FLOOR * m as f64)
}

/// Complex MUSIC pseudo-spectrum in double precision.
pub fn spectrum_classic(
    subspace: &ComplexMatrix,
    kind: SubspaceKind,
    grid: &[f64],
    cfg: &ArrayConfig,
) -> Result<Spectrum> {
    let m = cfg.sensors();
    if subspace.rows() != m {
        return Err(Error::DimensionMismatch(format!(
            "subspace has {} rows for {m} sensors",
            subspace.rows()
        )));
    }
    let resid = subspace.orthonormality_residual();
    if resid > ORTHONORMALITY_TOLERANCE {
        return Err(Error::NotOrthonormal(resid));
    }
    let adj = subspace.adjoint();
    let values = grid
        .iter()
        .map(|&theta| {
            let a = steering_complex(theta, cfg);
            let norm2: f64 = a.iter().map(|z| z.norm_sqr()).sum();
            let proj: f64 = (0..adj.rows())
                .map(|r| {
                    (0..m)
                        .map(|c| adj[(r, c)] * a[c])
                        .sum::<num_complex::Complex64>()
                        .norm_sqr()
                })
                .sum();
            let denom = match kind {
                SubspaceKind::Signal => norm2 - proj,
                SubspaceKind::Noise => proj,
            };
            floored_inverse(denom, m)
        })
        .collect();
    Ok(Spectrum {
        angles_deg: grid.to_vec(),
        values,
    })
}

/// Real-valued pseudo-spectrum `1 / (a~^T (I - E E^T) a~)` with every inner
/// product run under `scheme`: per angle `v = E^T a~` (N dots),
/// `s1 = a~^T a~` and `s2 = v^T v`, denominator `s1 - s2`.
pub fn spectrum_real(
    signal_subspace: &RealMatrix,
    grid: &[f64],
    cfg: &ArrayConfig,
    scheme: &Scheme,
    ledger: &mut CostLedger,
) -> Result<Spectrum> {
    let m = cfg.sensors();
    if signal_subspace.rows() != m {
        return Err(Error::DimensionMismatch(format!(
            "subspace has {} rows for {m} sensors",
            signal_subspace.rows()
        )));
    }
    let columns: Vec<Vec<f64>> = (0..signal_subspace.cols())
        .map(|j| signal_subspace.column(j))
        .collect();
    let mut values = Vec::with_capacity(grid.len());
    let mut v = vec![0.0; columns.len()];
    for &theta in grid {
        let a = steering_real(theta, cfg)?;
        for (vn, col) in v.iter_mut().zip(&columns) {
            *vn = scheme.dot(col, &a, ledger)?;
        }
        let s1 = scheme.dot(&a, &a, ledger)?;
        let s2 = if v.is_empty() { 0.0 } else { scheme.dot(&v, &v, ledger)? };
        values.push(floored_inverse(s1 - s2, m));
    }
    Ok(Spectrum {
        angles_deg: grid.to_vec(),
        values,
    })
}

/// The `n` largest local maxima of the spectrum, as ascending angles.
///
/// Interior points qualify when strictly above both neighbours, end points
/// when strictly above their single neighbour. Missing peaks are filled with
/// the largest remaining grid values. Ties go to the smaller index.
pub fn find_peaks(spec: &Spectrum, n: usize) -> Vec<f64> {
    let p = &spec.values;
    let f = p.len();
    if f == 0 || n == 0 {
        return Vec::new();
    }
    let is_peak = |i: usize| {
        let left = i == 0 || p[i - 1] < p[i];
        let right = i + 1 == f || p[i + 1] < p[i];
        f > 1 && left && right
    };
    let by_value = |a: &usize, b: &usize| p[*b].total_cmp(&p[*a]).then(a.cmp(b));

    let mut peaks: Vec<usize> = (0..f).filter(|&i| is_peak(i)).collect();
    peaks.sort_by(by_value);
    peaks.truncate(n);
    if peaks.len() < n {
        let mut rest: Vec<usize> = (0..f).filter(|i| !peaks.contains(i)).collect();
        rest.sort_by(by_value);
        peaks.extend(rest.into_iter().take(n - peaks.len()));
    }
    let mut angles: Vec<f64> = peaks.into_iter().map(|i| spec.angles_deg[i]).collect();
    angles.sort_by(f64::total_cmp);
    angles
}
