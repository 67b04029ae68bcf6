use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, RealMatrix};

/// Half-wavelength uniform linear array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    sensors: usize,
    spacing_over_wavelength: f64,
}

impl ArrayConfig {
    pub fn new(sensors: usize) -> Result<Self> {
        if sensors < 2 {
            return Err(Error::InvalidParameter(format!(
                "an array needs at least 2 sensors, got {sensors}"
            )));
        }
        Ok(Self {
            sensors,
            spacing_over_wavelength: 0.5,
        })
    }

    pub fn sensors(&self) -> usize {
        self.sensors
    }

    pub fn spacing_over_wavelength(&self) -> f64 {
        self.spacing_over_wavelength
    }

    /// `pi d / lambda * sin(theta)`, the half inter-sensor phase step.
    fn half_phase(&self, theta_deg: f64) -> f64 {
        PI * self.spacing_over_wavelength * theta_deg.to_radians().sin()
    }
}

/// `a(theta)_m = exp(-j 2 pi (d / lambda) m sin(theta))`, `m = 0..M`.
pub fn steering_complex(theta_deg: f64, cfg: &ArrayConfig) -> Vec<Complex64> {
    let step = 2.0 * cfg.half_phase(theta_deg);
    (0..cfg.sensors)
        .map(|m| {
            if m == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::from_polar(1.0, -step * m as f64)
            }
        })
        .collect()
}

/// Real steering vector matched to [`unitary_transform`], for even `M = 2L`
/// and `phi = pi (d / lambda) sin(theta)`:
///
/// ```text
/// sqrt(2) [cos((2L-1) phi), ..., cos(phi), sin((2L-1) phi), ..., sin(phi)]
/// ```
///
/// This equals `exp(j (M-1) phi) Q^H a(theta)`, which is real.
pub fn steering_real(theta_deg: f64, cfg: &ArrayConfig) -> Result<Vec<f64>> {
    let m = cfg.sensors;
    if !m.is_multiple_of(2) {
        return Err(Error::UnsupportedGeometry(format!(
            "closed-form real steering needs an even sensor count, got {m}"
        )));
    }
    let half = m / 2;
    let phi = cfg.half_phase(theta_deg);
    let mut out = Vec::with_capacity(m);
    out.extend((1..=half).rev().map(|i| SQRT_2 * ((2 * i - 1) as f64 * phi).cos()));
    out.extend((1..=half).rev().map(|i| SQRT_2 * ((2 * i - 1) as f64 * phi).sin()));
    Ok(out)
}

/// `exp(j (M-1) phi) Q^H a(theta)` evaluated numerically; valid for odd `M`
/// as well. Returns the real part (the imaginary part vanishes up to rounding).
pub fn steering_real_numeric(theta_deg: f64, cfg: &ArrayConfig) -> Vec<f64> {
    let a = steering_complex(theta_deg, cfg);
    let phase = Complex64::from_polar(1.0, (cfg.sensors as f64 - 1.0) * cfg.half_phase(theta_deg));
    let cols = unitary_columns(cfg.sensors);
    cols.iter()
        .map(|col| {
            let z: Complex64 = col.iter().map(|&(r, q)| q.conj() * a[r]).sum();
            (phase * z).re
        })
        .collect()
}

/// Nonzeros `(row, value)` of each column of the sparse unitary `Q`.
fn unitary_columns(m: usize) -> Vec<Vec<(usize, Complex64)>> {
    let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let i = Complex64::new(0.0, FRAC_1_SQRT_2);
    let half = m / 2;
    let mut cols = Vec::with_capacity(m);
    for j in 0..half {
        cols.push(vec![(j, r), (m - 1 - j, r)]);
    }
    if m % 2 == 1 {
        cols.push(vec![(half, Complex64::new(1.0, 0.0))]);
    }
    for j in 0..half {
        cols.push(vec![(j, i), (m - 1 - j, -i)]);
    }
    cols
}

/// The unitary `Q` as a dense matrix: `[[I, jI], [J, -jJ]] / sqrt(2)` for
/// even `M`, with the extra centre row/column `sqrt(2)` for odd `M`.
pub fn unitary_matrix(m: usize) -> ComplexMatrix {
    let mut q = ComplexMatrix::zeros(m, m);
    for (j, col) in unitary_columns(m).into_iter().enumerate() {
        for (row, v) in col {
            q[(row, j)] = v;
        }
    }
    q
}

/// `C = Re(Q^H R Q)`; each entry touches at most four entries of `R`.
pub fn unitary_transform(r: &ComplexMatrix) -> Result<RealMatrix> {
    let m = r.rows();
    if r.cols() != m || m < 2 {
        return Err(Error::DimensionMismatch(format!(
            "unitary transform needs a square matrix of order >= 2, got {}x{}",
            m,
            r.cols()
        )));
    }
    let cols = unitary_columns(m);
    let mut c = RealMatrix::zeros(m, m);
    for (i, ci) in cols.iter().enumerate() {
        for (j, cj) in cols.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(k, qk) in ci {
                for &(l, ql) in cj {
                    acc += qk.conj() * r[(k, l)] * ql;
                }
            }
            c[(i, j)] = acc.re;
        }
    }
    Ok(c)
}
