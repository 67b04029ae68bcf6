use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::array::{steering_complex, ArrayConfig};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Array observations, one column per snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix {
    data: ComplexMatrix,
}

impl SnapshotMatrix {
    pub fn new(data: ComplexMatrix) -> Result<Self> {
        if data.cols() == 0 {
            return Err(Error::InvalidParameter("at least one snapshot required".into()));
        }
        if data.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("snapshots must be finite".into()));
        }
        Ok(Self { data })
    }

    pub fn data(&self) -> &ComplexMatrix {
        &self.data
    }

    pub fn sensors(&self) -> usize {
        self.data.rows()
    }

    pub fn snapshots(&self) -> usize {
        self.data.cols()
    }
}

/// Noise variance for a per-source SNR in dB (unit source power).
pub fn noise_variance(snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        0.0
    } else {
        10f64.powf(-snr_db / 10.0)
    }
}

fn circular_gaussian<R: Rng + ?Sized>(rng: &mut R, std: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * (std * std::f64::consts::FRAC_1_SQRT_2)
}

/// `x(t) = A(theta) s(t) + n(t)` with unit-power incoherent circular Gaussian
/// sources and `n(t) ~ CN(0, sigma^2 I)`. Per snapshot the source amplitudes
/// are drawn first, then the noise of each sensor.
pub fn synthesize_snapshots<R: Rng + ?Sized>(
    true_doas_deg: &[f64],
    snapshots: usize,
    snr_db: f64,
    cfg: &ArrayConfig,
    rng: &mut R,
) -> Result<SnapshotMatrix> {
    let m = cfg.sensors();
    let n = true_doas_deg.len();
    if n >= m {
        return Err(Error::InvalidParameter(format!(
            "{n} sources need more than {m} sensors"
        )));
    }
    if snapshots == 0 {
        return Err(Error::InvalidParameter("at least one snapshot required".into()));
    }
    for (i, a) in true_doas_deg.iter().enumerate() {
        if true_doas_deg[..i].contains(a) {
            return Err(Error::InvalidParameter(format!("duplicate DOA {a}")));
        }
    }
    let sigma = noise_variance(snr_db).sqrt();
    let steering: Vec<Vec<Complex64>> =
        true_doas_deg.iter().map(|&t| steering_complex(t, cfg)).collect();
    let mut x = ComplexMatrix::zeros(m, snapshots);
    for t in 0..snapshots {
        let s: Vec<Complex64> = (0..n).map(|_| circular_gaussian(rng, 1.0)).collect();
        for row in 0..m {
            let mut v = circular_gaussian(rng, sigma);
            for (a, sn) in steering.iter().zip(&s) {
                v += a[row] * sn;
            }
            x[(row, t)] = v;
        }
    }
    SnapshotMatrix::new(x)
}

/// `R = X X^H / T`.
pub fn sample_covariance(x: &SnapshotMatrix) -> ComplexMatrix {
    let d = x.data();
    let (m, t) = (d.rows(), d.cols());
    let mut r = ComplexMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..t {
                acc += d[(i, k)] * d[(j, k)].conj();
            }
            acc /= t as f64;
            r[(i, j)] = acc;
            r[(j, i)] = acc.conj();
        }
        r[(i, i)].im = 0.0;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noiseless_single_source_is_a_scaled_steering_vector() {
        let cfg = ArrayConfig::new(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = synthesize_snapshots(&[17.0], 1, f64::INFINITY, &cfg, &mut rng).unwrap();
        let a = steering_complex(17.0, &cfg);
        let s = x.data()[(0, 0)];
        for (m, am) in a.iter().enumerate() {
            assert!((x.data()[(m, 0)] - am * s).norm() < 1e-14);
        }
    }

    #[test]
    fn deterministic_and_validated() {
        let cfg = ArrayConfig::new(4).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            synthesize_snapshots(&[-10.0, 30.0], 5, 3.0, &cfg, &mut rng).unwrap()
        };
        assert_eq!(draw(9), draw(9));
        assert_ne!(draw(9), draw(10));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(synthesize_snapshots(&[0.0, 1.0, 2.0, 3.0], 5, 0.0, &cfg, &mut rng).is_err());
        assert!(synthesize_snapshots(&[5.0, 5.0], 5, 0.0, &cfg, &mut rng).is_err());
    }

    #[test]
    fn covariance_of_zero_and_rank_one() {
        let z = SnapshotMatrix::new(ComplexMatrix::zeros(3, 4)).unwrap();
        assert_eq!(sample_covariance(&z), ComplexMatrix::zeros(3, 3));
        let v = [Complex64::new(1.0, 2.0), Complex64::new(0.0, -1.0), Complex64::new(3.0, 0.5)];
        let x = SnapshotMatrix::new(ComplexMatrix::from_fn(3, 1, |i, _| v[i])).unwrap();
        let r = sample_covariance(&x);
        for i in 0..3 {
            for j in 0..3 {
                assert!((r[(i, j)] - v[i] * v[j].conj()).norm() < 1e-15);
            }
        }
    }
}
