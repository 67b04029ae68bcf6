//! Uniform linear array model, unitary transform, MUSIC pseudo-spectra and
//! the MUSIC / U-MUSIC / RU-MUSIC estimators.

mod array;
mod estimate;
mod signal;
mod spectrum;

use std::io::Write;

pub use array::{
    steering_complex, steering_real, steering_real_numeric, unitary_matrix, unitary_transform,
    ArrayConfig,
};
pub use estimate::{Estimate, Estimator, Method};
pub use signal::{noise_variance, sample_covariance, synthesize_snapshots, SnapshotMatrix};
pub use spectrum::{
    angle_grid, find_peaks, spectrum_classic, spectrum_real, Spectrum, SubspaceKind,
    DENOMINATOR_FLOOR, ORTHONORMALITY_TOLERANCE,
};

use crate::error::Result;

/// Writes `angle_deg,value,method,scheme` rows, each spectrum normalised so
/// its maximum is 0 dB.
pub fn write_spectrum_csv<W: Write>(out: W, spectra: &[(String, String, &Spectrum)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["angle_deg", "value", "method", "scheme"])?;
    for (method, scheme, spec) in spectra {
        for (angle, db) in spec.angles_deg.iter().zip(spec.normalized_db()) {
            w.write_record([angle.to_string(), db.to_string(), method.clone(), scheme.clone()])?;
        }
    }
    w.flush()?;
    Ok(())
}
