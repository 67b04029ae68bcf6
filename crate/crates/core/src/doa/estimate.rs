use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::array::{unitary_transform, ArrayConfig};
use super::signal::{sample_covariance, SnapshotMatrix};
use super::spectrum::{find_peaks, spectrum_classic, spectrum_real, Spectrum, SubspaceKind};
use crate::error::{Error, Result};
use crate::kernels::{CostLedger, Scheme};
use crate::linalg::{hermitian_eigen, randomized_svd, symmetric_eigen, RealMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Complex covariance, exact eigendecomposition, double precision.
    Music,
    /// Unitary transform, exact real eigendecomposition, double precision.
    UMusic,
    /// Unitary transform, randomized SVD and real spectrum under a scheme.
    RuMusic,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Music, Method::UMusic, Method::RuMusic];

    /// Whether the precision scheme affects this method.
    pub fn uses_scheme(&self) -> bool {
        matches!(self, Method::RuMusic)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Music => "music",
            Method::UMusic => "u_music",
            Method::RuMusic => "ru_music",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "music" => Ok(Method::Music),
            "u_music" | "u-music" | "umusic" => Ok(Method::UMusic),
            "ru_music" | "ru-music" | "rumusic" => Ok(Method::RuMusic),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
        }
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    /// Ascending.
    pub doas: Vec<f64>,
    pub spectrum: Spectrum,
    /// The Gaussian test matrix, for the randomized method only.
    pub sketch: Option<RealMatrix>,
}

/// Problem dimensions shared by the three estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimator {
    array: ArrayConfig,
    sources: usize,
    rank: usize,
    grid: Vec<f64>,
}

impl Estimator {
    /// `sources` is N, `rank` the sketch size K of the randomized method.
    pub fn new(array: ArrayConfig, sources: usize, rank: usize, grid: Vec<f64>) -> Result<Self> {
        let m = array.sensors();
        if sources == 0 || sources >= m {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= N < M, got N = {sources}, M = {m}"
            )));
        }
        if grid.len() < 3 {
            return Err(Error::InvalidParameter("the angle grid needs at least 3 points".into()));
        }
        Ok(Self {
            array,
            sources,
            rank,
            grid,
        })
    }

    pub fn array(&self) -> &ArrayConfig {
        &self.array
    }

    pub fn sources(&self) -> usize {
        self.sources
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    fn check_real_method(&self, method: Method) -> Result<()> {
        let m = self.array.sensors();
        if !m.is_multiple_of(2) {
            return Err(Error::UnsupportedGeometry(format!(
                "{method} needs an even sensor count, got {m}"
            )));
        }
        if method == Method::RuMusic && !(self.sources < self.rank && self.rank < m) {
            return Err(Error::InvalidParameter(format!(
                "ru_music needs N < K < M, got N = {}, K = {}, M = {m}",
                self.sources, self.rank
            )));
        }
        Ok(())
    }

    /// Runs one estimator on the snapshots. Only `ru_music` consults
    /// `scheme` and `rng`; `u_music` meters its spectrum dots in fp64 and
    /// `music` meters nothing.
    pub fn estimate<R: Rng + ?Sized>(
        &self,
        method: Method,
        x: &SnapshotMatrix,
        scheme: &Scheme,
        ledger: &mut CostLedger,
        rng: &mut R,
    ) -> Result<Estimate> {
        let m = self.array.sensors();
        if x.sensors() != m {
            return Err(Error::DimensionMismatch(format!(
                "snapshots have {} rows for {m} sensors",
                x.sensors()
            )));
        }
        let r = sample_covariance(x);
        let n = self.sources;
        let (spectrum, sketch) = match method {
            Method::Music => {
                let eig = hermitian_eigen(&r)?;
                let us = eig.vectors.leading_columns(n);
                (spectrum_classic(&us, SubspaceKind::Signal, &self.grid, &self.array)?, None)
            }
            Method::UMusic => {
                self.check_real_method(method)?;
                let c = unitary_transform(&r)?;
                let eig = symmetric_eigen(&c)?;
                let es = eig.vectors.leading_columns(n);
                let spec = spectrum_real(&es, &self.grid, &self.array, &Scheme::fp64(), ledger)?;
                (spec, None)
            }
            Method::RuMusic => {
                self.check_real_method(method)?;
                let c = unitary_transform(&r)?;
                let rsvd = randomized_svd(&c, self.rank, scheme, ledger, rng)?;
                let es = rsvd.left.leading_columns(n);
                let spec = spectrum_real(&es, &self.grid, &self.array, scheme, ledger)?;
                (spec, Some(rsvd.sketch))
            }
        };
        let doas = find_peaks(&spectrum, n);
        Ok(Estimate {
            doas,
            spectrum,
            sketch,
        })
    }
}
