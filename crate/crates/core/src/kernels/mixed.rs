use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::ledger::{CostLedger, OpCounts};
use super::uniform::{accumulate, check_lengths};
use crate::error::{Error, Result};
use crate::fpemu::{CostWeight, PrecisionFormat};

/// Blocked two-precision inner product: each block of `block_size`
/// consecutive terms is summed in `low`, the block sums in `high`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MpConfig {
    low: PrecisionFormat,
    high: PrecisionFormat,
    block_size: usize,
}

impl MpConfig {
    /// `low` may coincide with `high`, which degenerates to a uniform
    /// inner product.
    pub fn new(low: PrecisionFormat, high: PrecisionFormat, block_size: usize) -> Result<Self> {
        if block_size == 0 {
            return Err(Error::InvalidScheme("block size must be at least 1".into()));
        }
        if low.unit_roundoff() < high.unit_roundoff() {
            return Err(Error::InvalidScheme(format!(
                "low precision {low} is more accurate than high precision {high}"
            )));
        }
        Ok(Self {
            low,
            high,
            block_size,
        })
    }

    pub fn low(&self) -> &PrecisionFormat {
        &self.low
    }

    pub fn high(&self) -> &PrecisionFormat {
        &self.high
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    /// `ceil(M / B)`.
    pub fn block_count(&self, len: usize) -> usize {
        len.div_ceil(self.block_size)
    }

    /// Weighted multiplications of a single full block, `q_l B`. The ledger
    /// charges the total over all blocks instead.
    pub fn per_block_multiplications(&self) -> CostWeight {
        self.low.cost_weight() * Ratio::from_integer(self.block_size as u64)
    }

    /// `q_l (M - p) + q_h (p - 1)` additions and `q_l M` multiplications.
    /// When `B` divides `M` the addition count is `p q_l (B - 1) + q_h (p - 1)`.
    pub fn counts(&self, len: usize) -> OpCounts {
        let p = self.block_count(len) as u64;
        let m = len as u64;
        let ql = self.low.cost_weight();
        let qh = self.high.cost_weight();
        OpCounts::new(
            ql * Ratio::from_integer(m - p) + qh * Ratio::from_integer(p - 1),
            ql * Ratio::from_integer(m),
            Ratio::from_integer(0),
        )
    }
}

pub fn dot_mp(b: &[f64], c: &[f64], cfg: &MpConfig, ledger: &mut CostLedger) -> Result<f64> {
    let m = check_lengths(b, c)?;
    let y = if cfg.low.same_arithmetic(&cfg.high) {
        // One precision throughout: the block boundaries do not change a
        // sequential sum.
        accumulate(b, c, 0..m, &cfg.low)?.0
    } else {
        let mut acc: Option<f64> = None;
        for start in (0..m).step_by(cfg.block_size) {
            let end = (start + cfg.block_size).min(m);
            let (yk, _) = accumulate(b, c, start..end, &cfg.low)?;
            let yk = cfg.high.round(yk)?;
            acc = Some(match acc {
                None => yk,
                Some(a) => cfg.high.add(a, yk)?,
            });
        }
        acc.unwrap_or(0.0)
    };
    ledger.charge(m, None, cfg.counts(m));
    Ok(y)
}
