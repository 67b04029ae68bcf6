//! Adaptive-precision inner products.
//!
//! Terms `b_i c_i` are routed to one of `p` precision levels
//! `u_1 < u_2 < ... < u_p` by comparing `|b_i c_i|` against the thresholds
//! `gamma * S / u_k`, `S = |b|^T |c|`:
//!
//! ```text
//! G_1 = { i : |b_i c_i| >  gamma S / u_2 }
//! G_k = { i : gamma S / u_(k+1) < |b_i c_i| <= gamma S / u_k },  1 < k < p
//! G_p = { i : |b_i c_i| <= gamma S / u_p }
//! ```
//!
//! Each group is summed sequentially in its own precision and the partial
//! sums are added, in group order, in the most accurate precision `u_1`.
//! Large terms therefore stay accurate while the bulk of small terms is
//! summed cheaply, and the relative error is `O(gamma)`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::ledger::{CostLedger, OpCounts};
use super::uniform::{accumulate, check_lengths};
use crate::error::{Error, Result};
use crate::fpemu::{CostWeight, PrecisionFormat};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApConfig {
    levels: Vec<PrecisionFormat>,
    gamma: f64,
}

impl ApConfig {
    /// `levels` must be ordered from most to least accurate and
    /// `gamma >= u_1`.
    pub fn new(levels: Vec<PrecisionFormat>, gamma: f64) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidScheme("at least one precision level required".into()));
        }
        for w in levels.windows(2) {
            if w[0].unit_roundoff() >= w[1].unit_roundoff() {
                return Err(Error::InvalidScheme(format!(
                    "unit roundoffs must increase strictly: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if !(gamma.is_finite() && gamma >= levels[0].unit_roundoff()) {
            return Err(Error::InvalidScheme(format!(
                "target accuracy {gamma:e} below u_1 = {:e}",
                levels[0].unit_roundoff()
            )));
        }
        Ok(Self { levels, gamma })
    }

    pub fn levels(&self) -> &[PrecisionFormat] {
        &self.levels
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Number of precision levels `p`.
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// `gamma S / u_k` for `k = 2..=p` (0-based index `k - 1`); decreasing.
    fn thresholds(&self, s: f64) -> Vec<f64> {
        self.levels[1..]
            .iter()
            .map(|f| self.gamma * s / f.unit_roundoff())
            .collect()
    }

    /// `sum q_k (m_k - 1)^+ + q_1 (p' - 1)` additions and `sum q_k m_k`
    /// multiplications, `p'` the number of nonempty groups, plus the
    /// selection pass `2M - 1` fp64-weighted operations as overhead.
    pub fn counts(&self, len: usize, group_sizes: &[usize]) -> OpCounts {
        let mut adds = Ratio::from_integer(0);
        let mut muls = Ratio::from_integer(0);
        let mut nonempty = 0u64;
        for (f, &m) in self.levels.iter().zip(group_sizes) {
            if m > 0 {
                nonempty += 1;
                adds += f.cost_weight() * Ratio::from_integer(m as u64 - 1);
                muls += f.cost_weight() * Ratio::from_integer(m as u64);
            }
        }
        if nonempty > 1 {
            adds += self.levels[0].cost_weight() * Ratio::from_integer(nonempty - 1);
        }
        OpCounts::new(adds, muls, selection_overhead(len))
    }
}

/// Weighted cost of computing `S = |b|^T |c|` in double precision.
pub(crate) fn selection_overhead(len: usize) -> CostWeight {
    PrecisionFormat::fp64().cost_weight() * Ratio::from_integer((2 * len).saturating_sub(1) as u64)
}

/// Partition of the indices into precision groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupAssignment {
    /// 0-based level of each index.
    pub group_of: Vec<usize>,
    /// `m_k`.
    pub group_sizes: Vec<usize>,
    /// `S = |b|^T |c|`, computed in double precision.
    pub magnitude_sum: f64,
}

impl GroupAssignment {
    /// `beta_k = sum_{i in G_k} |b_i c_i| / S`.
    pub fn magnitude_fractions(&self, b: &[f64], c: &[f64]) -> Vec<f64> {
        let mut sums = vec![0.0; self.group_sizes.len()];
        for (i, &k) in self.group_of.iter().enumerate() {
            sums[k] += (b[i] * c[i]).abs();
        }
        sums.iter().map(|s| s / self.magnitude_sum).collect()
    }

    pub fn nonempty_groups(&self) -> usize {
        self.group_sizes.iter().filter(|&&m| m > 0).count()
    }

    fn indices(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.group_of
            .iter()
            .enumerate()
            .filter(move |(_, &g)| g == k)
            .map(|(i, _)| i)
    }
}

pub(crate) fn magnitude_sum(b: &[f64], c: &[f64]) -> f64 {
    b.iter().zip(c).map(|(x, y)| (x * y).abs()).sum()
}

pub fn assign_groups(b: &[f64], c: &[f64], cfg: &ApConfig) -> Result<GroupAssignment> {
    check_lengths(b, c)?;
    let s = magnitude_sum(b, c);
    if s == 0.0 {
        return Err(Error::ZeroMagnitude);
    }
    let thresholds = cfg.thresholds(s);
    let mut sizes = vec![0usize; cfg.level_count()];
    let group_of: Vec<usize> = b
        .iter()
        .zip(c)
        .map(|(x, y)| {
            let v = (x * y).abs();
            // thresholds[j] = gamma S / u_(j+2) decreases with j.
            let k = thresholds.iter().take_while(|&&t| v <= t).count();
            sizes[k] += 1;
            k
        })
        .collect();
    Ok(GroupAssignment {
        group_of,
        group_sizes: sizes,
        magnitude_sum: s,
    })
}

pub fn dot_ap(b: &[f64], c: &[f64], cfg: &ApConfig, ledger: &mut CostLedger) -> Result<f64> {
    let len = check_lengths(b, c)?;
    let groups = match assign_groups(b, c, cfg) {
        Ok(g) => g,
        Err(Error::ZeroMagnitude) => {
            let delta = OpCounts::new(
                Ratio::from_integer(0),
                Ratio::from_integer(0),
                selection_overhead(len),
            );
            ledger.charge(len, Some(&vec![0; cfg.level_count()]), delta);
            return Ok(0.0);
        }
        Err(e) => return Err(e),
    };
    let top = &cfg.levels[0];
    let mut acc: Option<f64> = None;
    for (k, fmt) in cfg.levels.iter().enumerate() {
        if groups.group_sizes[k] == 0 {
            continue;
        }
        let (yk, _) = accumulate(b, c, groups.indices(k), fmt)?;
        let yk = top.round(yk)?;
        acc = Some(match acc {
            None => yk,
            Some(a) => top.add(a, yk)?,
        });
    }
    ledger.charge(len, Some(&groups.group_sizes), cfg.counts(len, &groups.group_sizes));
    Ok(acc.unwrap_or(0.0))
}

/// Right-hand side of the a-posteriori bound on `|y_hat - y| / S`:
///
/// `eps + (1 + eps) sum_k m_k u_k (1 + u_k)^2 beta_k`, `eps = (p - 1) u_1`,
///
/// with `p` the number of configured levels (empty groups included).
pub fn ap_error_bound(
    assignment: &GroupAssignment,
    cfg: &ApConfig,
    b: &[f64],
    c: &[f64],
) -> Result<f64> {
    if assignment.magnitude_sum == 0.0 {
        return Err(Error::ZeroMagnitude);
    }
    let eps = final_sum_eps(cfg);
    let betas = assignment.magnitude_fractions(b, c);
    let sum: f64 = cfg
        .levels
        .iter()
        .zip(&assignment.group_sizes)
        .zip(&betas)
        .map(|((f, &m), &beta)| {
            let u = f.unit_roundoff();
            m as f64 * u * (1.0 + u).powi(2) * beta
        })
        .sum();
    Ok(eps + (1.0 + eps) * sum)
}

/// The coarser bound `eps + c gamma` with `c = (1 + eps) sum_k m_k^2 (1 + u_k)^2`,
/// which follows from `beta_k <= m_k gamma / u_k`.
pub fn ap_a_priori_bound(assignment: &GroupAssignment, cfg: &ApConfig) -> Result<f64> {
    if assignment.magnitude_sum == 0.0 {
        return Err(Error::ZeroMagnitude);
    }
    let eps = final_sum_eps(cfg);
    let c: f64 = cfg
        .levels
        .iter()
        .zip(&assignment.group_sizes)
        .map(|(f, &m)| (m as f64).powi(2) * (1.0 + f.unit_roundoff()).powi(2))
        .sum::<f64>()
        * (1.0 + eps);
    Ok(eps + c * cfg.gamma)
}

fn final_sum_eps(cfg: &ApConfig) -> f64 {
    (cfg.level_count() as f64 - 1.0) * cfg.levels[0].unit_roundoff()
}
