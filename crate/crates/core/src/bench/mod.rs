//! Monte-Carlo harness: DOA scenario sampling, paired trials across
//! estimator/scheme variants, RMSE and weighted-cost tables.

mod emit;

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use emit::{read_csv, read_json, write_csv, write_json, SWEEP_JSON_SCHEMA};

use crate::doa::{
    angle_grid, synthesize_snapshots, ArrayConfig, Estimate, Estimator, Method, SnapshotMatrix,
};
use crate::error::{Error, Result};
use crate::kernels::{predicted_costs, CostLedger, OpCounts, Scheme};
use crate::linalg::RealMatrix;

/// Consecutive rejections after which DOA sampling gives up.
pub const MAX_REJECTIONS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub sensors: usize,
    pub sources: usize,
    pub snapshots: usize,
    pub rank: usize,
    pub grid_points: usize,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub doa_range_deg: [f64; 2],
    pub min_separation_deg: f64,
    pub schemes: Vec<Scheme>,
    pub methods: Vec<Method>,
    pub master_seed: u64,
    /// Check every metered kernel call against the closed-form costs.
    pub audit: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let schemes = ["fp64", "uniform:fp16", "mp:fp16:fp64:B=2", "ap:fp64,fp32,fp16:gamma=2^-16"]
            .iter()
            .map(|s| s.parse().expect("builtin scheme"))
            .collect();
        Self {
            sensors: 20,
            sources: 5,
            snapshots: 40,
            rank: 10,
            grid_points: 1500,
            snr_db: vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0],
            trials: 200,
            doa_range_deg: [-60.0, 60.0],
            min_separation_deg: 10.0,
            schemes,
            methods: Method::ALL.to_vec(),
            master_seed: 42,
            audit: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.sources < self.rank && self.rank < self.sensors) {
            return bad(format!(
                "need N < K < M, got N = {}, K = {}, M = {}",
                self.sources, self.rank, self.sensors
            ));
        }
        if self.sources == 0 || self.snapshots == 0 || self.trials == 0 {
            return bad("N, T and the trial count must be positive".into());
        }
        if self.grid_points < 3 {
            return bad("the angle grid needs at least 3 points".into());
        }
        let [lo, hi] = self.doa_range_deg;
        if !(lo < hi && lo >= -90.0 && hi <= 90.0) {
            return bad(format!("bad DOA range [{lo}, {hi}]"));
        }
        if self.min_separation_deg < 0.0
            || self.min_separation_deg * (self.sources as f64 - 1.0) >= hi - lo
        {
            return bad("minimum separation is infeasible for the DOA range".into());
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        if self.methods.contains(&Method::RuMusic) && self.schemes.is_empty() {
            return bad("ru_music needs at least one scheme".into());
        }
        if self.snr_db.iter().any(|s| s.is_nan()) {
            return bad("SNR values must not be NaN".into());
        }
        ArrayConfig::new(self.sensors)?;
        Ok(())
    }

    /// The (method, scheme) pairs a trial runs. Methods that ignore the
    /// scheme run once, labelled fp64.
    pub fn variants(&self) -> Vec<(Method, Scheme)> {
        let mut out = Vec::new();
        for &m in &self.methods {
            if m.uses_scheme() {
                out.extend(self.schemes.iter().map(|s| (m, s.clone())));
            } else {
                out.push((m, Scheme::fp64()));
            }
        }
        out
    }

    fn estimator(&self) -> Result<Estimator> {
        Estimator::new(
            ArrayConfig::new(self.sensors)?,
            self.sources,
            self.rank,
            angle_grid(self.grid_points),
        )
    }
}

/// `n` sorted angles, uniform on `range` and pairwise at least `min_sep`
/// apart, by rejection of whole draws.
pub fn sample_doas<R: Rng + ?Sized>(
    n: usize,
    range: [f64; 2],
    min_sep: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let [lo, hi] = range;
    if n == 0 || lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(Error::InvalidParameter(format!("cannot draw {n} angles from [{lo}, {hi}]")));
    }
    for _ in 0..MAX_REJECTIONS {
        let mut d: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
        d.sort_by(f64::total_cmp);
        if d.windows(2).all(|w| w[1] - w[0] >= min_sep) {
            return Ok(d);
        }
    }
    Err(Error::Infeasible(MAX_REJECTIONS))
}

/// The random stream of one trial: ChaCha8 keyed by the master seed and the
/// two indices, so trials can run in any order on any number of threads.
pub fn trial_rng(master_seed: u64, snr_index: usize, trial_index: usize) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&(snr_index as u64).to_le_bytes());
    seed[16..24].copy_from_slice(&(trial_index as u64).to_le_bytes());
    seed[24..].copy_from_slice(b"fpmusic\0");
    ChaCha8Rng::from_seed(seed)
}

fn digest_values(values: impl Iterator<Item = f64>) -> u64 {
    let mut h = DefaultHasher::new();
    for v in values {
        v.to_bits().hash(&mut h);
    }
    h.finish()
}

pub fn snapshot_digest(x: &SnapshotMatrix) -> u64 {
    digest_values(x.data().as_slice().iter().flat_map(|z| [z.re, z.im]))
}

pub fn matrix_digest(m: &RealMatrix) -> u64 {
    digest_values(m.as_slice().iter().copied())
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantOutcome {
    pub method: Method,
    pub scheme: Scheme,
    /// Sorted estimates, or the estimator's error.
    pub estimate: Result<Vec<f64>>,
    pub ledger: CostLedger,
    pub snapshot_digest: u64,
    pub sketch_digest: Option<u64>,
    /// Metered calls checked against the closed forms (audit mode only).
    pub audited_calls: u64,
    pub audit_mismatches: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub snr_db: f64,
    pub trial_index: usize,
    pub true_doas: Vec<f64>,
    pub outcomes: Vec<VariantOutcome>,
}

impl TrialResult {
    pub fn outcome(&self, method: Method, scheme: &Scheme) -> Option<&VariantOutcome> {
        self.outcomes
            .iter()
            .find(|o| o.method == method && (!method.uses_scheme() || &o.scheme == scheme))
    }
}

fn audit_ledger(ledger: &CostLedger, scheme: &Scheme) -> (u64, u64) {
    let Some(calls) = ledger.audit() else {
        return (0, 0);
    };
    let mismatches = calls
        .iter()
        .filter(|c| predicted_costs(c.len, scheme, c.groups.as_deref()).ok() != Some(c.delta))
        .count();
    (calls.len() as u64, mismatches as u64)
}

/// One paired trial. Every variant sees the same snapshots and, through a
/// shared seed, the same Gaussian sketch.
pub fn run_trial(cfg: &SweepConfig, snr_index: usize, trial_index: usize) -> Result<TrialResult> {
    let snr_db = *cfg
        .snr_db
        .get(snr_index)
        .ok_or_else(|| Error::InvalidParameter(format!("no SNR at index {snr_index}")))?;
    let estimator = cfg.estimator()?;
    run_trial_with(cfg, &estimator, snr_db, snr_index, trial_index)
}

/// Every variant of one trial with its full estimate and ledger.
#[derive(Debug, Clone)]
pub struct PairedTrial {
    pub true_doas: Vec<f64>,
    pub snapshot_digest: u64,
    pub variants: Vec<(Method, Scheme, Result<Estimate>, CostLedger)>,
}

/// Like [`run_trial`] but keeps spectra and ledgers.
pub fn run_paired_trial(cfg: &SweepConfig, snr_index: usize, trial_index: usize) -> Result<PairedTrial> {
    cfg.validate()?;
    let snr_db = *cfg
        .snr_db
        .get(snr_index)
        .ok_or_else(|| Error::InvalidParameter(format!("no SNR at index {snr_index}")))?;
    paired(cfg, &cfg.estimator()?, snr_db, snr_index, trial_index)
}

fn paired(
    cfg: &SweepConfig,
    estimator: &Estimator,
    snr_db: f64,
    snr_index: usize,
    trial_index: usize,
) -> Result<PairedTrial> {
    let mut rng = trial_rng(cfg.master_seed, snr_index, trial_index);
    let true_doas = sample_doas(cfg.sources, cfg.doa_range_deg, cfg.min_separation_deg, &mut rng)?;
    let x = synthesize_snapshots(&true_doas, cfg.snapshots, snr_db, estimator.array(), &mut rng)?;
    let sketch_seed = rng.next_u64();
    let variants = cfg
        .variants()
        .into_iter()
        .map(|(method, scheme)| {
            let mut ledger = if cfg.audit { CostLedger::audited() } else { CostLedger::new() };
            let mut sketch_rng = ChaCha8Rng::seed_from_u64(sketch_seed);
            let result = estimator.estimate(method, &x, &scheme, &mut ledger, &mut sketch_rng);
            (method, scheme, result, ledger)
        })
        .collect();
    Ok(PairedTrial {
        true_doas,
        snapshot_digest: snapshot_digest(&x),
        variants,
    })
}

fn run_trial_with(
    cfg: &SweepConfig,
    estimator: &Estimator,
    snr_db: f64,
    snr_index: usize,
    trial_index: usize,
) -> Result<TrialResult> {
    let p = paired(cfg, estimator, snr_db, snr_index, trial_index)?;
    let x_digest = p.snapshot_digest;
    let outcomes = p
        .variants
        .into_iter()
        .map(|(method, scheme, result, mut ledger)| {
            let sketch_digest = result
                .as_ref()
                .ok()
                .and_then(|e| e.sketch.as_ref())
                .map(matrix_digest);
            let audit_scheme = if method.uses_scheme() { scheme.clone() } else { Scheme::fp64() };
            let (audited_calls, audit_mismatches) = audit_ledger(&ledger, &audit_scheme);
            if ledger.audit().is_some() {
                // keep only the totals; the per-call log has been checked
                let mut plain = CostLedger::new();
                plain.merge(&ledger);
                ledger = plain;
            }
            VariantOutcome {
                method,
                scheme,
                estimate: result.map(|e| e.doas),
                ledger,
                snapshot_digest: x_digest,
                sketch_digest,
                audited_calls,
                audit_mismatches,
            }
        })
        .collect();
    Ok(TrialResult {
        snr_db,
        trial_index,
        true_doas: p.true_doas,
        outcomes,
    })
}

/// All trials at one SNR, in trial order.
pub fn run_trials(cfg: &SweepConfig, snr_index: usize) -> Result<Vec<TrialResult>> {
    cfg.validate()?;
    let snr_db = *cfg
        .snr_db
        .get(snr_index)
        .ok_or_else(|| Error::InvalidParameter(format!("no SNR at index {snr_index}")))?;
    let estimator = cfg.estimator()?;
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial_with(cfg, &estimator, snr_db, snr_index, t))
        .collect()
}

/// `sqrt(sum (est - truth)^2 / (L N))` with both vectors of each pair
/// sorted ascending before pairing.
pub fn rmse(pairs: &[(&[f64], &[f64])]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::Empty);
    }
    let n = pairs[0].0.len();
    let mut sum = 0.0;
    for (truth, est) in pairs {
        if truth.len() != n || est.len() != n {
            return Err(Error::LengthMismatch {
                left: truth.len(),
                right: est.len(),
            });
        }
        let mut t = truth.to_vec();
        let mut e = est.to_vec();
        t.sort_by(f64::total_cmp);
        e.sort_by(f64::total_cmp);
        sum += t.iter().zip(&e).map(|(a, b)| (b - a) * (b - a)).sum::<f64>();
    }
    Ok((sum / (pairs.len() * n) as f64).sqrt())
}

/// RMSE of one variant over a set of trials; failed trials are skipped.
pub fn variant_rmse(trials: &[TrialResult], method: Method, scheme: &Scheme) -> Option<f64> {
    let pairs: Vec<(&[f64], &[f64])> = trials
        .iter()
        .filter_map(|t| {
            let o = t.outcome(method, scheme)?;
            o.estimate.as_ref().ok().map(|e| (t.true_doas.as_slice(), e.as_slice()))
        })
        .collect();
    rmse(&pairs).ok()
}

/// One line of the sweep table. Costs are means over successful trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub method: Method,
    pub scheme: String,
    pub rmse_deg: Option<f64>,
    pub failures: usize,
    pub weighted_adds: f64,
    pub weighted_muls: f64,
    pub overhead: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    pub audited_calls: u64,
    pub audit_mismatches: u64,
}

/// Summarises trials at one SNR into one row per variant.
pub fn summarize(cfg: &SweepConfig, snr_db: f64, trials: &[TrialResult]) -> Vec<SweepRow> {
    cfg.variants()
        .into_iter()
        .map(|(method, scheme)| {
            let mut totals = OpCounts::default();
            let mut ok = 0usize;
            let mut failures = 0usize;
            for t in trials {
                if let Some(o) = t.outcome(method, &scheme) {
                    if o.estimate.is_ok() {
                        ok += 1;
                        totals += o.ledger.totals();
                    } else {
                        failures += 1;
                    }
                }
            }
            let mean = |v: f64| if ok == 0 { 0.0 } else { v / ok as f64 };
            SweepRow {
                snr_db,
                method,
                scheme: scheme.to_string(),
                rmse_deg: variant_rmse(trials, method, &scheme),
                failures,
                weighted_adds: mean(totals.adds_f64()),
                weighted_muls: mean(totals.muls_f64()),
                overhead: mean(totals.overhead_f64()),
            }
        })
        .collect()
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let (mut audited_calls, mut audit_mismatches) = (0, 0);
    for (i, &snr) in cfg.snr_db.iter().enumerate() {
        let trials = run_trials(cfg, i)?;
        for o in trials.iter().flat_map(|t| &t.outcomes) {
            audited_calls += o.audited_calls;
            audit_mismatches += o.audit_mismatches;
        }
        rows.extend(summarize(cfg, snr, &trials));
    }
    Ok(SweepResult {
        config: cfg.clone(),
        rows,
        audited_calls,
        audit_mismatches,
    })
}

/// Closed-form weighted costs of the metered dots of one RU-MUSIC run:
/// `2MK + F(N+1)` dots of length `M` and `F` of length `N`. `None` for
/// adaptive schemes, whose costs depend on the data.
pub fn ru_music_costs(m: usize, n: usize, k: usize, f: usize, scheme: &Scheme) -> Result<Option<OpCounts>> {
    if scheme.is_adaptive() {
        return Ok(None);
    }
    let long = predicted_costs(m, scheme, None)?;
    let short = predicted_costs(n, scheme, None)?;
    let mut total = OpCounts::default();
    let scale = |c: OpCounts, times: usize| {
        let t = crate::fpemu::CostWeight::from_integer(times as u64);
        OpCounts::new(c.adds * t, c.muls * t, c.overhead * t)
    };
    total += scale(long, 2 * m * k + f * (n + 1));
    total += scale(short, f);
    Ok(Some(total))
}
