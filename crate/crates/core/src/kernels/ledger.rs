use std::ops::AddAssign;

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::fpemu::CostWeight;

/// Weighted operation counts. A weight is the relative cost of one operation
/// in the precision it was executed in, so an fp64 addition counts 4 and an
/// fp16 one counts 1 with the builtin formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OpCounts {
    pub adds: CostWeight,
    pub muls: CostWeight,
    /// Work outside the kernel's arithmetic proper, e.g. the adaptive
    /// scheme's selection pass. Never folded into `adds`/`muls`.
    pub overhead: CostWeight,
}

impl OpCounts {
    pub fn new(adds: CostWeight, muls: CostWeight, overhead: CostWeight) -> Self {
        Self { adds, muls, overhead }
    }

    pub fn adds_f64(&self) -> f64 {
        ratio_f64(self.adds)
    }

    pub fn muls_f64(&self) -> f64 {
        ratio_f64(self.muls)
    }

    pub fn overhead_f64(&self) -> f64 {
        ratio_f64(self.overhead)
    }
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.adds += rhs.adds;
        self.muls += rhs.muls;
        self.overhead += rhs.overhead;
    }
}

pub(crate) fn ratio_f64(r: CostWeight) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// One metered kernel invocation, kept only when auditing is switched on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelCall {
    pub len: usize,
    /// Group sizes `m_k` for adaptive-precision calls.
    pub groups: Option<Vec<usize>>,
    pub delta: OpCounts,
}

/// Accumulates weighted costs across kernel calls.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CostLedger {
    totals: OpCounts,
    calls: u64,
    audit: Option<Vec<KernelCall>>,
}

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// A ledger that also records every call with its delta.
    pub fn audited() -> Self {
        Self {
            audit: Some(Vec::new()),
            ..Self::default()
        }
    }

    pub fn totals(&self) -> OpCounts {
        self.totals
    }

    pub fn weighted_adds(&self) -> CostWeight {
        self.totals.adds
    }

    pub fn weighted_muls(&self) -> CostWeight {
        self.totals.muls
    }

    pub fn overhead(&self) -> CostWeight {
        self.totals.overhead
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }

    pub fn audit(&self) -> Option<&[KernelCall]> {
        self.audit.as_deref()
    }

    pub fn is_zero(&self) -> bool {
        self.totals.adds.is_zero() && self.totals.muls.is_zero() && self.totals.overhead.is_zero()
    }

    pub(crate) fn charge(&mut self, len: usize, groups: Option<&[usize]>, delta: OpCounts) {
        self.totals += delta;
        self.calls += 1;
        if let Some(log) = self.audit.as_mut() {
            log.push(KernelCall {
                len,
                groups: groups.map(<[usize]>::to_vec),
                delta,
            });
        }
    }

    /// Folds another ledger in; audit records are appended in order.
    pub fn merge(&mut self, other: &CostLedger) {
        self.totals += other.totals;
        self.calls += other.calls;
        if let (Some(mine), Some(theirs)) = (self.audit.as_mut(), other.audit.as_ref()) {
            mine.extend_from_slice(theirs);
        }
    }
}
