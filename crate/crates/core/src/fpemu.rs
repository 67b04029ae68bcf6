//! Software emulation of binary floating-point formats narrower than `f64`.
//!
//! Values are stored as `f64`. Every elementary operation is carried out
//! exactly (using an error-free transformation for the low part) and the exact
//! result is rounded once to the target format, round-to-nearest ties-to-even.
//! Subnormals of the target format are supported; overflow is reported as an
//! error unless the format was built with [`ExponentRange::Unlimited`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative cost of one arithmetic operation in a given format.
pub type CostWeight = Ratio<u64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum ExponentRange {
    /// `[emin, emax]` is honoured: gradual underflow, overflow is an error.
    #[default]
    Enforced,
    /// Only the significand width is emulated.
    Unlimited,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionFormat {
    name: String,
    significand_bits: u32,
    emin: i32,
    emax: i32,
    cost_weight: CostWeight,
    range: ExponentRange,
}

impl PrecisionFormat {
    /// `significand_bits` counts the implicit bit, so IEEE half precision is
    /// `t = 11`.
    pub fn new(
        name: impl Into<String>,
        significand_bits: u32,
        emin: i32,
        emax: i32,
        cost_weight: CostWeight,
    ) -> Result<Self> {
        let name = name.into();
        if !(2..=53).contains(&significand_bits) {
            return Err(Error::InvalidFormat(format!(
                "{name}: significand bits must lie in [2, 53], got {significand_bits}"
            )));
        }
        if emin >= emax {
            return Err(Error::InvalidFormat(format!(
                "{name}: emin ({emin}) must be below emax ({emax})"
            )));
        }
        if emin < -1022 || emax > 1023 {
            return Err(Error::InvalidFormat(format!(
                "{name}: exponent range [{emin}, {emax}] exceeds the f64 host range"
            )));
        }
        if *cost_weight.numer() == 0 {
            return Err(Error::InvalidFormat(format!("{name}: cost weight must be positive")));
        }
        Ok(Self {
            name,
            significand_bits,
            emin,
            emax,
            cost_weight,
            range: ExponentRange::Enforced,
        })
    }

    pub fn fp16() -> Self {
        Self::new("fp16", 11, -14, 15, Ratio::from_integer(1)).expect("valid builtin")
    }

    pub fn fp32() -> Self {
        Self::new("fp32", 24, -126, 127, Ratio::from_integer(2)).expect("valid builtin")
    }

    pub fn fp64() -> Self {
        Self::new("fp64", 53, -1022, 1023, Ratio::from_integer(4)).expect("valid builtin")
    }

    /// Same format with the exponent range switched off.
    pub fn unlimited(mut self) -> Self {
        self.range = ExponentRange::Unlimited;
        self
    }

    pub fn with_range(mut self, range: ExponentRange) -> Self {
        self.range = range;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn significand_bits(&self) -> u32 {
        self.significand_bits
    }

    pub fn emin(&self) -> i32 {
        self.emin
    }

    pub fn emax(&self) -> i32 {
        self.emax
    }

    pub fn cost_weight(&self) -> CostWeight {
        self.cost_weight
    }

    pub fn range(&self) -> ExponentRange {
        self.range
    }

    /// `u = 2^-t`.
    pub fn unit_roundoff(&self) -> f64 {
        pow2(-(self.significand_bits as i32))
    }

    /// `(2 - 2^(1-t)) * 2^emax`.
    pub fn max_finite(&self) -> f64 {
        let t = self.significand_bits as i32;
        (2.0 - pow2(1 - t)) * pow2(self.emax)
    }

    /// Smallest positive subnormal, `2^(emin - t + 1)`.
    pub fn min_subnormal(&self) -> f64 {
        pow2(self.emin - self.significand_bits as i32 + 1)
    }

    /// True when rounding and arithmetic agree bit for bit, ignoring the
    /// name and cost weight.
    pub fn same_arithmetic(&self, other: &Self) -> bool {
        self.significand_bits == other.significand_bits
            && self.emin == other.emin
            && self.emax == other.emax
            && self.range == other.range
    }

    fn is_host_double(&self) -> bool {
        self.significand_bits == 53 && self.emin == -1022
    }

    pub fn round(&self, x: f64) -> Result<f64> {
        self.round_exact(x, 0.0)
    }

    /// Rounds the exact value `hi + lo` where `hi = fl64(hi + lo)`.
    fn round_exact(&self, hi: f64, lo: f64) -> Result<f64> {
        if !hi.is_finite() {
            return Err(Error::NonFinite(hi));
        }
        if hi == 0.0 {
            return Ok(hi);
        }
        let y = if self.is_host_double() {
            hi
        } else {
            let t = self.significand_bits as i32;
            let mut e = exponent_of(hi);
            if self.range == ExponentRange::Enforced && e < self.emin {
                e = self.emin;
            }
            // scaled has at most t integer bits; its fractional part is exact.
            let shift = t - 1 - e;
            let scaled = scale(hi, shift);
            let trunc = scaled.trunc();
            let frac = (scaled - trunc).abs();
            let r = if frac == 0.5 && lo != 0.0 {
                if (lo > 0.0) == (scaled > 0.0) {
                    trunc + scaled.signum()
                } else {
                    trunc
                }
            } else {
                scaled.round_ties_even()
            };
            let r = if r == 0.0 { 0.0f64.copysign(hi) } else { r };
            scale(r, -shift)
        };
        if self.range == ExponentRange::Enforced && y.abs() > self.max_finite() {
            return Err(Error::Overflow {
                value: hi,
                format: self.name.clone(),
                max: self.max_finite(),
            });
        }
        Ok(y)
    }

    /// Correctly rounded `a + b`.
    pub fn add(&self, a: f64, b: f64) -> Result<f64> {
        let (s, e) = two_sum(a, b);
        self.round_exact(s, e)
    }

    /// Correctly rounded `a * b`.
    pub fn mul(&self, a: f64, b: f64) -> Result<f64> {
        let p = a * b;
        let e = if p.is_finite() { a.mul_add(b, -p) } else { 0.0 };
        self.round_exact(p, e)
    }
}

impl fmt::Display for PrecisionFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Parses either a builtin name (`fp16`, `fp32`, `fp64`, `bf16`) or a
/// descriptor `t:emin:emax:q` with `q` an integer or `a/b`.
impl FromStr for PrecisionFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(f) = builtin_formats().remove(s) {
            return Ok(f);
        }
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(Error::InvalidFormat(format!(
                "expected a builtin name or t:emin:emax:q, got {s:?}"
            )));
        }
        let bad = |what: &str| Error::InvalidFormat(format!("{s:?}: bad {what}"));
        let t: u32 = parts[0].parse().map_err(|_| bad("significand bits"))?;
        let emin: i32 = parts[1].parse().map_err(|_| bad("emin"))?;
        let emax: i32 = parts[2].parse().map_err(|_| bad("emax"))?;
        let q: CostWeight = parts[3].parse().map_err(|_| bad("cost weight"))?;
        PrecisionFormat::new(s, t, emin, emax, q)
    }
}

/// The builtin formats, keyed by name. fp16, fp32 and fp64 carry the cost
/// weights 1, 2 and 4.
pub fn builtin_formats() -> BTreeMap<String, PrecisionFormat> {
    let bf16 = PrecisionFormat::new("bf16", 8, -126, 127, Ratio::from_integer(1))
        .expect("valid builtin");
    [PrecisionFormat::fp16(), PrecisionFormat::fp32(), PrecisionFormat::fp64(), bf16]
        .into_iter()
        .map(|f| (f.name.clone(), f))
        .collect()
}

pub fn round_to_format(x: f64, fmt: &PrecisionFormat) -> Result<f64> {
    fmt.round(x)
}

pub fn rounded_add(a: f64, b: f64, fmt: &PrecisionFormat) -> Result<f64> {
    fmt.add(a, b)
}

pub fn rounded_mul(a: f64, b: f64, fmt: &PrecisionFormat) -> Result<f64> {
    fmt.mul(a, b)
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    if !s.is_finite() {
        return (s, 0.0);
    }
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// `floor(log2 |x|)` for finite nonzero `x`, subnormals included.
fn exponent_of(x: f64) -> i32 {
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    if biased != 0 {
        biased - 1023
    } else {
        let mant = bits & ((1u64 << 52) - 1);
        63 - mant.leading_zeros() as i32 - 1074
    }
}

/// Exact `2^n` for `n` in the `f64` range, subnormals included.
pub(crate) fn pow2(n: i32) -> f64 {
    if n >= -1022 {
        assert!(n <= 1023, "2^{n} overflows f64");
        f64::from_bits(((n + 1023) as u64) << 52)
    } else {
        assert!(n >= -1074, "2^{n} underflows f64");
        f64::from_bits(1u64 << (n + 1074))
    }
}

/// `x * 2^n`, split in steps so the multiplier never leaves the normal range.
fn scale(mut x: f64, mut n: i32) -> f64 {
    while n > 1023 {
        x *= pow2(1023);
        n -= 1023;
    }
    while n < -1022 {
        x *= pow2(-1022);
        n += 1022;
    }
    x * pow2(n)
}
