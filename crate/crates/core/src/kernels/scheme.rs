use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::adaptive::{dot_ap, ApConfig};
use super::ledger::{CostLedger, OpCounts};
use super::mixed::{dot_mp, MpConfig};
use super::uniform::{dot_uniform, uniform_counts};
use crate::error::{Error, Result};
use crate::fpemu::PrecisionFormat;

/// How an inner product is evaluated.
///
/// Textual forms (as accepted by [`FromStr`] and produced by `Display`):
///
/// - `uniform:fp16` (a bare format name such as `fp64` is accepted too)
/// - `mp:fp16:fp64:B=2`
/// - `ap:fp64,fp32,fp16:gamma=2^-16`
///
/// Formats are builtin names or a parenthesised `(t:emin:emax:q)` descriptor.
#[derive(Debug, Clone, PartialEq)]
pub enum Scheme {
    Uniform(PrecisionFormat),
    Mixed(MpConfig),
    Adaptive(ApConfig),
}

impl Scheme {
    pub fn fp64() -> Self {
        Scheme::Uniform(PrecisionFormat::fp64())
    }

    pub fn dot(&self, b: &[f64], c: &[f64], ledger: &mut CostLedger) -> Result<f64> {
        match self {
            Scheme::Uniform(f) => dot_uniform(b, c, f, ledger),
            Scheme::Mixed(cfg) => dot_mp(b, c, cfg, ledger),
            Scheme::Adaptive(cfg) => dot_ap(b, c, cfg, ledger),
        }
    }

    pub fn is_adaptive(&self) -> bool {
        matches!(self, Scheme::Adaptive(_))
    }
}

/// Closed-form weighted counts for one inner product of length `len`.
/// Adaptive schemes need the observed group sizes `m_k`.
pub fn predicted_costs(len: usize, scheme: &Scheme, group_sizes: Option<&[usize]>) -> Result<OpCounts> {
    if len == 0 {
        return Err(Error::Empty);
    }
    match scheme {
        Scheme::Uniform(f) => Ok(uniform_counts(len, f)),
        Scheme::Mixed(cfg) => Ok(cfg.counts(len)),
        Scheme::Adaptive(cfg) => {
            let sizes = group_sizes.ok_or_else(|| {
                Error::InvalidParameter("adaptive cost needs group sizes".into())
            })?;
            if sizes.len() != cfg.level_count() {
                return Err(Error::LengthMismatch {
                    left: sizes.len(),
                    right: cfg.level_count(),
                });
            }
            let total: usize = sizes.iter().sum();
            // all-zero sizes encode the S = 0 short circuit
            if total != len && total != 0 {
                return Err(Error::InvalidParameter(format!(
                    "group sizes sum to {total}, expected {len}"
                )));
            }
            Ok(cfg.counts(len, sizes))
        }
    }
}

fn format_token(f: &PrecisionFormat) -> String {
    if f.name().contains(':') {
        format!("({})", f.name())
    } else {
        f.name().to_string()
    }
}

fn parse_format(tok: &str) -> Result<PrecisionFormat> {
    let tok = tok.trim();
    let inner = tok
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .unwrap_or(tok);
    inner.parse()
}

fn gamma_token(g: f64) -> String {
    let e = g.log2();
    if e.fract() == 0.0 && 2f64.powi(e as i32) == g {
        format!("2^{}", e as i32)
    } else {
        format!("{g:e}")
    }
}

fn parse_gamma(s: &str) -> Result<f64> {
    let bad = || Error::InvalidScheme(format!("bad gamma {s:?}"));
    if let Some(exp) = s.strip_prefix("2^") {
        let e: i32 = exp.parse().map_err(|_| bad())?;
        Ok(2f64.powi(e))
    } else {
        s.parse().map_err(|_| bad())
    }
}

/// Splits on `sep` outside parentheses.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Uniform(p) => write!(f, "uniform:{}", format_token(p)),
            Scheme::Mixed(c) => write!(
                f,
                "mp:{}:{}:B={}",
                format_token(c.low()),
                format_token(c.high()),
                c.block_size()
            ),
            Scheme::Adaptive(c) => {
                let levels: Vec<String> = c.levels().iter().map(format_token).collect();
                write!(f, "ap:{}:gamma={}", levels.join(","), gamma_token(c.gamma()))
            }
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parts = split_top(s, ':');
        let bad = |msg: &str| Error::InvalidScheme(format!("{s:?}: {msg}"));
        match parts[0] {
            "uniform" => {
                if parts.len() != 2 {
                    return Err(bad("expected uniform:<format>"));
                }
                Ok(Scheme::Uniform(parse_format(parts[1])?))
            }
            "mp" => {
                if parts.len() != 4 {
                    return Err(bad("expected mp:<low>:<high>:B=<n>"));
                }
                let block = parts[3]
                    .strip_prefix("B=")
                    .and_then(|b| b.parse().ok())
                    .ok_or_else(|| bad("bad block size"))?;
                Ok(Scheme::Mixed(MpConfig::new(
                    parse_format(parts[1])?,
                    parse_format(parts[2])?,
                    block,
                )?))
            }
            "ap" => {
                if parts.len() != 3 {
                    return Err(bad("expected ap:<f1>,<f2>,...:gamma=<g>"));
                }
                let levels = split_top(parts[1], ',')
                    .into_iter()
                    .map(parse_format)
                    .collect::<Result<Vec<_>>>()?;
                let gamma = parts[2]
                    .strip_prefix("gamma=")
                    .ok_or_else(|| bad("missing gamma="))?;
                Ok(Scheme::Adaptive(ApConfig::new(levels, parse_gamma(gamma)?)?))
            }
            _ if parts.len() == 1 || s.starts_with('(') => Ok(Scheme::Uniform(parse_format(s)?)),
            other => Err(bad(&format!("unknown scheme kind {other:?}"))),
        }
    }
}

/// Parses a comma-separated scheme list. Commas inside an `ap:` level list
/// are kept with their scheme: a token continues the pending `ap:` entry
/// until that entry has its `gamma=` part.
pub fn parse_scheme_list(s: &str) -> Result<Vec<Scheme>> {
    let mut entries: Vec<String> = Vec::new();
    for tok in split_top(s, ',') {
        let tok = tok.trim();
        match entries.last_mut() {
            Some(last) if last.starts_with("ap:") && !last.contains("gamma=") => {
                last.push(',');
                last.push_str(tok);
            }
            _ if tok.is_empty() => {}
            _ => entries.push(tok.to_string()),
        }
    }
    entries.iter().map(|e| e.parse()).collect()
}

impl Serialize for Scheme {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scheme {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
