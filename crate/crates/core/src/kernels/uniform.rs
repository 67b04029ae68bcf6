use num_rational::Ratio;

use super::ledger::{CostLedger, OpCounts};
use crate::error::{Error, Result};
use crate::fpemu::PrecisionFormat;

pub(crate) fn check_lengths(b: &[f64], c: &[f64]) -> Result<usize> {
    if b.len() != c.len() {
        return Err(Error::LengthMismatch {
            left: b.len(),
            right: c.len(),
        });
    }
    if b.is_empty() {
        return Err(Error::Empty);
    }
    Ok(b.len())
}

/// Sequential left-to-right `sum b_i c_i` over `indices` in `fmt`. Operands
/// are rounded to `fmt` before the product. Returns the sum and the number
/// of terms; an empty index set yields `0`.
pub(crate) fn accumulate(
    b: &[f64],
    c: &[f64],
    indices: impl IntoIterator<Item = usize>,
    fmt: &PrecisionFormat,
) -> Result<(f64, usize)> {
    let mut acc: Option<f64> = None;
    let mut n = 0;
    for i in indices {
        let bi = fmt.round(b[i])?;
        let ci = fmt.round(c[i])?;
        let prod = fmt.mul(bi, ci)?;
        acc = Some(match acc {
            None => prod,
            Some(a) => fmt.add(a, prod)?,
        });
        n += 1;
    }
    Ok((acc.unwrap_or(0.0), n))
}

/// Inner product in a single precision. Charges `q(M-1)` additions and `qM`
/// multiplications.
pub fn dot_uniform(
    b: &[f64],
    c: &[f64],
    fmt: &PrecisionFormat,
    ledger: &mut CostLedger,
) -> Result<f64> {
    let m = check_lengths(b, c)?;
    let (y, _) = accumulate(b, c, 0..m, fmt)?;
    ledger.charge(m, None, uniform_counts(m, fmt));
    Ok(y)
}

pub(crate) fn uniform_counts(m: usize, fmt: &PrecisionFormat) -> OpCounts {
    let q = fmt.cost_weight();
    OpCounts::new(
        q * Ratio::from_integer(m as u64 - 1),
        q * Ratio::from_integer(m as u64),
        Ratio::from_integer(0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_vector_charges_full_count() {
        let z = vec![0.0; 8];
        let mut l = CostLedger::new();
        let y = dot_uniform(&z, &z, &PrecisionFormat::fp16(), &mut l).unwrap();
        assert_eq!(y, 0.0);
        assert_eq!(l.weighted_adds(), Ratio::from_integer(7));
        assert_eq!(l.weighted_muls(), Ratio::from_integer(8));
    }

    #[test]
    fn small_integers_are_exact() {
        let one = [1.0; 4];
        let mut l = CostLedger::new();
        assert_eq!(dot_uniform(&one, &one, &PrecisionFormat::fp16(), &mut l).unwrap(), 4.0);
    }

    #[test]
    fn fp16_stagnation() {
        // 2048 + 1 is a tie in fp16 and rounds back to 2048.
        let b = [2048.0, 1.0, 1.0];
        let c = [1.0, 1.0, 1.0];
        let mut l = CostLedger::new();
        assert_eq!(dot_uniform(&b, &c, &PrecisionFormat::fp16(), &mut l).unwrap(), 2048.0);
        assert_eq!(dot_uniform(&b, &c, &PrecisionFormat::fp32(), &mut l).unwrap(), 2050.0);
    }

    #[test]
    fn errors() {
        let mut l = CostLedger::new();
        let f = PrecisionFormat::fp32();
        assert!(matches!(
            dot_uniform(&[1.0], &[1.0, 2.0], &f, &mut l),
            Err(Error::LengthMismatch { .. })
        ));
        assert_eq!(dot_uniform(&[], &[], &f, &mut l), Err(Error::Empty));
        assert!(matches!(
            dot_uniform(&[300.0], &[300.0], &PrecisionFormat::fp16(), &mut l),
            Err(Error::Overflow { .. })
        ));
        assert!(l.is_zero());
    }
}
