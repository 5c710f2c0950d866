//! Half-integers in doubled-integer form: parsing and display.

use crate::error::{CkpError, Result};
use crate::Rational;
use num_bigint::BigInt;

/// Parses `"3/2"`, `"-1/2"`, `"1.5"`, `"2"` or `"6.5"` into the doubled integer.
pub fn parse_doubled(s: &str) -> Result<i64> {
    let err = || CkpError::ParseHalf(s.to_string());
    let t = s.trim();
    if let Some((num, den)) = t.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| err())?;
        return match den.trim() {
            "1" => num.checked_mul(2).ok_or_else(err),
            "2" => Ok(num),
            _ => Err(err()),
        };
    }
    if let Some((int, frac)) = t.split_once('.') {
        let negative = int.starts_with('-');
        let whole: i64 = if int == "-" || int.is_empty() { 0 } else { int.parse().map_err(|_| err())? };
        let frac = frac.trim_end_matches('0');
        let half = match frac {
            "" => 0,
            "5" => 1,
            _ => return Err(err()),
        };
        let mag = whole.checked_abs().ok_or_else(err)?.checked_mul(2).ok_or_else(err)? + half;
        return Ok(if negative { -mag } else { mag });
    }
    let whole: i64 = t.parse().map_err(|_| err())?;
    whole.checked_mul(2).ok_or_else(err)
}

/// Formats a doubled integer as `"k"` or `"k/2"`.
pub fn fmt_doubled(d: i64) -> String {
    if d % 2 == 0 {
        (d / 2).to_string()
    } else {
        format!("{d}/2")
    }
}

pub fn doubled_to_rational(d: i64) -> Rational {
    Rational::new(BigInt::from(d), BigInt::from(2))
}
