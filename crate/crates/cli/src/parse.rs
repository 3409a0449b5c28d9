//! Number and vector tokens as typed on a command line or stored in a
//! document: `-1`, `(-1)`, `−1` (U+2212), `3/4`, `0.25`, `1e-3`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::CliError;

fn normalize(token: &str) -> String {
    let mut t = token.trim();
    while let Some(inner) = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
        t = inner.trim();
    }
    t.replace('\u{2212}', "-")
}

fn bad(token: &str, what: &str) -> CliError {
    CliError::Input(format!("cannot parse {token:?} as {what}"))
}

/// Exact rational from an integer, `p/q`, or terminating decimal.
pub fn parse_rational(token: &str) -> Result<BigRational, CliError> {
    let t = normalize(token);
    if let Some((num, den)) = t.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad(token, "a rational"))?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad(token, "a rational"))?;
        if den.is_zero() {
            return Err(CliError::Input(format!("zero denominator in {token:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(&t)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits_ok = |s: &str| s.chars().all(|c| c.is_ascii_digit());
    if (whole.is_empty() && frac.is_empty()) || !digits_ok(whole) || !digits_ok(frac) {
        return Err(bad(token, "a rational"));
    }
    let digits = format!("{whole}{frac}");
    let num = BigInt::from_str(&digits).map_err(|_| bad(token, "a rational"))?;
    let value = BigRational::new(num, BigInt::from(10u32).pow(frac.len() as u32));
    Ok(if negative { -value } else { value })
}

/// Finite real; accepts everything [`parse_rational`] does plus exponents.
pub fn parse_real(token: &str) -> Result<f64, CliError> {
    let t = normalize(token);
    let value = match f64::from_str(&t) {
        Ok(v) => v,
        Err(_) => parse_rational(&t)?.to_f64().ok_or_else(|| bad(token, "a real"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad(token, "a finite real"))
    }
}

pub fn parse_integer(token: &str) -> Result<i64, CliError> {
    normalize(token).parse().map_err(|_| bad(token, "an integer"))
}

/// Comma-separated list; an empty list is an error.
pub fn parse_list<T>(text: &str, item: impl Fn(&str) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(CliError::Input("empty list".to_string()));
    }
    t.split(',').enumerate().map(|(i, tok)| {
        item(tok).map_err(|e| CliError::Input(format!("entry {}: {}", i + 1, e.message())))
    }).collect()
}
