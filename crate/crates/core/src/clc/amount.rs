//! Exact decimal amounts in integer base units.

use std::fmt;

/// Currency units understood in templates, with their decimal places.
pub const UNITS: &[(&str, u32)] = &[("ETH", 18), ("GWEI", 9), ("WEI", 0), ("USD", 2)];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmountError(pub String);

impl fmt::Display for AmountError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid amount `{}`", self.0)
    }
}

/// Parses `"2 ETH"`, `"1.5 ETH"`, `"10.00 USD"` or a bare base-unit integer.
pub fn parse_amount(text: &str) -> Result<u128, AmountError> {
    let err = || AmountError(text.to_string());
    let mut parts = text.split_whitespace();
    let number = parts.next().ok_or_else(err)?;
    let decimals = match parts.next() {
        None => 0,
        Some(unit) => UNITS
            .iter()
            .find(|(name, _)| name.eq_ignore_ascii_case(unit))
            .map(|(_, d)| *d)
            .ok_or_else(err)?,
    };
    if parts.next().is_some() {
        return Err(err());
    }
    let (whole, frac) = match number.split_once('.') {
        Some((w, f)) => (w, f),
        None => (number, ""),
    };
    let digits_ok = |s: &str| s.chars().all(|c| c.is_ascii_digit());
    if whole.is_empty() || !digits_ok(whole) || !digits_ok(frac) || frac.len() > decimals as usize {
        return Err(err());
    }
    let scale = 10u128.checked_pow(decimals).ok_or_else(err)?;
    let whole: u128 = whole.parse().map_err(|_| err())?;
    let frac_value: u128 = if frac.is_empty() {
        0
    } else {
        let f: u128 = frac.parse().map_err(|_| err())?;
        f * 10u128.pow(decimals - frac.len() as u32)
    };
    whole.checked_mul(scale).and_then(|w| w.checked_add(frac_value)).ok_or_else(err)
}

/// Renders base units in `unit`, trimming trailing zeros.
pub fn format_amount(value: u128, unit: &str) -> String {
    let decimals = UNITS.iter().find(|(n, _)| *n == unit).map(|(_, d)| *d).unwrap_or(0);
    if decimals == 0 {
        return format!("{value} {unit}");
    }
    let scale = 10u128.pow(decimals);
    let frac = value % scale;
    if frac == 0 {
        return format!("{} {unit}", value / scale);
    }
    let frac = format!("{frac:0width$}", width = decimals as usize);
    format!("{}.{} {unit}", value / scale, frac.trim_end_matches('0'))
}

pub(crate) mod serde_u128 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) mod serde_i128 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &i128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<i128, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
