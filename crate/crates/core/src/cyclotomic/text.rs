//! Text form `N=<conductor>; c0, c1, ...` with rationals written `num/den`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{CycNum, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid cyclotomic literal: {0}")]
pub struct CycParseError(pub String);

pub(crate) fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).ok()?;
    let den = BigInt::from_str(den).ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

impl FromStr for CycNum {
    type Err = CycParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |m: &str| CycParseError(m.to_string());
        let (head, body) = s.split_once(';').ok_or_else(|| err("missing ';'"))?;
        let n = head
            .trim()
            .strip_prefix("N=")
            .ok_or_else(|| err("expected N=<conductor>"))?
            .trim()
            .parse::<u64>()
            .map_err(|_| err("bad conductor"))?;
        if n == 0 || n > 1 << 16 {
            return Err(err("conductor out of range"));
        }
        let coeffs = body
            .split(',')
            .map(|c| parse_rational(c).ok_or_else(|| err("bad rational coefficient")))
            .collect::<Result<Vec<_>, _>>()?;
        CycNum::new(n, coeffs).map_err(|e| CycParseError(e.to_string()))
    }
}

impl serde::Serialize for CycNum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for CycNum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
