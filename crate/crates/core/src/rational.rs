//! Exact rationals and their wire format.
//!
//! Rationals are serialized as `{"num": "<int>", "den": "<int>"}` with the
//! integers written as strings, so consumers never round-trip them through
//! a 64-bit float.

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Q = Ratio<i128>;

#[derive(Serialize, Deserialize)]
struct Wire {
    num: String,
    den: String,
}

pub fn serialize<S: Serializer>(q: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    Wire {
        num: q.numer().to_string(),
        den: q.denom().to_string(),
    }
    .serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
    let w = Wire::deserialize(d)?;
    let num: i128 = w.num.parse().map_err(serde::de::Error::custom)?;
    let den: i128 = w.den.parse().map_err(serde::de::Error::custom)?;
    if den == 0 {
        return Err(serde::de::Error::custom("zero denominator"));
    }
    Ok(Q::new(num, den))
}

/// Serde adapter for `Option<Q>`.
pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match q {
            Some(q) => super::serialize(q, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Q>, D::Error> {
        let w = Option::<Wire>::deserialize(d)?;
        w.map(|w| {
            let num: i128 = w.num.parse().map_err(serde::de::Error::custom)?;
            let den: i128 = w.den.parse().map_err(serde::de::Error::custom)?;
            if den == 0 {
                return Err(serde::de::Error::custom("zero denominator"));
            }
            Ok(Q::new(num, den))
        })
        .transpose()
    }
}

/// Serde adapter for `Vec<Q>`.
pub mod vec {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Item(#[serde(with = "super")] Q);

    pub fn serialize<S: Serializer>(qs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(qs.iter().map(|q| Item(*q)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        Ok(Vec::<Item>::deserialize(d)?.into_iter().map(|i| i.0).collect())
    }
}

/// Parses `"3"`, `"-2/7"` or a finite decimal such as `"0.1"` exactly.
pub fn parse(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| bad())?;
        let d: i128 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) || frac_part.len() > 30 {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: i128 = digits.parse().map_err(|_| bad())?;
    let den = 10i128.pow(frac_part.len() as u32);
    let q = Q::new(num, den);
    Ok(if neg { -q } else { q })
}

pub fn to_f64(q: &Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}
