//! Text form of exact rationals: `"p/q"` with `q > 0` reduced, or `"p"`.

use num_rational::Ratio;
use serde::{de, Deserialize, Deserializer, Serializer};

use crate::scalar::ExactInt;

/// Error for a string that is not a rational.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a rational number: {0:?}")]
pub struct ParseRationalError(pub String);

/// Parses `"p/q"`, `"p"`, `"-p/q"`; the result is reduced. Zero denominators are rejected.
pub fn parse_ratio<I: ExactInt>(s: &str) -> Result<Ratio<I>, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let valid = |x: &str| {
        let body = x.strip_prefix(['-', '+']).unwrap_or(x);
        !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(n) || !valid(d) {
        return Err(err());
    }
    let n: I = n.trim_start_matches('+').parse().map_err(|_| err())?;
    let d: I = d.trim_start_matches('+').parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Ratio::new(n, d))
}

/// Formats a reduced ratio as `"p/q"`, or `"p"` when the denominator is 1.
pub fn format_ratio<I: ExactInt>(r: &Ratio<I>) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}


/// Serde adapter for a single ratio.
pub mod as_string {
    use super::*;

    pub fn serialize<I: ExactInt, S: Serializer>(r: &Ratio<I>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_ratio(r))
    }

    pub fn deserialize<'de, I: ExactInt, D: Deserializer<'de>>(d: D) -> Result<Ratio<I>, D::Error> {
        let v = RatioRepr::deserialize(d)?;
        v.into_ratio().map_err(de::Error::custom)
    }
}

/// Serde adapter for a sequence of ratios.
pub mod vec_as_string {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<I: ExactInt, S: Serializer>(v: &[Ratio<I>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format_ratio(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, I: ExactInt, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Vec<Ratio<I>>, D::Error> {
        let v = Vec::<RatioRepr>::deserialize(d)?;
        v.into_iter()
            .map(|r| r.into_ratio().map_err(de::Error::custom))
            .collect()
    }
}

/// Accepts a string or a JSON integer. Floats are refused.
#[derive(Deserialize)]
#[serde(untagged)]
enum RatioRepr {
    Int(i64),
    Text(String),
}

impl RatioRepr {
    fn into_ratio<I: ExactInt>(self) -> Result<Ratio<I>, ParseRationalError> {
        match self {
            RatioRepr::Int(v) => Ok(Ratio::from_integer(I::from_i64_exact(v))),
            RatioRepr::Text(s) => parse_ratio(&s),
        }
    }
}


/// Serde adapter writing integers as JSON numbers when they fit in `i64`,
/// and as decimal strings otherwise.
pub mod int_text {
    use super::*;

    pub fn serialize<I: ExactInt, S: Serializer>(v: &I, s: S) -> Result<S::Ok, S::Error> {
        match v.to_i64() {
            Some(x) => s.serialize_i64(x),
            None => s.serialize_str(&v.to_string()),
        }
    }

    pub fn deserialize<'de, I: ExactInt, D: Deserializer<'de>>(d: D) -> Result<I, D::Error> {
        match IntRepr::deserialize(d)? {
            IntRepr::Int(v) => Ok(I::from_i64_exact(v)),
            IntRepr::Text(s) => s
                .trim()
                .parse()
                .map_err(|_| de::Error::custom(format!("not an integer: {s:?}"))),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum IntRepr {
        Int(i64),
        Text(String),
    }
}
