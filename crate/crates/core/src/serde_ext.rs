//! Serde adapters for reals that may be infinite.
//!
//! JSON has no infinity, and `serde_json` writes it as `null`, which does
//! not read back. These adapters write non-finite values as the strings
//! `"inf"`, `"-inf"` and `"nan"` and accept either form on input.

use serde::de::{self, Deserializer, Visitor};
use serde::ser::{SerializeSeq, Serializer};

use crate::scalar::Real;

fn write<S: Serializer>(x: f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// Parses `inf`, `+inf`, `infinity`, `-inf`, `nan` and plain numbers.
pub fn parse_extended(text: &str) -> Option<f64> {
    match text.trim().to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        other => other.parse().ok(),
    }
}

struct ExtendedVisitor;

impl Visitor<'_> for ExtendedVisitor {
    type Value = f64;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
        Ok(v)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
        parse_extended(v).ok_or_else(|| E::invalid_value(de::Unexpected::Str(v), &self))
    }
}

fn read<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    d.deserialize_any(ExtendedVisitor)
}

/// `#[serde(with = "extended")]` for a single real.
pub mod extended {
    use super::*;

    pub fn serialize<R: Real, S: Serializer>(x: &R, s: S) -> Result<S::Ok, S::Error> {
        write(x.to_f64_lossy(), s)
    }

    pub fn deserialize<'de, R: Real, D: Deserializer<'de>>(d: D) -> Result<R, D::Error> {
        read(d).map(R::lit)
    }
}

/// `#[serde(with = "extended_vec")]` for a list of reals.
pub mod extended_vec {
    use super::*;
    use serde::Deserialize;

    #[derive(Deserialize)]
    struct Item(#[serde(deserialize_with = "read")] f64);

    pub fn serialize<R: Real, S: Serializer>(xs: &[R], s: S) -> Result<S::Ok, S::Error> {
        struct One(f64);
        impl serde::Serialize for One {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                write(self.0, s)
            }
        }
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&One(x.to_f64_lossy()))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, R: Real, D: Deserializer<'de>>(d: D) -> Result<Vec<R>, D::Error> {
        let items = Vec::<Item>::deserialize(d)?;
        Ok(items.into_iter().map(|Item(x)| R::lit(x)).collect())
    }
}
