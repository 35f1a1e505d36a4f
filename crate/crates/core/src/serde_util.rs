//! Serde adapters: big integers cross every interface as decimal strings so
//! no consumer ever sees a precision-lossy number.

use num_bigint::BigUint;
use serde::{de, Deserialize, Deserializer, Serializer};

pub mod dec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let raw = String::deserialize(d)?;
        parse_biguint(&raw).map_err(de::Error::custom)
    }
}

pub mod dec_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_str_radix(10)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|x| parse_biguint(x).map_err(de::Error::custom))
            .collect()
    }
}

/// `u64` lists carried as decimal strings, same convention as the big ones.
pub mod dec_u64_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[u64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u64>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|x| {
                x.trim()
                    .parse::<u64>()
                    .map_err(|e| de::Error::custom(format!("{x:?}: {e}")))
            })
            .collect()
    }
}

/// `(prime, exponent)` lists as `[{"prime": "23", "exponent": 1}, ...]`.
pub mod dec_pairs {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::Serialize;

    #[derive(Serialize, Deserialize)]
    struct Pair {
        prime: String,
        exponent: u32,
    }

    pub fn serialize<S: Serializer>(v: &[(BigUint, u32)], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for (p, e) in v {
            seq.serialize_element(&Pair {
                prime: p.to_str_radix(10),
                exponent: *e,
            })?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(BigUint, u32)>, D::Error> {
        let raw = Vec::<Pair>::deserialize(d)?;
        raw.into_iter()
            .map(|p| {
                parse_biguint(&p.prime)
                    .map(|v| (v, p.exponent))
                    .map_err(de::Error::custom)
            })
            .collect()
    }
}

pub fn parse_biguint(s: &str) -> Result<BigUint, String> {
    let t = s.trim();
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("not a decimal natural number: {s:?}"));
    }
    Ok(BigUint::parse_bytes(t.as_bytes(), 10).expect("digits already validated"))
}
