//! Serde helpers: big integers travel as decimal strings.

use num_bigint::{BigInt, BigUint};
use serde::{de, Deserialize, Deserializer, Serializer};

pub fn ser_bigint<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn de_bigint<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    let s = String::deserialize(d)?;
    parse_decimal(&s).map_err(de::Error::custom)
}

pub fn ser_biguint<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn de_biguint<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
    let s = String::deserialize(d)?;
    let v = parse_decimal(&s).map_err(de::Error::custom)?;
    v.to_biguint().ok_or_else(|| de::Error::custom(format!("negative value {s:?}")))
}

pub fn ser_bigint_vec<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

pub fn de_bigint_vec<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
    let v = Vec::<String>::deserialize(d)?;
    v.iter().map(|s| parse_decimal(s).map_err(de::Error::custom)).collect()
}

/// Strict decimal: optional leading minus, digits only, no redundant zeros.
pub fn parse_decimal(s: &str) -> Result<BigInt, String> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    let canonical = !digits.is_empty()
        && digits.bytes().all(|c| c.is_ascii_digit())
        && (digits == "0" || !digits.starts_with('0'))
        && s != "-0";
    if !canonical {
        return Err(format!("not a canonical decimal integer: {s:?}"));
    }
    s.parse::<BigInt>().map_err(|e| e.to_string())
}
