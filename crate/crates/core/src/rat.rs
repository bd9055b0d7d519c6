//! Exact rational values and their string encoding.
//!
//! Every distance, weight and kernel entry in this crate is a [`Rat`]. On the
//! wire a rational is a string `"p/q"` or `"p"`; plain JSON integers are also
//! accepted on input.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rat = BigRational;

/// Bits of precision used when an irrational value is replaced by a dyadic rational.
pub const DYADIC_BITS: u32 = 48;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational {input:?}: {reason}")]
pub struct ParseRatError {
    pub input: String,
    pub reason: &'static str,
}

pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Builds `num/den`. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let err = |reason| ParseRatError {
        input: s.to_string(),
        reason,
    };
    let t = s.trim();
    if t.is_empty() {
        return Err(err("empty string"));
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err("numerator is not an integer"))?;
    let den: BigInt = den.parse().map_err(|_| err("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rat::new(num, den))
}

/// Canonical string form: `"p"` for integers, `"p/q"` otherwise (reduced, `q > 0`).
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering truncated toward zero to `digits` fractional digits.
/// For display only; never round-trips.
pub fn to_decimal(r: &Rat, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (r.abs() * Rat::from_integer(scale.clone())).to_integer();
    let (ip, fp) = scaled.div_rem(&scale);
    let sign = if r.is_negative() && !scaled.is_zero() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{ip}")
    } else {
        format!("{sign}{ip}.{:0>width$}", fp.to_string(), width = digits)
    }
}

/// `r^(num/den)` for `r >= 0`, rounded down to a multiple of `2^-bits`.
///
/// The result `s` satisfies `s <= r^(num/den) < s + 2^-bits`; when the exact
/// power is itself dyadic at that precision it is returned exactly.
pub fn dyadic_pow(r: &Rat, num: u32, den: u32, bits: u32) -> Rat {
    assert!(!r.is_negative(), "dyadic_pow of a negative value");
    assert!(den > 0, "zero root index");
    if r.is_zero() {
        return if num == 0 { Rat::one() } else { Rat::zero() };
    }
    // floor((p/q)^(num/den) * 2^bits) = floor( (p^num * 2^(bits*den) / q^num)^(1/den) )
    let p: BigUint = r.numer().magnitude().clone();
    let q: BigUint = r.denom().magnitude().clone();
    let radicand = (Pow::pow(&p, num) << (bits as usize * den as usize)) / Pow::pow(&q, num);
    let root = radicand.nth_root(den);
    Rat::new(BigInt::from(root), BigInt::one() << bits as usize)
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Least common multiple of the denominators, so that every value times it is integral.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Rational as it appears in JSON input: a string or a bare integer.
#[derive(Deserialize)]
#[serde(untagged)]
enum RatRepr {
    Str(String),
    Int(i64),
}

/// Serde adapter for a single rational (`#[serde(with = "rat::serde_str")]`).
pub mod serde_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        fmt_rat(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        match RatRepr::deserialize(d)? {
            RatRepr::Str(s) => parse_rat(&s).map_err(serde::de::Error::custom),
            RatRepr::Int(i) => Ok(int(i)),
        }
    }
}

/// Serde adapter for `Vec<Rat>`.
pub mod serde_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(fmt_rat))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let raw: Vec<RatRepr> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|r| match r {
                RatRepr::Str(s) => parse_rat(&s).map_err(serde::de::Error::custom),
                RatRepr::Int(i) => Ok(int(i)),
            })
            .collect()
    }
}

/// Serde adapter for `Vec<Vec<Rat>>`.
pub mod serde_matrix {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Row(#[serde(with = "super::serde_vec")] Vec<Rat>);

    pub fn serialize<S: Serializer>(m: &[Vec<Rat>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter().map(|r| Row(r.clone())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rat>>, D::Error> {
        let rows: Vec<Row> = Vec::deserialize(d)?;
        Ok(rows.into_iter().map(|r| r.0).collect())
    }
}

/// Display wrapper printing the canonical string form.
pub struct Show<'a>(pub &'a Rat);

impl fmt::Display for Show<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rat(self.0))
    }
}
