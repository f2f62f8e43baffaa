//! Exact rational scalars used for set frames and scales.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Result};

pub type Q = Ratio<i128>;

pub fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

pub fn qi(n: i128) -> Q {
    Q::from_integer(n)
}

pub fn to_f64(x: &Q) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn pow(base: u32, exp: u32) -> i128 {
    (base as i128).pow(exp)
}

/// Largest rational `g` such that both `a/g` and `b/g` are integers.
pub fn gcd(a: &Q, b: &Q) -> Q {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let l = a.denom().lcm(b.denom());
    let an = a.numer() * (l / a.denom());
    let bn = b.numer() * (l / b.denom());
    Q::new(an.gcd(&bn), l)
}

pub fn floor_i64(x: &Q) -> i64 {
    x.floor().to_integer() as i64
}

pub fn ceil_i64(x: &Q) -> i64 {
    x.ceil().to_integer() as i64
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"0.125"` or `"3e-4"`.
pub fn parse(s: &str) -> Result<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| invalid("rational", s.to_string()))?;
        let d: i128 = d.trim().parse().map_err(|_| invalid("rational", s.to_string()))?;
        if d == 0 {
            return Err(invalid("rational", "zero denominator"));
        }
        return Ok(Q::new(n, d));
    }
    if let Ok(n) = s.parse::<i128>() {
        return Ok(qi(n));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (
            &s[..i],
            s[i + 1..]
                .parse::<i32>()
                .map_err(|_| invalid("rational", s.to_string()))?,
        ),
        None => (s, 0),
    };
    let neg = mant.starts_with('-');
    let mant = mant.trim_start_matches(['-', '+']);
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(invalid("rational", s.to_string()));
    }
    let digits = format!("{ip}{fp}");
    let mut v: Q = qi(digits
        .parse::<i128>()
        .map_err(|_| invalid("rational", s.to_string()))?);
    let scale = exp - fp.len() as i32;
    let ten = qi(10);
    for _ in 0..scale.unsigned_abs() {
        v = if scale > 0 { v * ten } else { v / ten };
    }
    Ok(if neg { -v } else { v })
}

pub fn format(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Serde adapter writing rationals as `"p/q"` strings and accepting strings or integers.
pub mod serde_q {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(x))
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Int(n) => Ok(qi(n as i128)),
            Repr::Str(s) => parse(&s).map_err(de::Error::custom),
        }
    }
}
