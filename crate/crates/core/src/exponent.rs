//! Lebesgue / Schatten exponents in `[1, ∞]` with an explicit infinity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub const ONE: Exponent = Exponent::Finite(1.0);
    pub const TWO: Exponent = Exponent::Finite(2.0);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() {
            return Err(Error::InvalidExponent("NaN".into()));
        }
        if p == f64::INFINITY {
            return Ok(Exponent::Infinite);
        }
        if p < 1.0 {
            return Err(Error::InvalidExponent(format!("{p} < 1")));
        }
        Ok(Exponent::Finite(p))
    }

    /// Builds the exponent whose reciprocal is `r` (`r = 0` gives ∞).
    pub fn from_recip(r: f64) -> Result<Self> {
        if !(0.0..=1.0 + 1e-12).contains(&r) {
            return Err(Error::InvalidExponent(format!("reciprocal {r} outside [0,1]")));
        }
        if r == 0.0 {
            Ok(Exponent::Infinite)
        } else {
            Exponent::new((1.0 / r).max(1.0))
        }
    }

    pub fn recip(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinite => 0.0,
        }
    }

    /// Hölder conjugate `p'` with `1/p + 1/p' = 1`.
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinite => Exponent::ONE,
            Exponent::Finite(p) if p == 1.0 => Exponent::Infinite,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    /// ℓ^p norm of a sequence of nonnegative magnitudes.
    pub fn norm_of<I: IntoIterator<Item = f64>>(self, mags: I) -> f64 {
        match self {
            Exponent::Infinite => mags.into_iter().fold(0.0, f64::max),
            Exponent::Finite(p) if p == 1.0 => mags.into_iter().sum(),
            Exponent::Finite(p) if p == 2.0 => mags.into_iter().map(|m| m * m).sum::<f64>().sqrt(),
            Exponent::Finite(p) => mags.into_iter().map(|m| m.powf(p)).sum::<f64>().powf(1.0 / p),
        }
    }

    /// Weighted `L^p` norm `(Σ m^p w)^{1/p}`; the weight is ignored for p = ∞.
    pub fn weighted_norm_of<I: IntoIterator<Item = f64>>(self, mags: I, weight: f64) -> f64 {
        match self {
            Exponent::Infinite => mags.into_iter().fold(0.0, f64::max),
            Exponent::Finite(p) => self.norm_of(mags) * weight.powf(1.0 / p),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts decimals, fractions like `4/3`, and `inf`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "∞") {
            return Ok(Exponent::Infinite);
        }
        let bad = || Error::InvalidExponent(format!("cannot parse {s:?}"));
        let p = match s.split_once('/') {
            Some((n, d)) => {
                let n: f64 = n.trim().parse().map_err(|_| bad())?;
                let d: f64 = d.trim().parse().map_err(|_| bad())?;
                n / d
            }
            None => s.parse().map_err(|_| bad())?,
        };
        Exponent::new(p)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Exponent::new(p),
            Raw::Str(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugates() {
        assert_eq!(Exponent::ONE.conjugate(), Exponent::Infinite);
        assert_eq!(Exponent::Infinite.conjugate(), Exponent::ONE);
        assert_eq!(Exponent::TWO.conjugate(), Exponent::TWO);
        let p: Exponent = "4/3".parse().unwrap();
        assert!((p.conjugate().value() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_below_one() {
        assert!(Exponent::new(0.5).is_err());
        assert!("0.9".parse::<Exponent>().is_err());
        assert!("abc".parse::<Exponent>().is_err());
    }

    #[test]
    fn norms() {
        assert_eq!(Exponent::TWO.norm_of([3.0, 4.0]), 5.0);
        assert_eq!(Exponent::Infinite.norm_of([3.0, 4.0]), 4.0);
        assert_eq!(Exponent::ONE.norm_of([3.0, 4.0]), 7.0);
    }
}
