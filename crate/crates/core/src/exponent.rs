use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exponent `p ∈ [1, ∞]` with an explicit infinity marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub const ONE: Exponent = Exponent::Finite(1.0);
    pub const TWO: Exponent = Exponent::Finite(2.0);

    /// Accepts any finite `p >= 1`, or `f64::INFINITY` for the sup-norm.
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinite)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::domain(format!(
                "exponent must lie in [1, inf], got {p}"
            )))
        }
    }

    pub fn dual(self) -> Exponent {
        match self {
            Exponent::Infinite => Exponent::ONE,
            Exponent::Finite(1.0) => Exponent::Infinite,
            Exponent::Finite(2.0) => Exponent::TWO,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Exponent::Infinite => 0.0,
            Exponent::Finite(p) => 1.0 / p,
        }
    }

    pub fn is_endpoint(self) -> bool {
        matches!(self, Exponent::Infinite) || self == Exponent::ONE
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    /// The value as an `f64`, `f64::INFINITY` for the marker.
    pub fn value(self) -> f64 {
        match self {
            Exponent::Infinite => f64::INFINITY,
            Exponent::Finite(p) => p,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Infinite => f.write_str("inf"),
            Exponent::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinite),
            _ => {
                let p: f64 = t
                    .parse()
                    .map_err(|_| Error::domain(format!("cannot parse exponent '{t}'")))?;
                Exponent::new(p)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Infinite => s.serialize_str("inf"),
            Exponent::Finite(p) => s.serialize_f64(*p),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct ExponentVisitor;

        impl Visitor<'_> for ExponentVisitor {
            type Value = Exponent;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number >= 1 or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Exponent::new(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                if v == "inf" {
                    Ok(Exponent::Infinite)
                } else {
                    Err(E::custom(format!("expected \"inf\", got \"{v}\"")))
                }
            }
        }

        d.deserialize_any(ExponentVisitor)
    }
}

/// A Hölder-dual pair `1/p + 1/q = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentPair {
    pub p: Exponent,
    pub q: Exponent,
}

/// Pairs `p` with its dual exponent. `f64::INFINITY` stands for `p = ∞`.
pub fn dual_exponent(p: f64) -> Result<ExponentPair> {
    let p = Exponent::new(p)?;
    Ok(ExponentPair { p, q: p.dual() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_examples() {
        assert_eq!(dual_exponent(2.0).unwrap().q, Exponent::Finite(2.0));
        assert_eq!(dual_exponent(1.0).unwrap().q, Exponent::Infinite);
        assert_eq!(dual_exponent(3.0).unwrap().q, Exponent::Finite(1.5));
        assert_eq!(dual_exponent(f64::INFINITY).unwrap().q, Exponent::ONE);
    }

    #[test]
    fn dual_rejects_out_of_range() {
        assert!(dual_exponent(0.5).is_err());
        assert!(dual_exponent(f64::NAN).is_err());
        assert!(dual_exponent(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn reciprocals_sum_to_one() {
        for &p in &[1.0, 1.1, 1.5, 2.0, 3.0, 7.25, 64.0, f64::INFINITY] {
            let e = Exponent::new(p).unwrap();
            let s = e.reciprocal() + e.dual().reciprocal();
            assert!((s - 1.0).abs() < 1e-15, "p={p}");
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinite);
        assert_eq!("1.5".parse::<Exponent>().unwrap(), Exponent::Finite(1.5));
        assert!("0.9".parse::<Exponent>().is_err());
        assert!("abc".parse::<Exponent>().is_err());
        assert_eq!(Exponent::Infinite.to_string(), "inf");
    }

    #[test]
    fn serde_forms() {
        let e: Exponent = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(e, Exponent::Infinite);
        let e: Exponent = serde_json::from_str("3").unwrap();
        assert_eq!(e, Exponent::Finite(3.0));
        assert!(serde_json::from_str::<Exponent>("\"Inf\"").is_err());
        assert_eq!(
            serde_json::to_string(&Exponent::Infinite).unwrap(),
            "\"inf\""
        );
    }
}
