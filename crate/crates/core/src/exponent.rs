use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// An integrability exponent in `(0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Exponent(f64);

impl Exponent {
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p <= 0.0 {
            return Err(invalid(format!("exponent must lie in (0, inf], got {p}")));
        }
        Ok(Exponent(p))
    }

    pub fn finite(p: f64) -> Result<Self> {
        let e = Self::new(p)?;
        if e.is_infinite() {
            return Err(invalid("finite exponent required"));
        }
        Ok(e)
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/p`, zero at infinity.
    #[inline]
    pub fn recip(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }

    /// The quasi-norm exponent `min(1, p)`.
    #[inline]
    pub fn tilde(self) -> f64 {
        self.0.min(1.0)
    }
}

impl TryFrom<f64> for Exponent {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Exponent::new(v)
    }
}

impl From<Exponent> for f64 {
    fn from(e: Exponent) -> f64 {
        e.0
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "∞" {
            return Ok(Exponent::INFINITY);
        }
        let v: f64 = t.parse().map_err(|_| Error::Parse {
            position: 0,
            message: format!("not an exponent: {t:?}"),
        })?;
        Exponent::new(v)
    }
}
