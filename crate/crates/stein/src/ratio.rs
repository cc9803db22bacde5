//! Exact positive rationals, written `p/q` in flags and files.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A positive rational number stored in lowest terms.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Ratio {
    num: u64,
    den: u64,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RatioError {
    #[error("ratio must be positive")]
    NotPositive,
    #[error("malformed ratio `{0}`, expected `p` or `p/q`")]
    Malformed(String),
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Result<Self, RatioError> {
        if num == 0 || den == 0 {
            return Err(RatioError::NotPositive);
        }
        let g = gcd(num, den);
        Ok(Ratio {
            num: num / g,
            den: den / g,
        })
    }

    pub const fn one_third() -> Self {
        Ratio { num: 1, den: 3 }
    }

    pub const fn one_twentieth() -> Self {
        Ratio { num: 1, den: 20 }
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    /// `self` as an f64; only used where a directed-rounding caller widens
    /// the result itself.
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Ratio {
    type Err = RatioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RatioError::Malformed(s.to_string());
        match s.split_once('/') {
            Some((p, q)) => {
                let p: u64 = p.trim().parse().map_err(|_| bad())?;
                let q: u64 = q.trim().parse().map_err(|_| bad())?;
                Ratio::new(p, q)
            }
            None => {
                let p: u64 = s.trim().parse().map_err(|_| bad())?;
                Ratio::new(p, 1)
            }
        }
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}
