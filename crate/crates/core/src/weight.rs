use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact vertical-domino weight `a = num/den` with `0 < a <= 1`, kept in
/// lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Weight {
    num: u64,
    den: u64,
}

impl Weight {
    pub const ONE: Weight = Weight { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::param(format!(
                "weight {num}/{den} must lie in (0, 1]"
            )));
        }
        let g = num.gcd(&den);
        Ok(Weight {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }
}

impl FromStr for Weight {
    type Err = Error;

    /// Accepts `p/q`, an integer, or a terminating decimal such as `0.7845`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::param(format!("cannot parse weight {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p: u64 = p.trim().parse().map_err(|_| bad())?;
            let q: u64 = q.trim().parse().map_err(|_| bad())?;
            return Weight::new(p, q);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let int: u64 = if int.is_empty() {
                0
            } else {
                int.parse().map_err(|_| bad())?
            };
            let den = 10u64.pow(frac.len() as u32);
            let frac: u64 = if frac.is_empty() {
                0
            } else {
                frac.parse().map_err(|_| bad())?
            };
            let num = int
                .checked_mul(den)
                .and_then(|x| x.checked_add(frac))
                .ok_or_else(bad)?;
            return Weight::new(num, den);
        }
        let p: u64 = s.parse().map_err(|_| bad())?;
        Weight::new(p, 1)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl TryFrom<String> for Weight {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Weight> for String {
    fn from(w: Weight) -> String {
        w.to_string()
    }
}
