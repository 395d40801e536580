use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The finite-scale bound `n ↦ a·(log₂ max(n, 2))^k + b`.
///
/// Every "is polylogarithmic" claim in the crate is checked against one of
/// these. Sizes below 2 clamp to `log₂ 2 = 1`, so the bound never drops below
/// `a + b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolylogBound {
    pub a: f64,
    pub k: u32,
    pub b: f64,
}

impl PolylogBound {
    pub fn new(a: f64, k: u32, b: f64) -> Result<Self, Error> {
        if !(a.is_finite() && b.is_finite()) || a < 0.0 || b < 0.0 {
            return Err(Error::Config(format!(
                "polylog bound coefficients must be finite and nonnegative, got a={a}, b={b}"
            )));
        }
        Ok(PolylogBound { a, k, b })
    }

    pub const fn constant(b: f64) -> Self {
        PolylogBound { a: 0.0, k: 0, b }
    }

    pub fn eval(&self, n: usize) -> f64 {
        let log = (n.max(2) as f64).log2();
        self.a * log.powi(self.k as i32) + self.b
    }

    pub fn allows(&self, size: usize, n: usize) -> bool {
        size as f64 <= self.eval(n)
    }

    /// A bound on `self(m)` for any `m ≤ n + c`.
    ///
    /// With `L = log₂ max(n,2) ≥ 1` and `δ = log₂(1 + c/2)`, `log₂ max(n+c, 2) ≤ L + δ
    /// ≤ (1+δ)·L`, so scaling `a` by `(1+δ)^k` absorbs the shift.
    pub fn shifted(&self, c: i64) -> Self {
        if c <= 0 {
            return *self;
        }
        let delta = (1.0 + c as f64 / 2.0).log2();
        PolylogBound {
            a: self.a * (1.0 + delta).powi(self.k as i32),
            ..*self
        }
    }

    /// A bound on `self(m)` for any `m ≤ n^degree`.
    pub fn after_polynomial(&self, degree: u32) -> Self {
        let d = degree.max(1) as f64;
        PolylogBound {
            a: self.a * d.powi(self.k as i32),
            ..*self
        }
    }

    /// A single bound dominating `self + other` (uses `L ≥ 1`).
    pub fn sum(&self, other: &PolylogBound) -> Self {
        PolylogBound {
            a: self.a + other.a,
            k: self.k.max(other.k),
            b: self.b + other.b,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        PolylogBound {
            a: self.a * factor,
            k: self.k,
            b: self.b * factor,
        }
    }

    pub fn plus(&self, offset: f64) -> Self {
        PolylogBound {
            b: self.b + offset,
            ..*self
        }
    }
}

impl fmt::Display for PolylogBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.a, self.k, self.b)
    }
}

/// Parses `a,k,b`.
impl FromStr for PolylogBound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [a, k, b] = parts.as_slice() else {
            return Err(Error::Config(format!("expected a,k,b but got {s:?}")));
        };
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|e| Error::Config(format!("bad coefficient {v:?}: {e}")))
        };
        let k = k
            .parse::<u32>()
            .map_err(|e| Error::Config(format!("bad exponent {k:?}: {e}")))?;
        PolylogBound::new(num(a)?, k, num(b)?)
    }
}
