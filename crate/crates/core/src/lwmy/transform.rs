use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::LwmyFunction;
use crate::error::{Error, Result};

/// A bijection of pairs applied to samples `(x, y)`.
///
/// * `Additive(f)`: `(x, y) ↦ (f(x+y), f(x) - f(x+y))` on `(0,∞)²`
/// * `Multiplicative(f)`: `(x, y) ↦ (f̄(xy), f̄(x)/f̄(xy))` on `(0,1)²`, with `f̄` the conjugate of `f`
/// * `UvPrime`: `(u, v) ↦ ((1 + 1/(u+v)) / (1 + 1/u), u + v)` on `(0,∞)²`
/// * `Identity`: leaves the pair unchanged (used by control experiments)
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "function", rename_all = "snake_case")]
pub enum Transform {
    Identity,
    Additive(LwmyFunction),
    Multiplicative(LwmyFunction),
    UvPrime,
}

fn positive_pair(x: f64, y: f64) -> Result<()> {
    if x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("({x}, {y}) is outside (0,∞)²")))
    }
}

impl Transform {
    pub fn apply(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        match self {
            Transform::Identity => {
                if x.is_finite() && y.is_finite() {
                    Ok((x, y))
                } else {
                    Err(Error::domain(format!("({x}, {y}) is not finite")))
                }
            }
            Transform::Additive(f) => {
                positive_pair(x, y)?;
                Ok((f.value(x + y), f.decrement(x, y)))
            }
            Transform::Multiplicative(f) => {
                // y = 1 is admitted: it maps to v = 1.
                if !(x > 0.0 && x < 1.0 && y > 0.0 && y <= 1.0) {
                    return Err(Error::domain(format!("({x}, {y}) is outside (0,1)²")));
                }
                let (s, t) = (-x.ln(), -y.ln());
                let u = f.bar_conjugate().eval_unchecked(x * y);
                Ok((u, (-f.decrement(s, t)).exp()))
            }
            Transform::UvPrime => {
                positive_pair(x, y)?;
                let w = x + y;
                Ok(((w + 1.0) * x / (w * (x + 1.0)), w))
            }
        }
    }

    pub fn apply_inverse(&self, u: f64, v: f64) -> Result<(f64, f64)> {
        match self {
            Transform::Identity => Transform::Identity.apply(u, v),
            Transform::Additive(f) => Transform::Additive(f.inverse()).apply(u, v),
            Transform::Multiplicative(f) => Transform::Multiplicative(f.inverse()).apply(u, v),
            Transform::UvPrime => {
                if !(u > 0.0 && u < 1.0 && v > 0.0 && v.is_finite()) {
                    return Err(Error::domain(format!("({u}, {v}) is outside (0,1)×(0,∞)")));
                }
                let den = v + 1.0 - u * v;
                Ok((u * v / den, v * (v + 1.0) * (1.0 - u) / den))
            }
        }
    }
}

impl fmt::Display for Transform {
    /// `identity`, `additive(f)`, `multiplicative(f)` or `uvprime`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Identity => write!(f, "identity"),
            Transform::Additive(g) => write!(f, "additive({g})"),
            Transform::Multiplicative(g) => write!(f, "multiplicative({g})"),
            Transform::UvPrime => write!(f, "uvprime"),
        }
    }
}

impl FromStr for Transform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "identity" => return Ok(Transform::Identity),
            "uvprime" => return Ok(Transform::UvPrime),
            _ => {}
        }
        let inner = |prefix: &str| -> Option<&str> {
            s.strip_prefix(prefix)
                .and_then(|rest| rest.strip_prefix('('))
                .and_then(|rest| rest.strip_suffix(')'))
        };
        if let Some(body) = inner("additive") {
            Ok(Transform::Additive(body.parse()?))
        } else if let Some(body) = inner("multiplicative") {
            Ok(Transform::Multiplicative(body.parse()?))
        } else {
            Err(Error::domain(format!("unknown transform '{s}'")))
        }
    }
}
