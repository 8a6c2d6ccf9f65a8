use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Reciprocal,
    F1,
    G1,
    FDeltaStar,
}

/// A member of one of the four families, always written `x ↦ (1/α) h(βx)`
/// except for the reciprocal family `x ↦ α/x`.
///
/// * `F1`: `h = f₁`, `f₁(x) = 1/(eˣ - 1)`
/// * `G1`: `h = g₁`, `g₁(x) = ln(1 + 1/x)`
/// * `FDeltaStar`: `h = f*_δ`, `f*_δ(x) = ln(1 + δ f₁(x))`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum LwmyFunction {
    Reciprocal { alpha: f64 },
    F1 { alpha: f64, beta: f64 },
    G1 { alpha: f64, beta: f64 },
    FDeltaStar { alpha: f64, beta: f64, delta: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_arg(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("argument must be positive and finite, got {x}")))
    }
}

// Unscaled profiles and their first three derivatives. With q = e^{-x} and
// d = 1 - q every expression stays finite as x → 0⁺ and as x grows.

fn f1_derivs(x: f64) -> [f64; 4] {
    let q = (-x).exp();
    let d = -(-x).exp_m1();
    [
        q / d,
        -q / (d * d),
        q * (1.0 + q) / (d * d * d),
        -q * (1.0 + 4.0 * q + q * q) / (d * d * d * d),
    ]
}

fn g1_derivs(x: f64) -> [f64; 4] {
    let p = x * (1.0 + x);
    [
        (1.0 / x).ln_1p(),
        -1.0 / p,
        (2.0 * x + 1.0) / (p * p),
        -2.0 * (3.0 * x * x + 3.0 * x + 1.0) / (p * p * p),
    ]
}

fn fdelta_derivs(x: f64, delta: f64) -> [f64; 4] {
    let q = (-x).exp();
    let d = -(-x).exp_m1();
    let e = 1.0 + (delta - 1.0) * q;
    let dm1q = (delta - 1.0) * q;
    [
        (delta * q / d).ln_1p(),
        -delta * q / (e * d),
        dm1q / (e * e) + q / (d * d),
        dm1q * (dm1q - 1.0) / (e * e * e) - q * (1.0 + q) / (d * d * d),
    ]
}

/// `f₁(s) - f₁(s + t)` without cancellation.
fn f1_decrement(s: f64, t: f64) -> f64 {
    let ds = -(-s).exp_m1();
    let dst = -(-(s + t)).exp_m1();
    (-s).exp() * (-(-t).exp_m1()) / (ds * dst)
}

impl LwmyFunction {
    pub fn reciprocal(alpha: f64) -> Result<Self> {
        let f = LwmyFunction::Reciprocal { alpha };
        f.validate()?;
        Ok(f)
    }

    pub fn f1(alpha: f64, beta: f64) -> Result<Self> {
        let f = LwmyFunction::F1 { alpha, beta };
        f.validate()?;
        Ok(f)
    }

    pub fn g1(alpha: f64, beta: f64) -> Result<Self> {
        let f = LwmyFunction::G1 { alpha, beta };
        f.validate()?;
        Ok(f)
    }

    pub fn fdelta_star(alpha: f64, beta: f64, delta: f64) -> Result<Self> {
        let f = LwmyFunction::FDeltaStar { alpha, beta, delta };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LwmyFunction::Reciprocal { alpha } => positive("alpha", alpha),
            LwmyFunction::F1 { alpha, beta } | LwmyFunction::G1 { alpha, beta } => {
                positive("alpha", alpha)?;
                positive("beta", beta)
            }
            LwmyFunction::FDeltaStar { alpha, beta, delta } => {
                positive("alpha", alpha)?;
                positive("beta", beta)?;
                positive("delta", delta)
            }
        }
    }

    pub fn family(&self) -> Family {
        match self {
            LwmyFunction::Reciprocal { .. } => Family::Reciprocal,
            LwmyFunction::F1 { .. } => Family::F1,
            LwmyFunction::G1 { .. } => Family::G1,
            LwmyFunction::FDeltaStar { .. } => Family::FDeltaStar,
        }
    }

    /// `(outer, inner)` scales; the reciprocal family has `inner = 1`.
    fn scales(&self) -> (f64, f64) {
        match *self {
            LwmyFunction::Reciprocal { alpha } => (alpha, 1.0),
            LwmyFunction::F1 { alpha, beta }
            | LwmyFunction::G1 { alpha, beta }
            | LwmyFunction::FDeltaStar { alpha, beta, .. } => (alpha, beta),
        }
    }

    /// `[f, f', f'', f''']` at `x`, without argument checks.
    pub fn derivatives(&self, x: f64) -> [f64; 4] {
        match *self {
            LwmyFunction::Reciprocal { alpha } => {
                let r = alpha / x;
                [r, -r / x, 2.0 * r / (x * x), -6.0 * r / (x * x * x)]
            }
            _ => {
                let (alpha, beta) = self.scales();
                let z = beta * x;
                let h = match *self {
                    LwmyFunction::F1 { .. } => f1_derivs(z),
                    LwmyFunction::G1 { .. } => g1_derivs(z),
                    LwmyFunction::FDeltaStar { delta, .. } => fdelta_derivs(z, delta),
                    LwmyFunction::Reciprocal { .. } => unreachable!(),
                };
                let mut out = [0.0; 4];
                let mut scale = 1.0 / alpha;
                for k in 0..4 {
                    out[k] = scale * h[k];
                    scale *= beta;
                }
                out
            }
        }
    }

    /// The `order`-th derivative (`0..=3`) at `x > 0`.
    pub fn eval(&self, x: f64, order: usize) -> Result<f64> {
        check_arg(x)?;
        if order > 3 {
            return Err(Error::domain(format!("derivative order {order} exceeds 3")));
        }
        Ok(self.derivatives(x)[order])
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            LwmyFunction::Reciprocal { alpha } => alpha / x,
            LwmyFunction::F1 { alpha, beta } => {
                let z = beta * x;
                (-z).exp() / (-(-z).exp_m1()) / alpha
            }
            LwmyFunction::G1 { alpha, beta } => (1.0 / (beta * x)).ln_1p() / alpha,
            LwmyFunction::FDeltaStar { alpha, beta, delta } => {
                let z = beta * x;
                (delta * (-z).exp() / (-(-z).exp_m1())).ln_1p() / alpha
            }
        }
    }

    /// The inverse bijection, which is again a member of the four families.
    pub fn inverse(&self) -> LwmyFunction {
        match *self {
            LwmyFunction::Reciprocal { alpha } => LwmyFunction::Reciprocal { alpha },
            LwmyFunction::F1 { alpha, beta } => LwmyFunction::G1 {
                alpha: beta,
                beta: alpha,
            },
            LwmyFunction::G1 { alpha, beta } => LwmyFunction::F1 {
                alpha: beta,
                beta: alpha,
            },
            LwmyFunction::FDeltaStar { alpha, beta, delta } => LwmyFunction::FDeltaStar {
                alpha: beta,
                beta: alpha,
                delta,
            },
        }
    }

    pub fn eval_inverse(&self, y: f64) -> Result<f64> {
        check_arg(y)?;
        Ok(self.inverse().value(y))
    }

    /// `f(s) - f(s + t)` for `s > 0`, `t ≥ 0`, free of cancellation.
    pub fn decrement(&self, s: f64, t: f64) -> f64 {
        match *self {
            LwmyFunction::Reciprocal { alpha } => alpha * t / (s * (s + t)),
            LwmyFunction::F1 { alpha, beta } => f1_decrement(beta * s, beta * t) / alpha,
            LwmyFunction::G1 { alpha, beta } => {
                let (s, t) = (beta * s, beta * t);
                (t / (s * (1.0 + s + t))).ln_1p() / alpha
            }
            LwmyFunction::FDeltaStar { alpha, beta, delta } => {
                let (s, t) = (beta * s, beta * t);
                let tail = f1_derivs(s + t)[0];
                (delta * f1_decrement(s, t) / (1.0 + delta * tail)).ln_1p() / alpha
            }
        }
    }

    /// `F = 1/f'`, written without the reciprocal so it stays accurate near 0.
    pub fn big_f(&self, x: f64) -> Result<f64> {
        check_arg(x)?;
        Ok(self.big_f_unchecked(x))
    }

    pub(crate) fn big_f_unchecked(&self, x: f64) -> f64 {
        match *self {
            LwmyFunction::Reciprocal { alpha } => -x * x / alpha,
            LwmyFunction::F1 { alpha, beta } => {
                let s = (0.5 * beta * x).sinh();
                -4.0 * alpha / beta * s * s
            }
            LwmyFunction::G1 { alpha, beta } => -alpha * x * (1.0 + beta * x),
            LwmyFunction::FDeltaStar { alpha, beta, delta } => {
                let z = beta * x;
                let s = (0.5 * z).sinh();
                -(alpha / beta) * ((2.0 - delta) / delta * 2.0 * s * s + z.sinh())
            }
        }
    }

    /// `F'` where `F = 1/f'`.
    pub fn big_f_derivative(&self, x: f64) -> f64 {
        match *self {
            LwmyFunction::Reciprocal { alpha } => -2.0 * x / alpha,
            LwmyFunction::F1 { alpha, beta } => -2.0 * alpha * (beta * x).sinh(),
            LwmyFunction::G1 { alpha, beta } => -alpha * (1.0 + 2.0 * beta * x),
            LwmyFunction::FDeltaStar { alpha, beta, delta } => {
                let z = beta * x;
                -alpha * ((2.0 - delta) / delta * z.sinh() + z.cosh())
            }
        }
    }

    /// `F'(0⁺)`.
    pub fn big_f_derivative_at_zero(&self) -> f64 {
        match *self {
            LwmyFunction::Reciprocal { .. } | LwmyFunction::F1 { .. } => 0.0,
            LwmyFunction::G1 { alpha, .. } | LwmyFunction::FDeltaStar { alpha, .. } => -alpha,
        }
    }

    /// Taylor coefficients `a₁..a_n` of `F = 1/f'` at the origin.
    pub fn big_f_taylor(&self, n: usize) -> Vec<f64> {
        let mut a = vec![0.0; n];
        let set = |a: &mut Vec<f64>, k: usize, v: f64| {
            if k >= 1 && k <= a.len() {
                a[k - 1] = v;
            }
        };
        match *self {
            LwmyFunction::Reciprocal { alpha } => set(&mut a, 2, -1.0 / alpha),
            LwmyFunction::G1 { alpha, beta } => {
                set(&mut a, 1, -alpha);
                set(&mut a, 2, -alpha * beta);
            }
            LwmyFunction::F1 { alpha, beta } => {
                // -(2α/β)(cosh βx - 1)
                let mut term = -2.0 * alpha / beta;
                for k in 1..=n {
                    term *= beta / k as f64;
                    if k % 2 == 0 {
                        set(&mut a, k, term);
                    }
                }
            }
            LwmyFunction::FDeltaStar { alpha, beta, delta } => {
                // -(α/β)[((2-δ)/δ)(cosh βx - 1) + sinh βx]
                let ratio = (2.0 - delta) / delta;
                let mut term = -alpha / beta;
                for k in 1..=n {
                    term *= beta / k as f64;
                    set(&mut a, k, if k % 2 == 0 { ratio * term } else { term });
                }
            }
        }
        a
    }

    /// The conjugate `x ↦ exp(-f(-ln x))` acting on `(0, 1)`.
    pub fn bar_conjugate(&self) -> BarConjugate {
        BarConjugate { f: *self }
    }
}

impl fmt::Display for LwmyFunction {
    /// Compact form accepted by [`FromStr`]: `reciprocal:α`, `f1:α:β`,
    /// `g1:α:β`, `fdelta:α:β:δ`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            LwmyFunction::Reciprocal { alpha } => write!(f, "reciprocal:{alpha}"),
            LwmyFunction::F1 { alpha, beta } => write!(f, "f1:{alpha}:{beta}"),
            LwmyFunction::G1 { alpha, beta } => write!(f, "g1:{alpha}:{beta}"),
            LwmyFunction::FDeltaStar { alpha, beta, delta } => {
                write!(f, "fdelta:{alpha}:{beta}:{delta}")
            }
        }
    }
}

impl FromStr for LwmyFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let name = parts.next().unwrap_or_default().trim().to_ascii_lowercase();
        let nums = parts
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::domain(format!("bad number '{p}' in '{s}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let arity = |n: usize| -> Result<()> {
            if nums.len() == n {
                Ok(())
            } else {
                Err(Error::domain(format!(
                    "'{name}' takes {n} parameters, got {}",
                    nums.len()
                )))
            }
        };
        match name.as_str() {
            "reciprocal" => {
                arity(1)?;
                LwmyFunction::reciprocal(nums[0])
            }
            "f1" => {
                arity(2)?;
                LwmyFunction::f1(nums[0], nums[1])
            }
            "g1" => {
                arity(2)?;
                LwmyFunction::g1(nums[0], nums[1])
            }
            "fdelta" | "fdeltastar" => {
                arity(3)?;
                LwmyFunction::fdelta_star(nums[0], nums[1], nums[2])
            }
            _ => Err(Error::domain(format!("unknown function family '{name}'"))),
        }
    }
}

/// `f̄(x) = exp(-f(-ln x))` for a function `f` of one of the four families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarConjugate {
    f: LwmyFunction,
}

impl BarConjugate {
    /// Closed form of the conjugate; `x` must lie in `(0, 1)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::domain(format!("conjugate is defined on (0, 1), got {x}")));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        match self.f {
            LwmyFunction::Reciprocal { alpha } => (alpha / x.ln()).exp(),
            LwmyFunction::F1 { alpha, beta } => {
                let w = x.powf(beta);
                (-(w / (1.0 - w)) / alpha).exp()
            }
            LwmyFunction::G1 { alpha, beta } => {
                let z = -beta * x.ln();
                (z / (1.0 + z)).powf(1.0 / alpha)
            }
            LwmyFunction::FDeltaStar { alpha, beta, delta } => {
                let w = x.powf(beta);
                let phi = (1.0 - w) / (1.0 + (delta - 1.0) * w);
                if alpha == 1.0 {
                    phi
                } else {
                    phi.powf(1.0 / alpha)
                }
            }
        }
    }

    pub fn inverse(&self) -> BarConjugate {
        BarConjugate { f: self.f.inverse() }
    }

    pub fn function(&self) -> LwmyFunction {
        self.f
    }
}
