use super::classify::BranchParams;
use super::table::CoefficientTable;
use crate::error::{Error, Result};
use crate::lwmy::LwmyFunction;

/// A candidate `F` together with its derivative.
pub trait Profile {
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
    /// `F′(0⁺)`.
    fn derivative_at_zero(&self) -> f64;
}

impl Profile for LwmyFunction {
    fn value(&self, x: f64) -> f64 {
        self.big_f_unchecked(x)
    }
    fn derivative(&self, x: f64) -> f64 {
        self.big_f_derivative(x)
    }
    fn derivative_at_zero(&self) -> f64 {
        self.big_f_derivative_at_zero()
    }
}

/// The table read as a polynomial.
impl Profile for CoefficientTable {
    fn value(&self, x: f64) -> f64 {
        self.eval(x).0
    }
    fn derivative(&self, x: f64) -> f64 {
        self.eval(x).1
    }
    fn derivative_at_zero(&self) -> f64 {
        self.a(1)
    }
}

/// The closed form of each branch, written from its own constants.
impl Profile for BranchParams {
    fn value(&self, x: f64) -> f64 {
        match *self {
            BranchParams::Quadratic { a2 } => a2 * x * x,
            BranchParams::Cosh { amplitude, rate } => {
                let s = (rate * x / 2.0).sinh();
                amplitude * 2.0 * s * s
            }
            BranchParams::LinearQuadratic { a1, a2 } => x * (a1 + a2 * x),
            BranchParams::CoshSinh { alpha, beta, gamma } => {
                let s = (beta * x / 2.0).sinh();
                alpha * 2.0 * s * s + gamma * (beta * x).sinh()
            }
        }
    }
    fn derivative(&self, x: f64) -> f64 {
        match *self {
            BranchParams::Quadratic { a2 } => 2.0 * a2 * x,
            BranchParams::Cosh { amplitude, rate } => amplitude * rate * (rate * x).sinh(),
            BranchParams::LinearQuadratic { a1, a2 } => a1 + 2.0 * a2 * x,
            BranchParams::CoshSinh { alpha, beta, gamma } => {
                beta * (alpha * (beta * x).sinh() + gamma * (beta * x).cosh())
            }
        }
    }
    fn derivative_at_zero(&self) -> f64 {
        match *self {
            BranchParams::Quadratic { .. } | BranchParams::Cosh { .. } => 0.0,
            BranchParams::LinearQuadratic { a1, .. } => a1,
            BranchParams::CoshSinh { beta, gamma, .. } => beta * gamma,
        }
    }
}

fn delay_terms(profile: &dyn Profile, x: f64, y: f64) -> Result<(f64, f64, f64)> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::domain(format!("delay residual needs x, y > 0, got ({x}, {y})")));
    }
    let fy = profile.value(y);
    if fy == 0.0 || !fy.is_finite() {
        return Err(Error::Division(format!("F({y}) = {fy}")));
    }
    let lhs = profile.derivative(x + y);
    let ratio = (profile.derivative(y) + profile.derivative_at_zero()) / fy;
    let middle = ratio * (profile.value(x + y) - profile.value(x));
    Ok((lhs, middle, profile.derivative(x)))
}

/// `F′(x+y) − [((F′(y) + F′(0⁺))/F(y))·(F(x+y) − F(x)) − F′(x)]`.
pub fn delay_residual(profile: &dyn Profile, x: f64, y: f64) -> Result<f64> {
    let (lhs, middle, fx) = delay_terms(profile, x, y)?;
    Ok(lhs - (middle - fx))
}

/// The residual divided by the largest of its three terms.
pub fn delay_residual_relative(profile: &dyn Profile, x: f64, y: f64) -> Result<f64> {
    let (lhs, middle, fx) = delay_terms(profile, x, y)?;
    let size = lhs.abs().max(middle.abs()).max(fx.abs());
    let r = lhs - (middle - fx);
    Ok(if size > 0.0 { r.abs() / size } else { r.abs() })
}

/// Worst relative residual over a set of points.
pub fn max_delay_residual(profile: &dyn Profile, grid: &[(f64, f64)]) -> Result<(f64, (f64, f64))> {
    let mut worst = (0.0, (f64::NAN, f64::NAN));
    for &(x, y) in grid {
        let r = delay_residual_relative(profile, x, y)?;
        if r > worst.0 || worst.1 .0.is_nan() {
            worst = (r, (x, y));
        }
    }
    Ok(worst)
}
