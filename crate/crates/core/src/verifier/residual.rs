use serde::{Deserialize, Serialize};

use crate::distributions::Law;
use crate::error::{Error, Result};
use crate::lwmy::LwmyFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    /// Closed-form log-density derivatives.
    Analytic,
    /// Richardson-extrapolated central differences of `ln pdf`.
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_abs_residual: f64,
    /// Grid point at which the maximum is attained.
    pub worst_point: (f64, f64),
    pub grid: Vec<(f64, f64)>,
    pub derivative_mode: DerivativeMode,
}

/// `n × n` points log-spaced on `[lo, hi]²`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let axis: Vec<f64> = (0..n)
        .map(|i| {
            if n == 1 {
                lo
            } else {
                lo * (hi / lo).powf(i as f64 / (n - 1) as f64)
            }
        })
        .collect();
    axis.iter().flat_map(|&x| axis.iter().map(move |&y| (x, y))).collect()
}

fn finite_difference_derivatives(law: &Law, x: f64) -> (f64, f64) {
    let h0 = 1e-4 * x.max(1.0);
    let phi = |t: f64| law.log_pdf(t);
    let f0 = phi(x);
    let d = |h: f64| {
        let (fp, fm) = (phi(x + h), phi(x - h));
        ((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h))
    };
    let (a1, a2) = d(h0);
    let (b1, b2) = d(0.5 * h0);
    ((4.0 * b1 - a1) / 3.0, (4.0 * b2 - a2) / 3.0)
}

fn phi_derivatives(law: &Law, x: f64, mode: DerivativeMode) -> Result<(f64, f64)> {
    match mode {
        DerivativeMode::Analytic => law.log_pdf_derivatives(x),
        DerivativeMode::FiniteDifference => Ok(finite_difference_derivatives(law, x)),
    }
}

/// Left-hand side of the characterising equation at one point:
///
/// `φ_X'' - φ_X' f''/f' + φ_Y'' (1 - f'(x)/f'(x+y)) + φ_Y' f''/f' + 2 (f''/f')² - f'''/f'`
///
/// with `f` and its derivatives taken at `x` unless noted.
pub fn residual_at(f: &LwmyFunction, law_x: &Law, law_y: &Law, x: f64, y: f64, mode: DerivativeMode) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::domain(format!("residual grid point ({x}, {y}) is not positive")));
    }
    let [_, f1, f2, f3] = f.derivatives(x);
    let f1_sum = f.derivatives(x + y)[1];
    let (px1, px2) = phi_derivatives(law_x, x, mode)?;
    let (py1, py2) = phi_derivatives(law_y, y, mode)?;
    let r = f2 / f1;
    Ok(px2 - px1 * r + py2 * (1.0 - f1 / f1_sum) + py1 * r + 2.0 * r * r - f3 / f1)
}

pub fn functional_equation_residual(
    f: &LwmyFunction,
    law_x: &Law,
    law_y: &Law,
    grid: &[(f64, f64)],
    mode: DerivativeMode,
) -> Result<ResidualReport> {
    let mut worst = (0.0, (f64::NAN, f64::NAN));
    for &(x, y) in grid {
        let r = residual_at(f, law_x, law_y, x, y, mode)?.abs();
        if !r.is_finite() {
            return Err(Error::domain(format!("residual is not finite at ({x}, {y})")));
        }
        if r >= worst.0 {
            worst = (r, (x, y));
        }
    }
    Ok(ResidualReport {
        max_abs_residual: worst.0,
        worst_point: worst.1,
        grid: grid.to_vec(),
        derivative_mode: mode,
    })
}
