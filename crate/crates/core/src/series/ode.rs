use super::delay::Profile;
use crate::error::{Error, Result};

const AGREEMENT: f64 = 1e-8;
const MAX_STEPS: usize = 1 << 22;

/// Grid solution of `h′ = (λ₀ − h·F′(0⁺))/F` with Hermite interpolation.
#[derive(Debug, Clone)]
pub struct HSolution {
    pub ys: Vec<f64>,
    pub hs: Vec<f64>,
    pub slopes: Vec<f64>,
}

impl HSolution {
    pub fn range(&self) -> (f64, f64) {
        (self.ys[0], *self.ys.last().unwrap())
    }

    pub fn eval(&self, y: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&y) {
            return Err(Error::domain(format!("{y} outside [{lo}, {hi}]")));
        }
        let steps = self.ys.len() - 1;
        let dy = (hi - lo) / steps as f64;
        let i = (((y - lo) / dy) as usize).min(steps - 1);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let w = y1 - y0;
        let t = (y - y0) / w;
        let t2 = t * t;
        let t3 = t2 * t;
        Ok((2.0 * t3 - 3.0 * t2 + 1.0) * self.hs[i]
            + (t3 - 2.0 * t2 + t) * w * self.slopes[i]
            + (-2.0 * t3 + 3.0 * t2) * self.hs[i + 1]
            + (t3 - t2) * w * self.slopes[i + 1])
    }
}

struct Rhs<'a> {
    profile: &'a dyn Profile,
    lambda0: f64,
    fprime0: f64,
}

impl Rhs<'_> {
    fn at(&self, y: f64, h: f64) -> Result<f64> {
        let f = self.profile.value(y);
        if f == 0.0 || !f.is_finite() {
            return Err(Error::StepSize(format!("F({y}) = {f}")));
        }
        let d = (self.lambda0 - h * self.fprime0) / f;
        if !d.is_finite() {
            return Err(Error::StepSize(format!("h′ not finite at y = {y}")));
        }
        Ok(d)
    }
}

fn rk4(rhs: &Rhs, y0: f64, y1: f64, h0: f64, steps: usize) -> Result<HSolution> {
    let dy = (y1 - y0) / steps as f64;
    let mut ys = Vec::with_capacity(steps + 1);
    let mut hs = Vec::with_capacity(steps + 1);
    let mut slopes = Vec::with_capacity(steps + 1);
    let mut h = h0;
    for i in 0..=steps {
        let y = y0 + dy * i as f64;
        let k1 = rhs.at(y, h)?;
        ys.push(y);
        hs.push(h);
        slopes.push(k1);
        if i == steps {
            break;
        }
        let k2 = rhs.at(y + dy / 2.0, h + dy / 2.0 * k1)?;
        let k3 = rhs.at(y + dy / 2.0, h + dy / 2.0 * k2)?;
        let k4 = rhs.at(y + dy, h + dy * k3)?;
        h += dy / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !h.is_finite() {
            return Err(Error::StepSize(format!("solution blew up near y = {y}")));
        }
    }
    *ys.last_mut().unwrap() = y1;
    Ok(HSolution { ys, hs, slopes })
}

/// Integrates `h′(y) = (λ₀ − h(y)·F′(0⁺))/F(y)` from `h(y₀) = h0`.
///
/// The step is halved until two successive grids agree to 1e-8 at their
/// shared nodes. `F` must not vanish on the range.
pub fn solve_h(profile: &dyn Profile, lambda0: f64, fprime0: f64, y_range: (f64, f64), h0: f64) -> Result<HSolution> {
    let (y0, y1) = y_range;
    if !(y0.is_finite() && y1.is_finite() && y0 < y1) {
        return Err(Error::domain(format!("bad range [{y0}, {y1}]")));
    }
    if ![lambda0, fprime0, h0].iter().all(|v| v.is_finite()) {
        return Err(Error::domain("non-finite ODE constants"));
    }
    let rhs = Rhs {
        profile,
        lambda0,
        fprime0,
    };
    let mut steps = 16;
    let mut coarse = rk4(&rhs, y0, y1, h0, steps)?;
    while steps < MAX_STEPS {
        let fine = rk4(&rhs, y0, y1, h0, 2 * steps)?;
        let gap = coarse
            .hs
            .iter()
            .zip(fine.hs.iter().step_by(2))
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if gap <= AGREEMENT {
            return Ok(fine);
        }
        coarse = fine;
        steps *= 2;
    }
    Err(Error::StepSize(format!(
        "no agreement to {AGREEMENT:e} with {MAX_STEPS} steps"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lwmy::LwmyFunction;
    use crate::series::CoefficientTable;

    #[test]
    fn gamma_score_from_quadratic() {
        // Gamma(μ, b²/2) with μ = 2.5, b = 2.
        let (mu, rate) = (2.5, 2.0);
        let f = LwmyFunction::reciprocal(1.0).unwrap();
        let target = |y: f64| (mu - 1.0) / y - rate;
        let sol = solve_h(&f, mu - 1.0, 0.0, (0.5, 3.0), target(0.5)).unwrap();
        for i in 0..=50 {
            let y = 0.5 + 2.5 * i as f64 / 50.0;
            assert!((sol.eval(y).unwrap() - target(y)).abs() < 1e-6);
        }
    }

    #[test]
    fn beta_score_from_cosh() {
        // Y = −ln Beta(a, b): φ′(y) = (b−1)e^{−y}/(1−e^{−y}) − a.
        let (a, b) = (2.0, 3.0);
        let f = LwmyFunction::f1(1.0, 1.0).unwrap();
        let target = |y: f64| (b - 1.0) / y.exp_m1() - a;
        let sol = solve_h(&f, b - 1.0, 0.0, (0.5, 3.0), target(0.5)).unwrap();
        for i in 0..=50 {
            let y = 0.5 + 2.5 * i as f64 / 50.0;
            assert!((sol.eval(y).unwrap() - target(y)).abs() < 1e-6);
        }
    }

    #[test]
    fn linear_term_shifts_lambda() {
        // F = −y(1+y), F′(0⁺) = −1, Gamma(b, c) score.
        let (b, c) = (2.0, 1.5);
        let f = LwmyFunction::g1(1.0, 1.0).unwrap();
        let target = |y: f64| (b - 1.0) / y - c;
        let sol = solve_h(&f, b - 1.0 + c, -1.0, (0.5, 3.0), target(0.5)).unwrap();
        for y in [0.5, 1.0, 2.2, 3.0] {
            assert!((sol.eval(y).unwrap() - target(y)).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_rhs_is_constant() {
        let f = LwmyFunction::f1(1.0, 1.0).unwrap();
        let sol = solve_h(&f, 0.0, 0.0, (0.5, 3.0), 0.7).unwrap();
        assert!(sol.hs.iter().all(|&h| h == 0.7));
    }

    #[test]
    fn vanishing_profile_reported() {
        let lin = CoefficientTable::from_coefficients(vec![1.0, -1.0]);
        assert!(matches!(
            solve_h(&lin, 1.0, 1.0, (0.5, 1.5), 0.0),
            Err(Error::StepSize(_))
        ));
    }
}
