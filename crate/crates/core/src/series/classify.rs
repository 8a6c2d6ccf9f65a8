use std::fmt;

use serde::{Deserialize, Serialize};

use super::table::{is_zero, CoefficientTable};
use crate::error::{Error, Result};
use crate::lwmy::LwmyFunction;

/// The four closed forms a smooth profile can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `F = a₂x²`
    QuadraticA2x2,
    /// `F = A(cosh βx − 1)`
    CoshBranch,
    /// `F = a₁x + a₂x²`
    LinearQuadratic,
    /// `F = α(cosh βx − 1) + γ sinh βx`
    CoshSinhBranch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum BranchParams {
    Quadratic { a2: f64 },
    Cosh { amplitude: f64, rate: f64 },
    LinearQuadratic { a1: f64, a2: f64 },
    CoshSinh { alpha: f64, beta: f64, gamma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationOutcome {
    pub branch: Branch,
    pub params: BranchParams,
    pub matched_family: LwmyFunction,
}

impl ClassificationOutcome {
    /// One line naming the branch, its constants and the recovered function.
    pub fn summary(&self) -> String {
        let form = match self.params {
            BranchParams::Quadratic { a2 } => format!("F(x) = {a2}·x²"),
            BranchParams::Cosh { amplitude, rate } => {
                format!("F(x) = {amplitude}·(cosh({rate}·x) - 1)")
            }
            BranchParams::LinearQuadratic { a1, a2 } => format!("F(x) = {a1}·x{}", plus(a2, "x²")),
            BranchParams::CoshSinh { alpha, beta, gamma } => format!(
                "F(x) = {alpha}·(cosh({beta}·x) - 1){}",
                plus(gamma, &format!("sinh({beta}·x)"))
            ),
        };
        format!("{:?}: {form}; f = {}", self.branch, self.matched_family)
    }
}

impl fmt::Display for ClassificationOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary())
    }
}

fn plus(c: f64, term: &str) -> String {
    if c < 0.0 {
        format!(" - {}·{term}", -c)
    } else {
        format!(" + {c}·{term}")
    }
}

fn reject(msg: impl Into<String>) -> Error {
    Error::Rejected(msg.into())
}

/// Reads the branch off `a₁..a₄` and recovers the matching function.
///
/// Profiles must be negative on `(0, ∞)`; sign patterns that would make `F`
/// vanish or change sign (the trigonometric solutions) are rejected.
pub fn classify(table: &CoefficientTable) -> Result<ClassificationOutcome> {
    if table.n_max < 4 {
        return Err(Error::domain("classification needs a₁..a₄"));
    }
    let raw = [table.a(1), table.a(2), table.a(3), table.a(4)];
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("non-finite coefficients"));
    }
    let scale = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::InvalidSeed("all coefficients vanish".into()));
    }
    let [a1, a2, a3, a4] = raw.map(|v| if is_zero(v, scale) { 0.0 } else { v });

    if a1 == 0.0 {
        if a2 >= 0.0 {
            return Err(reject(format!("a₁ = 0 needs a₂ < 0, got a₂ = {a2}")));
        }
        if a3 != 0.0 {
            return Err(Error::Inconsistency(format!("a₁ = 0 needs a₃ = 0, got a₃ = {a3}")));
        }
        if a4 == 0.0 {
            return Ok(ClassificationOutcome {
                branch: Branch::QuadraticA2x2,
                params: BranchParams::Quadratic { a2 },
                matched_family: LwmyFunction::reciprocal(-1.0 / a2)?,
            });
        }
        if a4 > 0.0 {
            return Err(reject(
                "a₄ > 0 with a₂ < 0 gives a cosine profile that vanishes on (0, ∞)",
            ));
        }
        let amplitude = a2 * a2 / (6.0 * a4);
        let rate = (12.0 * a4 / a2).sqrt();
        return Ok(ClassificationOutcome {
            branch: Branch::CoshBranch,
            params: BranchParams::Cosh { amplitude, rate },
            matched_family: LwmyFunction::f1(-amplitude * rate / 2.0, rate)?,
        });
    }

    if a1 > 0.0 {
        return Err(reject(format!("F′(0⁺) = a₁ must be negative, got {a1}")));
    }
    if a3 == 0.0 {
        if a2 >= 0.0 {
            return Err(reject(format!("a₁x + a₂x² needs a₂ < 0, got a₂ = {a2}")));
        }
        return Ok(ClassificationOutcome {
            branch: Branch::LinearQuadratic,
            params: BranchParams::LinearQuadratic { a1, a2 },
            matched_family: LwmyFunction::g1(-a1, a2 / a1)?,
        });
    }
    if a1 * a3 < 0.0 {
        return Err(reject("a₁a₃ < 0 gives a trigonometric profile that vanishes on (0, ∞)"));
    }
    let alpha = a1 * a2 / (3.0 * a3);
    let beta = (6.0 * a3 / a1).sqrt();
    let gamma = a1 / beta;
    if alpha + gamma >= 0.0 {
        return Err(reject(format!(
            "α + γ = {} must be negative for F to stay below zero",
            alpha + gamma
        )));
    }
    let delta = 2.0 * gamma / (gamma + alpha);
    Ok(ClassificationOutcome {
        branch: Branch::CoshSinhBranch,
        params: BranchParams::CoshSinh { alpha, beta, gamma },
        matched_family: LwmyFunction::fdelta_star(-gamma * beta, beta, delta)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::extend_coefficients;

    #[test]
    fn quadratic_profile() {
        let t = extend_coefficients([0.0, -1.0, 0.0, 0.0], 8).unwrap();
        let out = classify(&t).unwrap();
        assert_eq!(out.branch, Branch::QuadraticA2x2);
        assert_eq!(out.matched_family, LwmyFunction::reciprocal(1.0).unwrap());
    }

    #[test]
    fn cosh_profile() {
        // −2(cosh x − 1) = −x² − x⁴/12 − ...
        let t = extend_coefficients([0.0, -1.0, 0.0, -1.0 / 12.0], 10).unwrap();
        let out = classify(&t).unwrap();
        assert_eq!(out.branch, Branch::CoshBranch);
        let LwmyFunction::F1 { alpha, beta } = out.matched_family else {
            panic!()
        };
        assert!((alpha - 1.0).abs() < 1e-14 && (beta - 1.0).abs() < 1e-14);
        assert!(out.summary().starts_with("CoshBranch"));
    }

    #[test]
    fn linear_quadratic_profile() {
        let t = extend_coefficients([-1.0, -1.0, 0.0, 0.0], 8).unwrap();
        let out = classify(&t).unwrap();
        assert_eq!(out.branch, Branch::LinearQuadratic);
        assert_eq!(out.matched_family, LwmyFunction::g1(1.0, 1.0).unwrap());
    }

    #[test]
    fn sign_rejections() {
        let cosine = extend_coefficients([0.0, -1.0, 0.0, 1.0], 8).unwrap();
        assert!(matches!(classify(&cosine), Err(Error::Rejected(_))));
        let positive = extend_coefficients([0.0, 1.0, 0.0, 1.0], 8).unwrap();
        assert!(matches!(classify(&positive), Err(Error::Rejected(_))));
        // a₁a₃ < 0
        let trig = extend_coefficients([-1.0, -1.0, 1.0, 0.5], 8).unwrap();
        assert!(matches!(classify(&trig), Err(Error::Rejected(_))));
    }
}
