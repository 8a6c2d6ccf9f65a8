//! Power-series profiles `F = 1/f′`: recurrences, classification, the delay
//! identity and the `h` equation.

mod classify;
mod delay;
mod ode;
mod table;

pub use classify::{classify, Branch, BranchParams, ClassificationOutcome};
pub use delay::{delay_residual, delay_residual_relative, max_delay_residual, Profile};
pub use ode::{solve_h, HSolution};
pub use table::{extend_coefficients, verify_comb20, Binomials, CoefficientTable, ZERO_TOL};
