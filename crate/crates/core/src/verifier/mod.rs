//! Monte Carlo and residual checks of the independence, marginal and
//! convolution identities.

mod checks;
mod report;
mod residual;
pub mod stats;

pub use checks::{
    check_convolution, check_independence, check_marginal, check_marginal_law, check_pushforward, check_sampler,
    draw_pairs, independence_of, transform_pairs, BinnedFitResult, GoodnessOfFitResult, IndependenceTestResult,
    Pairing, PushforwardResult, QuantileBins, MIN_CHECK_SIZE,
};
pub use report::VerificationReport;
pub use residual::{functional_equation_residual, log_grid, residual_at, DerivativeMode, ResidualReport};
