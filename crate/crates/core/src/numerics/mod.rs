//! Special functions, adaptive quadrature and the seeded random-number
//! contract shared by the rest of the crate.

pub mod quadrature;
pub mod rng;
pub mod special;

pub use quadrature::{integrate, integrate_with, Domain, QuadOptions, QuadratureResult};
pub use rng::RngStream;
pub use special::{kolmogorov_survival, ln_beta, ln_gamma, log_bessel_k, regularized_gamma_p, regularized_gamma_q};
