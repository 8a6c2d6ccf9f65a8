//! Densities, normalizing constants, quadrature CDFs and exact samplers.

mod grid;
mod law;
mod sampler;
mod spec;

pub use grid::parameter_grid;
pub use law::{cdf, log_pdf, normalizing_constant, Law};
pub use sampler::{sample, SampleBatch, Sampler};
pub use spec::{image_law, Bijection, DistributionSpec, Support};
