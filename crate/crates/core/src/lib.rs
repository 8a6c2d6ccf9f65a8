//! Numerical workbench for LWMY functions: decreasing bijections `f` of
//! `(0, ∞)` for which `f(X + Y)` and `f(X) - f(X + Y)` are independent for
//! suitable independent positive `X`, `Y`.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: special functions, adaptive quadrature and seeded random streams.
//! * [`lwmy`]: the four function families, their derivatives, inverses and the
//!   additive / multiplicative transformations built on them.
//! * [`distributions`]: densities, normalizing constants, quadrature CDFs and
//!   exact samplers for every law involved (GIG, gamma, beta, Kummer type 2,
//!   `β_α`, and image laws under smooth bijections).
//! * [`verifier`]: Monte Carlo independence and goodness-of-fit checks plus the
//!   residual of the characterising functional equation.
//! * [`series`]: power-series recurrences for `F = 1/f'`, classification of the
//!   smooth solutions, the delay equation and the ODE for `h = φ_Y'`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod error;
pub mod lwmy;
pub mod numerics;
pub mod series;
pub mod verifier;

pub use error::{Error, Result};
