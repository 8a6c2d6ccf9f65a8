use crate::error::{Error, Result};
use crate::numerics::{integrate_with, ln_beta, ln_gamma, Domain, QuadOptions};

use super::spec::{Bijection, DistributionSpec, Support};

/// Kernel integrals either side of the pivot, relative to the kernel at the pivot.
#[derive(Debug, Clone, Copy)]
struct Mass {
    pivot: f64,
    log_kernel_pivot: f64,
    left: f64,
    right: f64,
    tail_scale: f64,
}

impl Mass {
    fn total(&self) -> f64 {
        self.left + self.right
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Gig { mu: f64, half_a2: f64, half_b2: f64 },
    Gamma { lambda: f64, c: f64 },
    Beta { a: f64, b: f64 },
    Kummer2 { a: f64, b: f64, c: f64 },
    BetaAlpha { alpha: f64, a: f64, b: f64, c: f64 },
    Image { base: Box<Law>, map: Bijection },
}

/// A validated law with its normalizing constant and CDF data precomputed.
///
/// The kernel mass is integrated once at construction; every later call is
/// read-only, so a `Law` can be shared freely between threads.
#[derive(Debug, Clone)]
pub struct Law {
    spec: DistributionSpec,
    kind: Kind,
    support: Support,
    mass: Option<Mass>,
    log_norm: f64,
}

const MASS_REL_TOL: f64 = 1e-13;
const GAP_REL_TOL: f64 = 1e-12;

fn mass_options() -> QuadOptions {
    QuadOptions {
        abs_tol: 0.0,
        rel_tol: MASS_REL_TOL,
        max_evals: 2_000_000,
    }
}

impl Law {
    pub fn new(spec: &DistributionSpec) -> Result<Law> {
        spec.validate()?;
        let kind = match *spec {
            DistributionSpec::Gig { mu, a, b } => Kind::Gig {
                mu,
                half_a2: 0.5 * a * a,
                half_b2: 0.5 * b * b,
            },
            DistributionSpec::Gamma { lambda, c } => Kind::Gamma { lambda, c },
            DistributionSpec::Beta { a, b } => Kind::Beta { a, b },
            DistributionSpec::Kummer2 { a, b, c } => Kind::Kummer2 { a, b, c },
            // c = 0 is the beta law itself and takes its code path.
            DistributionSpec::BetaAlpha { a, b, c: 0.0, .. } => Kind::Beta { a, b },
            DistributionSpec::BetaAlpha { alpha, a, b, c } => Kind::BetaAlpha { alpha, a, b, c },
            DistributionSpec::Image { ref base, map } => Kind::Image {
                base: Box::new(Law::new(base)?),
                map,
            },
        };
        let mut law = Law {
            spec: spec.clone(),
            kind,
            support: spec.support(),
            mass: None,
            log_norm: 0.0,
        };
        if !matches!(law.kind, Kind::Image { .. }) {
            let mass = law.compute_mass()?;
            law.log_norm = match law.kind {
                Kind::Gamma { lambda, c } => lambda * c.ln() - ln_gamma(lambda)?,
                Kind::Beta { a, b } => -ln_beta(a, b)?,
                _ => -(mass.log_kernel_pivot + mass.total().ln()),
            };
            law.mass = Some(mass);
        }
        Ok(law)
    }

    pub fn spec(&self) -> &DistributionSpec {
        &self.spec
    }

    pub fn support(&self) -> Support {
        self.support
    }

    /// Unnormalized log density; only meaningful inside the support.
    fn log_kernel(&self, x: f64) -> f64 {
        match self.kind {
            Kind::Gig { mu, half_a2, half_b2 } => (mu - 1.0) * x.ln() - half_a2 / x - half_b2 * x,
            Kind::Gamma { lambda, c } => (lambda - 1.0) * x.ln() - c * x,
            Kind::Beta { a, b } => beta_log_kernel(a, b, x),
            Kind::Kummer2 { a, b, c } => (a - 1.0) * x.ln() - (a + b) * x.ln_1p() - c * x,
            Kind::BetaAlpha { alpha, a, b, c } => beta_log_kernel(a, b, x) + c * ((alpha - 1.0) * x).ln_1p(),
            Kind::Image { .. } => unreachable!("image laws have no kernel of their own"),
        }
    }

    /// Kernel divided by `exp(lk)`; zero wherever rounding puts a node on the boundary.
    fn relative_kernel(&self, x: f64, lk: f64) -> f64 {
        if self.support.contains(x) {
            (self.log_kernel(x) - lk).exp()
        } else {
            0.0
        }
    }

    /// A central point of the law: the mode when it is interior, otherwise the mean.
    fn pivot(&self) -> f64 {
        match self.kind {
            Kind::Gig { mu, half_a2, half_b2 } => {
                let m = mu - 1.0;
                let disc = (m * m + 4.0 * half_a2 * half_b2).sqrt();
                if m >= 0.0 {
                    (m + disc) / (2.0 * half_b2)
                } else {
                    2.0 * half_a2 / (disc - m)
                }
            }
            Kind::Gamma { lambda, c } => {
                if lambda > 1.0 {
                    (lambda - 1.0) / c
                } else {
                    lambda / c
                }
            }
            Kind::Beta { a, b } | Kind::BetaAlpha { a, b, .. } => {
                if a > 1.0 && b > 1.0 {
                    (a - 1.0) / (a + b - 2.0)
                } else {
                    a / (a + b)
                }
            }
            Kind::Kummer2 { a, b, c } => {
                if a > 1.0 {
                    // positive root of c x² + (1 + b + c) x - (a - 1)
                    let p = 1.0 + b + c;
                    let disc = (p * p + 4.0 * c * (a - 1.0)).sqrt();
                    if p >= 0.0 {
                        2.0 * (a - 1.0) / (p + disc)
                    } else {
                        (disc - p) / (2.0 * c)
                    }
                } else {
                    a / c
                }
            }
            Kind::Image { .. } => unreachable!(),
        }
    }

    fn tail_scale(&self, pivot: f64) -> f64 {
        let rate = match self.kind {
            Kind::Gig { half_b2, .. } => half_b2,
            Kind::Gamma { c, .. } | Kind::Kummer2 { c, .. } => c,
            _ => 1.0,
        };
        pivot.max(1.0 / rate)
    }

    fn compute_mass(&self) -> Result<Mass> {
        let pivot = self.pivot();
        let lk = self.log_kernel(pivot);
        if !lk.is_finite() {
            return Err(Error::domain(format!(
                "kernel of {} is not finite at {pivot}",
                self.spec
            )));
        }
        let opts = mass_options();
        let tail_scale = self.tail_scale(pivot);
        let left = self.integrate_kernel(0.0, pivot, lk, tail_scale, &opts)?;
        let right = self.integrate_kernel(pivot, self.support.upper(), lk, tail_scale, &opts)?;
        if !(left + right > 0.0) || !(left + right).is_finite() {
            return Err(Error::DivergentIntegral(format!(
                "mass of {} is {}",
                self.spec,
                left + right
            )));
        }
        Ok(Mass {
            pivot,
            log_kernel_pivot: lk,
            left,
            right,
            tail_scale,
        })
    }

    /// Log of the normalized density; `-∞` off the open support.
    pub fn log_pdf(&self, x: f64) -> f64 {
        if !self.support.contains(x) {
            return f64::NEG_INFINITY;
        }
        match &self.kind {
            Kind::Image { base, map } => {
                let g = map.inverse_derivatives(x)[0];
                base.log_pdf(g) + map.log_abs_inverse_jacobian(x)
            }
            _ => self.log_kernel(x) + self.log_norm,
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    /// `ln` of the constant multiplying the kernel of a base law.
    ///
    /// For an image law this is the constant of its base law.
    pub fn log_normalizing_constant(&self) -> f64 {
        match &self.kind {
            Kind::Image { base, .. } => base.log_normalizing_constant(),
            _ => self.log_norm,
        }
    }

    pub fn normalizing_constant(&self) -> f64 {
        self.log_normalizing_constant().exp()
    }

    /// `(φ', φ'')` for `φ = ln pdf`, in closed form.
    pub fn log_pdf_derivatives(&self, x: f64) -> Result<(f64, f64)> {
        if !self.support.contains(x) {
            return Err(Error::domain(format!("{x} is outside the support of {}", self.spec)));
        }
        let beta_terms = |a: f64, b: f64| {
            let y = 1.0 - x;
            (
                (a - 1.0) / x - (b - 1.0) / y,
                -(a - 1.0) / (x * x) - (b - 1.0) / (y * y),
            )
        };
        Ok(match &self.kind {
            Kind::Gig { mu, half_a2, half_b2 } => {
                let m = mu - 1.0;
                let x2 = x * x;
                (m / x + half_a2 / x2 - half_b2, -m / x2 - 2.0 * half_a2 / (x2 * x))
            }
            Kind::Gamma { lambda, c } => ((lambda - 1.0) / x - c, -(lambda - 1.0) / (x * x)),
            Kind::Beta { a, b } => beta_terms(*a, *b),
            Kind::Kummer2 { a, b, c } => {
                let s = a + b;
                let y = 1.0 + x;
                ((a - 1.0) / x - s / y - c, -(a - 1.0) / (x * x) + s / (y * y))
            }
            Kind::BetaAlpha { alpha, a, b, c } => {
                let (d1, d2) = beta_terms(*a, *b);
                let k = alpha - 1.0;
                let w = 1.0 + k * x;
                (d1 + c * k / w, d2 - c * k * k / (w * w))
            }
            Kind::Image { base, map } => {
                let [g, g1, g2, g3] = map.inverse_derivatives(x);
                let (p1, p2) = base.log_pdf_derivatives(g)?;
                let r = g2 / g1;
                (p1 * g1 + r, p2 * g1 * g1 + p1 * g2 + g3 / g1 - r * r)
            }
        })
    }

    fn mass(&self) -> &Mass {
        self.mass.as_ref().expect("base laws carry their mass")
    }

    /// `∫_lo^hi kernel / exp(lk)`. Pieces of the unit interval that reach up
    /// to 1 are integrated in `t = 1 - x` so a singularity at 1 is resolved.
    fn integrate_kernel(&self, lo: f64, hi: f64, lk: f64, scale: f64, opts: &QuadOptions) -> Result<f64> {
        let r = match self.support {
            Support::UnitInterval if hi == 1.0 || lo >= 0.5 => {
                let g = |t: f64| {
                    if t > 0.0 && t < 1.0 {
                        (self.log_kernel_reflected(t) - lk).exp()
                    } else {
                        0.0
                    }
                };
                integrate_with(g, Domain::Finite(1.0 - hi, 1.0 - lo), opts)?
            }
            Support::PositiveHalfLine if hi.is_infinite() => {
                let g = |x: f64| self.relative_kernel(x, lk);
                integrate_with(
                    g,
                    Domain::UpperInfinite {
                        lower: lo,
                        scale: scale.max(lo),
                    },
                    opts,
                )?
            }
            _ => integrate_with(|x: f64| self.relative_kernel(x, lk), Domain::Finite(lo, hi), opts)?,
        };
        Ok(r.value)
    }

    /// Log kernel at `x = 1 - t` for the unit-interval laws, with `t` exact.
    fn log_kernel_reflected(&self, t: f64) -> f64 {
        match self.kind {
            Kind::Beta { a, b } => (a - 1.0) * (-t).ln_1p() + (b - 1.0) * t.ln(),
            Kind::BetaAlpha { alpha, a, b, c } => {
                (a - 1.0) * (-t).ln_1p() + (b - 1.0) * t.ln() + c * (alpha + (1.0 - alpha) * t).ln()
            }
            _ => self.log_kernel(1.0 - t),
        }
    }

    fn kernel_integral(&self, lo: f64, hi: f64) -> Result<f64> {
        let m = self.mass();
        let opts = QuadOptions {
            abs_tol: 1e-15 * m.total(),
            rel_tol: GAP_REL_TOL,
            max_evals: 400_000,
        };
        self.integrate_kernel(lo, hi, m.log_kernel_pivot, m.tail_scale, &opts)
    }

    /// `(P(X ≤ x), P(X > x))`, each accurate in its own tail.
    pub fn cdf_sf(&self, x: f64) -> Result<(f64, f64)> {
        if x.is_nan() {
            return Err(Error::domain("cdf of NaN"));
        }
        if let Kind::Image { base, map } = &self.kind {
            if x <= 0.0 {
                return Ok((0.0, 1.0));
            }
            if x >= self.support.upper() {
                return Ok((1.0, 0.0));
            }
            let (c, s) = base.cdf_sf(map.inverse_derivatives(x)[0])?;
            return Ok((s, c));
        }
        if x <= 0.0 {
            return Ok((0.0, 1.0));
        }
        if x >= self.support.upper() {
            return Ok((1.0, 0.0));
        }
        let m = *self.mass();
        let total = m.total();
        let upper = self.support.upper();
        if x <= m.pivot {
            let p = (self.kernel_integral(0.0, x)? / total).min(1.0);
            Ok((p, 1.0 - p))
        } else {
            let q = (self.kernel_integral(x, upper)? / total).min(1.0);
            Ok((1.0 - q, q))
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        Ok(self.cdf_sf(x)?.0)
    }

    pub fn sf(&self, x: f64) -> Result<f64> {
        Ok(self.cdf_sf(x)?.1)
    }

    /// `(cdf, sf)` at every point, sharing quadrature work between neighbours.
    pub fn cdf_sf_many(&self, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
        if xs.iter().any(|x| x.is_nan()) {
            return Err(Error::domain("cdf of NaN"));
        }
        if let Kind::Image { base, map } = &self.kind {
            let upper = self.support.upper();
            let mapped: Vec<f64> = xs
                .iter()
                .map(|&x| {
                    if x <= 0.0 {
                        base.support.upper()
                    } else if x >= upper {
                        0.0
                    } else {
                        map.inverse_derivatives(x)[0]
                    }
                })
                .collect();
            return Ok(base.cdf_sf_many(&mapped)?.into_iter().map(|(c, s)| (s, c)).collect());
        }
        let mut order: Vec<usize> = (0..xs.len()).collect();
        order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
        let m = *self.mass();
        let total = m.total();
        let upper = self.support.upper();
        let mut out = vec![(0.0, 1.0); xs.len()];

        // Below the pivot: accumulate from the lower end of the support.
        let mut acc = 0.0;
        let mut prev = 0.0;
        let split = order.partition_point(|&i| xs[i] <= m.pivot);
        for &i in &order[..split] {
            let x = xs[i];
            if x <= 0.0 {
                continue;
            }
            if x > prev {
                acc += self.kernel_integral(prev, x)?;
                prev = x;
            }
            let p = (acc / total).min(1.0);
            out[i] = (p, 1.0 - p);
        }
        // Above the pivot: accumulate downward from the upper end.
        let mut acc = 0.0;
        let mut next = upper;
        for &i in order[split..].iter().rev() {
            let x = xs[i];
            if x >= upper {
                out[i] = (1.0, 0.0);
                continue;
            }
            if x < next {
                acc += self.kernel_integral(x, next)?;
                next = x;
            }
            let q = (acc / total).min(1.0);
            out[i] = (1.0 - q, q);
        }
        Ok(out)
    }

    /// Inverse CDF by bracketing and safeguarded Newton steps.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("quantile level must lie in (0, 1), got {p}")));
        }
        if let Kind::Image { base, map } = &self.kind {
            return Ok(map.forward(base.quantile(1.0 - p)?));
        }
        let m = *self.mass();
        let upper = self.support.upper();
        let (mut lo, mut hi) = (0.0, upper);
        if upper.is_infinite() {
            let mut x = m.pivot.max(m.tail_scale);
            while self.cdf(x)? < p {
                lo = x;
                x *= 2.0;
                if !x.is_finite() {
                    return Err(Error::domain(format!("quantile {p} of {} is not finite", self.spec)));
                }
            }
            hi = x;
        }
        let mut x = m.pivot.clamp(lo, hi);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        for _ in 0..200 {
            let f = self.cdf(x)? - p;
            if f == 0.0 {
                return Ok(x);
            }
            if f < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let density = self.pdf(x);
            let newton = x - f / density;
            let candidate = if density > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (candidate - x).abs() <= f64::EPSILON * x.abs() || hi - lo <= f64::EPSILON * hi {
                return Ok(candidate);
            }
            x = candidate;
        }
        Ok(x)
    }

    /// `∫ pdf` over the support by direct quadrature of `exp(log_pdf)`.
    pub fn integrate_pdf(&self, rel_tol: f64) -> Result<f64> {
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol,
            max_evals: 2_000_000,
        };
        let (pivot, scale) = match &self.kind {
            Kind::Image { base, map } => {
                let p = map.forward(base.mass_pivot());
                (p, p.max(1.0))
            }
            _ => {
                let m = self.mass();
                (m.pivot, m.tail_scale)
            }
        };
        let f = |x: f64| self.pdf(x);
        let left = integrate_with(f, Domain::Finite(0.0, pivot), &opts)?.value;
        let right = match self.support {
            // Measured from the right end so that a singularity at 1 stays resolvable.
            Support::UnitInterval if !matches!(self.kind, Kind::Image { .. }) => {
                let g = |t: f64| {
                    if t > 0.0 {
                        (self.log_kernel_reflected(t) + self.log_norm).exp()
                    } else {
                        0.0
                    }
                };
                integrate_with(g, Domain::Finite(0.0, 1.0 - pivot), &opts)?.value
            }
            Support::UnitInterval => integrate_with(f, Domain::Finite(pivot, 1.0), &opts)?.value,
            Support::PositiveHalfLine => integrate_with(f, Domain::UpperInfinite { lower: pivot, scale }, &opts)?.value,
        };
        Ok(left + right)
    }

    fn mass_pivot(&self) -> f64 {
        match &self.kind {
            Kind::Image { base, map } => map.forward(base.mass_pivot()),
            _ => self.mass().pivot,
        }
    }
}

fn beta_log_kernel(a: f64, b: f64, x: f64) -> f64 {
    (a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p()
}

/// `ln pdf(x)` of `spec`, `-∞` off the support.
pub fn log_pdf(spec: &DistributionSpec, x: f64) -> Result<f64> {
    Ok(Law::new(spec)?.log_pdf(x))
}

pub fn normalizing_constant(spec: &DistributionSpec) -> Result<f64> {
    Ok(Law::new(spec)?.normalizing_constant())
}

pub fn cdf(spec: &DistributionSpec, x: f64) -> Result<f64> {
    Law::new(spec)?.cdf(x)
}
