use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use super::law::Law;
use super::spec::{Bijection, DistributionSpec};
use crate::error::{Error, Result};
use crate::numerics::{ln_gamma, RngStream};

/// Marsaglia–Tsang gamma generator without the squeeze step.
#[derive(Debug, Clone)]
struct GammaSampler {
    d: f64,
    c: f64,
    rate: f64,
    /// `1/shape` when the shape is below one and the `U^{1/shape}` boost applies.
    boost: Option<f64>,
}

impl GammaSampler {
    fn new(shape: f64, rate: f64) -> Self {
        let (base, boost) = if shape < 1.0 {
            (shape + 1.0, Some(1.0 / shape))
        } else {
            (shape, None)
        };
        let d = base - 1.0 / 3.0;
        GammaSampler {
            d,
            c: 1.0 / (9.0 * d).sqrt(),
            rate,
            boost,
        }
    }

    /// A draw and the number of envelope proposals it took.
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, u64) {
        let mut proposals = 0;
        loop {
            proposals += 1;
            let x: f64 = rng.sample(StandardNormal);
            let v = 1.0 + self.c * x;
            if v <= 0.0 {
                continue;
            }
            let v = v * v * v;
            let u: f64 = rng.sample(Open01);
            if u.ln() < 0.5 * x * x + self.d - self.d * v + self.d * v.ln() {
                let mut log_g = (self.d * v).ln();
                if let Some(inv_shape) = self.boost {
                    let w: f64 = rng.sample(Open01);
                    log_g += w.ln() * inv_shape;
                }
                let g = (log_g - self.rate.ln()).exp();
                if g > 0.0 && g.is_finite() {
                    return (g, proposals);
                }
            }
        }
    }
}

/// Rejection sampler for the GIG law in `z = ln x`.
///
/// The log density of `Z` is `h(z) = μz - A e^{-z} - B e^{z}`, concave. The
/// envelope is flat on `[z_l, z_r]`, where `h = h* - 1`, and follows the
/// tangent lines of `h` beyond these points.
#[derive(Debug, Clone)]
struct GigSampler {
    mu: f64,
    a: f64,
    b: f64,
    h_star: f64,
    zl: f64,
    zr: f64,
    hl: f64,
    hr: f64,
    sl: f64,
    sr: f64,
    w_left: f64,
    w_mid: f64,
    w_right: f64,
}

impl GigSampler {
    fn new(mu: f64, a: f64, b: f64) -> Result<Self> {
        let big_a = 0.5 * a * a;
        let big_b = 0.5 * b * b;
        let h = |z: f64| mu * z - big_a * (-z).exp() - big_b * z.exp();
        let dh = |z: f64| mu + big_a * (-z).exp() - big_b * z.exp();
        let disc = (mu * mu + 4.0 * big_a * big_b).sqrt();
        let mode = if mu >= 0.0 {
            ((mu + disc) / (2.0 * big_b)).ln()
        } else {
            (2.0 * big_a / (disc - mu)).ln()
        };
        let h_star = h(mode);
        let level = h_star - 1.0;
        let root = |dir: f64| -> Result<f64> {
            let mut step = 1.0;
            let mut inner = mode;
            let mut outer = mode + dir * step;
            while h(outer) > level {
                inner = outer;
                step *= 2.0;
                outer = mode + dir * step;
                if step > 1e6 {
                    return Err(Error::UnsupportedParameter(format!(
                        "gig({mu},{a},{b}): envelope bracket failed"
                    )));
                }
            }
            for _ in 0..200 {
                let mid = 0.5 * (inner + outer);
                if mid == inner || mid == outer {
                    break;
                }
                if h(mid) > level {
                    inner = mid;
                } else {
                    outer = mid;
                }
            }
            Ok(outer)
        };
        let zl = root(-1.0)?;
        let zr = root(1.0)?;
        let (hl, hr) = (h(zl) - h_star, h(zr) - h_star);
        let (sl, sr) = (dh(zl), dh(zr));
        if !(sl > 0.0 && sr < 0.0) {
            return Err(Error::UnsupportedParameter(format!(
                "gig({mu},{a},{b}): degenerate envelope"
            )));
        }
        Ok(GigSampler {
            mu,
            a: big_a,
            b: big_b,
            h_star,
            zl,
            zr,
            hl,
            hr,
            sl,
            sr,
            w_left: hl.exp() / sl,
            w_mid: zr - zl,
            w_right: hr.exp() / -sr,
        })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, u64) {
        let total = self.w_left + self.w_mid + self.w_right;
        let mut proposals = 0;
        loop {
            proposals += 1;
            let pick = rng.sample::<f64, _>(Open01) * total;
            let e: f64 = -rng.sample::<f64, _>(Open01).ln();
            let (z, envelope) = if pick < self.w_mid {
                (self.zl + pick, 0.0)
            } else if pick < self.w_mid + self.w_right {
                let z = self.zr + e / -self.sr;
                (z, self.hr + self.sr * (z - self.zr))
            } else {
                let z = self.zl - e / self.sl;
                (z, self.hl + self.sl * (z - self.zl))
            };
            let u: f64 = rng.sample(Open01);
            let hz = self.mu * z - self.a * (-z).exp() - self.b * z.exp();
            if u.ln() <= hz - self.h_star - envelope {
                let x = z.exp();
                if x > 0.0 && x.is_finite() {
                    return (x, proposals);
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Gamma(GammaSampler),
    Beta(GammaSampler, GammaSampler),
    Gig(GigSampler),
    /// `a + b ≥ 0`: gamma proposal, acceptance `(1+x)^{-(a+b)}`.
    KummerGamma {
        proposal: GammaSampler,
        s: f64,
    },
    /// `a + b < 0`: mixture proposal with `(1+x)^m ≤ 2^{m-1}(1 + x^m)`.
    KummerMixture {
        low: GammaSampler,
        high: GammaSampler,
        p_low: f64,
        m: f64,
        m_prime: f64,
    },
    BetaAlpha {
        a: GammaSampler,
        b: GammaSampler,
        k: f64,
        c: f64,
        log_bound: f64,
    },
    Image(Box<Sampler>, Bijection),
}

/// An exact sampler for one law.
#[derive(Debug, Clone)]
pub struct Sampler {
    kind: Kind,
}

fn beta_draw<R: Rng + ?Sized>(ga: &GammaSampler, gb: &GammaSampler, rng: &mut R) -> (f64, u64) {
    let mut proposals = 0;
    loop {
        proposals += 1;
        let x = ga.draw(rng).0;
        let y = gb.draw(rng).0;
        let r = x / (x + y);
        if r > 0.0 && r < 1.0 {
            return (r, proposals);
        }
    }
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

impl Sampler {
    pub fn new(spec: &DistributionSpec) -> Result<Sampler> {
        spec.validate()?;
        let kind = match *spec {
            DistributionSpec::Gamma { lambda, c } => Kind::Gamma(GammaSampler::new(lambda, c)),
            DistributionSpec::Beta { a, b } => Kind::Beta(GammaSampler::new(a, 1.0), GammaSampler::new(b, 1.0)),
            DistributionSpec::BetaAlpha { a, b, c: 0.0, .. } => {
                Kind::Beta(GammaSampler::new(a, 1.0), GammaSampler::new(b, 1.0))
            }
            DistributionSpec::Gig { mu, a, b } => Kind::Gig(GigSampler::new(mu, a, b)?),
            DistributionSpec::Kummer2 { a, b, c } => {
                let s = a + b;
                if s >= 0.0 {
                    Kind::KummerGamma {
                        proposal: GammaSampler::new(a, c),
                        s,
                    }
                } else {
                    let m_prime = -s;
                    let m = m_prime.ceil();
                    let w_low = ln_gamma(a)? - a * c.ln();
                    let w_high = ln_gamma(a + m)? - (a + m) * c.ln();
                    let p_low = (w_low - log_sum_exp(w_low, w_high)).exp();
                    Kind::KummerMixture {
                        low: GammaSampler::new(a, c),
                        high: GammaSampler::new(a + m, c),
                        p_low,
                        m,
                        m_prime,
                    }
                }
            }
            DistributionSpec::BetaAlpha { alpha, a, b, c } => {
                let bound = if c >= 0.0 { alpha.max(1.0) } else { alpha.min(1.0) };
                Kind::BetaAlpha {
                    a: GammaSampler::new(a, 1.0),
                    b: GammaSampler::new(b, 1.0),
                    k: alpha - 1.0,
                    c,
                    log_bound: c * bound.ln(),
                }
            }
            DistributionSpec::Image { ref base, map } => Kind::Image(Box::new(Sampler::new(base)?), map),
        };
        Ok(Sampler { kind })
    }

    /// One draw and the number of proposals made by this law's own rejection step.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, u64) {
        match &self.kind {
            Kind::Gamma(g) => g.draw(rng),
            Kind::Beta(ga, gb) => beta_draw(ga, gb, rng),
            Kind::Gig(g) => g.draw(rng),
            Kind::KummerGamma { proposal, s } => {
                let mut proposals = 0;
                loop {
                    proposals += 1;
                    let x = proposal.draw(rng).0;
                    let u: f64 = rng.sample(Open01);
                    if u.ln() <= -s * x.ln_1p() {
                        return (x, proposals);
                    }
                }
            }
            Kind::KummerMixture {
                low,
                high,
                p_low,
                m,
                m_prime,
            } => {
                let mut proposals = 0;
                let log_two = std::f64::consts::LN_2;
                loop {
                    proposals += 1;
                    let pick: f64 = rng.sample(Open01);
                    let x = if pick < *p_low {
                        low.draw(rng).0
                    } else {
                        high.draw(rng).0
                    };
                    let log_one_plus_xm = if x > 1.0 {
                        m * x.ln() + (-m * x.ln()).exp().ln_1p()
                    } else {
                        x.powf(*m).ln_1p()
                    };
                    let log_accept = m_prime * x.ln_1p() - (m - 1.0) * log_two - log_one_plus_xm;
                    let u: f64 = rng.sample(Open01);
                    if u.ln() <= log_accept {
                        return (x, proposals);
                    }
                }
            }
            Kind::BetaAlpha { a, b, k, c, log_bound } => {
                let mut proposals = 0;
                loop {
                    let (x, p) = beta_draw(a, b, rng);
                    proposals += p;
                    let u: f64 = rng.sample(Open01);
                    if u.ln() <= c * (k * x).ln_1p() - log_bound {
                        return (x, proposals);
                    }
                }
            }
            Kind::Image(base, map) => {
                let codomain = map.codomain();
                let mut proposals = 0;
                loop {
                    let (x, p) = base.draw(rng);
                    proposals += p;
                    let y = map.forward(x);
                    if codomain.contains(y) {
                        return (y, proposals);
                    }
                }
            }
        }
    }

    /// `n` draws and the total proposal count.
    pub fn draw_many<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> (Vec<f64>, u64) {
        let mut values = Vec::with_capacity(n);
        let mut proposals = 0;
        for _ in 0..n {
            let (x, p) = self.draw(rng);
            values.push(x);
            proposals += p;
        }
        (values, proposals)
    }
}

/// Output of [`sample`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub values: Vec<f64>,
    pub spec: DistributionSpec,
    pub seed: RngStream,
    /// Accepted draws over proposals of the law's own rejection step.
    pub acceptance_rate: f64,
}

#[derive(Serialize)]
struct Envelope<'a> {
    spec: &'a DistributionSpec,
    seed: &'a RngStream,
    n: usize,
    acceptance_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<&'a [f64]>,
}

impl SampleBatch {
    /// Two comment lines naming spec and seed, a `value` header, then one value per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(24 * (self.values.len() + 4));
        let _ = writeln!(out, "# spec={}", self.spec);
        let _ = writeln!(
            out,
            "# seed={} stream={} acceptance_rate={}",
            self.seed.seed, self.seed.stream_id, self.acceptance_rate
        );
        out.push_str("value\n");
        for v in &self.values {
            let _ = writeln!(out, "{v}");
        }
        out
    }

    /// JSON envelope `{spec, seed, n, acceptance_rate, values?}`.
    pub fn to_json(&self, include_values: bool) -> String {
        let env = Envelope {
            spec: &self.spec,
            seed: &self.seed,
            n: self.values.len(),
            acceptance_rate: self.acceptance_rate,
            values: include_values.then_some(self.values.as_slice()),
        };
        serde_json::to_string(&env).expect("sample envelope serializes")
    }
}

/// `n` exact draws from `spec` using the stream `rng`.
pub fn sample(spec: &DistributionSpec, n: usize, rng: RngStream) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    let sampler = Sampler::new(spec)?;
    let (values, proposals) = sampler.draw_many(n, &mut rng.rng());
    Ok(SampleBatch {
        values,
        spec: spec.clone(),
        seed: rng,
        acceptance_rate: n as f64 / proposals as f64,
    })
}

impl Law {
    pub fn sampler(&self) -> Result<Sampler> {
        Sampler::new(self.spec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lwmy::LwmyFunction;

    #[test]
    fn exponential_mean() {
        let batch = sample(&DistributionSpec::gamma(1.0, 1.0), 100_000, RngStream::new(1, 0)).unwrap();
        let mean = batch.values.iter().sum::<f64>() / batch.values.len() as f64;
        assert!((mean - 1.0).abs() < 4.0 * (1.0f64 / 1e5).sqrt());
        assert!(batch.values.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn uniform_mean() {
        let batch = sample(&DistributionSpec::beta(1.0, 1.0), 100_000, RngStream::new(2, 0)).unwrap();
        let mean = batch.values.iter().sum::<f64>() / 1e5;
        assert!((mean - 0.5).abs() < 4.0 / (12.0f64 * 1e5).sqrt());
    }

    #[test]
    fn batches_replay_exactly() {
        let spec = DistributionSpec::kummer2(2.0, -3.5, 1.0);
        let a = sample(&spec, 500, RngStream::new(9, 3)).unwrap();
        let b = sample(&spec, 500, RngStream::new(9, 3)).unwrap();
        assert_eq!(a, b);
        let c = sample(&spec, 500, RngStream::new(9, 4)).unwrap();
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn values_stay_in_support() {
        let g1 = Bijection::Lwmy(LwmyFunction::g1(1.0, 1.0).unwrap());
        for spec in [
            DistributionSpec::gig(-2.0, 0.3, 4.0),
            DistributionSpec::gamma(0.2, 3.0),
            DistributionSpec::beta(0.3, 0.4),
            DistributionSpec::kummer2(0.5, -2.3, 0.4),
            DistributionSpec::beta_alpha(3.0, 0.8, 1.2, -2.0),
            DistributionSpec::beta(2.0, 1.0).image(Bijection::NegLog),
            DistributionSpec::kummer2(3.0, -1.0, 1.0).image(g1),
        ] {
            let support = spec.support();
            let batch = sample(&spec, 20_000, RngStream::new(5, 0)).unwrap();
            assert!(batch.values.iter().all(|&x| support.contains(x)), "{spec}");
            assert!(batch.acceptance_rate > 0.0 && batch.acceptance_rate <= 1.0);
        }
    }

    #[test]
    fn gig_envelope_is_efficient() {
        for &(mu, a, b) in &[
            (0.5, 1.0, 1.0),
            (-1.0, 1.0, 1.0),
            (1.3, 2.0, 0.7),
            (2.0, 3.0, 1.0),
            (-5.0, 0.2, 3.0),
            (40.0, 1.0, 1.0),
        ] {
            let batch = sample(&DistributionSpec::gig(mu, a, b), 20_000, RngStream::new(11, 0)).unwrap();
            assert!(
                batch.acceptance_rate > 0.1,
                "gig({mu},{a},{b}) rate {}",
                batch.acceptance_rate
            );
        }
    }

    #[test]
    fn beta_alpha_acceptance_bound() {
        // acceptance is at least (min(1,α)/max(1,α))^{|c|}
        let (alpha, c) = (2.0f64, -1.5f64);
        let batch = sample(
            &DistributionSpec::beta_alpha(alpha, 2.0, 2.0, c),
            50_000,
            RngStream::new(3, 0),
        )
        .unwrap();
        assert!(batch.acceptance_rate >= (1.0 / alpha).powf(c.abs()) - 0.01);
    }

    #[test]
    fn csv_and_json_outputs() {
        let batch = sample(&DistributionSpec::gamma(1.0, 1.0), 10, RngStream::new(4, 0)).unwrap();
        let csv = batch.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 13);
        assert_eq!(lines[0], "# spec=gamma(1,1)");
        assert!(lines[1].starts_with("# seed=4 stream=0"));
        assert_eq!(lines[2], "value");
        assert!(lines[3..].iter().all(|l| l.parse::<f64>().unwrap() > 0.0));
        let json: serde_json::Value = serde_json::from_str(&batch.to_json(false)).unwrap();
        assert_eq!(json["n"], 10);
        assert_eq!(json["spec"], "gamma(1,1)");
        assert!(json.get("values").is_none());
        let json: serde_json::Value = serde_json::from_str(&batch.to_json(true)).unwrap();
        assert_eq!(json["values"].as_array().unwrap().len(), 10);
    }

    #[test]
    fn zero_size_is_rejected() {
        assert!(sample(&DistributionSpec::gamma(1.0, 1.0), 0, RngStream::new(0, 0)).is_err());
    }
}
