use serde::{Deserialize, Serialize};

use super::stats::{chi_square_p_value, contingency_chi_square, ks_p_value, ks_statistic, rank_bins};
use crate::distributions::{DistributionSpec, Law, Sampler};
use crate::error::{Error, Result};
use crate::lwmy::Transform;
use crate::numerics::RngStream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceTestResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub grid: (usize, usize),
    pub n: usize,
    pub seed: RngStream,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodnessOfFitResult {
    pub ks_statistic: f64,
    pub p_value: f64,
    pub n: usize,
    pub target: DistributionSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PushforwardResult {
    pub u: GoodnessOfFitResult,
    pub v: GoodnessOfFitResult,
    pub independence: IndependenceTestResult,
}

/// Chi-square fit of samples to equiprobable bins of a law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedFitResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub bins: usize,
    pub n: usize,
    pub acceptance_rate: f64,
}

/// How the second coordinate is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// `X` and `Y` drawn independently from their laws.
    #[default]
    Independent,
    /// `Y = X`; a fully dependent control.
    Paired,
}

pub const MIN_CHECK_SIZE: usize = 10_000;

fn require_size(n: usize) -> Result<()> {
    if n < MIN_CHECK_SIZE {
        Err(Error::domain(format!("checks need n ≥ {MIN_CHECK_SIZE}, got {n}")))
    } else {
        Ok(())
    }
}

/// Draws `n` values of `X` and then `n` values of `Y` from one stream.
pub fn draw_pairs(
    law_x: &DistributionSpec,
    law_y: &DistributionSpec,
    n: usize,
    rng: RngStream,
    pairing: Pairing,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut gen = rng.rng();
    let xs = Sampler::new(law_x)?.draw_many(n, &mut gen).0;
    let ys = match pairing {
        Pairing::Independent => Sampler::new(law_y)?.draw_many(n, &mut gen).0,
        Pairing::Paired => xs.clone(),
    };
    Ok((xs, ys))
}

pub fn transform_pairs(t: &Transform, xs: &[f64], ys: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut us = Vec::with_capacity(xs.len());
    let mut vs = Vec::with_capacity(xs.len());
    for (&x, &y) in xs.iter().zip(ys) {
        let (u, v) = t.apply(x, y)?;
        us.push(u);
        vs.push(v);
    }
    Ok((us, vs))
}

/// Chi-square test of independence on a `bins × bins` table of per-marginal ranks.
pub fn independence_of(us: &[f64], vs: &[f64], bins: usize, seed: RngStream) -> Result<IndependenceTestResult> {
    if bins < 2 || us.len() != vs.len() || us.len() < bins * bins {
        return Err(Error::domain(format!(
            "independence test needs matched samples and at least bins² = {} points",
            bins * bins
        )));
    }
    let rows = rank_bins(us, bins);
    let cols = rank_bins(vs, bins);
    let statistic = contingency_chi_square(&rows, &cols, bins, bins);
    let dof = (bins - 1) * (bins - 1);
    Ok(IndependenceTestResult {
        statistic,
        dof,
        p_value: chi_square_p_value(statistic, dof)?,
        grid: (bins, bins),
        n: us.len(),
        seed,
    })
}

/// Samples `(X, Y)`, applies `t` and tests the components for independence.
pub fn check_independence(
    law_x: &DistributionSpec,
    law_y: &DistributionSpec,
    t: &Transform,
    n: usize,
    bins: usize,
    rng: RngStream,
    pairing: Pairing,
) -> Result<IndependenceTestResult> {
    require_size(n)?;
    if bins < 5 {
        return Err(Error::domain(format!("independence test needs bins ≥ 5, got {bins}")));
    }
    let (xs, ys) = draw_pairs(law_x, law_y, n, rng, pairing)?;
    let (us, vs) = transform_pairs(t, &xs, &ys)?;
    independence_of(&us, &vs, bins, rng)
}

/// Two-sided KS test of `samples` against the quadrature CDF of `target`.
pub fn check_marginal(samples: &[f64], target: &DistributionSpec) -> Result<GoodnessOfFitResult> {
    check_marginal_law(samples, &Law::new(target)?)
}

pub fn check_marginal_law(samples: &[f64], target: &Law) -> Result<GoodnessOfFitResult> {
    if samples.is_empty() {
        return Err(Error::domain("KS test of an empty sample"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let cdf: Vec<f64> = target.cdf_sf_many(&sorted)?.into_iter().map(|(c, _)| c).collect();
    let d = ks_statistic(&cdf);
    Ok(GoodnessOfFitResult {
        ks_statistic: d,
        p_value: ks_p_value(d, sorted.len()),
        n: sorted.len(),
        target: target.spec().clone(),
    })
}

/// KS test of `X + Y` against `target`.
pub fn check_convolution(
    law_x: &DistributionSpec,
    law_y: &DistributionSpec,
    target: &DistributionSpec,
    n: usize,
    rng: RngStream,
) -> Result<GoodnessOfFitResult> {
    require_size(n)?;
    let target = Law::new(target)?;
    let (xs, ys) = draw_pairs(law_x, law_y, n, rng, Pairing::Independent)?;
    let sums: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| x + y).collect();
    check_marginal_law(&sums, &target)
}

/// Pushes product samples through `t`, KS-tests both outputs and tests their independence.
pub fn check_pushforward(
    joint_in: (&DistributionSpec, &DistributionSpec),
    t: &Transform,
    joint_out: (&DistributionSpec, &DistributionSpec),
    n: usize,
    bins: usize,
    rng: RngStream,
) -> Result<PushforwardResult> {
    require_size(n)?;
    let (law_u, law_v) = (Law::new(joint_out.0)?, Law::new(joint_out.1)?);
    let (xs, ys) = draw_pairs(joint_in.0, joint_in.1, n, rng, Pairing::Independent)?;
    let (us, vs) = transform_pairs(t, &xs, &ys)?;
    Ok(PushforwardResult {
        independence: independence_of(&us, &vs, bins, rng)?,
        u: check_marginal_law(&us, &law_u)?,
        v: check_marginal_law(&vs, &law_v)?,
    })
}

/// Equiprobable bin edges of a law, computed once and reused across seeds.
#[derive(Debug, Clone)]
pub struct QuantileBins {
    edges: Vec<f64>,
}

impl QuantileBins {
    pub fn new(law: &Law, bins: usize) -> Result<Self> {
        if bins < 2 {
            return Err(Error::domain("need at least two bins"));
        }
        let edges = (1..bins)
            .map(|k| law.quantile(k as f64 / bins as f64))
            .collect::<Result<Vec<f64>>>()?;
        Ok(QuantileBins { edges })
    }

    pub fn bins(&self) -> usize {
        self.edges.len() + 1
    }

    /// Pearson chi-square of the bin counts against `n / bins` each.
    pub fn fit(&self, samples: &[f64], acceptance_rate: f64) -> Result<BinnedFitResult> {
        let bins = self.bins();
        let mut counts = vec![0u64; bins];
        for &x in samples {
            counts[self.edges.partition_point(|&e| e < x)] += 1;
        }
        let expected = samples.len() as f64 / bins as f64;
        let statistic = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        Ok(BinnedFitResult {
            statistic,
            dof: bins - 1,
            p_value: chi_square_p_value(statistic, bins - 1)?,
            bins,
            n: samples.len(),
            acceptance_rate,
        })
    }
}

/// Chi-square of `n` sampler draws against `bins` quantile bins of the quadrature CDF.
pub fn check_sampler(spec: &DistributionSpec, n: usize, bins: usize, rng: RngStream) -> Result<BinnedFitResult> {
    let edges = QuantileBins::new(&Law::new(spec)?, bins)?;
    let (values, proposals) = Sampler::new(spec)?.draw_many(n, &mut rng.rng());
    edges.fit(&values, n as f64 / proposals as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_samples_fit_uniform_law() {
        let n = 20_000;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let r = check_marginal(&xs, &DistributionSpec::beta(1.0, 1.0)).unwrap();
        assert!(r.p_value > 0.99);
        assert!(r.ks_statistic >= 0.0 && r.ks_statistic <= 1.0);
    }

    #[test]
    fn paired_control_is_detected() {
        let e = DistributionSpec::gamma(1.0, 1.0);
        let r = check_independence(
            &e,
            &e,
            &Transform::Identity,
            10_000,
            20,
            RngStream::new(1, 0),
            Pairing::Paired,
        )
        .unwrap();
        assert!(r.p_value < 0.01);
        assert_eq!(r.dof, 361);
        assert_eq!(r.grid, (20, 20));
    }

    #[test]
    fn preconditions_are_enforced() {
        let e = DistributionSpec::gamma(1.0, 1.0);
        let s = RngStream::new(0, 0);
        assert!(check_independence(&e, &e, &Transform::Identity, 100, 20, s, Pairing::Independent).is_err());
        assert!(check_independence(&e, &e, &Transform::Identity, 10_000, 4, s, Pairing::Independent).is_err());
        assert!(check_convolution(&e, &e, &e, 10, s).is_err());
        assert!(check_marginal(&[], &e).is_err());
    }

    #[test]
    fn identity_pushforward_returns_inputs() {
        let e = DistributionSpec::gamma(1.0, 1.0);
        let r = check_pushforward(
            (&e, &e),
            &Transform::Identity,
            (&e, &e),
            10_000,
            10,
            RngStream::new(2, 0),
        )
        .unwrap();
        assert!(r.u.p_value > 1e-3 && r.v.p_value > 1e-3 && r.independence.p_value > 1e-3);
    }
}
