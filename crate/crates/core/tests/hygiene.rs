use lwmy::distributions::{log_pdf, parameter_grid, Bijection, DistributionSpec, Law, Sampler};
use lwmy::lwmy::LwmyFunction;
use lwmy::numerics::RngStream;
use lwmy::verifier::{check_marginal, check_sampler};

#[test]
fn grid_laws_integrate_to_one() {
    for spec in parameter_grid() {
        let mass = Law::new(&spec).unwrap().integrate_pdf(1e-12).unwrap();
        assert!((mass - 1.0).abs() < 1e-8, "{spec}: {mass}");
    }
}

#[test]
fn grid_cdfs_reach_one() {
    for spec in parameter_grid() {
        let law = Law::new(&spec).unwrap();
        let top = law.quantile(1.0 - 1e-12).unwrap();
        let c = law.cdf(top).unwrap();
        assert!((c - (1.0 - 1e-12)).abs() < 1e-8, "{spec}: {c}");
        let (lo, hi) = (law.quantile(0.2).unwrap(), law.quantile(0.7).unwrap());
        assert!(lo < hi);
    }
}

#[test]
fn zero_exponent_beta_alpha_is_beta() {
    for (alpha, a, b) in [(2.0, 2.0, 3.0), (0.3, 0.5, 0.5), (7.0, 4.0, 1.2)] {
        let ba = DistributionSpec::beta_alpha(alpha, a, b, 0.0);
        let beta = DistributionSpec::beta(a, b);
        for i in 1..100 {
            let x = i as f64 / 100.0;
            let (p, q) = (log_pdf(&ba, x).unwrap(), log_pdf(&beta, x).unwrap());
            assert!((p - q).abs() <= 1e-14 * q.abs().max(1.0), "x={x}");
        }
    }
}

#[test]
fn reciprocal_of_gig_is_gig() {
    let recip = Bijection::Lwmy(LwmyFunction::reciprocal(1.0).unwrap());
    for (i, (mu, a, b)) in [(0.5, 1.0, 1.0), (1.3, 2.0, 0.7), (2.0, 1.0, 3.0)]
        .into_iter()
        .enumerate()
    {
        let sampler = Sampler::new(&DistributionSpec::gig(mu, a, b)).unwrap();
        let (xs, _) = sampler.draw_many(100_000, &mut RngStream::new(11, i as u64).rng());
        let inv: Vec<f64> = xs.iter().map(|x| recip.forward(*x)).collect();
        let fit = check_marginal(&inv, &DistributionSpec::gig(-mu, b, a)).unwrap();
        assert!(fit.p_value > 0.01, "({mu},{a},{b}): {}", fit.p_value);
    }
}

#[test]
fn reciprocal_of_gig_plus_gamma_recovers_gig() {
    // 1/(X + Y) with X ~ Gig(−μ,a,a), Y ~ Gamma(μ,a²/2) has the law of X.
    let (mu, a) = (1.5, 1.2);
    let gig = DistributionSpec::gig(-mu, a, a);
    let mut rng = RngStream::new(5, 0).rng();
    let (xs, _) = Sampler::new(&gig).unwrap().draw_many(100_000, &mut rng);
    let (ys, _) = Sampler::new(&DistributionSpec::gamma(mu, a * a / 2.0))
        .unwrap()
        .draw_many(100_000, &mut rng);
    let w: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| 1.0 / (x + y)).collect();
    assert!(check_marginal(&w, &gig).unwrap().p_value > 0.01);
}

#[test]
fn samplers_match_quadrature_bins() {
    for spec in parameter_grid() {
        let passes = (0..5)
            .filter(|&s| check_sampler(&spec, 100_000, 50, RngStream::new(s, 7)).unwrap().p_value > 0.01)
            .count();
        assert!(passes >= 4, "{spec}: {passes}/5");
    }
}

#[test]
fn gig_acceptance_rate_on_grid() {
    for spec in parameter_grid() {
        if matches!(spec, DistributionSpec::Gig { .. }) {
            let (_, proposals) = Sampler::new(&spec)
                .unwrap()
                .draw_many(10_000, &mut RngStream::new(3, 0).rng());
            assert!(10_000.0 / proposals as f64 > 0.1, "{spec}");
        }
    }
}
