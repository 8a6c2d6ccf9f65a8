use super::spec::{Bijection, DistributionSpec};
use crate::lwmy::LwmyFunction;

/// The parameter grid used by the normalization and sampler checks.
///
/// Five or more points per family, chosen to reach every sampler branch:
/// GIG with negative, zero and positive index, Kummer laws with `a + b < 0`,
/// `β_α` laws with `c` of both signs and image laws under each map.
pub fn parameter_grid() -> Vec<DistributionSpec> {
    use DistributionSpec as D;
    let g1 = Bijection::Lwmy(LwmyFunction::G1 { alpha: 1.0, beta: 1.0 });
    let recip = Bijection::Lwmy(LwmyFunction::Reciprocal { alpha: 1.0 });
    let f1 = Bijection::Lwmy(LwmyFunction::F1 { alpha: 1.0, beta: 1.0 });
    vec![
        D::gig(0.5, 1.0, 1.0),
        D::gig(-1.0, 1.0, 2.0),
        D::gig(1.3, 2.0, 0.7),
        D::gig(2.0, 1.0, 3.0),
        D::gig(-0.3, 0.5, 0.5),
        D::gig(0.0, 1.0, 1.0),
        D::gamma(1.0, 1.0),
        D::gamma(0.5, 2.0),
        D::gamma(2.5, 0.7),
        D::gamma(10.0, 3.0),
        D::gamma(0.2, 1.0),
        D::beta(1.0, 1.0),
        D::beta(0.5, 0.5),
        D::beta(2.0, 3.0),
        D::beta(0.3, 4.0),
        D::beta(5.0, 1.5),
        D::kummer2(2.0, 1.0, 1.0),
        D::kummer2(3.0, -1.0, 1.0),
        D::kummer2(1.0, 0.0, 1.0),
        D::kummer2(0.5, 2.0, 0.3),
        D::kummer2(2.0, -3.5, 2.0),
        D::beta_alpha(2.0, 3.0, 1.5, -2.5),
        D::beta_alpha(2.0, 2.5, 2.0, -3.0),
        D::beta_alpha(0.5, 1.0, 2.0, 1.0),
        D::beta_alpha(2.0, 2.0, 3.0, 0.0),
        D::beta_alpha(3.0, 0.7, 1.2, 2.0),
        D::beta_alpha(0.2, 2.0, 2.0, -1.5),
        D::beta(2.0, 1.0).image(Bijection::NegLog),
        D::kummer2(3.0, -1.0, 1.0).image(g1),
        D::gig(1.0, 1.0, 2.0).image(recip),
        D::beta_alpha(2.0, 3.0, 1.5, -2.5).image(Bijection::NegLog),
        D::gamma(2.0, 1.0).image(Bijection::ExpNeg),
        D::gamma(1.5, 1.0).image(f1),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn at_least_five_per_family() {
        let grid = parameter_grid();
        let count = |pred: fn(&DistributionSpec) -> bool| grid.iter().filter(|s| pred(s)).count();
        assert!(count(|s| matches!(s, DistributionSpec::Gig { .. })) >= 5);
        assert!(count(|s| matches!(s, DistributionSpec::Gamma { .. })) >= 5);
        assert!(count(|s| matches!(s, DistributionSpec::Beta { .. })) >= 5);
        assert!(count(|s| matches!(s, DistributionSpec::Kummer2 { .. })) >= 5);
        assert!(count(|s| matches!(s, DistributionSpec::BetaAlpha { .. })) >= 5);
        assert!(count(|s| matches!(s, DistributionSpec::Image { .. })) >= 5);
        assert!(grid.iter().all(|s| s.validate().is_ok()));
    }
}
