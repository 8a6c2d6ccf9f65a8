use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lwmy::LwmyFunction;

/// A strictly decreasing smooth bijection used to build image laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bijection {
    /// `z ↦ -ln z`, from `(0,1)` onto `(0,∞)`.
    NegLog,
    /// `x ↦ e^{-x}`, from `(0,∞)` onto `(0,1)`.
    ExpNeg,
    /// A function of one of the four families, from `(0,∞)` onto itself.
    Lwmy(LwmyFunction),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    PositiveHalfLine,
    UnitInterval,
}

impl Support {
    pub fn contains(&self, x: f64) -> bool {
        match self {
            Support::PositiveHalfLine => x > 0.0 && x < f64::INFINITY,
            Support::UnitInterval => x > 0.0 && x < 1.0,
        }
    }

    pub fn upper(&self) -> f64 {
        match self {
            Support::PositiveHalfLine => f64::INFINITY,
            Support::UnitInterval => 1.0,
        }
    }
}

impl Bijection {
    pub fn domain(&self) -> Support {
        match self {
            Bijection::NegLog => Support::UnitInterval,
            Bijection::ExpNeg | Bijection::Lwmy(_) => Support::PositiveHalfLine,
        }
    }

    pub fn codomain(&self) -> Support {
        match self {
            Bijection::ExpNeg => Support::UnitInterval,
            Bijection::NegLog | Bijection::Lwmy(_) => Support::PositiveHalfLine,
        }
    }

    pub fn forward(&self, x: f64) -> f64 {
        match self {
            Bijection::NegLog => -x.ln(),
            Bijection::ExpNeg => (-x).exp(),
            Bijection::Lwmy(f) => f.value(x),
        }
    }

    pub fn inverse(&self) -> Bijection {
        match self {
            Bijection::NegLog => Bijection::ExpNeg,
            Bijection::ExpNeg => Bijection::NegLog,
            Bijection::Lwmy(f) => Bijection::Lwmy(f.inverse()),
        }
    }

    /// `[g, g', g'', g''']` of the inverse map `g` at `y`.
    pub fn inverse_derivatives(&self, y: f64) -> [f64; 4] {
        match self {
            Bijection::NegLog => {
                let e = (-y).exp();
                [e, -e, e, -e]
            }
            Bijection::ExpNeg => {
                let r = 1.0 / y;
                [-y.ln(), -r, r * r, -2.0 * r * r * r]
            }
            Bijection::Lwmy(f) => f.inverse().derivatives(y),
        }
    }

    /// `ln |g'(y)|` for the inverse map `g`.
    pub fn log_abs_inverse_jacobian(&self, y: f64) -> f64 {
        match self {
            Bijection::NegLog => -y,
            Bijection::ExpNeg => -y.ln(),
            Bijection::Lwmy(f) => (-f.inverse().derivatives(y)[1]).ln(),
        }
    }
}

impl fmt::Display for Bijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bijection::NegLog => write!(f, "neglog"),
            Bijection::ExpNeg => write!(f, "expneg"),
            Bijection::Lwmy(g) => write!(f, "{g}"),
        }
    }
}

impl FromStr for Bijection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "neglog" => Ok(Bijection::NegLog),
            "expneg" => Ok(Bijection::ExpNeg),
            other => Ok(Bijection::Lwmy(other.parse()?)),
        }
    }
}

/// One of the laws handled by the workbench.
///
/// Textual form (used by the CLI and in reports):
/// `gig(μ,a,b)`, `gamma(λ,c)` (shape, rate), `beta(a,b)`, `kummer2(a,b,c)`,
/// `betaalpha(α,a,b,c)` and `image(map,base)` where `map` is `neglog`,
/// `expneg` or a function such as `g1:1:1`.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    /// Density proportional to `x^{μ-1} exp(-(a²/x + b²x)/2)` on `(0,∞)`.
    Gig {
        mu: f64,
        a: f64,
        b: f64,
    },
    Gamma {
        lambda: f64,
        c: f64,
    },
    Beta {
        a: f64,
        b: f64,
    },
    /// Density proportional to `x^{a-1} (1+x)^{-a-b} e^{-cx}` on `(0,∞)`.
    Kummer2 {
        a: f64,
        b: f64,
        c: f64,
    },
    /// Density proportional to `x^{a-1} (1-x)^{b-1} (αx + 1 - x)^c` on `(0,1)`.
    BetaAlpha {
        alpha: f64,
        a: f64,
        b: f64,
        c: f64,
    },
    /// Law of `map(X)` for `X` distributed as `base`.
    Image {
        base: Box<DistributionSpec>,
        map: Bijection,
    },
}

/// The law of `map(X)` when `X` follows `base`.
pub fn image_law(base: DistributionSpec, map: Bijection) -> DistributionSpec {
    DistributionSpec::Image {
        base: Box::new(base),
        map,
    }
}

impl DistributionSpec {
    pub fn gamma(lambda: f64, c: f64) -> Self {
        DistributionSpec::Gamma { lambda, c }
    }

    pub fn beta(a: f64, b: f64) -> Self {
        DistributionSpec::Beta { a, b }
    }

    pub fn gig(mu: f64, a: f64, b: f64) -> Self {
        DistributionSpec::Gig { mu, a, b }
    }

    pub fn kummer2(a: f64, b: f64, c: f64) -> Self {
        DistributionSpec::Kummer2 { a, b, c }
    }

    pub fn beta_alpha(alpha: f64, a: f64, b: f64, c: f64) -> Self {
        DistributionSpec::BetaAlpha { alpha, a, b, c }
    }

    pub fn image(self, map: Bijection) -> Self {
        image_law(self, map)
    }

    pub fn support(&self) -> Support {
        match self {
            DistributionSpec::Gig { .. } | DistributionSpec::Gamma { .. } | DistributionSpec::Kummer2 { .. } => {
                Support::PositiveHalfLine
            }
            DistributionSpec::Beta { .. } | DistributionSpec::BetaAlpha { .. } => Support::UnitInterval,
            DistributionSpec::Image { map, .. } => map.codomain(),
        }
    }

    /// Checks every parameter against the convergence domain of the density.
    pub fn validate(&self) -> Result<()> {
        fn finite(name: &str, v: f64) -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::domain(format!("{name} must be finite, got {v}")))
            }
        }
        fn positive(name: &str, v: f64) -> Result<()> {
            finite(name, v)?;
            if v > 0.0 {
                Ok(())
            } else {
                Err(Error::DivergentIntegral(format!("{name} must be positive, got {v}")))
            }
        }
        match self {
            DistributionSpec::Gig { mu, a, b } => {
                finite("mu", *mu)?;
                positive("a", *a)?;
                positive("b", *b)
            }
            DistributionSpec::Gamma { lambda, c } => {
                positive("lambda", *lambda)?;
                positive("c", *c)
            }
            DistributionSpec::Beta { a, b } => {
                positive("a", *a)?;
                positive("b", *b)
            }
            DistributionSpec::Kummer2 { a, b, c } => {
                positive("a", *a)?;
                finite("b", *b)?;
                positive("c", *c)
            }
            DistributionSpec::BetaAlpha { alpha, a, b, c } => {
                positive("alpha", *alpha)?;
                positive("a", *a)?;
                positive("b", *b)?;
                finite("c", *c)
            }
            DistributionSpec::Image { base, map } => {
                base.validate()?;
                if let Bijection::Lwmy(f) = map {
                    f.validate()?;
                }
                if base.support() != map.domain() {
                    return Err(Error::domain(format!(
                        "map {map} cannot be applied to the support of {base}"
                    )));
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::Gig { mu, a, b } => write!(f, "gig({mu},{a},{b})"),
            DistributionSpec::Gamma { lambda, c } => write!(f, "gamma({lambda},{c})"),
            DistributionSpec::Beta { a, b } => write!(f, "beta({a},{b})"),
            DistributionSpec::Kummer2 { a, b, c } => write!(f, "kummer2({a},{b},{c})"),
            DistributionSpec::BetaAlpha { alpha, a, b, c } => write!(f, "betaalpha({alpha},{a},{b},{c})"),
            DistributionSpec::Image { base, map } => write!(f, "image({map},{base})"),
        }
    }
}

/// Splits `s` on commas that are not nested inside parentheses.
fn split_top_level(s: &str) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::domain(format!("unbalanced parentheses in '{s}'")));
                }
            }
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::domain(format!("unbalanced parentheses in '{s}'")));
    }
    parts.push(s[start..].trim());
    Ok(parts)
}

impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let open = s
            .find('(')
            .ok_or_else(|| Error::domain(format!("expected name(args) in '{s}'")))?;
        let body = s[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| Error::domain(format!("missing ')' in '{s}'")))?;
        let name = s[..open].trim().to_ascii_lowercase();
        let args = split_top_level(body)?;
        if name == "image" {
            if args.len() != 2 {
                return Err(Error::domain(format!("image takes (map, base), got '{s}'")));
            }
            let spec = image_law(args[1].parse()?, args[0].parse()?);
            spec.validate()?;
            return Ok(spec);
        }
        let nums = args
            .iter()
            .map(|p| {
                p.parse::<f64>()
                    .map_err(|_| Error::domain(format!("bad number '{p}' in '{s}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let want = match name.as_str() {
            "gig" | "kummer2" => 3,
            "gamma" | "beta" => 2,
            "betaalpha" => 4,
            _ => return Err(Error::domain(format!("unknown distribution '{name}'"))),
        };
        if nums.len() != want {
            return Err(Error::domain(format!(
                "{name} takes {want} parameters, got {}",
                nums.len()
            )));
        }
        let spec = match name.as_str() {
            "gig" => DistributionSpec::gig(nums[0], nums[1], nums[2]),
            "gamma" => DistributionSpec::gamma(nums[0], nums[1]),
            "beta" => DistributionSpec::beta(nums[0], nums[1]),
            "kummer2" => DistributionSpec::kummer2(nums[0], nums[1], nums[2]),
            _ => DistributionSpec::beta_alpha(nums[0], nums[1], nums[2], nums[3]),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl Serialize for DistributionSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DistributionSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let specs = [
            DistributionSpec::gig(-0.5, 1.0, 2.0),
            DistributionSpec::gamma(1.5, 0.25),
            DistributionSpec::beta(2.0, 3.0),
            DistributionSpec::kummer2(3.0, -1.0, 1.0),
            DistributionSpec::beta_alpha(2.0, 3.0, 1.5, -2.5),
            image_law(DistributionSpec::kummer2(3.0, -1.0, 1.0), "g1:1:1".parse().unwrap()),
            image_law(DistributionSpec::beta(2.0, 1.0), Bijection::NegLog),
            image_law(
                image_law(DistributionSpec::gamma(2.0, 1.0), Bijection::ExpNeg),
                Bijection::NegLog,
            ),
        ];
        for spec in specs {
            let text = spec.to_string();
            assert_eq!(text.parse::<DistributionSpec>().unwrap(), spec, "{text}");
            let json = serde_json::to_string(&spec).unwrap();
            assert_eq!(serde_json::from_str::<DistributionSpec>(&json).unwrap(), spec);
        }
    }

    #[test]
    fn parse_rejects_bad_input() {
        for bad in [
            "gamma(1)",
            "gamma(1,0)",
            "gamma(1,x)",
            "beta(1,1",
            "poisson(1)",
            "kummer2(1,1,-1)",
            "image(neglog,gamma(1,1))",
            "image(expneg,beta(1,1))",
            "image(g1:1:1)",
        ] {
            assert!(bad.parse::<DistributionSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn divergent_parameters_are_flagged() {
        assert!(matches!(
            DistributionSpec::kummer2(1.0, 0.0, 0.0).validate(),
            Err(Error::DivergentIntegral(_))
        ));
        assert!(matches!(
            DistributionSpec::beta_alpha(1.0, -1.0, 1.0, 0.0).validate(),
            Err(Error::DivergentIntegral(_))
        ));
        assert!(matches!(
            DistributionSpec::gig(f64::NAN, 1.0, 1.0).validate(),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn inverse_map_derivatives_are_consistent() {
        let maps = [
            Bijection::NegLog,
            Bijection::ExpNeg,
            Bijection::Lwmy(LwmyFunction::g1(1.0, 1.0).unwrap()),
        ];
        for map in maps {
            let y = match map.codomain() {
                Support::UnitInterval => 0.4,
                Support::PositiveHalfLine => 1.3,
            };
            let d = map.inverse_derivatives(y);
            assert!((map.forward(d[0]) - y).abs() < 1e-14);
            assert!((map.log_abs_inverse_jacobian(y) - d[1].abs().ln()).abs() < 1e-14);
            assert!(d[1] < 0.0);
        }
    }
}
