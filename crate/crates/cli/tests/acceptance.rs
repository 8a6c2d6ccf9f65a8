//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p lwmy-cli --test acceptance -- --nocapture` (the
//! target has no libtest harness, so output is always shown).

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use lwmy::distributions::{log_pdf, parameter_grid, Bijection, DistributionSpec, Law, Sampler};
use lwmy::lwmy::LwmyFunction;
use lwmy::numerics::RngStream;
use lwmy::series::{classify, extend_coefficients};
use lwmy::verifier::{check_marginal, QuantileBins};
use lwmy_cli::{run_suite, ExperimentConfig, SuiteReport};
use rand::Rng;
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            notes: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, note: impl Into<String>) {
        let note = note.into();
        self.notes.push(format!("{} {note}", if ok { "ok  " } else { "FAIL" }));
        self.pass &= ok;
    }
}

fn config(suite: &str, extra: &[(&str, &str)]) -> ExperimentConfig {
    let mut pairs = vec![
        ("suite".to_string(), suite.to_string()),
        ("seed".to_string(), "1".to_string()),
        ("replicates".to_string(), "20".to_string()),
        ("n".to_string(), "100000".to_string()),
        ("bins".to_string(), "20".to_string()),
        ("level".to_string(), "0.01".to_string()),
        ("min_passes".to_string(), "18".to_string()),
    ];
    pairs.extend(extra.iter().map(|(k, v)| (k.to_string(), v.to_string())));
    ExperimentConfig::resolve(&pairs).unwrap_or_else(|e| panic!("{suite}: {e}"))
}

fn run(out: &mut Outcome, suite: &str, extra: &[(&str, &str)], budget: Option<Duration>) -> Option<SuiteReport> {
    let start = Instant::now();
    let label = if extra.is_empty() {
        suite.to_string()
    } else {
        let kv: Vec<String> = extra.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{suite} ({})", kv.join(", "))
    };
    match run_suite(&config(suite, extra)) {
        Ok(report) => {
            let took = start.elapsed();
            let counts: Vec<String> = report
                .summary
                .iter()
                .map(|s| format!("{} {}/{}", s.check, s.passes, s.total))
                .collect();
            out.require(
                report.pass,
                format!("{label}: {} [{:.1} s]", counts.join(", "), took.as_secs_f64()),
            );
            if let Some(b) = budget {
                out.require(took < b, format!("{label}: runtime under {} s", b.as_secs()));
            }
            Some(report)
        }
        Err(e) => {
            out.require(false, format!("{label}: {e}"));
            None
        }
    }
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::new();
    for (mu, a, b) in [("1", "1", "2"), ("0.5", "1", "1"), ("2", "3", "1")] {
        run(
            &mut out,
            "matsumoto-yor",
            &[("mu", mu), ("a", a), ("b", b)],
            Some(Duration::from_secs(60)),
        );
    }
    out
}

fn criterion_2() -> Outcome {
    let mut out = Outcome::new();
    for suite in ["f1-case", "g1-case", "fdelta-case", "delta1-case"] {
        run(&mut out, suite, &[], None);
    }
    out
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::new();
    run(
        &mut out,
        "gig-convolution",
        &[("mu", "1"), ("a", "1"), ("b", "1")],
        None,
    );
    run(
        &mut out,
        "kummer-convolution",
        &[("a", "2"), ("b", "1"), ("c", "1")],
        None,
    );
    out
}

fn criterion_4() -> Outcome {
    let mut out = Outcome::new();
    run(
        &mut out,
        "pushforward-uvprime",
        &[("a", "2"), ("b", "1"), ("c", "1")],
        None,
    );
    out
}

fn criterion_5() -> Outcome {
    let mut out = Outcome::new();
    let extra = [
        ("grid_lo", "0.2"),
        ("grid_hi", "3"),
        ("grid_n", "25"),
        ("tolerance", "1e-6"),
        ("control_floor", "1e-2"),
    ];
    if let Some(r) = run(&mut out, "cns-residual", &extra, Some(Duration::from_secs(5))) {
        for rep in &r.reports {
            out.notes.push(format!(
                "     {} {}: {:e}",
                rep.check, rep.inputs["triple"], rep.statistic
            ));
        }
    }
    out
}

fn scale(rng: &mut impl Rng) -> f64 {
    (rng.random_range((0.05f64).ln()..(20.0f64).ln())).exp()
}

fn params_of(f: &LwmyFunction) -> Vec<f64> {
    match *f {
        LwmyFunction::Reciprocal { alpha } => vec![alpha],
        LwmyFunction::F1 { alpha, beta } | LwmyFunction::G1 { alpha, beta } => vec![alpha, beta],
        LwmyFunction::FDeltaStar { alpha, beta, delta } => vec![alpha, beta, delta],
    }
}

fn criterion_6() -> Outcome {
    let mut out = Outcome::new();
    run(
        &mut out,
        "comb20-consistency",
        &[
            ("k_max", "8"),
            ("l_max", "8"),
            ("n_max", "30"),
            ("tolerance", "1e-10"),
            ("series_tolerance", "1e-12"),
            ("control_floor", "1e-4"),
        ],
        None,
    );
    run(&mut out, "series-classify", &[("tolerance", "1e-8")], None);

    let mut rng = RngStream::new(2024, 6).rng();
    let mut worst = 0.0f64;
    let mut mismatched = 0;
    for i in 0..400 {
        let f = match i % 4 {
            0 => LwmyFunction::reciprocal(scale(&mut rng)),
            1 => LwmyFunction::f1(scale(&mut rng), scale(&mut rng)),
            2 => LwmyFunction::g1(scale(&mut rng), scale(&mut rng)),
            _ => LwmyFunction::fdelta_star(scale(&mut rng), scale(&mut rng), scale(&mut rng)),
        }
        .unwrap();
        let a = f.big_f_taylor(4);
        let g = extend_coefficients([a[0], a[1], a[2], a[3]], 30).and_then(|t| classify(&t));
        match g {
            Ok(o) if o.matched_family.family() == f.family() => {
                for (p, q) in params_of(&f).iter().zip(params_of(&o.matched_family)) {
                    worst = worst.max((q - p).abs() / p);
                }
            }
            _ => mismatched += 1,
        }
    }
    out.require(
        mismatched == 0 && worst < 1e-8,
        format!("400 random-scale round trips: worst relative error {worst:e}, {mismatched} misclassified"),
    );

    if let Some(r) = run(
        &mut out,
        "delay-residual",
        &[("tolerance", "1e-9"), ("control_floor", "1")],
        None,
    ) {
        if let Some(c) = r.reports.iter().find(|r| r.check == "control") {
            out.notes
                .push(format!("     cubic control at (1,1): {}", c.inputs["value"]));
        }
    }
    out
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::new();
    let grid = parameter_grid();

    let mut worst = (0.0f64, String::new());
    for spec in &grid {
        match Law::new(spec).and_then(|l| l.integrate_pdf(1e-12)) {
            Ok(m) if (m - 1.0).abs() >= worst.0 => worst = ((m - 1.0).abs(), spec.to_string()),
            Ok(_) => {}
            Err(e) => out.require(false, format!("{spec}: {e}")),
        }
    }
    out.require(
        worst.0 < 1e-8,
        format!(
            "{} laws integrate to 1 (worst |mass - 1| = {:e} at {})",
            grid.len(),
            worst.0,
            worst.1
        ),
    );

    let recip = Bijection::Lwmy(LwmyFunction::reciprocal(1.0).unwrap());
    for (i, (mu, a, b)) in [(0.5, 1.0, 1.0), (1.3, 2.0, 0.7), (2.0, 1.0, 3.0)]
        .into_iter()
        .enumerate()
    {
        let (xs, _) = Sampler::new(&DistributionSpec::gig(mu, a, b))
            .unwrap()
            .draw_many(100_000, &mut RngStream::new(77, i as u64).rng());
        let inv: Vec<f64> = xs.iter().map(|&x| recip.forward(x)).collect();
        let p = check_marginal(&inv, &DistributionSpec::gig(-mu, b, a)).unwrap().p_value;
        out.require(
            p > 0.01,
            format!("1/gig({mu},{a},{b}) vs gig({},{b},{a}): p = {p:.3}", -mu),
        );
    }

    let mut diff = 0.0f64;
    for (alpha, a, b) in [(2.0, 2.0, 3.0), (0.3, 0.5, 0.5), (7.0, 4.0, 1.2), (1.0, 1.0, 1.0)] {
        for i in 1..1000 {
            let x = i as f64 / 1000.0;
            let p = log_pdf(&DistributionSpec::beta_alpha(alpha, a, b, 0.0), x).unwrap();
            let q = log_pdf(&DistributionSpec::beta(a, b), x).unwrap();
            diff = diff.max((p - q).abs());
        }
    }
    out.require(
        diff <= 1e-14,
        format!("betaalpha(α,a,b,0) = beta(a,b) pointwise (max diff {diff:e})"),
    );

    let fits: Vec<(String, usize)> = grid
        .par_iter()
        .map(|spec| {
            let bins = QuantileBins::new(&Law::new(spec).unwrap(), 50).unwrap();
            let sampler = Sampler::new(spec).unwrap();
            let passes = (1..=20u64)
                .filter(|&s| {
                    let (v, p) = sampler.draw_many(100_000, &mut RngStream::new(s, 3).rng());
                    bins.fit(&v, 100_000.0 / p as f64).unwrap().p_value > 0.01
                })
                .count();
            (spec.to_string(), passes)
        })
        .collect();
    let min = fits.iter().min_by_key(|f| f.1).unwrap();
    out.require(
        fits.iter().all(|f| f.1 >= 18),
        format!(
            "{} samplers, 50-bin chi-square, fewest passes {}/20 ({})",
            fits.len(),
            min.1,
            min.0
        ),
    );
    for (spec, passes) in fits.iter().filter(|f| f.1 < 18) {
        out.notes.push(format!("     {spec}: {passes}/20"));
    }
    out
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::new();
    for suite in lwmy_cli::Suite::ALL {
        let extra: &[(&str, &str)] = if suite.sampled() {
            &[("n", "10000"), ("replicates", "4"), ("min_passes", "3")]
        } else {
            &[]
        };
        let once = run_suite(&config(suite.name(), extra)).map(|r| r.to_json());
        let twice = run_suite(&config(suite.name(), &[extra, &[("jobs", "1")]].concat())).map(|r| r.to_json());
        match (once, twice) {
            (Ok(a), Ok(b)) => out.require(a == b, format!("{suite}: repeated run, identical report")),
            (Err(e), _) | (_, Err(e)) => out.require(false, format!("{suite}: {e}")),
        }
    }

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("my.cfg");
    std::fs::write(
        &cfg,
        "suite = matsumoto-yor\nn = 20000\nreplicates = 5\nmu = 0.5\nb = 1\n",
    )
    .unwrap();
    let bytes = |name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_lwmy"))
            .args(["--config", cfg.to_str().unwrap(), "--out", path.to_str().unwrap()])
            .output()
            .unwrap()
            .status;
        (status.code(), std::fs::read(path).unwrap_or_default())
    };
    let (a, b) = (bytes("first.json"), bytes("second.json"));
    out.require(
        !a.1.is_empty() && a == b,
        "binary run twice from one config file, byte-identical report",
    );
    out
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("Matsumoto-Yor independence and GIG/gamma outputs", criterion_1),
        ("f1, g1, f*_delta and delta = 1 suites", criterion_2),
        ("GIG and Kummer convolution identities", criterion_3),
        ("UV' pushforward of Kummer x gamma", criterion_4),
        ("log-density functional equation residuals", criterion_5),
        ("series recurrences, classification, delay identity", criterion_6),
        (
            "normalization, reciprocal GIG, beta_alpha at c = 0, samplers",
            criterion_7,
        ),
        ("determinism of reports", criterion_8),
    ];
    let mut all = true;
    let total = Instant::now();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let status = if out.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} criterion {}: {name} ({:.1} s)",
            i + 1,
            start.elapsed().as_secs_f64()
        );
        for note in &out.notes {
            println!("       {note}");
        }
        all &= out.pass;
    }
    println!(
        "acceptance: {} ({:.1} s)",
        if all { "PASS" } else { "FAIL" },
        total.elapsed().as_secs_f64()
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
