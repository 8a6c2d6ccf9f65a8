use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lwmy::distributions::{sample, DistributionSpec};
use lwmy::numerics::RngStream;
use lwmy_cli::config::{parse_assignment, read_config_file, GLOBAL_KEYS};
use lwmy_cli::{run_suite, ExperimentConfig, Suite};

/// Runs verification suites and samples laws.
#[derive(Parser, Debug)]
#[command(name = "lwmy", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Suite to run (see --list-suites).
    #[arg(long)]
    suite: Option<String>,
    /// Flat `key = value` config file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// First seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Sample size per seed.
    #[arg(long)]
    n: Option<usize>,
    /// Bins per axis of the independence table.
    #[arg(long)]
    bins: Option<usize>,
    /// Report path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0: one per core).
    #[arg(long)]
    jobs: Option<usize>,
    /// Any config key, as `key=value`; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Record wall times in the report.
    #[arg(long)]
    timing: bool,
    /// Print the suites and their parameters, then exit.
    #[arg(long)]
    list_suites: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw samples from a law and write them as CSV.
    Sample {
        /// Law, e.g. `kummer2(2,1,1)` or `image(neglog,beta(2,1))`.
        spec: String,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        /// CSV path (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn list_suites() {
    println!("suites:");
    for s in Suite::ALL {
        println!("  {:<20} {}", s.name(), s.description());
        for p in s.params() {
            let default = if p.default.is_empty() { "none" } else { p.default };
            println!("      {:<16} {} (default {default})", p.key, p.help);
        }
    }
    println!("global keys:");
    for (key, default, help) in GLOBAL_KEYS {
        if default.is_empty() {
            println!("  {key:<18} {help}");
        } else {
            println!("  {key:<18} {help} (default {default})");
        }
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn run_sample(spec: &str, n: usize, seed: u64, stream: u64, out: Option<&PathBuf>) -> Result<(), String> {
    let spec: DistributionSpec = spec.parse().map_err(|e| format!("{e}"))?;
    if n == 0 {
        return Err("n must be at least 1".into());
    }
    let batch = sample(&spec, n, RngStream::new(seed, stream)).map_err(|e| e.to_string())?;
    write_output(out, &batch.to_csv())?;
    eprintln!(
        "{spec}: n={n} seed={seed} stream={stream} acceptance_rate={}",
        batch.acceptance_rate
    );
    Ok(())
}

fn assignments(args: &RunArgs) -> Result<Vec<(String, String)>, String> {
    let mut pairs = match &args.config {
        Some(path) => read_config_file(path).map_err(|e| e.to_string())?,
        None => Vec::new(),
    };
    let mut flag = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            pairs.push((k.to_string(), v));
        }
    };
    flag("suite", args.suite.clone());
    flag("seed", args.seed.map(|v| v.to_string()));
    flag("n", args.n.map(|v| v.to_string()));
    flag("bins", args.bins.map(|v| v.to_string()));
    flag("out", args.out.as_ref().map(|p| p.display().to_string()));
    flag("jobs", args.jobs.map(|v| v.to_string()));
    if args.timing {
        flag("timing", Some("true".into()));
    }
    for s in &args.set {
        pairs.push(parse_assignment(s).ok_or_else(|| format!("--set expects key=value, got `{s}`"))?);
    }
    Ok(pairs)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(Command::Sample {
        spec,
        n,
        seed,
        stream,
        out,
    }) = &cli.command
    {
        return match run_sample(spec, *n, *seed, *stream, out.as_ref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }
    if cli.run.list_suites {
        list_suites();
        return ExitCode::SUCCESS;
    }
    let cfg = match assignments(&cli.run).and_then(|p| ExperimentConfig::resolve(&p).map_err(|e| e.to_string())) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run_suite(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{} failed to run: {e}", cfg.suite);
            return ExitCode::from(3);
        }
    };
    if let Err(e) = write_output(cfg.output_path.as_ref(), &report.to_json()) {
        eprintln!("cannot write report: {e}");
        return ExitCode::from(3);
    }
    for s in &report.summary {
        eprintln!(
            "{:<4} {:<18} {}/{} passed (need {})",
            if s.pass { "PASS" } else { "FAIL" },
            s.check,
            s.passes,
            s.total,
            s.required
        );
    }
    for r in &report.reports {
        if let Some(line) = r.inputs.get("summary") {
            eprintln!("     {line}");
        }
        if let Some(err) = r.inputs.get("error") {
            eprintln!("     {err}");
        }
    }
    eprintln!("{}: {}", report.suite, if report.pass { "PASS" } else { "FAIL" });
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
