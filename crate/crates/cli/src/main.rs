use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use prepq::harness::bench;
use prepq::harness::catalog::{self, SampleSpec};
use prepq::harness::generate::generate;
use prepq::harness::suite::run_suite;
use prepq::harness::SuiteConfig;
use prepq::preprocessing::LadderReport;
use prepq::separation::separation_report;
use prepq::{Error, PolylogBound, Report};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "prepq", version, about = "Checks for preprocessing-based query tractability")]
struct Cli {
    /// Seed for every generator; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML config file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Exhaustive BDS graphs up to this many nodes.
    #[arg(long, global = true, value_name = "N")]
    max_exhaustive: Option<usize>,
    /// Random instances added to every sample set.
    #[arg(long, global = true, value_name = "N")]
    random: Option<usize>,
    /// Fault to inject (repeatable); `identity-preprocessing` is the only one.
    #[arg(long, global = true, value_name = "NAME")]
    inject: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the three factorization conditions for a catalog entry.
    VerifyFactorization {
        #[arg(long)]
        name: String,
    },
    /// Two-sided witness check plus the digest-size ladder.
    VerifyWitness {
        #[arg(long)]
        name: String,
    },
    /// Check that a reduction preserves membership in both directions.
    VerifyReduction {
        #[arg(long)]
        name: String,
    },
    /// Tabulate n! against digest capacity.
    Separate {
        #[arg(long, value_name = "N")]
        max_n: Option<usize>,
        /// Digest bound `a,k,b`: a·(log2 n)^k + b.
        #[arg(long, value_name = "A,K,B")]
        bound: Option<PolylogBound>,
        /// Also write the table as CSV.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Runtime fits for a problem's witness.
    Bench {
        #[arg(long)]
        problem: String,
    },
    /// Print one generated instance.
    Generate {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        size: usize,
    },
    /// Run every registered check.
    RunSuite,
}

fn load_config(cli: &Cli) -> prepq::Result<SuiteConfig> {
    let mut config = match &cli.config {
        Some(path) => SuiteConfig::load(path).map_err(|e| match e {
            Error::Io(io) => Error::Config(format!("{}: {io}", path.display())),
            other => other,
        })?,
        None => SuiteConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(n) = cli.max_exhaustive {
        config.caps.bds_nodes = n;
        config.caps.reduction_nodes = n;
        config.caps.cvp_gates = config.caps.cvp_gates.min(n);
    }
    if let Some(r) = cli.random {
        config.budgets.random = r;
    }
    config.inject.extend(cli.inject.iter().cloned());
    config.validate()?;
    Ok(config)
}

fn print_report(r: &Report) {
    eprintln!("{} {}", if r.passed() { "PASS" } else { "FAIL" }, r.subject);
    for c in r.failing_checks() {
        eprintln!("  failed {}: measured {} vs bound {}", c.name, c.measured, c.bound);
    }
}

fn print_ladder(l: &LadderReport) {
    eprintln!(
        "{} digest-ladder/{} slope {:.3} (cap {:.3})",
        if l.passed() { "PASS" } else { "FAIL" },
        l.subject,
        l.slope,
        l.slope_cap
    );
    for c in l.report.failing_checks() {
        eprintln!("  failed {}: measured {} vs bound {}", c.name, c.measured, c.bound);
    }
}

fn emit(path: Option<&Path>, value: &Value) -> prepq::Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: &Cli, config: &SuiteConfig) -> prepq::Result<bool> {
    let spec = SampleSpec::from_config(config);
    let out = cli.json.as_deref();
    match &cli.command {
        Command::VerifyFactorization { name } => {
            let r = catalog::factorization_report(name, spec, config)?;
            print_report(&r);
            emit(out, &serde_json::to_value(&r)?)?;
            Ok(r.passed())
        }
        Command::VerifyWitness { name } => {
            let inject = config.injects(prepq::harness::config::INJECT_IDENTITY_PREPROCESSING);
            let (r, ladder) = catalog::witness_report(name, config, inject)?;
            print_report(&r);
            print_ladder(&ladder);
            emit(out, &json!({ "witness": r, "ladder": ladder }))?;
            Ok(r.passed() && ladder.passed())
        }
        Command::VerifyReduction { name } => {
            let spec = SampleSpec {
                max_exhaustive: config.caps.reduction_nodes,
                ..spec
            };
            let r = catalog::reduction_report(name, spec, config)?;
            print_report(&r);
            emit(out, &serde_json::to_value(&r)?)?;
            Ok(r.passed())
        }
        Command::Separate { max_n, bound, csv } => {
            let max_n = max_n.unwrap_or(config.caps.separation_table);
            let bound = bound.unwrap_or(config.bound("separation")?);
            let s = separation_report(1..=max_n, bound, config.caps.separation_nodes.min(max_n))?;
            print_report(&s.report);
            if let Some(path) = csv {
                fs::write(path, s.to_csv()?)?;
            }
            emit(out, &serde_json::to_value(&s)?)?;
            Ok(s.report.passed())
        }
        Command::Bench { problem } => {
            let fits = bench::bench(problem, config)?;
            for f in &fits {
                eprintln!(
                    "{} {} exponent {:.3} (cap {} + {}) residual {:.3}",
                    if f.pass { "PASS" } else { "FAIL" },
                    f.name,
                    f.fit.exponent,
                    f.fit.cap,
                    f.fit.slack,
                    f.fit.residual
                );
            }
            emit(out, &serde_json::to_value(&fits)?)?;
            Ok(fits.iter().all(|f| f.pass))
        }
        Command::Generate { problem, size } => {
            let x = generate(problem, *size, config.seed, config)?;
            std::io::stdout().write_all(x.as_bytes())?;
            Ok(true)
        }
        Command::RunSuite => {
            let report = run_suite(config)?;
            report.sections.iter().for_each(print_report);
            report.ladders.iter().for_each(print_ladder);
            if let Some(t) = &report.timing {
                for f in &t.fits {
                    eprintln!("{} timing/{} exponent {:.3}", if f.pass { "PASS" } else { "FAIL" }, f.name, f.fit.exponent);
                }
                for e in &t.errors {
                    eprintln!("FAIL timing: {e}");
                }
            }
            eprintln!("suite: {}", if report.passed() { "PASS" } else { "FAIL" });
            let path = cli.json.clone().or_else(|| config.output_path.clone());
            emit(path.as_deref(), &report.to_json())?;
            Ok(report.passed())
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InsufficientData(_) | Error::UnknownEntry(_) | Error::UnknownProblem(_) | Error::CapExceeded { .. } => {
            EXIT_USAGE
        }
        _ => EXIT_INTERNAL,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_config(&cli).and_then(|config| run(&cli, &config));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
