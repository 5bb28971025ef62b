//! `raylab`: run scenario files or bundled scenarios and write CSV tables
//! plus a JSON summary per scenario.
//!
//! Exit codes: 0 when every assertion passes, 1 when one fails, 2 on input
//! errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use raylab::scenario::{bundled, bundled_names, write_artifacts, Registry, RunContext, Scenario, ScenarioError, Summary};

#[derive(Debug, Parser)]
#[command(name = "raylab", version, about = "Batch runner for geodesic-ray and quantization scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run scenario files or bundled scenario names.
    Run {
        /// Paths to scenario JSON files, or names of bundled scenarios.
        #[arg(required_unless_present = "all")]
        scenarios: Vec<String>,
        /// Run every bundled scenario.
        #[arg(long, conflicts_with = "scenarios")]
        all: bool,
        /// Output directory; each scenario writes into its own subdirectory.
        #[arg(long, env = "RAYLAB_OUT", default_value = "raylab-out")]
        out: PathBuf,
        /// Worker threads (defaults to the number of cores).
        #[arg(long, env = "RAYLAB_THREADS")]
        threads: Option<usize>,
        /// Seed for randomized scenarios, overriding the scenario's own.
        #[arg(long, env = "RAYLAB_SEED")]
        seed: Option<u64>,
        /// Multiply every tolerance by this factor.
        #[arg(long, env = "RAYLAB_TOLERANCE_SCALE", default_value_t = 1.0)]
        tolerance_scale: f64,
    },
    /// List bundled scenarios.
    List,
    /// List scenario kinds and the CSV columns they write.
    Kinds,
}

fn load(arg: &str) -> Result<Scenario, ScenarioError> {
    let path = Path::new(arg);
    if path.exists() {
        return Scenario::load(path);
    }
    match bundled(arg) {
        Some(b) => b.scenario(),
        None => Err(ScenarioError::Io { path: arg.into(), message: "no such file or bundled scenario".into() }),
    }
}

fn run(scenarios: Vec<String>, out: &Path, ctx: RunContext, cli_threads: bool) -> u8 {
    let registry = Registry::default();
    let mut loaded = Vec::new();
    for arg in &scenarios {
        match load(arg).and_then(|s| registry.validate(&s).map(|_| s)) {
            Ok(s) => loaded.push(s),
            Err(e) => {
                eprintln!("error: {arg}: {e}");
                return 2;
            }
        }
    }
    let mut code = 0;
    for s in &loaded {
        let start = Instant::now();
        // A scenario's own thread count applies unless --threads was given.
        let result = match s.params.threads.filter(|_| !cli_threads) {
            Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(|| registry.run(s, &ctx)),
                Err(e) => {
                    eprintln!("error: {}: cannot configure {n} threads: {e}", s.name);
                    return 2;
                }
            },
            None => registry.run(s, &ctx),
        };
        let outcome = match result {
            Ok(o) => o,
            Err(e) => {
                eprintln!("error: {}: {e}", s.name);
                return 2;
            }
        };
        let summary = Summary::new(s, &outcome, ctx.seed(s), ctx.tolerance_scale);
        let dir = match write_artifacts(out, &summary, &outcome) {
            Ok(d) => d,
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        };
        let status = if outcome.passed() { "PASS" } else { "FAIL" };
        println!("{status} {} ({:.1} s) -> {}", s.name, start.elapsed().as_secs_f64(), dir.display());
        for a in &outcome.assertions {
            if !a.passed {
                println!("  failed {}: measured {:.6e}, tolerance {:.3e}; {}", a.name, a.measured, a.tolerance, a.detail);
                code = 1;
            }
        }
        for w in &outcome.warnings {
            eprintln!("  warning: {w}");
        }
    }
    code
}

/// Write to stdout; a closed pipe is not an error.
fn emit(text: &str) -> ExitCode {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => ExitCode::from(2),
        _ => ExitCode::SUCCESS,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenarios, all, out, threads, seed, tolerance_scale } => {
            if !(tolerance_scale > 0.0 && tolerance_scale.is_finite()) {
                eprintln!("error: --tolerance-scale must be a positive number");
                return ExitCode::from(2);
            }
            if let Some(n) = threads {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("error: cannot configure {n} threads: {e}");
                    return ExitCode::from(2);
                }
            }
            let scenarios = if all { bundled_names().map(String::from).collect() } else { scenarios };
            ExitCode::from(run(scenarios, &out, RunContext { seed, tolerance_scale }, threads.is_some()))
        }
        Command::List => {
            let mut text = String::new();
            for name in bundled_names() {
                let s = bundled(name).expect("listed").scenario().expect("bundled scenarios parse");
                text.push_str(&format!("{name}\t{}\t{}\n", s.kind, s.anchor));
            }
            emit(&text)
        }
        Command::Kinds => {
            let registry = Registry::default();
            let mut text = String::new();
            for kind in registry.kinds() {
                text.push_str(&format!("{kind}\n"));
                for (table, cols) in registry.get(kind).expect("listed").tables() {
                    text.push_str(&format!("  {table}.csv: {}\n", cols.join(",")));
                }
            }
            emit(&text)
        }
    }
}
