//! `qmix`: experiment runner for the analog quantum-walk library.
//!
//! Exit status: 0 on success, 1 on bad input, 2 when a scientific assertion
//! fails (the artifacts are still written).

mod commands;
mod output;
mod params;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use output::RunDir;
use params::Params;

#[derive(Parser, Debug)]
#[command(name = "qmix", version, about = "Analog quantum-walk experiments on Markov chains and random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Ergodicity, reversibility, stationary distribution and spectrum of a chain.
    ChainInfo,
    /// Classical hitting times and mixing trace.
    Hitting,
    /// Quantum spatial search for a marked set.
    Search,
    /// Coherent preparation of the stationary state from a single node.
    Qssamp,
    /// Time-averaged quantum mixing on a chain's edge walk or on G(n, p).
    Qlsamp,
    /// Spectrum of one G(n, p) sample against the semicircle.
    GnpSpectrum,
    /// Quantum mixing-time exponent over sizes and seeds.
    GnpMixing,
    /// Gap-sum and delocalization pass rates over sizes and seeds.
    SigmaScaling,
    /// Built-in checks of established invariants.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::ChainInfo => "chain-info",
            Command::Hitting => "hitting",
            Command::Search => "search",
            Command::Qssamp => "qssamp",
            Command::Qlsamp => "qlsamp",
            Command::GnpSpectrum => "gnp-spectrum",
            Command::GnpMixing => "gnp-mixing",
            Command::SigmaScaling => "sigma-scaling",
            Command::Verify => "verify",
        }
    }
}

#[derive(Args, Debug)]
struct Flags {
    /// Chain file: "n" on the first line, then n rows.
    #[arg(long, global = true)]
    chain: Option<PathBuf>,
    /// Comma-separated marked node indices.
    #[arg(long, global = true)]
    marked: Option<String>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    p: Option<f64>,
    /// Interpolation parameter.
    #[arg(long, global = true)]
    s: Option<f64>,
    /// Start node.
    #[arg(long, global = true)]
    j: Option<usize>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Seeds per size.
    #[arg(long, global = true)]
    seeds: Option<usize>,
    #[arg(long, global = true)]
    master_seed: Option<u64>,
    /// Size list, "start:stop:step" or comma-separated.
    #[arg(long, global = true)]
    sizes: Option<String>,
    #[arg(long, global = true)]
    t_max: Option<f64>,
    /// Monte Carlo trials (0 skips the simulation).
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// verify suite: lemma1, spectral, gapmap or all.
    #[arg(long, global = true)]
    suite: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// key=value config file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

fn merge(flags: &Flags) -> Result<Params> {
    let mut params = match &flags.config {
        Some(path) => Params::load(path)?,
        None => Params::default(),
    };
    macro_rules! put {
        ($($field:ident),*) => {
            $(if let Some(v) = &flags.$field {
                params.set(stringify!($field), v);
            })*
        };
    }
    put!(marked, n, p, s, j, epsilon, seeds, master_seed, sizes, t_max, trials, suite);
    if let Some(path) = &flags.chain {
        params.set("chain", path.display());
    }
    if let Some(path) = &flags.out {
        params.set("out", path.display());
    }
    Ok(params)
}

enum Failure {
    Input(anyhow::Error),
    Assertion(Vec<String>),
}

fn run(cli: &Cli) -> std::result::Result<(), Failure> {
    let params = merge(&cli.flags).map_err(Failure::Input)?;
    let out_dir: PathBuf = params
        .get_or("out", PathBuf::from(format!("qmix-out/{}", cli.command.name())))
        .map_err(Failure::Input)?;
    let mut out = RunDir::create(&out_dir).map_err(Failure::Input)?;
    let handler = match cli.command {
        Command::ChainInfo => commands::chain_info,
        Command::Hitting => commands::hitting,
        Command::Search => commands::search,
        Command::Qssamp => commands::qssamp,
        Command::Qlsamp => commands::qlsamp,
        Command::GnpSpectrum => commands::gnp_spectrum,
        Command::GnpMixing => commands::gnp_mixing,
        Command::SigmaScaling => commands::sigma_scaling,
        Command::Verify => commands::verify,
    };
    let failed = handler(&params, &mut out).map_err(Failure::Input)?;
    for f in &failed {
        out.line(format!("ASSERTION FAILED: {f}"));
    }
    let status = if failed.is_empty() { "ok" } else { "assertion-failed" };
    out.finish(cli.command.name(), &params, status)
        .map_err(Failure::Input)?;
    println!("{}: {status}, artifacts in {}", cli.command.name(), out_dir.display());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Assertion(failed))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Assertion(failed)) => {
            for f in failed {
                eprintln!("assertion failed: {f}");
            }
            ExitCode::from(2)
        }
    }
}
