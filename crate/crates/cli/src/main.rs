use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

mod cache;
mod commands;
mod config;

use config::{FileConfig, RunConfig, WeightSpec};

#[derive(Parser)]
#[command(name = "ssforms", version, about = "Supersingular class sets, Brandt operators and mod-p eigensystems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build (or load from cache) the class set and print its size.
    Classset(Common),
    /// Weighted Hecke matrices for every configured ell and weight.
    Brandt(Common),
    /// Simultaneous eigensystems for every configured weight.
    Eigensystems(Common),
    /// Census, mass, Hecke invariants and matching against level-one forms.
    Verify(Common),
    /// Dieudonne module identities on random samples.
    DieudonneCheck(Sampled),
    /// GU/GSp conjugation on random samples.
    GuGspCheck(Sampled),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML file with any of the settings below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long = "N")]
    n: Option<u64>,
    /// Hecke primes, comma separated.
    #[arg(long, value_delimiter = ',')]
    ell: Option<Vec<u64>>,
    /// Character weights: `a..b` or a comma-separated list.
    #[arg(long, value_parser = parse_weights)]
    weights: Option<WeightSpec>,
    #[arg(long)]
    witt_k: Option<u32>,
    /// q-expansion precision.
    #[arg(long)]
    qprec: Option<usize>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// JSON output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Sampled {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Prime fields for the GU/GSp check.
    #[arg(long, value_delimiter = ',', default_value = "3,7")]
    fields: Vec<u64>,
}

fn parse_weights(s: &str) -> Result<WeightSpec, String> {
    WeightSpec::parse(s).map_err(|e| e.to_string())
}

fn resolve(c: &Common) -> Result<RunConfig> {
    let file = match &c.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let flags = FileConfig {
        p: c.p,
        n: c.n,
        ell: c.ell.clone(),
        weights: c.weights.clone(),
        witt_k: c.witt_k,
        qprec: c.qprec,
        cache_dir: c.cache_dir.clone(),
        jobs: c.jobs,
        out: c.out.clone(),
    };
    RunConfig::from_file_config(file.overlay(flags))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Classset(c) => commands::cmd_classset(&resolve(&c)?),
        Command::Brandt(c) => commands::cmd_brandt(&resolve(&c)?),
        Command::Eigensystems(c) => commands::cmd_eigensystems(&resolve(&c)?),
        Command::Verify(c) => commands::cmd_verify(&resolve(&c)?),
        Command::DieudonneCheck(s) => commands::cmd_dieudonne_check(&resolve(&s.common)?, s.samples),
        Command::GuGspCheck(s) => commands::cmd_gu_gsp_check(&resolve(&s.common)?, s.samples, &s.fields),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
