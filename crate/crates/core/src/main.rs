use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use irs_pa::experiment::{
    run_rate_vs_beta, run_rate_vs_k, run_rate_vs_n, run_single_solve, write_csv, Experiment,
    ExperimentConfig,
};
use irs_pa::solvers::Method;
use irs_pa::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "irs-pa",
    version,
    about = "BS/active-IRS power split experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact and approximate rate on a beta sweep.
    RateVsBeta(Common),
    /// EMRIN rate against the number of random starts.
    RateVsK(Common),
    /// All strategies against the number of IRS elements.
    RateVsN(Common),
    /// Solve one channel draw and print the result.
    Solve(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Key-value configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// CSV destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Strategy for `solve`: EMRIN, TPA, NEWTON, ES or FIXED.
    #[arg(long)]
    method: Option<String>,
    /// IRS element count(s), comma-separated.
    #[arg(long)]
    n: Option<String>,
    /// Total power budget(s) in dBm, comma-separated.
    #[arg(long = "pmax-dbm", allow_hyphen_values = true)]
    pmax_dbm: Option<String>,
    /// EMRIN random starts; a list sets the K sweep of `rate-vs-k`.
    #[arg(long)]
    k: Option<String>,
    #[arg(long = "es-step")]
    es_step: Option<String>,
    #[arg(long)]
    xi: Option<String>,
    /// Split used by `solve --method FIXED`.
    #[arg(long)]
    beta: Option<String>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let mut overrides: Vec<(&str, String)> = Vec::new();
        if let Some(x) = self.seed {
            overrides.push(("seed", x.to_string()));
        }
        if let Some(x) = self.trials {
            overrides.push(("trials", x.to_string()));
        }
        if let Some(x) = &self.n {
            overrides.push(("n", x.clone()));
        }
        if let Some(x) = &self.pmax_dbm {
            overrides.push(("pmax_dbm", x.clone()));
        }
        if let Some(x) = &self.k {
            let key = if x.contains(',') { "k_list" } else { "k" };
            overrides.push((key, x.clone()));
            if key == "k" {
                overrides.push(("k_list", x.clone()));
            }
        }
        if let Some(x) = &self.es_step {
            overrides.push(("es_step", x.clone()));
        }
        if let Some(x) = &self.xi {
            overrides.push(("xi", x.clone()));
        }
        if let Some(x) = &self.beta {
            overrides.push(("fixed_beta", x.clone()));
        }
        if let Some(x) = &self.out {
            overrides.push(("out", x.display().to_string()));
        }
        for (key, value) in overrides {
            cfg.set(key, &value).map_err(|message| Error::Config {
                location: format!("flag --{}", key.replace('_', "-")),
                message,
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(exp: &Experiment, cfg: &ExperimentConfig) -> Result<()> {
    let rows = exp.rows();
    match &cfg.out {
        Some(path) => write_csv(BufWriter::new(File::create(path)?), &rows),
        None => write_csv(io::stdout().lock(), &rows),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::RateVsBeta(c) => {
            let cfg = c.config()?;
            emit(&run_rate_vs_beta(&cfg)?, &cfg)
        }
        Command::RateVsK(c) => {
            let cfg = c.config()?;
            emit(&run_rate_vs_k(&cfg)?, &cfg)
        }
        Command::RateVsN(c) => {
            let cfg = c.config()?;
            emit(&run_rate_vs_n(&cfg)?, &cfg)
        }
        Command::Solve(c) => {
            let method: Method = c
                .method
                .as_deref()
                .ok_or_else(|| Error::Usage("solve requires --method".into()))?
                .parse()?;
            let cfg = c.config()?;
            print!("{}", run_single_solve(&cfg, method)?.report());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
