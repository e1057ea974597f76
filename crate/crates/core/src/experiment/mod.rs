//! Monte Carlo sweeps over channel draws.
//!
//! Every trial index owns a sub-seed derived from the master seed, and all
//! methods, start counts and power budgets of one experiment reuse it, so
//! compared curves see the same channels (common random numbers). Trials run
//! in parallel; samples are collected in trial order before aggregation, so
//! the output is a pure function of the configuration.

pub mod config;
pub mod output;

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::channel::{design_beamformers, sample_channels};
use crate::error::{Error, Result};
use crate::numerics::Seed;
use crate::snr::{compute_coefficients, rate, Coefficients, PaFactor};
use crate::solvers::{
    approx_g2, emrin, exhaustive_search, fixed_pa, newton, tpa, CubicCoeffs, Method, SolveResult,
};

pub use config::ExperimentConfig;
pub use output::{format_sig, mean_stderr, to_csv_string, write_csv, ResultRow, CSV_HEADER};

pub const DEFAULT_BETA_N: usize = 128;
pub const DEFAULT_K_N: usize = 16;
pub const DEFAULT_N_SWEEP: [usize; 6] = [4, 8, 16, 32, 64, 128];
pub const DEFAULT_P_SWEEP: [f64; 3] = [20.0, 30.0, 40.0];
pub const DEFAULT_N_SWEEP_P: f64 = 30.0;
pub const DEFAULT_SOLVE_N: usize = 16;

const CHANNEL_STREAM: u64 = 0;
const START_STREAM: u64 = 1;

/// Per-trial samples of one curve point.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub x_name: &'static str,
    pub x_value: f64,
    pub p_max_dbm: f64,
    pub method: String,
    /// Rate in bits, indexed by trial.
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub id: &'static str,
    pub series: Vec<Series>,
}

impl Experiment {
    pub fn rows(&self) -> Vec<ResultRow> {
        self.series
            .iter()
            .map(|s| {
                let (mean, stderr) = mean_stderr(&s.samples);
                ResultRow {
                    experiment: self.id.to_string(),
                    x_name: s.x_name.to_string(),
                    x_value: s.x_value,
                    p_max_dbm: s.p_max_dbm,
                    method: s.method.clone(),
                    mean_rate_bits: mean,
                    stderr,
                    trials: s.samples.len(),
                }
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        to_csv_string(&self.rows())
    }

    /// Series for `method` at the given power and x value.
    pub fn find(&self, p_max_dbm: f64, x_value: f64, method: &str) -> Option<&Series> {
        self.series
            .iter()
            .find(|s| s.p_max_dbm == p_max_dbm && s.x_value == x_value && s.method == method)
    }
}

/// Coefficients of trial `trial`, drawn from the trial's channel stream.
pub fn trial_coefficients(
    cfg: &ExperimentConfig,
    n: usize,
    p_max_dbm: f64,
    trial: usize,
) -> Result<Coefficients> {
    let params = cfg.params(n, p_max_dbm)?;
    let mut stream = channel_seed(cfg.seed, trial).stream();
    let ch = sample_channels(&cfg.geometry, &params, &mut stream)?;
    let bf = design_beamformers(&ch)?;
    compute_coefficients(&ch, &bf, &params)
}

pub fn channel_seed(master: u64, trial: usize) -> Seed {
    Seed(master).derive(trial as u64).derive(CHANNEL_STREAM)
}

/// Seed of EMRIN's start points for a trial; shared by every K.
pub fn start_seed(master: u64, trial: usize) -> Seed {
    Seed(master).derive(trial as u64).derive(START_STREAM)
}

/// Runs `per_trial` for every trial in parallel, keeping trial order.
fn collect_trials<T, F>(trials: usize, per_trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..trials).into_par_iter().map(per_trial).collect()
}

/// Transposes per-trial rows into per-column sample vectors.
fn columns(rows: Vec<Vec<f64>>, width: usize) -> Vec<Vec<f64>> {
    let mut cols = vec![Vec::with_capacity(rows.len()); width];
    for row in rows {
        for (col, x) in cols.iter_mut().zip(row) {
            col.push(x);
        }
    }
    cols
}

fn linspace(count: usize) -> Vec<f64> {
    (0..count).map(|k| k as f64 / (count - 1) as f64).collect()
}

/// Exact and Taylor-approximated rate on a uniform beta grid.
pub fn run_rate_vs_beta(cfg: &ExperimentConfig) -> Result<Experiment> {
    cfg.validate()?;
    let betas = linspace(cfg.beta_grid);
    let n = *cfg
        .n_or(&[DEFAULT_BETA_N])
        .first()
        .expect("validated non-empty");
    let mut series = Vec::new();
    for p in cfg.p_or(&DEFAULT_P_SWEEP) {
        let rows = collect_trials(cfg.trials, |trial| {
            let co = trial_coefficients(cfg, n, p, trial)?;
            let cc = CubicCoeffs::new(&co)?;
            let mut out = Vec::with_capacity(2 * betas.len());
            for &b in &betas {
                let beta = PaFactor::new(b)?;
                out.push(rate(co.objective(b)?)?);
                out.push(rate(approx_g2(&cc, &co, beta))?);
            }
            Ok(out)
        })?;
        let mut cols = columns(rows, 2 * betas.len()).into_iter();
        for &b in &betas {
            for method in ["EXACT", "APPROX"] {
                series.push(Series {
                    x_name: "beta",
                    x_value: b,
                    p_max_dbm: p,
                    method: method.into(),
                    samples: cols.next().expect("one column per series"),
                });
            }
        }
    }
    Ok(Experiment {
        id: "rate-vs-beta",
        series,
    })
}

/// EMRIN against the grid optimum as the number of random starts grows.
pub fn run_rate_vs_k(cfg: &ExperimentConfig) -> Result<Experiment> {
    cfg.validate()?;
    let n = *cfg
        .n_or(&[DEFAULT_K_N])
        .first()
        .expect("validated non-empty");
    let mut series = Vec::new();
    for p in cfg.p_or(&DEFAULT_P_SWEEP) {
        let rows = collect_trials(cfg.trials, |trial| {
            let co = trial_coefficients(cfg, n, p, trial)?;
            let es = exhaustive_search(&co, cfg.es_step)?.rate_bits;
            let mut out = Vec::with_capacity(2 * cfg.k_list.len());
            for &k in &cfg.k_list {
                out.push(emrin(&co, &cfg.emrin(start_seed(cfg.seed, trial), k))?.rate_bits);
                out.push(es);
            }
            Ok(out)
        })?;
        let mut cols = columns(rows, 2 * cfg.k_list.len()).into_iter();
        for &k in &cfg.k_list {
            for method in [Method::Emrin, Method::Es] {
                series.push(Series {
                    x_name: "K",
                    x_value: k as f64,
                    p_max_dbm: p,
                    method: method.tag().into(),
                    samples: cols.next().expect("one column per series"),
                });
            }
        }
    }
    Ok(Experiment {
        id: "rate-vs-k",
        series,
    })
}

/// Labels of the strategies compared in the element-count sweep, in output order.
pub fn rate_vs_n_methods(cfg: &ExperimentConfig) -> Vec<String> {
    let mut labels: Vec<String> = ["ES", "EMRIN", "TPA", "NEWTON"]
        .into_iter()
        .map(String::from)
        .collect();
    labels.extend(cfg.fixed_betas.iter().map(|b| fixed_label(*b)));
    labels
}

pub fn fixed_label(beta: f64) -> String {
    format!("FIXED({})", format_sig(beta))
}

/// All strategies side by side as the IRS grows.
pub fn run_rate_vs_n(cfg: &ExperimentConfig) -> Result<Experiment> {
    cfg.validate()?;
    let labels = rate_vs_n_methods(cfg);
    let mut series = Vec::new();
    for p in cfg.p_or(&[DEFAULT_N_SWEEP_P]) {
        for n in cfg.n_or(&DEFAULT_N_SWEEP) {
            let rows = collect_trials(cfg.trials, |trial| {
                let co = trial_coefficients(cfg, n, p, trial)?;
                let mut out = vec![
                    exhaustive_search(&co, cfg.es_step)?.rate_bits,
                    emrin(&co, &cfg.emrin(start_seed(cfg.seed, trial), cfg.k))?.rate_bits,
                    tpa(&co)?.rate_bits,
                    newton(&co, cfg.newton_start, cfg.xi, cfg.max_iter)?.rate_bits,
                ];
                for &b in &cfg.fixed_betas {
                    out.push(fixed_pa(&co, PaFactor::new(b)?)?.rate_bits);
                }
                Ok(out)
            })?;
            for (label, samples) in labels.iter().zip(columns(rows, labels.len())) {
                series.push(Series {
                    x_name: "N",
                    x_value: n as f64,
                    p_max_dbm: p,
                    method: label.clone(),
                    samples,
                });
            }
        }
    }
    Ok(Experiment {
        id: "rate-vs-n",
        series,
    })
}

/// One channel draw solved with one strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleSolve {
    pub n: usize,
    pub m: usize,
    pub p_max_dbm: f64,
    pub seed: u64,
    pub coefficients: Coefficients,
    pub result: SolveResult,
}

pub fn run_single_solve(cfg: &ExperimentConfig, method: Method) -> Result<SingleSolve> {
    cfg.validate()?;
    let n = single(cfg.n_or(&[DEFAULT_SOLVE_N]), "n")?;
    let p = single(cfg.p_or(&[DEFAULT_N_SWEEP_P]), "pmax_dbm")?;
    let co = trial_coefficients(cfg, n, p, 0)?;
    let result = match method {
        Method::Emrin => emrin(&co, &cfg.emrin(start_seed(cfg.seed, 0), cfg.k))?,
        Method::Tpa => tpa(&co)?,
        Method::Newton => newton(&co, cfg.newton_start, cfg.xi, cfg.max_iter)?,
        Method::Es => exhaustive_search(&co, cfg.es_step)?,
        Method::Fixed => fixed_pa(&co, PaFactor::new(cfg.fixed_beta)?)?,
    };
    Ok(SingleSolve {
        n,
        m: cfg.m,
        p_max_dbm: p,
        seed: cfg.seed,
        coefficients: co,
        result,
    })
}

fn single<T: Copy>(values: Vec<T>, field: &str) -> Result<T> {
    match values.as_slice() {
        [x] => Ok(*x),
        _ => Err(Error::Usage(format!(
            "solve takes exactly one value for `{field}`, got {}",
            values.len()
        ))),
    }
}

impl SingleSolve {
    /// Human-readable summary with fixed formatting.
    pub fn report(&self) -> String {
        let r = &self.result;
        let d = &r.diagnostics;
        let mut out = String::new();
        let snr_db = if r.snr > 0.0 {
            format_sig(10.0 * r.snr.log10())
        } else {
            "-inf".into()
        };
        let _ = writeln!(out, "method      {}", r.method);
        let _ = writeln!(out, "N           {}", self.n);
        let _ = writeln!(out, "M           {}", self.m);
        let _ = writeln!(out, "p_max_dbm   {}", format_sig(self.p_max_dbm));
        let _ = writeln!(out, "seed        {}", self.seed);
        let _ = writeln!(out, "beta        {}", format_sig(r.beta_opt.value()));
        let _ = writeln!(out, "snr         {}", format_sig(r.snr));
        let _ = writeln!(out, "snr_db      {snr_db}");
        let _ = writeln!(out, "rate_bits   {}", format_sig(r.rate_bits));
        let _ = writeln!(out, "evaluations {}", d.evaluations);
        if !d.candidates.is_empty() {
            let _ = writeln!(
                out,
                "candidates  {} (converged {}, iterations {})",
                d.candidates.len(),
                d.converged_count(),
                d.total_iterations()
            );
            let mut listed: Vec<String> = d
                .candidates
                .iter()
                .take(8)
                .map(|c| format_sig(c.beta.value()))
                .collect();
            if d.candidates.len() > 8 {
                listed.push("...".into());
            }
            let _ = writeln!(out, "betas       {}", listed.join(" "));
        }
        out
    }
}
