//! Flat `key = value` configuration for the experiment harness.
//!
//! One entry per line, `#` starts a comment, lists are comma-separated.
//! Powers are given in dBm and converted to watts when an experiment is
//! built. Unknown keys are errors.

use std::path::{Path, PathBuf};

use crate::channel::{Geometry, Point, SystemParams};
use crate::error::{Error, Result};
use crate::numerics::Seed;
use crate::solvers::{
    EmrinConfig, DEFAULT_ES_STEP, DEFAULT_K, DEFAULT_MAX_ITER, DEFAULT_NEWTON_START, DEFAULT_XI,
    FIXED_A, FIXED_B,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub geometry: Geometry,
    pub m: usize,
    /// IRS element counts; `None` selects the experiment's default.
    pub n: Option<Vec<usize>>,
    /// Total power budgets in dBm; `None` selects the experiment's default.
    pub p_max_dbm: Option<Vec<f64>>,
    pub sigma_i_dbm: f64,
    pub sigma_n_dbm: f64,
    pub trials: usize,
    pub seed: u64,
    /// Random starts for EMRIN outside the K sweep.
    pub k: usize,
    pub k_list: Vec<usize>,
    pub xi: f64,
    pub max_iter: usize,
    pub es_step: f64,
    pub fixed_betas: Vec<f64>,
    /// Split used by `solve --method FIXED`.
    pub fixed_beta: f64,
    pub newton_start: f64,
    /// Number of points of the beta sweep.
    pub beta_grid: usize,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            geometry: Geometry::default(),
            m: 2,
            n: None,
            p_max_dbm: None,
            sigma_i_dbm: -100.0,
            sigma_n_dbm: -100.0,
            trials: 500,
            seed: 1,
            k: DEFAULT_K,
            k_list: (0..=10).map(|e| 1usize << e).collect(),
            xi: DEFAULT_XI,
            max_iter: DEFAULT_MAX_ITER,
            es_step: DEFAULT_ES_STEP,
            fixed_betas: vec![FIXED_A, FIXED_B],
            fixed_beta: FIXED_A,
            newton_start: DEFAULT_NEWTON_START,
            beta_grid: 201,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Applies every assignment in `text` on top of the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                location: format!("line {}", idx + 1),
                message: format!("expected `key = value`, got {line:?}"),
            })?;
            let key = key.trim();
            self.set(key, value.trim())
                .map_err(|message| Error::Config {
                    location: format!("line {} (key `{key}`)", idx + 1),
                    message,
                })?;
        }
        Ok(())
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "bs_pos" => self.geometry.bs_pos = point(value)?,
            "irs_pos" => self.geometry.irs_pos = point(value)?,
            "user_pos" => self.geometry.user_pos = point(value)?,
            "alpha_g" => self.geometry.alpha_g = num(value)?,
            "alpha_f" => self.geometry.alpha_f = num(value)?,
            "alpha_h" => self.geometry.alpha_h = num(value)?,
            "ref_gain" => self.geometry.ref_gain = num(value)?,
            "m" => self.m = num(value)?,
            "n" => self.n = Some(list(value)?),
            "pmax_dbm" | "p_max_dbm" => self.p_max_dbm = Some(list(value)?),
            "sigma_i_dbm" => self.sigma_i_dbm = num(value)?,
            "sigma_n_dbm" => self.sigma_n_dbm = num(value)?,
            "trials" => self.trials = num(value)?,
            "seed" => self.seed = num(value)?,
            "k" => self.k = num(value)?,
            "k_list" => self.k_list = list(value)?,
            "xi" => self.xi = num(value)?,
            "max_iter" => self.max_iter = num(value)?,
            "es_step" => self.es_step = num(value)?,
            "fixed_betas" => self.fixed_betas = list(value)?,
            "fixed_beta" => self.fixed_beta = num(value)?,
            "newton_start" => self.newton_start = num(value)?,
            "beta_grid" => self.beta_grid = num(value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, message: String| Error::Config {
            location: format!("field `{field}`"),
            message,
        };
        self.geometry
            .validate()
            .map_err(|e| bad("geometry", e.to_string()))?;
        if self.m == 0 {
            return Err(bad("m", "must be >= 1".into()));
        }
        if let Some(n) = &self.n {
            if n.is_empty() || n.contains(&0) {
                return Err(bad("n", "must be a non-empty list of counts >= 1".into()));
            }
        }
        if let Some(p) = &self.p_max_dbm {
            if p.is_empty() || p.iter().any(|x| !x.is_finite()) {
                return Err(bad(
                    "pmax_dbm",
                    "must be a non-empty list of finite values".into(),
                ));
            }
        }
        for (field, x) in [
            ("sigma_i_dbm", self.sigma_i_dbm),
            ("sigma_n_dbm", self.sigma_n_dbm),
        ] {
            if !x.is_finite() {
                return Err(bad(field, format!("must be finite, got {x}")));
            }
        }
        if self.trials == 0 {
            return Err(bad("trials", "must be >= 1".into()));
        }
        if self.beta_grid < 2 {
            return Err(bad("beta_grid", "must be >= 2".into()));
        }
        if self.k_list.is_empty() || self.k_list.contains(&0) {
            return Err(bad(
                "k_list",
                "must be a non-empty list of counts >= 1".into(),
            ));
        }
        if self.fixed_betas.is_empty() || self.fixed_betas.iter().any(|b| !(0.0..=1.0).contains(b))
        {
            return Err(bad(
                "fixed_betas",
                "must be a non-empty list inside [0, 1]".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.fixed_beta) {
            return Err(bad("fixed_beta", "must lie in [0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.newton_start) {
            return Err(bad("newton_start", "must lie in [0, 1]".into()));
        }
        if !(self.es_step > 0.0 && self.es_step <= 0.5) {
            return Err(bad("es_step", "must lie in (0, 0.5]".into()));
        }
        self.emrin(Seed(self.seed), self.k)
            .validate()
            .map_err(|e| bad("k/xi/max_iter", e.to_string()))?;
        Ok(())
    }

    pub fn params(&self, n: usize, p_max_dbm: f64) -> Result<SystemParams> {
        SystemParams::from_dbm(self.m, n, p_max_dbm, self.sigma_i_dbm, self.sigma_n_dbm)
    }

    pub fn emrin(&self, seed: Seed, k: usize) -> EmrinConfig {
        EmrinConfig {
            k,
            xi: self.xi,
            max_iter: self.max_iter,
            seed,
        }
    }

    pub fn n_or(&self, default: &[usize]) -> Vec<usize> {
        self.n.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn p_or(&self, default: &[f64]) -> Vec<f64> {
        self.p_max_dbm.clone().unwrap_or_else(|| default.to_vec())
    }
}

fn num<T: std::str::FromStr>(value: &str) -> std::result::Result<T, String> {
    value
        .trim()
        .parse()
        .map_err(|_| format!("cannot parse {value:?}"))
}

fn list<T: std::str::FromStr>(value: &str) -> std::result::Result<Vec<T>, String> {
    let items = value
        .split(',')
        .map(num)
        .collect::<std::result::Result<Vec<T>, _>>()?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}

fn point(value: &str) -> std::result::Result<Point, String> {
    let coords: Vec<f64> = list(value)?;
    coords
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 3 coordinates, got {}", v.len()))
}
