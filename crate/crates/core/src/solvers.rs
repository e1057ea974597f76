//! Power-split strategies over a [`Coefficients`] instance.
//!
//! Every strategy returns a [`SolveResult`] scored on the exact objective, so
//! results from different strategies are directly comparable.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::Seed;
use crate::snr::{rate, Coefficients, PaFactor};

pub const DEFAULT_XI: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_K: usize = 256;
pub const DEFAULT_ES_STEP: f64 = 1e-4;
pub const DEFAULT_NEWTON_START: f64 = 0.5;
pub const FIXED_A: f64 = 0.8;
pub const FIXED_B: f64 = 0.9;

/// Relative imaginary part above which a cubic root counts as complex.
const COMPLEX_ROOT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Emrin,
    Tpa,
    Newton,
    Es,
    Fixed,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Emrin => "EMRIN",
            Method::Tpa => "TPA",
            Method::Newton => "NEWTON",
            Method::Es => "ES",
            Method::Fixed => "FIXED",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "EMRIN" => Ok(Method::Emrin),
            "TPA" => Ok(Method::Tpa),
            "NEWTON" => Ok(Method::Newton),
            "ES" => Ok(Method::Es),
            "FIXED" => Ok(Method::Fixed),
            _ => Err(Error::Usage(format!(
                "unknown method {s:?}; expected one of EMRIN, TPA, NEWTON, ES, FIXED"
            ))),
        }
    }
}

/// How a raw candidate was mapped into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClampStatus {
    InRange,
    OutOfRange,
    NotANumber,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clamped {
    pub beta: PaFactor,
    pub status: ClampStatus,
}

/// Keeps candidates inside `[0, 1]`, sends everything else to 0.
pub fn clamp_candidate(beta: f64) -> Clamped {
    if beta.is_nan() {
        Clamped {
            beta: PaFactor::ZERO,
            status: ClampStatus::NotANumber,
        }
    } else if (0.0..=1.0).contains(&beta) {
        Clamped {
            beta: PaFactor::new(beta).expect("checked range"),
            status: ClampStatus::InRange,
        }
    } else {
        Clamped {
            beta: PaFactor::ZERO,
            status: ClampStatus::OutOfRange,
        }
    }
}

/// Why a Newton run stopped without converging.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NewtonFailure {
    /// Iterate reached a point where the derivatives do not exist.
    Singular,
    ZeroCurvature,
    NonFinite,
    MaxIterations,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOutcome {
    /// Last iterate; may lie outside `[0, 1]`.
    pub beta: f64,
    pub converged: bool,
    pub iters: usize,
    pub failure: Option<NewtonFailure>,
}

impl NewtonOutcome {
    /// Candidate for the multi-start pool. Failed runs contribute 0.
    pub fn candidate(&self) -> Clamped {
        match self.failure {
            Some(NewtonFailure::MaxIterations) | None => clamp_candidate(self.beta),
            Some(_) => Clamped {
                beta: PaFactor::ZERO,
                status: if self.beta.is_nan() {
                    ClampStatus::NotANumber
                } else {
                    ClampStatus::OutOfRange
                },
            },
        }
    }
}

/// Newton iteration on the objective's first derivative, stopped once two
/// iterates are within `xi` of each other. Iterates are not projected.
pub fn newton_solve(co: &Coefficients, beta0: f64, xi: f64, max_iter: usize) -> NewtonOutcome {
    let mut beta = beta0;
    for iter in 1..=max_iter {
        let (d1, d2) = match co.derivatives(beta) {
            Ok(d) => d,
            Err(_) => return failed(beta, iter - 1, NewtonFailure::Singular),
        };
        if d2 == 0.0 {
            return failed(beta, iter, NewtonFailure::ZeroCurvature);
        }
        let next = beta - d1 / d2;
        if !next.is_finite() {
            return failed(beta, iter, NewtonFailure::NonFinite);
        }
        if (next - beta).abs() <= xi {
            return NewtonOutcome {
                beta: next,
                converged: true,
                iters: iter,
                failure: None,
            };
        }
        beta = next;
    }
    failed(beta, max_iter, NewtonFailure::MaxIterations)
}

fn failed(beta: f64, iters: usize, failure: NewtonFailure) -> NewtonOutcome {
    NewtonOutcome {
        beta,
        converged: false,
        iters,
        failure: Some(failure),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmrinConfig {
    /// Number of random starts.
    pub k: usize,
    pub xi: f64,
    pub max_iter: usize,
    pub seed: Seed,
}

impl EmrinConfig {
    pub fn new(k: usize, seed: Seed) -> Self {
        Self {
            k,
            xi: DEFAULT_XI,
            max_iter: DEFAULT_MAX_ITER,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidArgument("K must be >= 1".into()));
        }
        if !(self.xi > 0.0) || !self.xi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "xi must be positive, got {}",
                self.xi
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

/// One scored entry of a candidate set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    /// Value before clamping (a Newton end point or a cubic root).
    pub raw: f64,
    pub beta: PaFactor,
    pub status: ClampStatus,
    /// Objective used for selection.
    pub score: f64,
    pub iters: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub candidates: Vec<Candidate>,
    /// Objective evaluations spent on selection.
    pub evaluations: usize,
}

impl Diagnostics {
    pub fn total_iterations(&self) -> usize {
        self.candidates.iter().map(|c| c.iters).sum()
    }

    pub fn converged_count(&self) -> usize {
        self.candidates.iter().filter(|c| c.converged).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub beta_opt: PaFactor,
    /// Exact objective at `beta_opt`.
    pub snr: f64,
    pub rate_bits: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl SolveResult {
    fn scored(
        co: &Coefficients,
        beta: PaFactor,
        method: Method,
        diagnostics: Diagnostics,
    ) -> Result<Self> {
        let snr = co.objective(beta.value())?;
        Ok(Self {
            beta_opt: beta,
            snr,
            rate_bits: rate(snr.max(0.0))?,
            method,
            diagnostics,
        })
    }
}

/// Index of the largest score; ties go to the smallest beta.
fn best_index(candidates: &[Candidate]) -> usize {
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate().skip(1) {
        let b = &candidates[best];
        if c.score > b.score || (c.score == b.score && c.beta.value() < b.beta.value()) {
            best = i;
        }
    }
    best
}

fn newton_candidate(co: &Coefficients, beta0: f64, xi: f64, max_iter: usize) -> Result<Candidate> {
    let outcome = newton_solve(co, beta0, xi, max_iter);
    let clamped = outcome.candidate();
    Ok(Candidate {
        raw: outcome.beta,
        beta: clamped.beta,
        status: clamped.status,
        score: co.objective(clamped.beta.value())?,
        iters: outcome.iters,
        converged: outcome.converged,
    })
}

/// Multi-start Newton: `k` uniform starts on `[0, 1]`, each run to
/// convergence, clamped, and the best clamped end point kept.
pub fn emrin(co: &Coefficients, cfg: &EmrinConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let mut stream = cfg.seed.stream();
    let candidates = (0..cfg.k)
        .map(|_| newton_candidate(co, stream.uniform(), cfg.xi, cfg.max_iter))
        .collect::<Result<Vec<_>>>()?;
    let best = candidates[best_index(&candidates)].beta;
    let diagnostics = Diagnostics {
        evaluations: candidates.len(),
        candidates,
    };
    SolveResult::scored(co, best, Method::Emrin, diagnostics)
}

/// Single-start Newton baseline.
pub fn newton(co: &Coefficients, beta0: f64, xi: f64, max_iter: usize) -> Result<SolveResult> {
    let candidate = newton_candidate(co, beta0, xi, max_iter)?;
    let diagnostics = Diagnostics {
        candidates: vec![candidate],
        evaluations: 1,
    };
    SolveResult::scored(co, candidate.beta, Method::Newton, diagnostics)
}

/// Taylor-approximated numerator `l b^3 + m b^2 + n b` and the cubic
/// `p b^3 + q b^2 + r b + s` whose roots are its stationary points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoeffs {
    pub l: f64,
    pub m: f64,
    pub n: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
}

impl CubicCoeffs {
    pub fn new(co: &Coefficients) -> Result<Self> {
        if !(co.f > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "coefficient f must be positive, got {:e}",
                co.f
            )));
        }
        let sqrt_f = co.f.sqrt();
        let l = co.c * co.d * sqrt_f / co.f;
        let m = co.a + co.c * co.e * sqrt_f / co.f;
        let n = co.b + 2.0 * co.c * sqrt_f;
        Ok(Self {
            l,
            m,
            n,
            p: 2.0 * co.g * l,
            q: m * co.g + 3.0 * l * co.h,
            r: 2.0 * m * co.h,
            s: n * co.h,
        })
    }

    pub fn roots(&self) -> Vec<f64> {
        solve_cubic(self.p, self.q, self.r, self.s)
    }
}

/// Approximate objective `(l b^3 + m b^2 + n b) / (g b + h)`.
pub fn approx_g2(cc: &CubicCoeffs, co: &Coefficients, beta: PaFactor) -> f64 {
    approx_value(cc, co, beta.value())
}

fn approx_value(cc: &CubicCoeffs, co: &Coefficients, b: f64) -> f64 {
    (((cc.l * b + cc.m) * b + cc.n) * b) / (co.g * b + co.h)
}

/// Real roots of `p x^3 + q x^2 + r x + s`, ascending.
///
/// Cardano's formula on the depressed cubic, evaluated in complex arithmetic
/// so one code path covers both the one-real-root and the three-real-root
/// case. Roots with a relative imaginary part above 1e-8 are dropped and each
/// surviving root gets Newton polishing on the original polynomial. Lower
/// degrees fall back to the quadratic and linear formulas; the zero
/// polynomial has no roots.
pub fn solve_cubic(p: f64, q: f64, r: f64, s: f64) -> Vec<f64> {
    let mut roots = if p == 0.0 {
        solve_quadratic(q, r, s)
    } else {
        cardano(p, q, r, s)
    };
    for x in roots.iter_mut() {
        *x = polish(p, q, r, s, *x);
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    roots.dedup();
    roots
}

fn cardano(p: f64, q: f64, r: f64, s: f64) -> Vec<f64> {
    let shift = -q / (3.0 * p);
    let t = (3.0 * p * r - q * q) / (9.0 * p * p);
    let u = (27.0 * p * p * s - 9.0 * p * q * r + 2.0 * q * q * q) / (54.0 * p * p * p);

    // y^3 + 3 t y + 2 u = 0 with y = x - shift.
    let eta = Complex64::new(u * u + t * t * t, 0.0).sqrt();
    let minus_u = Complex64::new(-u, 0.0);
    // Take the branch of larger magnitude to avoid cancellation.
    let w = if (minus_u + eta).norm() >= (minus_u - eta).norm() {
        minus_u + eta
    } else {
        minus_u - eta
    };
    let c1 = w.cbrt();
    if c1.norm() == 0.0 {
        return vec![shift];
    }
    let c2 = -t / c1;

    let omega = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
    let omega2 = omega * omega;
    [c1 + c2, omega * c1 + omega2 * c2, omega2 * c1 + omega * c2]
        .into_iter()
        .map(|y| y + shift)
        .filter(|z| z.im.abs() <= COMPLEX_ROOT_TOL * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .collect()
}

fn solve_quadratic(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { Vec::new() } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a).abs();
        return if im <= COMPLEX_ROOT_TOL * (1.0 + re.abs()) {
            vec![re]
        } else {
            Vec::new()
        };
    }
    let k = -0.5 * (b + disc.sqrt().copysign(b));
    if k == 0.0 {
        return vec![0.0];
    }
    vec![k / a, c / k]
}

/// Cubic value by compensated Horner: each step's rounding error is
/// recovered exactly and accumulated, giving roughly twice the precision.
fn eval_compensated(c: [f64; 4], x: f64) -> f64 {
    let mut acc = c[0];
    let mut err = 0.0f64;
    for &coef in &c[1..] {
        let prod = acc * x;
        let prod_err = acc.mul_add(x, -prod);
        let sum = prod + coef;
        let z = sum - prod;
        let sum_err = (prod - (sum - z)) + (coef - z);
        err = err.mul_add(x, prod_err + sum_err);
        acc = sum;
    }
    acc + err
}

fn polish(p: f64, q: f64, r: f64, s: f64, mut x: f64) -> f64 {
    let eval = |x: f64| eval_compensated([p, q, r, s], x);
    let mut residual = eval(x).abs();
    for _ in 0..8 {
        let slope = (3.0 * p * x + 2.0 * q) * x + r;
        if slope == 0.0 || residual == 0.0 {
            break;
        }
        let mut next = x - eval(x) / slope;
        if next == x {
            // Newton step below one ulp; try the neighbour toward the root.
            next = if eval(x) / slope > 0.0 {
                x.next_down()
            } else {
                x.next_up()
            };
        }
        let next_residual = eval(next).abs();
        if !(next_residual < residual) {
            break;
        }
        x = next;
        residual = next_residual;
    }
    x
}

/// Closed-form strategy: maximize the Taylor approximation over its clamped
/// stationary points plus both endpoints, then report the exact objective.
pub fn tpa(co: &Coefficients) -> Result<SolveResult> {
    let cc = CubicCoeffs::new(co)?;
    let mut candidates = vec![boundary(&cc, co, 0.0)];
    for root in cc.roots() {
        let clamped = clamp_candidate(root);
        candidates.push(Candidate {
            raw: root,
            beta: clamped.beta,
            status: clamped.status,
            score: approx_value(&cc, co, clamped.beta.value()),
            iters: 0,
            converged: true,
        });
    }
    candidates.push(boundary(&cc, co, 1.0));
    let best = candidates[best_index(&candidates)].beta;
    let diagnostics = Diagnostics {
        evaluations: candidates.len(),
        candidates,
    };
    SolveResult::scored(co, best, Method::Tpa, diagnostics)
}

fn boundary(cc: &CubicCoeffs, co: &Coefficients, beta: f64) -> Candidate {
    Candidate {
        raw: beta,
        beta: PaFactor::new(beta).expect("endpoint"),
        status: ClampStatus::InRange,
        score: approx_value(cc, co, beta),
        iters: 0,
        converged: true,
    }
}

/// Grid points `0, step, 2 step, ...`, always ending at exactly 1.
pub fn beta_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "grid step must lie in (0, 0.5], got {step}"
        )));
    }
    let count = (1.0 / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=count).map(|k| (k as f64 * step).min(1.0)).collect();
    if *grid.last().expect("non-empty") < 1.0 - 1e-12 {
        grid.push(1.0);
    } else {
        *grid.last_mut().expect("non-empty") = 1.0;
    }
    Ok(grid)
}

/// Grid search benchmark; the first (smallest) maximizer wins ties.
pub fn exhaustive_search(co: &Coefficients, step: f64) -> Result<SolveResult> {
    let grid = beta_grid(step)?;
    let mut best = (0.0, f64::NEG_INFINITY);
    for &b in &grid {
        let value = co.objective(b)?;
        if value > best.1 {
            best = (b, value);
        }
    }
    let diagnostics = Diagnostics {
        candidates: Vec::new(),
        evaluations: grid.len(),
    };
    SolveResult::scored(co, PaFactor::new(best.0)?, Method::Es, diagnostics)
}

pub fn fixed_pa(co: &Coefficients, beta: PaFactor) -> Result<SolveResult> {
    let diagnostics = Diagnostics {
        candidates: Vec::new(),
        evaluations: 1,
    };
    SolveResult::scored(co, beta, Method::Fixed, diagnostics)
}
