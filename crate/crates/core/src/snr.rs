//! User SNR as a function of the power-split factor `beta`.
//!
//! With the beamformers fixed, the SNR reduces to
//!
//! ```text
//!          a b^2 + b b + 2 c b sqrt(d b^2 + e b + f)
//! g(b) = ---------------------------------------------
//!                        g b + h
//! ```
//!
//! (`b` = beta). [`compute_coefficients`] builds the eight scalars from the
//! channel and beamformers; [`snr_direct`] evaluates the SNR from the signal
//! model itself and serves as a cross-check of the reduction.

use num_complex::Complex64;

use crate::channel::{Beamformers, ChannelSet, SystemParams};
use crate::error::{Error, Result};

/// Radicand values down to `-RADICAND_DUST * (|d| + |e| + |f|)` are rounding
/// noise and clamp to zero.
pub const RADICAND_DUST: f64 = 1e-12;

/// Fraction of the total power granted to the base station.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PaFactor(f64);

impl PaFactor {
    pub const ZERO: PaFactor = PaFactor(0.0);
    pub const ONE: PaFactor = PaFactor(1.0);

    pub fn new(beta: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&beta) {
            Ok(Self(beta))
        } else {
            Err(Error::InvalidArgument(format!(
                "PA factor must lie in [0, 1], got {beta}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Quadratic forms of the channel seen through the fixed beamformers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkTerms {
    /// `|h^H v|^2`
    pub direct_gain: f64,
    /// `||theta^H diag(G v)||^2`, the power reaching the IRS per unit BS power.
    pub incident_gain: f64,
    /// `|theta^H diag(f^H) G v|^2`
    pub cascade_gain: f64,
    /// `||theta^H diag(f^H)||^2`, gain of the amplified IRS noise at the user.
    pub irs_noise_gain: f64,
    /// `Re{theta^H diag(f^H) G v v^H h}`
    pub cross: f64,
}

impl LinkTerms {
    pub fn new(ch: &ChannelSet, bf: &Beamformers) -> Result<Self> {
        let gv = ch.g.matvec(&bf.v)?;
        if bf.theta_tilde.len() != ch.n() {
            return Err(Error::DimensionMismatch {
                expected: ch.n(),
                got: bf.theta_tilde.len(),
            });
        }
        let direct = ch.h.hermitian_inner(&bf.v)?;
        let mut incident_gain = 0.0;
        let mut irs_noise_gain = 0.0;
        let mut cascade = Complex64::new(0.0, 0.0);
        for ((theta, fi), gvi) in bf.theta_tilde.iter().zip(ch.f.iter()).zip(gv.iter()) {
            let weight = theta.norm_sqr();
            incident_gain += weight * gvi.norm_sqr();
            irs_noise_gain += weight * fi.norm_sqr();
            cascade += theta.conj() * fi.conj() * gvi;
        }
        Ok(Self {
            direct_gain: direct.norm_sqr(),
            incident_gain,
            cascade_gain: cascade.norm_sqr(),
            irs_noise_gain,
            // v^H h = conj(h^H v)
            cross: (cascade * direct.conj()).re,
        })
    }
}

/// The eight scalars of the reduced objective. `g` and `h` are the
/// denominator coefficients, not the objective or the channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
}

pub fn compute_coefficients(
    ch: &ChannelSet,
    bf: &Beamformers,
    params: &SystemParams,
) -> Result<Coefficients> {
    params.validate()?;
    ch.check_params(params)?;
    let t = LinkTerms::new(ch, bf)?;
    Ok(Coefficients::from_terms(&t, params))
}

impl Coefficients {
    pub fn from_terms(t: &LinkTerms, params: &SystemParams) -> Self {
        let p = params.p_max;
        let p2 = p * p;
        let (si, sn) = (params.sigma_i_sq, params.sigma_n_sq);
        Self {
            a: p2 * t.direct_gain * t.incident_gain - p2 * t.cascade_gain,
            b: p2 * t.cascade_gain + p * t.direct_gain * si,
            c: p * t.cross,
            d: -p2 * t.incident_gain,
            e: p2 * t.incident_gain - si * p,
            f: p * si,
            g: sn * p * t.incident_gain - si * p * t.irs_noise_gain,
            h: si * p * t.irs_noise_gain + sn * si,
        }
    }

    /// Checks `f > 0`, `d <= 0`, `h > 0` and `d + e + f = 0`.
    pub fn check(&self) -> Result<()> {
        let fields = [
            self.a, self.b, self.c, self.d, self.e, self.f, self.g, self.h,
        ];
        if fields.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        if !(self.f > 0.0) || !(self.h > 0.0) || self.d > 0.0 {
            return Err(Error::InvalidArgument(format!(
                "coefficient signs violated: d = {:e}, f = {:e}, h = {:e}",
                self.d, self.f, self.h
            )));
        }
        let scale = self.d.abs().max(self.e.abs()).max(self.f.abs());
        if (self.d + self.e + self.f).abs() > 1e-9 * scale {
            return Err(Error::InvalidArgument(format!(
                "d + e + f = {:e} is not zero",
                self.d + self.e + self.f
            )));
        }
        Ok(())
    }

    /// Raw radicand `d b^2 + e b + f`, evaluated as
    /// `(d + e + f) + (1 - b) * -(d (1 + b) + e)` so that it vanishes exactly
    /// at `b = 1` when `d + e + f` is rounding noise. The square root would
    /// otherwise amplify that noise into the objective near `b = 1`.
    fn radicand_raw(&self, beta: f64) -> f64 {
        let scale = self.d.abs() + self.e.abs() + self.f.abs();
        let mut at_one = self.d + self.e + self.f;
        if at_one.abs() <= RADICAND_DUST * scale {
            at_one = 0.0;
        }
        at_one - (1.0 - beta) * (self.d * (1.0 + beta) + self.e)
    }

    /// `d b^2 + e b + f`, with rounding dust clamped to zero.
    pub fn radicand(&self, beta: f64) -> Result<f64> {
        let r = self.radicand_raw(beta);
        if r >= 0.0 {
            Ok(r)
        } else if r >= -RADICAND_DUST * (self.d.abs() + self.e.abs() + self.f.abs()) {
            Ok(0.0)
        } else {
            Err(Error::NumericalDomain { beta, value: r })
        }
    }

    /// Exact objective at any real `beta` where the radicand is defined.
    pub fn objective(&self, beta: f64) -> Result<f64> {
        let root = self.radicand(beta)?.sqrt();
        let num = self.a * beta * beta + self.b * beta + 2.0 * self.c * beta * root;
        Ok(num / (self.g * beta + self.h))
    }

    /// First and second derivative of the objective.
    pub fn derivatives(&self, beta: f64) -> Result<(f64, f64)> {
        let Self {
            a,
            b,
            c,
            d,
            e,
            g,
            h,
            ..
        } = *self;
        let r = self.radicand_raw(beta);
        let den = g * beta + h;
        if !(r > 0.0) || den == 0.0 || !beta.is_finite() {
            return Err(Error::Singular { beta });
        }
        let root = r.sqrt();
        let dr = 2.0 * d * beta + e;

        // f1 = a g b^2 + q(b) / sqrt(R), q cubic
        let q = 2.0 * c * d * g * beta.powi(3)
            + (c * e * g + 2.0 * c * d * h) * beta * beta
            + c * e * h * beta;
        let dq =
            6.0 * c * d * g * beta * beta + 2.0 * (c * e * g + 2.0 * c * d * h) * beta + c * e * h;
        let f1 = a * g * beta * beta + q / root;
        let df1 = 2.0 * a * g * beta + dq / root - 0.5 * q * dr / (r * root);

        let f2 = 2.0 * a * h * beta + 2.0 * c * h * root + b * h;
        let df2 = 2.0 * a * h + c * h * dr / root;

        let first = (f1 + f2) / (den * den);
        let second = ((df1 + df2) * den - 2.0 * g * (f1 + f2)) / (den * den * den);
        Ok((first, second))
    }
}

pub fn g_exact(co: &Coefficients, beta: PaFactor) -> Result<f64> {
    co.objective(beta.value())
}

pub fn g_derivatives(co: &Coefficients, beta: PaFactor) -> Result<(f64, f64)> {
    co.derivatives(beta.value())
}

/// IRS amplification that spends exactly `(1 - beta) P_max` at the surface.
pub fn rho(
    beta: PaFactor,
    ch: &ChannelSet,
    bf: &Beamformers,
    params: &SystemParams,
) -> Result<f64> {
    let t = LinkTerms::new(ch, bf)?;
    Ok(rho_from_terms(beta.value(), &t, params))
}

fn rho_from_terms(beta: f64, t: &LinkTerms, params: &SystemParams) -> f64 {
    let p = params.p_max;
    ((1.0 - beta) * p / (beta * p * t.incident_gain + params.sigma_i_sq)).sqrt()
}

/// SNR evaluated from the received-signal model, without the reduction to
/// coefficients.
pub fn snr_direct(
    beta: PaFactor,
    ch: &ChannelSet,
    bf: &Beamformers,
    params: &SystemParams,
) -> Result<f64> {
    ch.check_params(params)?;
    let t = LinkTerms::new(ch, bf)?;
    let beta = beta.value();
    let rho = rho_from_terms(beta, &t, params);

    // Effective row channel rho theta^H diag(f^H) G + h^H, then applied to v.
    let (n, m) = (ch.n(), ch.m());
    let mut effective = Complex64::new(0.0, 0.0);
    for j in 0..m {
        let mut reflected = Complex64::new(0.0, 0.0);
        for i in 0..n {
            reflected += bf.theta_tilde[i].conj() * ch.f[i].conj() * ch.g.get(i, j);
        }
        effective += (rho * reflected + ch.h[j].conj()) * bf.v[j];
    }
    let signal = beta * params.p_max * effective.norm_sqr();
    let noise = params.sigma_i_sq * rho * rho * t.irs_noise_gain + params.sigma_n_sq;
    Ok(signal / noise)
}

/// Achievable rate `log2(1 + snr)` in bits per channel use.
pub fn rate(snr: f64) -> Result<f64> {
    if !(snr >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "SNR must be non-negative, got {snr}"
        )));
    }
    Ok(snr.ln_1p() / std::f64::consts::LN_2)
}
