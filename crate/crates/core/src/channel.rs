//! Rayleigh channel draws under a log-distance path-loss model, and the fixed
//! transmit/reflect beamformers the power split is optimized for.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{
    dbm_to_watt, sample_circular_gaussian, ComplexMatrix, ComplexVector, SeedStream,
};

pub type Point = [f64; 3];

/// Gain at the 1 m reference distance (-30 dB).
pub const DEFAULT_REF_GAIN: f64 = 1e-3;

/// Unit-norm tolerance for beamformers.
const UNIT_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub bs_pos: Point,
    pub irs_pos: Point,
    pub user_pos: Point,
    /// Path-loss exponent BS -> IRS.
    pub alpha_g: f64,
    /// Path-loss exponent IRS -> user.
    pub alpha_f: f64,
    /// Path-loss exponent BS -> user.
    pub alpha_h: f64,
    pub ref_gain: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            bs_pos: [0.0, 0.0, 0.0],
            irs_pos: [100.0, 0.0, 10.0],
            user_pos: [50.0, 30.0, 0.0],
            alpha_g: 2.1,
            alpha_f: 2.1,
            alpha_h: 4.0,
            ref_gain: DEFAULT_REF_GAIN,
        }
    }
}

impl Geometry {
    pub fn validate(&self) -> Result<()> {
        for (name, alpha) in [
            ("alpha_g", self.alpha_g),
            ("alpha_f", self.alpha_f),
            ("alpha_h", self.alpha_h),
        ] {
            if !(alpha > 0.0) || !alpha.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {alpha}"
                )));
            }
        }
        if !(self.ref_gain > 0.0) || !self.ref_gain.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "ref_gain must be positive, got {}",
                self.ref_gain
            )));
        }
        let pts = [self.bs_pos, self.irs_pos, self.user_pos];
        if pts.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("positions must be finite".into()));
        }
        if distance(pts[0], pts[1]) == 0.0
            || distance(pts[0], pts[2]) == 0.0
            || distance(pts[1], pts[2]) == 0.0
        {
            return Err(Error::InvalidArgument(
                "node positions must be pairwise distinct".into(),
            ));
        }
        Ok(())
    }

    /// Average power gains `(G, f, h)` of the three links.
    pub fn link_gains(&self) -> Result<(f64, f64, f64)> {
        self.validate()?;
        Ok((
            path_loss(
                distance(self.bs_pos, self.irs_pos),
                self.alpha_g,
                self.ref_gain,
            )?,
            path_loss(
                distance(self.irs_pos, self.user_pos),
                self.alpha_f,
                self.ref_gain,
            )?,
            path_loss(
                distance(self.bs_pos, self.user_pos),
                self.alpha_h,
                self.ref_gain,
            )?,
        ))
    }
}

/// System dimensions and powers, all in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// BS antennas.
    pub m: usize,
    /// IRS elements.
    pub n: usize,
    pub p_max: f64,
    pub sigma_i_sq: f64,
    pub sigma_n_sq: f64,
}

impl SystemParams {
    pub fn new(m: usize, n: usize, p_max: f64, sigma_i_sq: f64, sigma_n_sq: f64) -> Result<Self> {
        let params = Self {
            m,
            n,
            p_max,
            sigma_i_sq,
            sigma_n_sq,
        };
        params.validate()?;
        Ok(params)
    }

    /// Builds params from dBm quantities.
    pub fn from_dbm(
        m: usize,
        n: usize,
        p_max_dbm: f64,
        sigma_i_dbm: f64,
        sigma_n_dbm: f64,
    ) -> Result<Self> {
        Self::new(
            m,
            n,
            dbm_to_watt(p_max_dbm)?,
            dbm_to_watt(sigma_i_dbm)?,
            dbm_to_watt(sigma_n_dbm)?,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidArgument(format!(
                "antenna and element counts must be >= 1 (M = {}, N = {})",
                self.m, self.n
            )));
        }
        for (name, x) in [
            ("p_max", self.p_max),
            ("sigma_i_sq", self.sigma_i_sq),
            ("sigma_n_sq", self.sigma_n_sq),
        ] {
            if !(x > 0.0) || !x.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {x}"
                )));
            }
        }
        Ok(())
    }
}

/// One channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// BS -> IRS, `N x M`.
    pub g: ComplexMatrix,
    /// IRS -> user, length `N` (the link is `f^H`).
    pub f: ComplexVector,
    /// BS -> user, length `M` (the link is `h^H`).
    pub h: ComplexVector,
}

impl ChannelSet {
    pub fn new(g: ComplexMatrix, f: ComplexVector, h: ComplexVector) -> Result<Self> {
        if g.rows() != f.len() {
            return Err(Error::DimensionMismatch {
                expected: g.rows(),
                got: f.len(),
            });
        }
        if g.cols() != h.len() {
            return Err(Error::DimensionMismatch {
                expected: g.cols(),
                got: h.len(),
            });
        }
        Ok(Self { g, f, h })
    }

    pub fn n(&self) -> usize {
        self.g.rows()
    }

    pub fn m(&self) -> usize {
        self.g.cols()
    }

    pub fn check_params(&self, params: &SystemParams) -> Result<()> {
        if self.n() != params.n {
            return Err(Error::DimensionMismatch {
                expected: params.n,
                got: self.n(),
            });
        }
        if self.m() != params.m {
            return Err(Error::DimensionMismatch {
                expected: params.m,
                got: self.m(),
            });
        }
        Ok(())
    }
}

/// Unit-norm transmit vector `v` and reflect direction `theta_tilde`.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformers {
    pub v: ComplexVector,
    pub theta_tilde: ComplexVector,
}

impl Beamformers {
    pub fn new(v: ComplexVector, theta_tilde: ComplexVector) -> Result<Self> {
        for (name, x) in [("v", &v), ("theta_tilde", &theta_tilde)] {
            let ns = x.norm_sq();
            if !((ns - 1.0).abs() <= UNIT_NORM_TOL) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must have unit norm, ||{name}||^2 = {ns}"
                )));
            }
        }
        Ok(Self { v, theta_tilde })
    }
}

pub fn distance(p1: Point, p2: Point) -> f64 {
    p1.iter()
        .zip(&p2)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// `ref_gain * d^-alpha`, defined from the 1 m reference distance outward.
pub fn path_loss(d: f64, alpha: f64, ref_gain: f64) -> Result<f64> {
    if !(d >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "distance {d} m is inside the 1 m reference distance"
        )));
    }
    Ok(ref_gain * d.powf(-alpha))
}

/// Draws `G`, `f`, `h` with i.i.d. circular Gaussian entries whose variances
/// are the link path losses. `G` is drawn row-major first, then `f`, then `h`.
pub fn sample_channels(
    geom: &Geometry,
    params: &SystemParams,
    stream: &mut SeedStream,
) -> Result<ChannelSet> {
    params.validate()?;
    let (var_g, var_f, var_h) = geom.link_gains()?;
    let g = sample_circular_gaussian(params.n * params.m, var_g, stream)?;
    let f = sample_circular_gaussian(params.n, var_f, stream)?;
    let h = sample_circular_gaussian(params.m, var_h, stream)?;
    ChannelSet::new(
        ComplexMatrix::new(params.n, params.m, g.as_slice().to_vec())?,
        f,
        h,
    )
}

/// Maximum-ratio transmission toward the direct link, and a uniform-magnitude
/// reflect vector whose phases line every cascaded term up with `h^H v`.
pub fn design_beamformers(ch: &ChannelSet) -> Result<Beamformers> {
    let v =
        ch.h.normalized()
            .ok_or_else(|| Error::DegenerateChannel("direct channel h is zero".into()))?;
    let direct = ch.h.hermitian_inner(&v)?;
    let target_phase = direct.arg();

    // Term i of theta^H diag(f^H) G v is conj(theta_i) conj(f_i) (Gv)_i.
    let gv = ch.g.matvec(&v)?;
    let amplitude = 1.0 / (ch.n() as f64).sqrt();
    let theta_tilde =
        ch.f.iter()
            .zip(gv.iter())
            .map(|(fi, gvi)| {
                let cascade = fi.conj() * gvi;
                let phase = if cascade == Complex64::new(0.0, 0.0) {
                    target_phase
                } else {
                    target_phase - cascade.arg()
                };
                // theta_i is the conjugate of the aligning coefficient.
                Complex64::from_polar(amplitude, phase).conj()
            })
            .collect();
    Beamformers::new(v, theta_tilde)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Seed;

    fn paper_params(n: usize) -> SystemParams {
        SystemParams::from_dbm(2, n, 30.0, -100.0, -100.0).unwrap()
    }

    #[test]
    fn distances_for_reference_layout() {
        let geo = Geometry::default();
        assert!((distance(geo.bs_pos, geo.irs_pos) - 10100f64.sqrt()).abs() < 1e-12);
        assert!((distance(geo.bs_pos, geo.irs_pos) - 100.4988).abs() < 1e-4);
        assert!((distance(geo.bs_pos, geo.user_pos) - 58.3095).abs() < 1e-4);
        assert_eq!(distance(geo.user_pos, geo.user_pos), 0.0);
    }

    #[test]
    fn path_loss_cases() {
        assert_eq!(path_loss(1.0, 3.3, 1e-3).unwrap(), 1e-3);
        let pl = path_loss(100.0, 2.1, 1e-3).unwrap();
        assert!((pl - 6.3096e-8).abs() < 1e-12);
        assert!(path_loss(200.0, 2.1, 1e-3).unwrap() < pl);
        assert!(path_loss(0.5, 2.0, 1e-3).is_err());
        assert!(path_loss(f64::NAN, 2.0, 1e-3).is_err());
    }

    #[test]
    fn geometry_validation() {
        assert!(Geometry::default().validate().is_ok());
        let mut geo = Geometry::default();
        geo.user_pos = geo.bs_pos;
        assert!(geo.validate().is_err());
        let mut geo = Geometry::default();
        geo.alpha_f = 0.0;
        assert!(geo.validate().is_err());
        let mut geo = Geometry::default();
        geo.ref_gain = -1.0;
        assert!(geo.validate().is_err());
    }

    #[test]
    fn params_validation() {
        assert!(SystemParams::new(0, 4, 1.0, 1e-13, 1e-13).is_err());
        assert!(SystemParams::new(2, 0, 1.0, 1e-13, 1e-13).is_err());
        assert!(SystemParams::new(2, 4, 0.0, 1e-13, 1e-13).is_err());
        assert!(SystemParams::new(2, 4, 1.0, 1e-13, -1.0).is_err());
    }

    #[test]
    fn sampled_dimensions_and_determinism() {
        let geo = Geometry::default();
        let params = paper_params(16);
        let ch = sample_channels(&geo, &params, &mut Seed(1).stream()).unwrap();
        assert_eq!((ch.g.rows(), ch.g.cols()), (16, 2));
        assert_eq!(ch.f.len(), 16);
        assert_eq!(ch.h.len(), 2);
        let again = sample_channels(&geo, &params, &mut Seed(1).stream()).unwrap();
        assert_eq!(ch, again);
        let other = sample_channels(&geo, &params, &mut Seed(2).stream()).unwrap();
        assert_ne!(ch, other);
    }

    #[test]
    fn direct_link_variance_matches_path_loss() {
        let geo = Geometry::default();
        let params = paper_params(1);
        let expected = path_loss(3400f64.sqrt(), 4.0, DEFAULT_REF_GAIN).unwrap();
        let mut stream = Seed(2024).stream();
        let trials = 100_000;
        let mut acc = 0.0;
        for _ in 0..trials {
            let ch = sample_channels(&geo, &params, &mut stream).unwrap();
            acc += ch.h.norm_sq() / params.m as f64;
        }
        let mean = acc / trials as f64;
        assert!(
            (mean / expected - 1.0).abs() <= 0.03,
            "mean {mean:e} vs {expected:e}"
        );
    }

    #[test]
    fn beamformers_are_unit_norm_and_aligned() {
        let geo = Geometry::default();
        for n in [1, 3, 16, 64] {
            let params = paper_params(n);
            for seed in 0..20 {
                let ch = sample_channels(&geo, &params, &mut Seed(seed).stream()).unwrap();
                let bf = design_beamformers(&ch).unwrap();
                assert!((bf.v.norm_sq() - 1.0).abs() <= 1e-12);
                assert!((bf.theta_tilde.norm_sq() - 1.0).abs() <= 1e-12);

                let gv = ch.g.matvec(&bf.v).unwrap();
                let direct = ch.h.hermitian_inner(&bf.v).unwrap();
                for i in 0..n {
                    let term = bf.theta_tilde[i].conj() * ch.f[i].conj() * gv[i];
                    let aligned = term * direct.conj();
                    assert!(aligned.re >= 0.0);
                    assert!(aligned.im.abs() <= 1e-9 * aligned.norm());
                }
            }
        }
    }

    #[test]
    fn design_is_deterministic() {
        let ch = sample_channels(
            &Geometry::default(),
            &paper_params(8),
            &mut Seed(4).stream(),
        )
        .unwrap();
        assert_eq!(
            design_beamformers(&ch).unwrap(),
            design_beamformers(&ch).unwrap()
        );
    }

    #[test]
    fn zero_direct_channel_is_degenerate() {
        let ch = ChannelSet::new(
            ComplexMatrix::identity(2),
            ComplexVector::from_real(&[1.0, 1.0]),
            ComplexVector::zeros(2),
        )
        .unwrap();
        assert!(matches!(
            design_beamformers(&ch),
            Err(Error::DegenerateChannel(_))
        ));
    }

    #[test]
    fn beamformer_norm_is_enforced() {
        let v = ComplexVector::from_real(&[1.0, 1.0]);
        let t = ComplexVector::from_real(&[1.0]);
        assert!(Beamformers::new(v, t).is_err());
    }
}
