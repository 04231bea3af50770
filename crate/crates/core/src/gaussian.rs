//! Corner points of the coordination–randomness region for a clipped Gaussian
//! source released through the Gaussian (epsilon, delta)-LDP mechanism.
//!
//! The source is X ~ N(0, sigma_x^2) truncated to [-C, C]; the receiver output is
//! Y = X + Z with Z ~ N(0, sigma_z^2) independent and
//! sigma_z^2 = 8 C^2 / epsilon^2 * ln(1.25 / delta).

use std::f64::consts::{E, PI, SQRT_2};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureSpec, Tolerance};
use crate::special::{erf, std_normal_cdf, std_normal_interval, std_normal_pdf, TruncGaussStats};

/// Log-density floor used in far tails.
const DENSITY_FLOOR: f64 = 1e-300;

/// Scenario parameters of the clipped-Gaussian mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianLdpConfig {
    pub sigma_x: f64,
    pub clip_c: f64,
    pub epsilon: f64,
    pub delta: f64,
}

impl GaussianLdpConfig {
    /// Configuration with the unit clip bound used for the reference table.
    pub fn unit_clip(sigma_x: f64, epsilon: f64, delta: f64) -> Self {
        GaussianLdpConfig {
            sigma_x,
            clip_c: 1.0,
            epsilon,
            delta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_x > 0.0 && self.sigma_x.is_finite()) {
            return Err(Error::domain(format!(
                "sigma_x must be positive, got {}",
                self.sigma_x
            )));
        }
        if !(self.delta < 1.0) {
            return Err(Error::domain(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        check_calibration_range(self.clip_c, self.epsilon, self.delta)
    }
}

fn check_calibration_range(clip_c: f64, epsilon: f64, delta: f64) -> Result<()> {
    if !(clip_c > 0.0 && clip_c.is_finite()) {
        return Err(Error::domain(format!("clip bound C must be positive, got {clip_c}")));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::domain(format!(
            "epsilon must satisfy 0 < epsilon <= 1 (validity range of the Gaussian-mechanism calibration), got {epsilon}"
        )));
    }
    if !(delta > 0.0 && delta < 1.25) {
        return Err(Error::domain(format!(
            "delta must satisfy 0 < delta < 1.25, got {delta}"
        )));
    }
    Ok(())
}

/// Noise variance 8 C^2 / epsilon^2 * ln(1.25 / delta) of the Gaussian mechanism.
///
/// `delta >= 1` still evaluates (the guarantee is vacuous there) and is only
/// rejected by [`GaussianLdpConfig::validate`].
pub fn calibrate_noise(clip_c: f64, epsilon: f64, delta: f64) -> Result<f64> {
    check_calibration_range(clip_c, epsilon, delta)?;
    Ok(8.0 * clip_c * clip_c / (epsilon * epsilon) * (1.25 / delta).ln())
}

/// Second-order statistics of the (clipped input, mechanism output) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianJoint {
    pub trunc: TruncGaussStats,
    pub sigma_z_sq: f64,
    pub sigma_y_sq: f64,
    /// Correlation coefficient sigma_trunc / sigma_y.
    pub rho: f64,
}

impl GaussianJoint {
    /// Builds the joint from explicit truncation statistics and noise variance.
    pub fn from_parts(trunc: TruncGaussStats, sigma_z_sq: f64) -> Result<Self> {
        if !(sigma_z_sq > 0.0 && sigma_z_sq.is_finite()) {
            return Err(Error::domain(format!(
                "noise variance must be positive, got {sigma_z_sq}"
            )));
        }
        let sigma_y_sq = trunc.var_trunc + sigma_z_sq;
        Ok(GaussianJoint {
            trunc,
            sigma_z_sq,
            sigma_y_sq,
            rho: (trunc.var_trunc / sigma_y_sq).sqrt(),
        })
    }

    pub fn sigma_z(&self) -> f64 {
        self.sigma_z_sq.sqrt()
    }

    pub fn sigma_y(&self) -> f64 {
        self.sigma_y_sq.sqrt()
    }

    /// Differential entropy of the noise, 0.5 ln(2 pi e sigma_z^2).
    pub fn noise_entropy(&self) -> f64 {
        0.5 * (2.0 * PI * E * self.sigma_z_sq).ln()
    }

    /// Density of the noise-free conditional, p(y | x) = phi_sigma_z(y - x).
    pub fn conditional_pdf(&self, y: f64, x: f64) -> f64 {
        let sz = self.sigma_z();
        std_normal_pdf((y - x) / sz) / sz
    }

    /// Density of Y = X + Z.
    pub fn output_pdf(&self, y: f64) -> f64 {
        output_pdf(self, y)
    }
}

/// Composes the truncation statistics and the noise calibration.
pub fn build_joint(cfg: &GaussianLdpConfig) -> Result<GaussianJoint> {
    cfg.validate()?;
    let trunc = TruncGaussStats::new(cfg.sigma_x, cfg.clip_c)?;
    let sigma_z_sq = calibrate_noise(cfg.clip_c, cfg.epsilon, cfg.delta)?;
    GaussianJoint::from_parts(trunc, sigma_z_sq)
}

/// Both rate-region corner quantities and the pieces of the WCI bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianRatePoint {
    /// Lower bound on Wyner's common information, nats (positive part applied).
    pub wci_lower: f64,
    /// I(X;Y), nats. `NaN` when only the WCI bound was requested.
    pub mutual_info: f64,
    pub h_joint: f64,
    pub h_joint_gaussian: f64,
    /// Common information of the jointly Gaussian pair with the same covariance.
    pub wci_gaussian: f64,
}

/// Lower bound on the Wyner common information of (X, Y).
///
/// Evaluates the closed form
/// `{0.5 ln(1 + 2 s_x / (s_y - s_x)) + ln(erf(b / sqrt 2) / sqrt(1 - 2 g)) - g}^+`
/// and cross-checks it against the decomposition
/// `C(X_g; Y_g) + h(X, Y) - h(X_g, Y_g)`; the two must agree to 1e-10.
pub fn wci_lower_bound(j: &GaussianJoint) -> Result<GaussianRatePoint> {
    let t = &j.trunc;
    let sx = t.sigma_trunc();
    let sy = j.sigma_y();
    let sz = j.sigma_z();
    let g = t.gamma_beta;
    let mass = erf(t.beta / SQRT_2);

    let direct = 0.5 * (1.0 + 2.0 * sx / (sy - sx)).ln() + (mass / (1.0 - 2.0 * g).sqrt()).ln() - g;

    let wci_gaussian = 0.5 * ((1.0 + j.rho) / (1.0 - j.rho)).ln();
    let h_joint = (2.0 * PI * E * t.sigma_x * mass * sz).ln() - g;
    let h_joint_gaussian = (2.0 * PI * E * sx * sz).ln();
    let decomposed = wci_gaussian + h_joint - h_joint_gaussian;

    if (direct - decomposed).abs() > 1e-10 {
        return Err(Error::domain(format!(
            "WCI bound self-check failed: closed form {direct} vs decomposition {decomposed}"
        )));
    }
    Ok(GaussianRatePoint {
        wci_lower: direct.max(0.0),
        mutual_info: f64::NAN,
        h_joint,
        h_joint_gaussian,
        wci_gaussian,
    })
}

/// Which closed form of p_Y to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdfForm {
    /// Exact convolution of the truncated Gaussian with the noise density.
    #[default]
    ConvolutionExact,
    /// Alternative closed form in terms of
    /// beta_bar = C / sigma_trunc^2 and m(y) = y / sigma_y. Kept for comparison.
    BetaBar,
}

/// Density of Y = X + Z at `y` (convolution-exact form).
///
/// With s^2 = sigma_x^2 + sigma_z^2 and m = sigma_x^2 y / s^2,
/// p_Y(y) = phi(y/s) / (s erf(beta/sqrt2)) * P(-C < m + tau N < C),
/// tau = sigma_x sigma_z / s.
pub fn output_pdf(j: &GaussianJoint, y: f64) -> f64 {
    let t = &j.trunc;
    let vx = t.sigma_x * t.sigma_x;
    let s2 = vx + j.sigma_z_sq;
    let s = s2.sqrt();
    let m = vx * y / s2;
    let tau = t.sigma_x * j.sigma_z() / s;
    std_normal_pdf(y / s) / (s * t.mass())
        * std_normal_interval((-t.clip_c - m) / tau, (t.clip_c - m) / tau)
}

/// Density of Y evaluated with the selected closed form.
pub fn output_pdf_with(j: &GaussianJoint, y: f64, form: PdfForm) -> f64 {
    match form {
        PdfForm::ConvolutionExact => output_pdf(j, y),
        PdfForm::BetaBar => {
            let sx = j.trunc.sigma_trunc();
            let sy = j.sigma_y();
            let sz = j.sigma_z();
            let beta_bar = j.trunc.clip_c / j.trunc.var_trunc;
            let m = y / sy;
            let upper = (beta_bar * j.sigma_y_sq - sx * y) / (sz * sy);
            let lower = -(beta_bar * j.sigma_y_sq + sx * y) / (sz * sy);
            std_normal_pdf(m) * (std_normal_cdf(upper) - std_normal_cdf(lower))
                / (erf(beta_bar / SQRT_2) * sy)
        }
    }
}

/// Entropy -E[ln p_Y(Y)] by adaptive quadrature on +-w sigma_y.
pub fn output_entropy(j: &GaussianJoint, quad: &QuadratureSpec, form: PdfForm) -> Result<f64> {
    quad.validate()?;
    let half = quad.half_width_in_sigmas * j.sigma_y();
    let integrand = |y: f64| {
        let p = output_pdf_with(j, y, form);
        -p * p.max(DENSITY_FLOOR).ln()
    };
    let r = integrate(
        integrand,
        -half,
        half,
        &[-j.trunc.clip_c, 0.0, j.trunc.clip_c],
        Tolerance::abs(quad.abs_tol),
        quad.max_evals,
    )?;
    Ok(r.value)
}

/// I(X;Y) = h(Y) - 0.5 ln(2 pi e sigma_z^2).
pub fn mutual_information(j: &GaussianJoint, quad: &QuadratureSpec) -> Result<f64> {
    mutual_information_with(j, quad, PdfForm::ConvolutionExact)
}

pub fn mutual_information_with(j: &GaussianJoint, quad: &QuadratureSpec, form: PdfForm) -> Result<f64> {
    Ok(output_entropy(j, quad, form)? - j.noise_entropy())
}

/// Evaluates both corner quantities for a configuration.
pub fn rate_point(cfg: &GaussianLdpConfig, quad: &QuadratureSpec) -> Result<GaussianRatePoint> {
    let j = build_joint(cfg)?;
    let mut point = wci_lower_bound(&j)?;
    point.mutual_info = mutual_information(&j, quad)?;
    Ok(point)
}

/// Box from which the random search draws (sigma_x, epsilon, delta).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRanges {
    pub sigma_x: (f64, f64),
    pub epsilon: (f64, f64),
    pub delta: (f64, f64),
    pub clip_c: f64,
}

impl Default for ParamRanges {
    fn default() -> Self {
        ParamRanges {
            sigma_x: (0.1, 0.7),
            epsilon: (0.1, 1.0),
            delta: (0.001, 0.01),
            clip_c: 1.0,
        }
    }
}

impl ParamRanges {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [
            ("sigma_x", self.sigma_x),
            ("epsilon", self.epsilon),
            ("delta", self.delta),
        ] {
            if !(lo <= hi && lo.is_finite() && hi.is_finite()) {
                return Err(Error::domain(format!("{name} range ({lo}, {hi}) is empty")));
            }
        }
        // endpoints must themselves be valid configurations
        GaussianLdpConfig {
            sigma_x: self.sigma_x.0,
            clip_c: self.clip_c,
            epsilon: self.epsilon.0,
            delta: self.delta.0,
        }
        .validate()?;
        GaussianLdpConfig {
            sigma_x: self.sigma_x.1,
            clip_c: self.clip_c,
            epsilon: self.epsilon.1,
            delta: self.delta.1,
        }
        .validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: u64,
    pub sigma_x: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub wci_lower: f64,
    pub mutual_info: f64,
    /// wci_lower / mutual_info
    pub ratio: f64,
    /// The WCI bound exceeds I(X;Y), i.e. it is the tighter of the two lower bounds.
    pub flagged: bool,
}

/// Generator for sweep row `index`: ChaCha8 keyed by `seed`, stream `index`.
pub fn row_rng(seed: u64, index: u64) -> ChaCha8Rng {
    crate::rng::stream_rng(seed, index)
}

/// Evaluates one configuration as a sweep row.
pub fn evaluate_row(index: u64, cfg: &GaussianLdpConfig, quad: &QuadratureSpec) -> Result<SweepRow> {
    let p = rate_point(cfg, quad)?;
    let ratio = p.wci_lower / p.mutual_info;
    Ok(SweepRow {
        index,
        sigma_x: cfg.sigma_x,
        epsilon: cfg.epsilon,
        delta: cfg.delta,
        wci_lower: p.wci_lower,
        mutual_info: p.mutual_info,
        ratio,
        flagged: p.wci_lower > p.mutual_info,
    })
}

/// Uniform random search over `ranges`; deterministic in `(seed, row index)`.
///
/// Rows are evaluated in parallel and returned in index order.
pub fn sweep(ranges: &ParamRanges, count: usize, seed: u64, quad: &QuadratureSpec) -> Result<Vec<SweepRow>> {
    if count == 0 {
        return Err(Error::domain("sweep count must be at least 1"));
    }
    ranges.validate()?;
    quad.validate()?;
    (0..count as u64)
        .into_par_iter()
        .map(|index| {
            let mut rng = row_rng(seed, index);
            let mut draw = |(lo, hi): (f64, f64)| lo + (hi - lo) * rng.random::<f64>();
            let sigma_x = draw(ranges.sigma_x);
            let epsilon = draw(ranges.epsilon);
            let delta = draw(ranges.delta);
            let cfg = GaussianLdpConfig {
                sigma_x,
                clip_c: ranges.clip_c,
                epsilon,
                delta,
            };
            evaluate_row(index, &cfg, quad)
        })
        .collect()
}
