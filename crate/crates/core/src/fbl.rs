//! Finite-blocklength privacy parameters for channel synthesis at a fixed rate.
//!
//! For a rate R above I(X;Y) the synthesis error decays like
//! `K e^{-n rho* (R - I_{1/(1-rho*)})}` (with an `n^{-(1-rho*)/2}` prefactor
//! when the optimiser is interior), and the synthesized mechanism is
//! `(epsilon, delta + 2 (e^epsilon + 1) a Delta_n)`-LDP.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discrete::JointPmf;
use crate::error::{Error, Result};
use crate::gaussian::{self, GaussianJoint};
use crate::quadrature::{integrate, QuadratureSpec, Tolerance};
use crate::special::std_normal_pdf;

/// Sources whose Sibson alpha-mutual information can be evaluated.
pub trait InfoDensitySource {
    fn mutual_information(&self) -> Result<f64>;

    /// I_alpha(X;Y) = alpha/(alpha-1) ln E_Y[ E_X[ e^{alpha i(X,Y)} ]^{1/alpha} ]
    /// with X and Y drawn independently from their marginals.
    fn alpha_mutual_information(&self, alpha: f64) -> Result<f64>;
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("alpha must be a finite value > 1, got {alpha}")));
    }
    Ok(())
}

// The defining expression rewritten around its alpha -> 1 limit:
// with L(y) = ln E_X[e^{alpha i}] = ln1p(E_{X|Y=y}[expm1((alpha-1) i)]),
// I_alpha = alpha/(alpha-1) ln1p(E_Y[expm1(L(Y)/alpha)]).
#[inline]
fn finish_alpha(alpha: f64, outer: f64) -> f64 {
    alpha / (alpha - 1.0) * outer.ln_1p()
}

/// A finite joint pmf viewed as an information-density source.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSource {
    joint: JointPmf,
    px: Vec<f64>,
    py: Vec<f64>,
}

impl DiscreteSource {
    pub fn new(joint: JointPmf) -> Self {
        let px = joint.x_marginal();
        let py = joint.y_marginal();
        DiscreteSource { joint, px, py }
    }

    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    /// ln Q(x, y) / (P(x) P(y)).
    pub fn info_density(&self, x: usize, y: usize) -> Result<f64> {
        let k = self.joint.k();
        if x >= k || y >= k {
            return Err(Error::Support(format!("({x}, {y}) outside a {k} x {k} alphabet")));
        }
        let q = self.joint.get(x, y);
        if q <= 0.0 {
            return Err(Error::Support(format!("Q({x}, {y}) = 0")));
        }
        Ok((q / (self.px[x] * self.py[y])).ln())
    }
}

impl InfoDensitySource for DiscreteSource {
    fn mutual_information(&self) -> Result<f64> {
        Ok(crate::discrete::mutual_information_discrete(&self.joint))
    }

    fn alpha_mutual_information(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        let k = self.joint.k();
        let mut outer = 0.0;
        for y in 0..k {
            let py = self.py[y];
            if py <= 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for x in 0..k {
                let q = self.joint.get(x, y);
                if q > 0.0 {
                    let density = (q / (self.px[x] * py)).ln();
                    inner += q / py * ((alpha - 1.0) * density).exp_m1();
                }
            }
            outer += py * (inner.ln_1p() / alpha).exp_m1();
        }
        Ok(finish_alpha(alpha, outer))
    }
}

/// The clipped-Gaussian mechanism viewed as an information-density source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSource {
    pub joint: GaussianJoint,
    /// Integration settings for I(X;Y) and for the outer alpha-MI integral.
    pub quad: QuadratureSpec,
    /// Relative tolerance of the inner integral over x.
    pub inner_tol: f64,
    /// Relative tolerance of the outer integral over y.
    pub outer_tol: f64,
}

impl GaussianSource {
    pub fn new(joint: GaussianJoint) -> Self {
        GaussianSource {
            joint,
            quad: QuadratureSpec {
                abs_tol: 1e-9,
                ..QuadratureSpec::default()
            },
            inner_tol: 1e-8,
            outer_tol: 1e-7,
        }
    }

    fn ln_conditional(&self, x: f64, y: f64) -> f64 {
        let sz = self.joint.sigma_z();
        let z = (y - x) / sz;
        -0.5 * z * z - (sz * (2.0 * std::f64::consts::PI).sqrt()).ln()
    }

    /// ln p(y | x) / p_Y(y) for x in [-C, C].
    pub fn info_density(&self, x: f64, y: f64) -> Result<f64> {
        let c = self.joint.trunc.clip_c;
        if !(x.abs() <= c) || !y.is_finite() {
            return Err(Error::Support(format!("x = {x} outside [-{c}, {c}] or y = {y} not finite")));
        }
        let py = gaussian::output_pdf(&self.joint, y);
        if py <= 0.0 {
            return Err(Error::Support(format!("p_Y({y}) underflows")));
        }
        Ok(self.ln_conditional(x, y) - py.ln())
    }

    fn half_width(&self) -> f64 {
        self.quad.half_width_in_sigmas * self.joint.sigma_y()
    }

    /// E[i(X, Y)] under the joint law, by nested quadrature; equals I(X;Y).
    pub fn expected_info_density(&self) -> Result<f64> {
        let c = self.joint.trunc.clip_c;
        let t = self.joint.trunc;
        let inner = |y: f64| -> Result<f64> {
            let py = gaussian::output_pdf(&self.joint, y);
            if py <= 0.0 {
                return Ok(0.0);
            }
            let lpy = py.ln();
            let r = integrate(
                |x| {
                    let w = t.pdf(x) * std_normal_pdf((y - x) / self.joint.sigma_z()) / self.joint.sigma_z();
                    w * (self.ln_conditional(x, y) - lpy)
                },
                -c,
                c,
                &[],
                Tolerance { abs: 1e-14, rel: self.inner_tol },
                self.quad.max_evals,
            )?;
            Ok(r.value)
        };
        nested_outer(inner, self.half_width(), c, Tolerance { abs: 1e-12, rel: self.outer_tol }, self.quad.max_evals)
    }
}

fn nested_outer<F>(inner: F, half: f64, c: f64, tol: Tolerance, max_evals: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure = std::cell::RefCell::new(None);
    let r = integrate(
        |y| match inner(y) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        -half,
        half,
        &[-c, 0.0, c],
        tol,
        max_evals,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(r.value)
}

impl InfoDensitySource for GaussianSource {
    fn mutual_information(&self) -> Result<f64> {
        gaussian::mutual_information(&self.joint, &self.quad)
    }

    fn alpha_mutual_information(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        let c = self.joint.trunc.clip_c;
        let t = self.joint.trunc;
        let sz = self.joint.sigma_z();
        let divergence = |reason: String| Error::Divergence { alpha, reason };

        let integrand_over_y = |y: f64| -> Result<f64> {
            let py = gaussian::output_pdf(&self.joint, y);
            if py <= 0.0 {
                return Ok(0.0);
            }
            let lpy = py.ln();
            let inner = integrate(
                |x| {
                    let posterior = t.pdf(x) * std_normal_pdf((y - x) / sz) / (sz * py);
                    posterior * ((alpha - 1.0) * (self.ln_conditional(x, y) - lpy)).exp_m1()
                },
                -c,
                c,
                &[],
                Tolerance {
                    abs: 1e-8 * (alpha - 1.0) * 1e-6,
                    rel: self.inner_tol,
                },
                self.quad.max_evals,
            )
            .map_err(|e| divergence(format!("inner integral at y = {y}: {e}")))?;
            let v = py * (inner.value.ln_1p() / alpha).exp_m1();
            if !v.is_finite() {
                return Err(divergence(format!("non-finite inner expectation at y = {y}")));
            }
            Ok(v)
        };

        let outer = nested_outer(
            integrand_over_y,
            self.half_width(),
            c,
            Tolerance {
                abs: 1e-7 * (alpha - 1.0) * 1e-6,
                rel: self.outer_tol,
            },
            self.quad.max_evals,
        )
        .map_err(|e| match e {
            Error::Quadrature { .. } => divergence(format!("outer integral: {e}")),
            other => other,
        })?;
        Ok(finish_alpha(alpha, outer))
    }
}

/// Either kind of source, for callers that pick one at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum InfoSource {
    Discrete(DiscreteSource),
    Gaussian(GaussianSource),
}

impl InfoDensitySource for InfoSource {
    fn mutual_information(&self) -> Result<f64> {
        match self {
            InfoSource::Discrete(s) => s.mutual_information(),
            InfoSource::Gaussian(s) => s.mutual_information(),
        }
    }

    fn alpha_mutual_information(&self, alpha: f64) -> Result<f64> {
        match self {
            InfoSource::Discrete(s) => s.alpha_mutual_information(alpha),
            InfoSource::Gaussian(s) => s.alpha_mutual_information(alpha),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoBranch {
    /// The optimiser sits on the boundary rho = 1/2.
    Half,
    Interior,
}

/// Tolerance in rho for the golden-section search and the boundary test.
pub const RHO_TOL: f64 = 1e-6;
const COARSE_GRID: usize = 32;
/// Geometric refinements below the first coarse point.
const FINE_GRID: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoStar {
    pub rho_star: f64,
    /// rho* (R - I_{1/(1-rho*)}), nats.
    pub exponent: f64,
    pub branch: RhoBranch,
    pub rate: f64,
    pub mutual_information: f64,
}

/// The error-exponent objective g(rho) = rho (R - I_{1/(1-rho)}).
pub fn exponent_objective<S: InfoDensitySource + ?Sized>(src: &S, rate: f64, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho <= 0.5) {
        return Err(Error::domain(format!("rho must lie in (0, 1/2], got {rho}")));
    }
    Ok(rho * (rate - src.alpha_mutual_information(1.0 / (1.0 - rho))?))
}

/// Maximises g over (0, 1/2]: a 32-point pre-scan, then golden-section
/// refinement in the bracket around the best grid point.
///
/// When g is non-positive on the whole pre-scan the search continues on a
/// geometric grid toward 0, since g > 0 near 0 whenever R > I.
pub fn rho_star<S: InfoDensitySource + Sync + ?Sized>(src: &S, rate: f64) -> Result<RhoStar> {
    let mi = src.mutual_information()?;
    if !(rate > mi) {
        return Err(Error::Rate {
            rate,
            mutual_information: mi,
        });
    }
    let coarse: Vec<f64> = (1..=COARSE_GRID).map(|i| 0.5 * i as f64 / COARSE_GRID as f64).collect();
    let (grid, values) = match scan(src, rate, coarse)? {
        Some(found) => found,
        // R barely above I: g can be positive only below the first coarse point
        None => {
            let fine: Vec<f64> = (0..=FINE_GRID as i32).rev().map(|j| 0.5 / COARSE_GRID as f64 * 0.5f64.powi(j)).collect();
            scan(src, rate, fine)?.ok_or(Error::Rate {
                rate,
                mutual_information: mi,
            })?
        }
    };
    let (best_idx, &best_val) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");

    let lo = if best_idx == 0 { 0.5 * grid[0] } else { grid[best_idx - 1] };
    let hi = grid.get(best_idx + 1).copied().unwrap_or(grid[best_idx]).min(0.5);
    let (mut rho, mut g) = golden_max(|r| exponent_objective(src, rate, r), lo, hi, RHO_TOL.min(0.5 * lo))?;
    if best_val > g {
        rho = grid[best_idx];
        g = best_val;
    }

    let branch = if 0.5 - rho <= RHO_TOL {
        let g_half = exponent_objective(src, rate, 0.5)?;
        if g_half >= g - 1e-12 {
            rho = 0.5;
            g = g_half;
        }
        RhoBranch::Half
    } else {
        RhoBranch::Interior
    };
    Ok(RhoStar {
        rho_star: rho,
        exponent: g,
        branch,
        rate,
        mutual_information: mi,
    })
}

type Scan = (Vec<f64>, Vec<f64>);

/// Evaluates g on `grid` in parallel; `None` when no point is positive.
fn scan<S: InfoDensitySource + Sync + ?Sized>(src: &S, rate: f64, grid: Vec<f64>) -> Result<Option<Scan>> {
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&rho| exponent_objective(src, rate, rho))
        .collect::<Result<_>>()?;
    Ok(values.iter().any(|&v| v > 0.0).then_some((grid, values)))
}

fn golden_max<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

impl RhoStar {
    /// ln Delta_n for blocklength n and constant K.
    pub fn ln_delta_cap(&self, n: u64, k_const: f64) -> f64 {
        let n = n as f64;
        match self.branch {
            RhoBranch::Half => k_const.ln() - n * self.exponent,
            RhoBranch::Interior => {
                k_const.ln() - 0.5 * (1.0 - self.rho_star) * n.ln() - n * self.exponent
            }
        }
    }

    pub fn delta_cap(&self, n: u64, k_const: f64) -> f64 {
        self.ln_delta_cap(n, k_const).exp()
    }
}

/// delta_n = delta + 2 (e^epsilon + 1) a Delta_n.
pub fn achieved_delta(delta: f64, epsilon: f64, a: f64, delta_cap: f64) -> f64 {
    delta + 2.0 * (epsilon.exp() + 1.0) * a * delta_cap
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FblConfig {
    /// Rate in nats per symbol.
    pub rate_r: f64,
    pub n: u64,
    pub epsilon: f64,
    pub delta: f64,
    /// Markov-inequality slack, a > 1.
    pub a: f64,
    /// The unspecified constant K of the TV bound.
    #[serde(default = "default_k")]
    pub k_const: f64,
}

fn default_k() -> f64 {
    1.0
}

impl FblConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::domain("blocklength n must be at least 1"));
        }
        if !(self.a > 1.0 && self.a.is_finite()) {
            return Err(Error::domain(format!("slack a must exceed 1, got {}", self.a)));
        }
        if !(self.k_const > 0.0 && self.k_const.is_finite()) {
            return Err(Error::domain(format!("K must be positive, got {}", self.k_const)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::domain(format!("epsilon must be non-negative, got {}", self.epsilon)));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::domain(format!("delta must lie in [0, 1], got {}", self.delta)));
        }
        if !(self.rate_r.is_finite()) {
            return Err(Error::domain("rate must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FblResult {
    pub n: u64,
    pub rho_star: f64,
    pub exponent: f64,
    pub branch: RhoBranch,
    pub delta_cap_n: f64,
    pub ln_delta_cap_n: f64,
    pub delta_n: f64,
}

fn fbl_result(rs: &RhoStar, cfg: &FblConfig, n: u64) -> FblResult {
    let ln_cap = rs.ln_delta_cap(n, cfg.k_const);
    let cap = ln_cap.exp();
    FblResult {
        n,
        rho_star: rs.rho_star,
        exponent: rs.exponent,
        branch: rs.branch,
        delta_cap_n: cap,
        ln_delta_cap_n: ln_cap,
        delta_n: achieved_delta(cfg.delta, cfg.epsilon, cfg.a, cap),
    }
}

/// Delta_n and delta_n at the configured blocklength.
pub fn delta_n_bound<S: InfoDensitySource + Sync + ?Sized>(src: &S, cfg: &FblConfig) -> Result<FblResult> {
    cfg.validate()?;
    let rs = rho_star(src, cfg.rate_r)?;
    Ok(fbl_result(&rs, cfg, cfg.n))
}

/// Same as [`delta_n_bound`] for several blocklengths, sharing one rho* search.
pub fn delta_n_curve<S: InfoDensitySource + Sync + ?Sized>(
    src: &S,
    cfg: &FblConfig,
    ns: &[u64],
) -> Result<Vec<FblResult>> {
    cfg.validate()?;
    if ns.contains(&0) {
        return Err(Error::domain("blocklengths must be at least 1"));
    }
    let rs = rho_star(src, cfg.rate_r)?;
    Ok(ns.iter().map(|&n| fbl_result(&rs, cfg, n)).collect())
}
