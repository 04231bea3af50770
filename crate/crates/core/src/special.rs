//! Scalar special functions and statistics of the symmetrically truncated Gaussian.
//!
//! All entropies are in nats.

use std::f64::consts::{E, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 1/sqrt(2*pi)
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
#[inline]
pub fn std_normal_pdf(a: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * a * a).exp()
}

/// Standard normal distribution function, 0.5 * (1 + erf(a / sqrt 2)).
///
/// Evaluated through `erfc` on the lower tail so that tiny probabilities keep
/// full relative precision.
#[inline]
pub fn std_normal_cdf(a: f64) -> f64 {
    if a < 0.0 {
        0.5 * libm::erfc(-a / SQRT_2)
    } else {
        0.5 * (1.0 + libm::erf(a / SQRT_2))
    }
}

/// Upper tail 1 - Phi(a).
#[inline]
pub fn std_normal_sf(a: f64) -> f64 {
    std_normal_cdf(-a)
}

/// P(lo < Z < hi) for a standard normal Z, without cancellation in the tails.
pub fn std_normal_interval(lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if lo >= 0.0 {
        // both in the upper half: subtract upper tails
        std_normal_sf(lo) - std_normal_sf(hi)
    } else if hi <= 0.0 {
        std_normal_cdf(hi) - std_normal_cdf(lo)
    } else {
        1.0 - std_normal_cdf(lo) - std_normal_sf(hi)
    }
}

#[inline]
pub fn erf(a: f64) -> f64 {
    libm::erf(a)
}

#[inline]
pub fn erfc(a: f64) -> f64 {
    libm::erfc(a)
}

/// gamma(a) = a * phi(a) / erf(a / sqrt 2), defined for a > 0.
///
/// Tends to 1/2 as a -> 0+ and to 0 as a -> infinity.
pub fn gamma_ratio(a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!(
            "gamma_ratio requires a finite a > 0, got {a}"
        )));
    }
    if a < 1e-4 {
        // erf(a/sqrt2) = sqrt(2/pi) * a * (1 - a^2/6 + a^4/40 - ...), so
        // gamma(a) = 0.5 * exp(-a^2/2) / (1 - a^2/6 + a^4/40)
        let a2 = a * a;
        let series = 1.0 - a2 / 6.0 + a2 * a2 / 40.0;
        return Ok(0.5 * (-0.5 * a2).exp() / series);
    }
    Ok(a * std_normal_pdf(a) / erf(a / SQRT_2))
}

/// Moments and entropy of X ~ N(0, sigma_x^2) conditioned on |X| <= clip_c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncGaussStats {
    pub sigma_x: f64,
    pub clip_c: f64,
    /// C / sigma_x
    pub beta: f64,
    pub gamma_beta: f64,
    /// Variance of the truncated variable.
    pub var_trunc: f64,
    /// Differential entropy of the truncated variable, nats.
    pub diff_entropy: f64,
}

impl TruncGaussStats {
    pub fn new(sigma_x: f64, clip_c: f64) -> Result<Self> {
        if !(sigma_x > 0.0 && sigma_x.is_finite()) {
            return Err(Error::domain(format!("sigma_x must be positive, got {sigma_x}")));
        }
        if !(clip_c > 0.0 && clip_c.is_finite()) {
            return Err(Error::domain(format!("clip bound must be positive, got {clip_c}")));
        }
        let beta = clip_c / sigma_x;
        let gamma_beta = gamma_ratio(beta)?;
        let var_trunc = sigma_x * sigma_x * (1.0 - 2.0 * gamma_beta);
        let diff_entropy = ((2.0 * PI * E).sqrt() * sigma_x * erf(beta / SQRT_2)).ln() - gamma_beta;
        Ok(TruncGaussStats {
            sigma_x,
            clip_c,
            beta,
            gamma_beta,
            var_trunc,
            diff_entropy,
        })
    }

    pub fn sigma_trunc(&self) -> f64 {
        self.var_trunc.sqrt()
    }

    /// Normalising mass P(|X| <= C) = erf(beta / sqrt 2).
    pub fn mass(&self) -> f64 {
        erf(self.beta / SQRT_2)
    }

    /// Density of the truncated variable.
    pub fn pdf(&self, x: f64) -> f64 {
        if x.abs() > self.clip_c {
            return 0.0;
        }
        std_normal_pdf(x / self.sigma_x) / (self.sigma_x * self.mass())
    }
}

/// Convenience wrapper over [`TruncGaussStats::new`].
pub fn trunc_gauss_stats(sigma_x: f64, clip_c: f64) -> Result<TruncGaussStats> {
    TruncGaussStats::new(sigma_x, clip_c)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Composite Simpson on the defining integral, independent of libm.
    fn erf_by_quadrature(a: f64) -> f64 {
        let n = 20_000;
        let h = a / n as f64;
        let f = |t: f64| (-t * t).exp();
        let mut s = f(0.0) + f(a);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        2.0 / PI.sqrt() * s * h / 3.0
    }

    #[test]
    fn pdf_values() {
        assert!((std_normal_pdf(0.0) - 0.398_942_280_4).abs() < 1e-10);
        assert!((std_normal_pdf(1.0) - 0.241_970_724_5).abs() < 1e-10);
        assert_eq!(std_normal_pdf(-1.0), std_normal_pdf(1.0));
    }

    #[test]
    fn erf_matches_defining_integral() {
        for &a in &[0.1, 0.5, 0.75, 1.0, 2.0, 3.5] {
            assert!((erf(a) - erf_by_quadrature(a)).abs() < 1e-12, "a = {a}");
            assert_eq!(erf(-a), -erf(a));
        }
        assert!((erf(0.75) - 0.711_16).abs() < 1e-5);
        assert_eq!(erf(0.0), 0.0);
    }

    #[test]
    fn cdf_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert!((std_normal_cdf(10.0) - 1.0).abs() < 1e-15);
        assert!((std_normal_cdf(1.43197) - 0.923_924).abs() < 1e-6);
        // lower tail keeps relative precision
        let t = std_normal_cdf(-30.0);
        assert!(t > 0.0 && t < 1e-190);
    }

    #[test]
    fn interval_probability_in_the_tails() {
        let p = std_normal_interval(9.0, 9.5);
        let direct = std_normal_sf(9.0) - std_normal_sf(9.5);
        assert!(p > 0.0);
        assert!((p - direct).abs() <= 1e-30);
        assert!((std_normal_interval(-1.0, 1.0) - erf(1.0 / SQRT_2)).abs() < 1e-15);
        assert_eq!(std_normal_interval(1.0, -1.0), 0.0);
    }

    #[test]
    fn gamma_ratio_examples() {
        assert!((gamma_ratio(1.0).unwrap() - 0.35444).abs() < 1e-4);
        assert!((gamma_ratio(5.0).unwrap() - 7.43e-6).abs() < 1e-7);
        assert!((gamma_ratio(0.001).unwrap() - 0.5).abs() < 1e-4);
        assert!(gamma_ratio(0.0).is_err());
        assert!(gamma_ratio(-1.0).is_err());
    }

    #[test]
    fn gamma_ratio_series_joins_direct_form() {
        let a = 1e-4;
        let series = gamma_ratio(a * 0.999_999).unwrap();
        let direct = a * std_normal_pdf(a) / erf(a / SQRT_2);
        assert!((series - direct).abs() < 1e-10);
    }

    #[test]
    fn gamma_is_decreasing_and_bounded_on_grid() {
        let mut prev = 0.5;
        for i in 0..=2000 {
            let a = 0.01 + (8.0 - 0.01) * i as f64 / 2000.0;
            let g = gamma_ratio(a).unwrap();
            assert!(g > 0.0 && g < 0.5);
            assert!(g < prev, "not decreasing at {a}");
            prev = g;
        }
    }

    #[test]
    fn table_one_row_one_statistics() {
        let s = trunc_gauss_stats(0.4938, 1.0).unwrap();
        assert!((s.beta - 2.02511).abs() < 1e-5);
        assert!((s.gamma_beta - 0.10858).abs() < 1e-4);
        assert!((s.var_trunc - 0.19089).abs() < 2e-4);
    }

    #[test]
    fn no_truncation_limit() {
        let s = trunc_gauss_stats(1.0, 100.0).unwrap();
        assert!((s.var_trunc - 1.0).abs() < 1e-12);
        assert!((s.diff_entropy - 0.5 * (2.0 * PI * E).ln()).abs() < 1e-12);
        assert!((0.5 * (2.0 * PI * E).ln() - 1.41894).abs() < 1e-5);
    }

    #[test]
    fn variance_ratio_increases_to_one() {
        let mut prev = 0.0;
        for i in 0..=300 {
            let beta = 0.5 + 7.5 * i as f64 / 300.0;
            let s = trunc_gauss_stats(1.0, beta).unwrap();
            let r = s.var_trunc;
            assert!(r > prev && r < 1.0);
            prev = r;
        }
    }

    #[test]
    fn rejects_non_positive_inputs() {
        assert!(trunc_gauss_stats(0.0, 1.0).is_err());
        assert!(trunc_gauss_stats(1.0, -2.0).is_err());
        assert!(trunc_gauss_stats(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn truncation_reduces_entropy() {
        for &(s, c) in &[(0.3, 1.0), (1.0, 1.0), (2.0, 0.5), (0.49, 1.0)] {
            let t = trunc_gauss_stats(s, c).unwrap();
            assert!(t.var_trunc < s * s);
            assert!(t.diff_entropy < 0.5 * (2.0 * PI * E * s * s).ln());
        }
    }
}
