//! Tempered fractional Brownian motion, realized as the reduced FOU
//! B(t) = X(t) − X(0).

use std::f64::consts::PI;

use super::fou::{fou_cov, fou_var};
use super::params::FracOUParams;
use crate::error::{Result, TplabError};
use crate::specfun::{bessel_k_unchecked, gamma_unchecked};

/// C(t−s) − C(t) − C(s) + σ² with C the FOU covariance.
pub fn tfbm_cov(p: &FracOUParams, t: f64, s: f64) -> f64 {
    if t == 0.0 || s == 0.0 {
        return 0.0;
    }
    fou_cov(p, t - s) - fou_cov(p, t) - fou_cov(p, s) + fou_var(p)
}

/// 2σ² − 2C(t).
pub fn tfbm_var(p: &FracOUParams, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    (2.0 * (fou_var(p) - fou_cov(p, t))).max(0.0)
}

/// Coefficient c_t with tfbm_var(t) = c_t |t|^{2H}, H = α − 1/2 ∈ (0, 1):
///
/// c_t = 2Γ(2H) / (Γ(H+1/2)² (2λ|t|)^{2H}) − 2 (2λ|t|)^{−H} K_H(λ|t|) / (√π Γ(H+1/2)).
pub fn tfbm_ct_coefficient(p: &FracOUParams, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Err(TplabError::domain("tfbm_ct_coefficient", "t must be nonzero"));
    }
    p.require_unit_hurst("tfbm_ct_coefficient")?;
    let h = p.hurst();
    let x = 2.0 * p.lambda() * t.abs();
    let g = gamma_unchecked(h + 0.5);
    let k = bessel_k_unchecked(h, 0.5 * x)?.value;
    Ok(2.0 * gamma_unchecked(2.0 * h) / (g * g * x.powf(2.0 * h)) - 2.0 * x.powf(-h) * k / (PI.sqrt() * g))
}

/// Covariance through the c_t decomposition
/// (c_t|t|^{2H} + c_s|s|^{2H} − c_{t−s}|t−s|^{2H}) / 2.
pub fn tfbm_cov_ct_route(p: &FracOUParams, t: f64, s: f64) -> Result<f64> {
    let two_h = 2.0 * p.hurst();
    let term = |u: f64| -> Result<f64> {
        if u == 0.0 {
            Ok(0.0)
        } else {
            Ok(tfbm_ct_coefficient(p, u)? * u.abs().powf(two_h))
        }
    };
    Ok(0.5 * (term(t)? + term(s)? - term(t - s)?))
}

/// Covariance of increments over `lag_tau` separated by `t_minus_s`:
/// 2C(d) − C(d+τ) − C(d−τ).
pub fn tfbm_increment_cov(p: &FracOUParams, lag_tau: f64, t_minus_s: f64) -> f64 {
    let d = t_minus_s.abs();
    2.0 * fou_cov(p, d) - fou_cov(p, d + lag_tau) - fou_cov(p, d - lag_tau)
}

/// Spectral density (2 − 2cos kτ)(k² + λ²)^{−α} / 2π of the increments.
pub fn tfbm_increment_spectral(p: &FracOUParams, lag_tau: f64, k: f64) -> f64 {
    let s = (0.5 * k * lag_tau).sin();
    4.0 * s * s * (k * k + p.lambda() * p.lambda()).powf(-p.alpha()) / (2.0 * PI)
}

/// Exact correlation of B(t) and B(s).
pub fn tfbm_correlation(p: &FracOUParams, t: f64, s: f64) -> f64 {
    let v = tfbm_var(p, t) * tfbm_var(p, s);
    if v == 0.0 {
        0.0
    } else {
        tfbm_cov(p, t, s) / v.sqrt()
    }
}

/// Limit of the correlation R(t, t+τ) as τ → ∞:
/// (1/2)·√(var(t) / (2σ²)). Tends to 1/2 as t → ∞.
pub fn tfbm_lrd_plateau(p: &FracOUParams, t: f64) -> f64 {
    0.5 * (tfbm_var(p, t) / (2.0 * fou_var(p))).sqrt()
}

/// Factor Γ(α)² converting these covariances to the Meerschaert–Sabzikar
/// normalization of tempered fractional Brownian motion.
pub fn meerschaert_sabzikar_factor(p: &FracOUParams) -> f64 {
    let g = gamma_unchecked(p.alpha());
    g * g
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(a: f64, l: f64) -> FracOUParams {
        FracOUParams::new(a, l).unwrap()
    }

    #[test]
    fn pinned_at_origin() {
        let q = p(1.25, 0.5);
        assert_eq!(tfbm_cov(&q, 5.0, 0.0), 0.0);
        assert_eq!(tfbm_var(&q, 0.0), 0.0);
    }

    #[test]
    fn ou_reduction() {
        let q = p(1.0, 0.5);
        assert_relative_eq!(tfbm_var(&q, 1.0), 2.0 * (1.0 - (-0.5f64).exp()), max_relative = 1e-13);
        assert_relative_eq!(tfbm_cov(&q, 1.0, 1.0), tfbm_var(&q, 1.0), max_relative = 1e-15);
    }

    #[test]
    fn reference_values() {
        // mpmath, 30 digits
        let q = p(1.25, 0.5);
        assert_relative_eq!(tfbm_var(&q, 0.5), 0.243_811_372_301_397_186_97, max_relative = 1e-11);
        assert_relative_eq!(
            tfbm_cov(&q, 2.0, 0.5),
            0.244_539_360_670_345_653_68,
            max_relative = 1e-11
        );
        assert_relative_eq!(
            tfbm_increment_cov(&q, 1.0, 2.0),
            -0.075_698_922_180_935_431_763,
            max_relative = 1e-11
        );
    }

    #[test]
    fn ct_route_matches() {
        let q = p(1.25, 0.5);
        let a = tfbm_cov(&q, 2.0, 0.5);
        let b = tfbm_cov_ct_route(&q, 2.0, 0.5).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-10);
        assert!(tfbm_ct_coefficient(&q, 0.0).is_err());
        assert!(tfbm_ct_coefficient(&p(1.6, 0.5), 1.0).is_err());
    }

    #[test]
    fn ct_limits() {
        let q = p(1.25, 0.5);
        // mpmath at t = 1e-6; the limit 1.06384608... is approached like t^{1/2}
        // and the two terms cancel to about 9 digits here.
        assert_relative_eq!(
            tfbm_ct_coefficient(&q, 1e-6).unwrap(),
            1.063_306_728_469_336_742_8,
            max_relative = 1e-5
        );
        // λ|t| → ∞: c_t |t|^{2H} → 2σ²
        let t = 200.0;
        let ct = tfbm_ct_coefficient(&q, t).unwrap();
        assert_relative_eq!(ct * t.powf(1.5), 2.0 * fou_var(&q), max_relative = 1e-12);
    }

    #[test]
    fn increment_identities() {
        let q = p(0.8, 1.3);
        let tau = 0.7;
        assert_relative_eq!(
            tfbm_increment_cov(&q, tau, 0.0),
            2.0 * (fou_var(&q) - fou_cov(&q, tau)),
            max_relative = 1e-14
        );
        assert_eq!(tfbm_increment_cov(&q, tau, 1.9), tfbm_increment_cov(&q, tau, -1.9));
        assert_eq!(tfbm_increment_spectral(&q, tau, 0.0), 0.0);
        let kmax = PI / tau;
        let peak = tfbm_increment_spectral(&q, tau, kmax);
        assert_relative_eq!(peak, 4.0 * crate::kernels::fou_spectral(&q, kmax), max_relative = 1e-14);
    }

    #[test]
    fn plateau_limits() {
        let q = p(1.25, 0.5);
        assert_relative_eq!(tfbm_lrd_plateau(&q, 1e4), 0.5, max_relative = 1e-12);
        assert!(tfbm_lrd_plateau(&q, 1e-8) < 1e-3);
        let t = 1.0;
        let tau = 40.0 / q.lambda();
        let r = tfbm_correlation(&q, t, t + tau);
        assert_relative_eq!(r, tfbm_lrd_plateau(&q, t), max_relative = 0.02);
    }

    #[test]
    fn variance_bounds_far_out() {
        let q = p(1.25, 0.5);
        let s2 = fou_var(&q);
        for &t in &[40.0, 60.0, 200.0] {
            let v = tfbm_var(&q, t);
            assert!(s2 <= v && v <= 2.0 * s2);
        }
    }
}
