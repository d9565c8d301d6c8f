//! Stationary fractional Ornstein–Uhlenbeck kernel.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::params::FracOUParams;
use crate::error::{Result, TplabError};
use crate::specfun::{bessel_k_unchecked, gamma_unchecked};

/// Stationary covariance C(τ) = (|τ|/2λ)^{α−1/2} K_{α−1/2}(λ|τ|) / (√π Γ(α)).
pub fn fou_cov(p: &FracOUParams, tau: f64) -> f64 {
    let tau = tau.abs();
    if tau == 0.0 {
        return fou_var(p);
    }
    let (a, l) = (p.alpha(), p.lambda());
    let nu = a - 0.5;
    let k = bessel_k_unchecked(nu, l * tau).map(|r| r.value).unwrap_or(f64::NAN);
    let v = (tau / (2.0 * l)).powf(nu) * k / (PI.sqrt() * gamma_unchecked(a));
    if v.is_finite() {
        v
    } else {
        // λτ so small that K_ν overflowed; the corrections to σ² are far
        // below double precision here.
        if a < 1.5 {
            LocalExpansion::compute(p).evaluate(tau)
        } else {
            fou_var(p)
        }
    }
}

/// Variance Γ(2α−1) / (Γ(α)² (2λ)^{2α−1}).
pub fn fou_var(p: &FracOUParams) -> f64 {
    let (a, l) = (p.alpha(), p.lambda());
    let g = gamma_unchecked(a);
    gamma_unchecked(2.0 * a - 1.0) / (g * g) * (2.0 * l).powf(1.0 - 2.0 * a)
}

/// Spectral density (k² + λ²)^{−α} / 2π.
pub fn fou_spectral(p: &FracOUParams, k: f64) -> f64 {
    (k * k + p.lambda() * p.lambda()).powf(-p.alpha()) / (2.0 * PI)
}

/// Two leading terms of C(τ) ≈ constant + power_coeff·|τ|^{exponent} as τ → 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalExpansion {
    pub constant: f64,
    pub power_coeff: f64,
    pub exponent: f64,
}

impl LocalExpansion {
    fn compute(p: &FracOUParams) -> Self {
        let a = p.alpha();
        LocalExpansion {
            constant: fou_var(p),
            power_coeff: 1.0 / (2.0 * gamma_unchecked(2.0 * a) * (a * PI).cos()),
            exponent: 2.0 * a - 1.0,
        }
    }

    pub fn evaluate(&self, tau: f64) -> f64 {
        self.constant + self.power_coeff * tau.abs().powf(self.exponent)
    }
}

/// Small-lag expansion C(τ) ≈ σ² + |τ|^{2α−1} / (2Γ(2α) cos απ) for
/// 1/2 < α < 3/2. At α = 1 this is the Ornstein–Uhlenbeck line
/// 1/(2λ) − |τ|/2 and needs no special treatment.
pub fn fou_local_expansion(p: &FracOUParams) -> Result<LocalExpansion> {
    if p.alpha() >= 1.5 {
        return Err(TplabError::domain(
            "fou_local_expansion",
            format!("alpha = {} must be below 3/2", p.alpha()),
        ));
    }
    Ok(LocalExpansion::compute(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(a: f64, l: f64) -> FracOUParams {
        FracOUParams::new(a, l).unwrap()
    }

    #[test]
    fn ou_case() {
        assert_relative_eq!(fou_cov(&p(1.0, 0.5), 2.0), (-1.0f64).exp(), max_relative = 1e-13);
        assert_relative_eq!(fou_var(&p(1.0, 0.5)), 1.0, max_relative = 1e-15);
        assert_relative_eq!(fou_var(&p(1.0, 1.0)), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn reference_values() {
        // mpmath, 30 digits
        assert_relative_eq!(
            fou_cov(&p(1.25, 0.5), 1.7),
            0.611_130_706_866_860_475_37,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            fou_var(&p(0.75, 1.0)),
            0.834_626_841_674_073_129_23,
            max_relative = 1e-13
        );
    }

    #[test]
    fn zero_lag_is_variance() {
        let q = p(0.75, 1.0);
        assert_eq!(fou_cov(&q, 0.0), fou_var(&q));
        assert_relative_eq!(fou_cov(&q, 1e-12), fou_var(&q), max_relative = 1e-4);
    }

    #[test]
    fn spectral_values() {
        assert_relative_eq!(fou_spectral(&p(1.0, 1.0), 0.0), 1.0 / (2.0 * PI), max_relative = 1e-15);
        assert!(FracOUParams::new(1.0, 0.0).is_err());
    }

    #[test]
    fn local_expansion_converges() {
        for &a in &[0.75, 1.0, 1.25] {
            let q = p(a, 1.0);
            let e = fou_local_expansion(&q).unwrap();
            assert!(e.power_coeff < 0.0);
            assert_eq!(e.constant, fou_var(&q));
            let tau: f64 = 1e-4;
            let ratio = (fou_cov(&q, tau) - e.constant) / tau.powf(e.exponent);
            assert_relative_eq!(ratio, e.power_coeff, max_relative = 1e-2);
        }
        let ou = fou_local_expansion(&p(1.0, 0.5)).unwrap();
        assert_relative_eq!(ou.power_coeff, -0.5, max_relative = 1e-14);
        assert!(fou_local_expansion(&p(1.5, 1.0)).is_err());
    }

    #[test]
    fn tiny_lag_falls_back_to_expansion() {
        let q = p(5.5, 1.0);
        let v = fou_cov(&q, 1e-200);
        assert!(v.is_finite());
        assert_relative_eq!(v, fou_var(&q), max_relative = 1e-12);
    }
}
