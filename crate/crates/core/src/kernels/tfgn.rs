//! Tempered fractional Gaussian noise, the derivative of TFBM, for α > 1.

use super::params::FracOUParams;
use crate::error::{Result, TplabError};
use crate::specfun::{gamma_unchecked, kummer_u};

/// Cross kernel C^{μ,ν}(τ) = e^{−λτ} τ^{μ+ν−1} U(ν, μ+ν, 2λτ) / Γ(μ), τ > 0.
///
/// τ = 0 returns the limit Γ(μ+ν−1) / (Γ(μ)Γ(ν)(2λ)^{μ+ν−1}), finite only
/// when μ + ν > 1.
pub fn tfgn_cross_cov(mu: f64, nu: f64, lambda: f64, tau: f64) -> Result<f64> {
    if !(mu > 0.0 && nu > 0.0) {
        return Err(TplabError::domain(
            "tfgn_cross_cov",
            format!("mu = {mu}, nu = {nu} must be positive"),
        ));
    }
    if !(lambda > 0.0) {
        return Err(TplabError::invalid(format!("lambda = {lambda} must be positive")));
    }
    let tau = tau.abs();
    if tau == 0.0 {
        let m = mu + nu - 1.0;
        if !(m > 0.0) {
            return Err(TplabError::domain(
                "tfgn_cross_cov",
                format!("limit at tau = 0 diverges for mu + nu = {}", mu + nu),
            ));
        }
        return Ok(gamma_unchecked(m) / (gamma_unchecked(mu) * gamma_unchecked(nu) * (2.0 * lambda).powf(m)));
    }
    let u = kummer_u(nu, mu + nu, 2.0 * lambda * tau)?.value;
    Ok((-lambda * tau).exp() * tau.powf(mu + nu - 1.0) * u / gamma_unchecked(mu))
}

/// C^{α−1,α−1} − λ(C^{α−1,α} + C^{α,α−1}) + λ² C^{α,α}.
///
/// The lag-0 value (the noise variance) is finite only for α > 3/2.
pub fn tfgn_cov(p: &FracOUParams, tau: f64) -> Result<f64> {
    let (a, l) = (p.alpha(), p.lambda());
    if !(a > 1.0) {
        return Err(TplabError::domain("tfgn_cov", format!("alpha = {a} must exceed 1")));
    }
    let c = |mu: f64, nu: f64| tfgn_cross_cov(mu, nu, l, tau);
    Ok(c(a - 1.0, a - 1.0)? - l * (c(a - 1.0, a)? + c(a, a - 1.0)?) + l * l * c(a, a)?)
}

pub fn tfgn_var(p: &FracOUParams) -> Result<f64> {
    tfgn_cov(p, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{fou_cov, fou_var};
    use approx::assert_relative_eq;

    #[test]
    fn reference_value() {
        // mpmath, also the direct two-sided integral
        assert_relative_eq!(
            tfgn_cross_cov(1.2, 0.9, 1.0, 2.0).unwrap(),
            0.094_252_013_380_921_069_935,
            max_relative = 1e-10
        );
    }

    #[test]
    fn diagonal_kernel_is_fou() {
        let p = FracOUParams::new(1.3, 0.6).unwrap();
        for &tau in &[0.2, 1.0, 7.0] {
            assert_relative_eq!(
                tfgn_cross_cov(1.3, 1.3, 0.6, tau).unwrap(),
                fou_cov(&p, tau),
                max_relative = 1e-10
            );
        }
        assert_relative_eq!(
            tfgn_cross_cov(1.3, 1.3, 0.6, 0.0).unwrap(),
            fou_var(&p),
            max_relative = 1e-13
        );
    }

    #[test]
    fn small_lag_limit() {
        let want = tfgn_cross_cov(1.2, 0.9, 1.0, 0.0).unwrap();
        assert_relative_eq!(tfgn_cross_cov(1.2, 0.9, 1.0, 1e-7).unwrap(), want, max_relative = 1e-5);
        assert!(tfgn_cross_cov(0.3, 0.4, 1.0, 0.0).is_err());
        assert!(tfgn_cross_cov(0.0, 0.4, 1.0, 1.0).is_err());
    }

    #[test]
    fn second_derivative_of_fou() {
        let p = FracOUParams::new(1.8, 0.9).unwrap();
        let h = 1e-3;
        for &tau in &[0.5, 1.5, 4.0] {
            let d2 = (fou_cov(&p, tau + h) - 2.0 * fou_cov(&p, tau) + fou_cov(&p, tau - h)) / (h * h);
            assert_relative_eq!(tfgn_cov(&p, tau).unwrap(), -d2, max_relative = 1e-5);
        }
        assert!(tfgn_var(&p).unwrap() > 0.0);
        assert!(tfgn_var(&FracOUParams::new(1.3, 0.9).unwrap()).is_err());
        assert!(tfgn_cov(&FracOUParams::new(0.9, 0.9).unwrap(), 1.0).is_err());
    }
}
