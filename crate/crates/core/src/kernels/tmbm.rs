//! Tempered multifractional Brownian motion with a time-varying index α(t).

use serde::{Deserialize, Serialize};

use super::params::FracOUParams;
use super::profile::HurstProfile;
use super::tfbm::{tfbm_cov, tfbm_cov_ct_route, tfbm_var};
use crate::error::{Result, TplabError};
use crate::specfun::{gamma_unchecked, kummer_u, whittaker_w};

/// Special-function representation for [`tmbm_mou_cov`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MouRoute {
    Kummer,
    Whittaker,
}

/// Covariance of the multifractional OU process at distinct times.
///
/// For t > s and d = t − s the Kummer form is
/// e^{−λd} d^{2α₊−1} U(α(s), 2α₊, 2λd) / Γ(α(t)); the Whittaker form is
/// d^{α₊−1} W_{α₋, 1/2−α₊}(2λd) / (Γ(α(t)) (2λ)^{α₊}). Arguments are
/// swapped when t < s.
pub fn tmbm_mou_cov(h: &HurstProfile, lambda: f64, t: f64, s: f64, route: MouRoute) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(TplabError::invalid(format!("lambda = {lambda} must be positive")));
    }
    if t == s {
        return Err(TplabError::domain("tmbm_mou_cov", "t and s must differ"));
    }
    let (t, s) = if t > s { (t, s) } else { (s, t) };
    let d = t - s;
    let (at, as_) = (h.alpha(t), h.alpha(s));
    let ap = 0.5 * (at + as_);
    let am = 0.5 * (at - as_);
    let z = 2.0 * lambda * d;
    match route {
        MouRoute::Kummer => {
            let u = kummer_u(as_, 2.0 * ap, z)?.value;
            Ok((-lambda * d).exp() * d.powf(2.0 * ap - 1.0) * u / gamma_unchecked(at))
        }
        MouRoute::Whittaker => {
            let w = whittaker_w(am, 0.5 - ap, z)?.value;
            Ok(d.powf(ap - 1.0) * w / (gamma_unchecked(at) * (2.0 * lambda).powf(ap)))
        }
    }
}

fn params_at(alpha: f64, lambda: f64) -> Result<FracOUParams> {
    FracOUParams::new(alpha, lambda)
}

/// Four-term covariance with every term at the averaged index α₊(s, t).
pub fn tmbm_cov(h: &HurstProfile, lambda: f64, t: f64, s: f64) -> Result<f64> {
    let p = params_at(h.alpha_plus(t, s), lambda)?;
    Ok(tfbm_cov(&p, t, s))
}

/// Same covariance through the c_t(H₊) decomposition.
pub fn tmbm_cov_ct_route(h: &HurstProfile, lambda: f64, t: f64, s: f64) -> Result<f64> {
    let p = params_at(h.alpha_plus(t, s), lambda)?;
    tfbm_cov_ct_route(&p, t, s)
}

/// Variance: the s = t specialization of [`tmbm_cov`], i.e. the TFBM
/// variance at index α(t).
pub fn tmbm_var(h: &HurstProfile, lambda: f64, t: f64) -> Result<f64> {
    let p = params_at(h.alpha(t), lambda)?;
    Ok(tfbm_var(&p, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::fou_cov;
    use crate::quad::{fourier_cos_halfline, integrate_points, FourierOptions, QuadConfig};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn ramp() -> HurstProfile {
        HurstProfile::saturating(0.8, 0.1).unwrap()
    }

    #[test]
    fn ramp_reference_value() {
        // mpmath: Kummer, Whittaker and the moving-average integral agree
        let want = 0.105_022_616_297_592_801_04;
        let h = ramp();
        let k = tmbm_mou_cov(&h, 1.0, 2.0, 0.5, MouRoute::Kummer).unwrap();
        let w = tmbm_mou_cov(&h, 1.0, 2.0, 0.5, MouRoute::Whittaker).unwrap();
        assert_relative_eq!(k, want, max_relative = 1e-10);
        assert_relative_eq!(w, want, max_relative = 1e-10);
    }

    #[test]
    fn constant_profile_is_fou() {
        for &a in &[0.75, 1.0, 1.3] {
            let h = HurstProfile::constant(a).unwrap();
            let p = FracOUParams::new(a, 0.7).unwrap();
            for route in [MouRoute::Kummer, MouRoute::Whittaker] {
                let got = tmbm_mou_cov(&h, 0.7, 2.1, 0.4, route).unwrap();
                assert_relative_eq!(got, fou_cov(&p, 1.7), max_relative = 1e-8);
            }
            assert_relative_eq!(
                tmbm_cov(&h, 0.7, 2.1, 0.4).unwrap(),
                tfbm_cov(&p, 2.1, 0.4),
                max_relative = 1e-12
            );
            assert_relative_eq!(tmbm_var(&h, 0.7, 2.1).unwrap(), tfbm_var(&p, 2.1), max_relative = 1e-12);
        }
    }

    #[test]
    fn symmetric_and_pinned() {
        let h = ramp();
        let a = tmbm_mou_cov(&h, 1.0, 0.5, 2.0, MouRoute::Kummer).unwrap();
        let b = tmbm_mou_cov(&h, 1.0, 2.0, 0.5, MouRoute::Kummer).unwrap();
        assert_eq!(a, b);
        assert!(tmbm_mou_cov(&h, 1.0, 1.0, 1.0, MouRoute::Kummer).is_err());
        assert_eq!(tmbm_cov(&h, 1.0, 3.0, 0.0).unwrap(), 0.0);
        assert_eq!(tmbm_var(&h, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn ct_route_identity() {
        let h = HurstProfile::linear(0.7, 1.3, 2.0).unwrap();
        let a = tmbm_cov(&h, 0.8, 1.5, 0.7).unwrap();
        let b = tmbm_cov_ct_route(&h, 0.8, 1.5, 0.7).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-10);
    }

    #[test]
    fn variance_matches_harmonizable_integral() {
        // (1/π) ∫₀^∞ (2 − 2cos kt)(k² + λ²)^{−α(t)} dk
        let h = HurstProfile::linear(0.7, 1.3, 2.0).unwrap();
        let (lambda, t) = (0.8, 1.5);
        let a = h.alpha(t);
        let g = |k: f64| (k * k + lambda * lambda).powf(-a);
        let whole = integrate_points(g, &[0.0, 1.0, f64::INFINITY], &QuadConfig::relative(1e-13)).unwrap();
        let osc = fourier_cos_halfline(g, t, &FourierOptions::new(1e-12, a, 1.0)).unwrap();
        let want = 2.0 * (whole.value - osc.value) / PI;
        assert_relative_eq!(tmbm_var(&h, lambda, t).unwrap(), want, max_relative = 1e-9);
    }
}
