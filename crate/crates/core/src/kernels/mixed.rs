//! Mixed TFBM: Σ b_i B_{α_i,λ_i} with independent components.

use super::params::MixtureParams;
use super::tfbm::{tfbm_cov, tfbm_increment_cov, tfbm_var};

pub fn mixed_cov(m: &MixtureParams, t: f64, s: f64) -> f64 {
    m.components()
        .iter()
        .map(|c| c.weight * c.weight * tfbm_cov(&c.params, t, s))
        .sum()
}

pub fn mixed_var(m: &MixtureParams, t: f64) -> f64 {
    m.components()
        .iter()
        .map(|c| c.weight * c.weight * tfbm_var(&c.params, t))
        .sum()
}

pub fn mixed_increment_cov(m: &MixtureParams, lag_tau: f64, t_minus_s: f64) -> f64 {
    m.components()
        .iter()
        .map(|c| c.weight * c.weight * tfbm_increment_cov(&c.params, lag_tau, t_minus_s))
        .sum()
}
