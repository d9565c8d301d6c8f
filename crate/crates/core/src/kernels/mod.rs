//! Covariance kernels, variances and spectral densities for every process
//! family, plus the [`ProcessSpec`] descriptor shared by the sampler and CLI.

mod fou;
mod mixed;
mod params;
mod profile;
mod tfbm;
mod tfgn;
mod tmbm;
mod twoindex;

pub use fou::{fou_cov, fou_local_expansion, fou_spectral, fou_var, LocalExpansion};
pub use mixed::{mixed_cov, mixed_increment_cov, mixed_var};
pub use params::{FracOUParams, MixtureComponent, MixtureParams, TwoIndexParams, MAX_ALPHA};
pub use profile::{HurstProfile, ProfileShape};
pub use tfbm::{
    meerschaert_sabzikar_factor, tfbm_correlation, tfbm_cov, tfbm_cov_ct_route, tfbm_ct_coefficient,
    tfbm_increment_cov, tfbm_increment_spectral, tfbm_lrd_plateau, tfbm_var,
};
pub use tfgn::{tfgn_cov, tfgn_cross_cov, tfgn_var};
pub use tmbm::{tmbm_cov, tmbm_cov_ct_route, tmbm_mou_cov, tmbm_var, MouRoute};
pub use twoindex::{
    small_time_constant, twoindex_cov, twoindex_cov_tail_series, twoindex_increment_variance, twoindex_reduced_cov,
    twoindex_smalltime_incvar, twoindex_spectral, twoindex_var, SmallTimeLaw, SpectralVariant, TailSeries,
};

use serde::{Deserialize, Serialize};

use crate::error::{Result, TplabError};

/// A fully parameterized process family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ProcessSpec {
    Fou {
        params: FracOUParams,
    },
    Tfbm {
        params: FracOUParams,
    },
    Mixed {
        mixture: MixtureParams,
    },
    /// Reduced two-index process.
    Tfbm2 {
        params: TwoIndexParams,
    },
    Tmbm {
        profile: HurstProfile,
        lambda: f64,
    },
    Tfgn {
        params: FracOUParams,
    },
}

impl ProcessSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProcessSpec::Fou { .. } => "fou",
            ProcessSpec::Tfbm { .. } => "tfbm",
            ProcessSpec::Mixed { .. } => "mixed",
            ProcessSpec::Tfbm2 { .. } => "tfbm2",
            ProcessSpec::Tmbm { .. } => "tmbm",
            ProcessSpec::Tfgn { .. } => "tfgn",
        }
    }

    /// Stationary families: covariance depends on t − s only.
    pub fn is_stationary(&self) -> bool {
        matches!(self, ProcessSpec::Fou { .. } | ProcessSpec::Tfgn { .. })
    }

    /// Reduced families vanish at t = 0.
    pub fn pinned_at_origin(&self) -> bool {
        !self.is_stationary()
    }

    /// Checks parameter ranges that the constructors alone cannot see.
    pub fn validate(&self) -> Result<()> {
        match self {
            ProcessSpec::Tfbm { params } => params.require_unit_hurst("tfbm"),
            ProcessSpec::Tmbm { lambda, .. } if !(*lambda > 0.0 && lambda.is_finite()) => {
                Err(TplabError::invalid(format!("lambda = {lambda} must be positive")))
            }
            ProcessSpec::Tfgn { params } if params.alpha() <= 1.5 => Err(TplabError::invalid(format!(
                "tfgn has finite variance only for alpha > 3/2, got {}",
                params.alpha()
            ))),
            _ => Ok(()),
        }
    }

    pub fn cov(&self, t: f64, s: f64) -> Result<f64> {
        match self {
            ProcessSpec::Fou { params } => Ok(fou_cov(params, t - s)),
            ProcessSpec::Tfbm { params } => Ok(tfbm_cov(params, t, s)),
            ProcessSpec::Mixed { mixture } => Ok(mixed_cov(mixture, t, s)),
            ProcessSpec::Tfbm2 { params } => twoindex_reduced_cov(params, t, s),
            ProcessSpec::Tmbm { profile, lambda } => tmbm_cov(profile, *lambda, t, s),
            ProcessSpec::Tfgn { params } => tfgn_cov(params, t - s),
        }
    }

    pub fn var(&self, t: f64) -> Result<f64> {
        match self {
            ProcessSpec::Fou { params } => Ok(fou_var(params)),
            ProcessSpec::Tfbm { params } => Ok(tfbm_var(params, t)),
            ProcessSpec::Mixed { mixture } => Ok(mixed_var(mixture, t)),
            ProcessSpec::Tfbm2 { params } => twoindex_increment_variance(params, t).map(|r| r.value),
            ProcessSpec::Tmbm { profile, lambda } => tmbm_var(profile, *lambda, t),
            ProcessSpec::Tfgn { params } => tfgn_var(params),
        }
    }

    /// Tempering rate of the family (the slowest one for mixtures).
    pub fn lambda(&self) -> f64 {
        match self {
            ProcessSpec::Fou { params } | ProcessSpec::Tfbm { params } | ProcessSpec::Tfgn { params } => {
                params.lambda()
            }
            ProcessSpec::Mixed { mixture } => mixture
                .components()
                .iter()
                .map(|c| c.params.lambda())
                .fold(f64::INFINITY, f64::min),
            ProcessSpec::Tfbm2 { params } => params.lambda(),
            ProcessSpec::Tmbm { lambda, .. } => *lambda,
        }
    }
}
