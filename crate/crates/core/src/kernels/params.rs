use serde::{Deserialize, Serialize};

use crate::error::{Result, TplabError};

/// Largest single index accepted; keeps Bessel orders α − 1/2 inside the
/// supported box.
pub const MAX_ALPHA: f64 = 5.5;

/// Index α and tempering rate λ of a single-index tempered process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFracOU")]
pub struct FracOUParams {
    alpha: f64,
    lambda: f64,
}

#[derive(Deserialize)]
struct RawFracOU {
    alpha: f64,
    lambda: f64,
}

impl TryFrom<RawFracOU> for FracOUParams {
    type Error = TplabError;
    fn try_from(r: RawFracOU) -> Result<Self> {
        FracOUParams::new(r.alpha, r.lambda)
    }
}

impl FracOUParams {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        if !(alpha > 0.5 && alpha <= MAX_ALPHA) {
            return Err(TplabError::invalid(format!(
                "alpha = {alpha} must lie in (1/2, {MAX_ALPHA}]"
            )));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(TplabError::invalid(format!(
                "lambda = {lambda} must be positive and finite"
            )));
        }
        Ok(FracOUParams { alpha, lambda })
    }

    /// Builds parameters from a Hurst index H = α − 1/2.
    pub fn from_hurst(hurst: f64, lambda: f64) -> Result<Self> {
        FracOUParams::new(hurst + 0.5, lambda)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn hurst(&self) -> f64 {
        self.alpha - 0.5
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        FracOUParams::new(self.alpha, lambda)
    }

    /// Errors unless H = α − 1/2 lies in (0, 1).
    pub fn require_unit_hurst(&self, what: &str) -> Result<()> {
        if self.alpha < 1.5 {
            Ok(())
        } else {
            Err(TplabError::invalid(format!(
                "{what} needs 1/2 < alpha < 3/2, got {}",
                self.alpha
            )))
        }
    }
}

/// Parameters (α, β, λ) of the two-index Riesz-type process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTwoIndex")]
pub struct TwoIndexParams {
    alpha: f64,
    beta: f64,
    lambda: f64,
}

#[derive(Deserialize)]
struct RawTwoIndex {
    alpha: f64,
    beta: f64,
    lambda: f64,
}

impl TryFrom<RawTwoIndex> for TwoIndexParams {
    type Error = TplabError;
    fn try_from(r: RawTwoIndex) -> Result<Self> {
        TwoIndexParams::new(r.alpha, r.beta, r.lambda)
    }
}

impl TwoIndexParams {
    pub fn new(alpha: f64, beta: f64, lambda: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(TplabError::invalid(format!("alpha = {alpha} must be positive")));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(TplabError::invalid(format!("beta = {beta} must lie in (0, 1]")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(TplabError::invalid(format!(
                "lambda = {lambda} must be positive and finite"
            )));
        }
        if !(alpha * beta > 0.5) {
            return Err(TplabError::invalid(format!(
                "alpha*beta = {} must exceed 1/2 for finite variance",
                alpha * beta
            )));
        }
        Ok(TwoIndexParams { alpha, beta, lambda })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// H = αβ − 1/2.
    pub fn hurst(&self) -> f64 {
        self.alpha * self.beta - 0.5
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        TwoIndexParams::new(self.alpha, self.beta, lambda)
    }

    pub fn require_asymptotic_range(&self, what: &str) -> Result<()> {
        let ab = self.alpha * self.beta;
        if ab < 1.5 {
            Ok(())
        } else {
            Err(TplabError::invalid(format!(
                "{what} needs 1/2 < alpha*beta < 3/2, got {ab}"
            )))
        }
    }
}

/// One independent component b·B_{α,λ} of a mixed process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub params: FracOUParams,
}

/// Weighted sum of independent single-index components with distinct α.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMixture")]
pub struct MixtureParams {
    components: Vec<MixtureComponent>,
}

#[derive(Deserialize)]
struct RawMixture {
    components: Vec<MixtureComponent>,
}

impl TryFrom<RawMixture> for MixtureParams {
    type Error = TplabError;
    fn try_from(r: RawMixture) -> Result<Self> {
        MixtureParams::new(r.components)
    }
}

impl MixtureParams {
    pub fn new(components: Vec<MixtureComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(TplabError::invalid("mixture needs at least one component"));
        }
        for c in &components {
            if !(c.weight > 0.0 && c.weight.is_finite()) {
                return Err(TplabError::invalid(format!(
                    "mixture weight {} must be positive",
                    c.weight
                )));
            }
        }
        for (i, a) in components.iter().enumerate() {
            for b in &components[i + 1..] {
                if a.params.alpha() == b.params.alpha() {
                    return Err(TplabError::invalid(format!(
                        "mixture indices must be distinct, alpha = {} repeats",
                        a.params.alpha()
                    )));
                }
            }
        }
        Ok(MixtureParams { components })
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    /// Smallest index among the components; it governs local roughness.
    pub fn min_alpha(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.params.alpha())
            .fold(f64::INFINITY, f64::min)
    }
}
