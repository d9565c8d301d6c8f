use serde::{Deserialize, Serialize};

use crate::error::{Result, TplabError};

/// Functional form of a time-varying index α(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileShape {
    Constant {
        alpha: f64,
    },
    /// Linear from `alpha0` at t = 0 to `alpha1` at `t1`, flat afterwards.
    Linear {
        alpha0: f64,
        alpha1: f64,
        t1: f64,
    },
    /// a + b·t/(1+t).
    Saturating {
        a: f64,
        b: f64,
    },
    /// Piecewise-linear interpolation, flat outside the table.
    Tabulated {
        times: Vec<f64>,
        alphas: Vec<f64>,
    },
}

impl ProfileShape {
    fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        match self {
            ProfileShape::Constant { alpha } => *alpha,
            ProfileShape::Linear { alpha0, alpha1, t1 } => alpha0 + (alpha1 - alpha0) * (t / t1).min(1.0),
            ProfileShape::Saturating { a, b } => a + b * t / (1.0 + t),
            ProfileShape::Tabulated { times, alphas } => {
                if t <= times[0] {
                    return alphas[0];
                }
                let last = times.len() - 1;
                if t >= times[last] {
                    return alphas[last];
                }
                let i = times.partition_point(|&x| x <= t) - 1;
                let w = (t - times[i]) / (times[i + 1] - times[i]);
                alphas[i] + w * (alphas[i + 1] - alphas[i])
            }
        }
    }

    // (min, max, Lipschitz constant) over t >= 0.
    fn summary(&self) -> Result<(f64, f64, f64)> {
        match self {
            ProfileShape::Constant { alpha } => Ok((*alpha, *alpha, 0.0)),
            ProfileShape::Linear { alpha0, alpha1, t1 } => {
                if !(*t1 > 0.0) {
                    return Err(TplabError::invalid("linear profile needs t1 > 0"));
                }
                Ok((alpha0.min(*alpha1), alpha0.max(*alpha1), (alpha1 - alpha0).abs() / t1))
            }
            ProfileShape::Saturating { a, b } => Ok((a.min(a + b), a.max(a + b), b.abs())),
            ProfileShape::Tabulated { times, alphas } => {
                if times.is_empty() || times.len() != alphas.len() {
                    return Err(TplabError::invalid(
                        "tabulated profile needs matching, nonempty columns",
                    ));
                }
                if times.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(TplabError::invalid("tabulated profile times must increase"));
                }
                let lo = alphas.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = alphas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let k = times
                    .windows(2)
                    .zip(alphas.windows(2))
                    .map(|(t, a)| (a[1] - a[0]).abs() / (t[1] - t[0]))
                    .fold(0.0, f64::max);
                Ok((lo, hi, k))
            }
        }
    }
}

/// Time-varying index α(t) with bounds and Hölder metadata.
///
/// Every supported shape is Lipschitz, so the Hölder exponent is 1 and the
/// constant is the largest slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileShape", into = "ProfileShape")]
pub struct HurstProfile {
    shape: ProfileShape,
    holder_constant: f64,
    holder_exponent: f64,
    alpha_min: f64,
    alpha_max: f64,
}

impl TryFrom<ProfileShape> for HurstProfile {
    type Error = TplabError;
    fn try_from(shape: ProfileShape) -> Result<Self> {
        HurstProfile::new(shape)
    }
}

impl From<HurstProfile> for ProfileShape {
    fn from(p: HurstProfile) -> Self {
        p.shape
    }
}

impl HurstProfile {
    pub fn new(shape: ProfileShape) -> Result<Self> {
        let (lo, hi, k) = shape.summary()?;
        if !(lo > 0.5 && hi < 1.5) {
            return Err(TplabError::invalid(format!(
                "profile range [{lo}, {hi}] must lie inside (1/2, 3/2)"
            )));
        }
        Ok(HurstProfile {
            shape,
            holder_constant: k,
            holder_exponent: 1.0,
            alpha_min: lo,
            alpha_max: hi,
        })
    }

    pub fn constant(alpha: f64) -> Result<Self> {
        HurstProfile::new(ProfileShape::Constant { alpha })
    }

    pub fn linear(alpha0: f64, alpha1: f64, t1: f64) -> Result<Self> {
        HurstProfile::new(ProfileShape::Linear { alpha0, alpha1, t1 })
    }

    pub fn saturating(a: f64, b: f64) -> Result<Self> {
        HurstProfile::new(ProfileShape::Saturating { a, b })
    }

    pub fn tabulated(times: Vec<f64>, alphas: Vec<f64>) -> Result<Self> {
        HurstProfile::new(ProfileShape::Tabulated { times, alphas })
    }

    pub fn shape(&self) -> &ProfileShape {
        &self.shape
    }

    pub fn alpha(&self, t: f64) -> f64 {
        self.shape.eval(t)
    }

    /// (α(t) + α(s))/2.
    pub fn alpha_plus(&self, t: f64, s: f64) -> f64 {
        0.5 * (self.alpha(t) + self.alpha(s))
    }

    /// (α(t) − α(s))/2.
    pub fn alpha_minus(&self, t: f64, s: f64) -> f64 {
        0.5 * (self.alpha(t) - self.alpha(s))
    }

    pub fn holder_constant(&self) -> f64 {
        self.holder_constant
    }

    pub fn holder_exponent(&self) -> f64 {
        self.holder_exponent
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.alpha_min, self.alpha_max)
    }

    pub fn is_constant(&self) -> bool {
        self.alpha_min == self.alpha_max
    }

    /// Checks bounds and the Hölder condition on every pair of grid points.
    pub fn check_on_grid(&self, grid: &[f64]) -> Result<()> {
        let values: Vec<f64> = grid.iter().map(|&t| self.alpha(t)).collect();
        for (&t, &a) in grid.iter().zip(&values) {
            if a < self.alpha_min - 1e-15 || a > self.alpha_max + 1e-15 {
                return Err(TplabError::invalid(format!("alpha({t}) = {a} escapes declared bounds")));
            }
        }
        for i in 0..grid.len() {
            for j in i + 1..grid.len() {
                let lhs = (values[i] - values[j]).abs();
                let rhs = self.holder_constant * (grid[i] - grid[j]).abs().powf(self.holder_exponent);
                if lhs > rhs * (1.0 + 1e-12) + 1e-15 {
                    return Err(TplabError::invalid(format!(
                        "Hölder bound fails between t = {} and t = {}",
                        grid[i], grid[j]
                    )));
                }
            }
        }
        Ok(())
    }
}
