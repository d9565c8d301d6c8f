//! Two-index Riesz-type process with spectral density
//! (|k|^{2β} + λ^{2β})^{−α} / 2π. Its covariance has no closed form and is
//! computed by the oscillatory quadrature in [`crate::quad`].

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::params::TwoIndexParams;
use crate::error::{Result, TplabError};
use crate::quad::{cos_transform_from, fourier_cos_halfline, integrate_points, FourierOptions, QuadConfig, QuadResult};
use crate::specfun::{gamma_unchecked, ln_gamma_unchecked};

/// Which two-index spectral density to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralVariant {
    /// |(ik)^β + λ^β|^{−2α} / 2π, from the Weyl-type equation.
    X,
    /// (|k|^{2β} + λ^{2β})^{−α} / 2π, from the Riesz-type equation.
    Y,
}

pub fn twoindex_spectral(q: &TwoIndexParams, k: f64, variant: SpectralVariant) -> f64 {
    let (a, b, l) = (q.alpha(), q.beta(), q.lambda());
    let kb = k.abs().powf(b);
    let lb = l.powf(b);
    let base = match variant {
        SpectralVariant::Y => kb * kb + lb * lb,
        // |(ik)^β + λ^β|² expands with the cross term 2 λ^β |k|^β cos(βπ/2).
        SpectralVariant::X => kb * kb + 2.0 * lb * kb * (0.5 * b * PI).cos() + lb * lb,
    };
    base.powf(-a) / (2.0 * PI)
}

/// Γ(1/2β) Γ(α − 1/2β) / (2πβ Γ(α)) · λ^{1−2αβ}.
pub fn twoindex_var(q: &TwoIndexParams) -> Result<f64> {
    let (a, b, l) = (q.alpha(), q.beta(), q.lambda());
    let r = 1.0 / (2.0 * b);
    if a <= r {
        return Err(TplabError::domain(
            "twoindex_var",
            format!("alpha = {a} must exceed 1/(2 beta) = {r}"),
        ));
    }
    Ok(gamma_unchecked(r) * gamma_unchecked(a - r) / (2.0 * PI * b * gamma_unchecked(a)) * l.powf(1.0 - 2.0 * a * b))
}

type CacheKey = [u64; 4];

fn cov_cache() -> &'static Mutex<HashMap<CacheKey, QuadResult>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, QuadResult>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn fourier_options(q: &TwoIndexParams) -> Result<FourierOptions> {
    let scale = PI * twoindex_var(q)?;
    Ok(FourierOptions::new(1e-13 * scale, q.alpha() * q.beta(), 1.0))
}

/// Stationary covariance (1/π) ∫₀^∞ cos(kτ) (k^{2β} + λ^{2β})^{−α} dk.
///
/// Results are memoized per (α, β, λ, |τ|) for the lifetime of the process.
/// τ = 0 returns [`twoindex_var`].
pub fn twoindex_cov(q: &TwoIndexParams, tau: f64) -> Result<QuadResult> {
    let tau = tau.abs();
    if tau == 0.0 {
        return Ok(QuadResult {
            value: twoindex_var(q)?,
            abs_error_estimate: 0.0,
            subdivisions: 0,
        });
    }
    let key = [
        q.alpha().to_bits(),
        q.beta().to_bits(),
        q.lambda().to_bits(),
        tau.to_bits(),
    ];
    if let Some(r) = cov_cache().lock().expect("cache lock").get(&key) {
        return Ok(*r);
    }
    let (a, b) = (q.alpha(), q.beta());
    let l2b = q.lambda().powf(2.0 * b);
    let g = |k: f64| (k.powf(2.0 * b) + l2b).powf(-a);
    let opts = fourier_options(q)?;
    let r = fourier_cos_halfline(g, tau, &opts)?;
    let r = QuadResult {
        value: r.value / PI,
        abs_error_estimate: r.abs_error_estimate / PI,
        subdivisions: r.subdivisions,
    };
    cov_cache().lock().expect("cache lock").insert(key, r);
    Ok(r)
}

/// Covariance of the reduced process B(t) = Y(t) − Y(0).
pub fn twoindex_reduced_cov(q: &TwoIndexParams, t: f64, s: f64) -> Result<f64> {
    if t == 0.0 || s == 0.0 {
        return Ok(0.0);
    }
    let c = |u: f64| twoindex_cov(q, u).map(|r| r.value);
    Ok(c(t - s)? - c(t)? - c(s)? + c(0.0)?)
}

/// Partial sum of the large-lag expansion of [`twoindex_cov`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSeries {
    pub value: f64,
    pub leading_term: f64,
    pub terms_used: usize,
    /// True when summation stopped at the smallest term before `n_terms`.
    pub truncated: bool,
}

/// Σ_{j=1..n} (−1)^{j+1} λ^{−2β(α+j)} Γ(α+j) Γ(1+2βj) sin(βjπ) / (π Γ(α) j!) · τ^{−(2βj+1)},
/// stopping early at the smallest term as asymptotic series require.
pub fn twoindex_cov_tail_series(q: &TwoIndexParams, tau: f64, n_terms: usize) -> Result<TailSeries> {
    let (a, b, l) = (q.alpha(), q.beta(), q.lambda());
    if !(b < 1.0) {
        return Err(TplabError::domain("twoindex_cov_tail_series", "beta must be below 1"));
    }
    let tau = tau.abs();
    if l * tau < 5.0 {
        return Err(TplabError::domain(
            "twoindex_cov_tail_series",
            format!("lambda*tau = {} must be at least 5", l * tau),
        ));
    }
    if n_terms == 0 {
        return Err(TplabError::invalid("n_terms must be positive"));
    }
    let term = |j: usize| {
        let jf = j as f64;
        let log_mag =
            -2.0 * b * (a + jf) * l.ln() + ln_gamma_unchecked(a + jf) + ln_gamma_unchecked(1.0 + 2.0 * b * jf)
                - ln_gamma_unchecked(a)
                - ln_gamma_unchecked(jf + 1.0)
                - (2.0 * b * jf + 1.0) * tau.ln();
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        sign * (b * jf * PI).sin() * log_mag.exp() / PI
    };
    let leading = term(1);
    let mut value = leading;
    let mut last_mag = leading.abs();
    let mut used = 1;
    let mut truncated = false;
    for j in 2..=n_terms {
        let t = term(j);
        // sin(βjπ) can vanish for individual j, so compare envelopes.
        let envelope = t.abs().max(1e-300);
        if envelope > last_mag && t != 0.0 {
            truncated = true;
            log::warn!("tail series for tau = {tau} diverges after {used} terms; truncated at the smallest term");
            break;
        }
        value += t;
        if t != 0.0 {
            last_mag = envelope;
        }
        used = j;
    }
    Ok(TailSeries {
        value,
        leading_term: leading,
        terms_used: used,
        truncated,
    })
}

/// c(p) = (4/π) ∫₀^∞ k^{−2p} sin²(k/2) dk for 1/2 < p < 3/2.
///
/// [0, 1] is summed from the power series of sin²; the remainder is
/// 1/(2(2p−1)) − (1/2)∫₁^∞ k^{−2p} cos k dk by oscillatory quadrature.
pub fn small_time_constant(ab: f64) -> Result<f64> {
    if !(ab > 0.5 && ab < 1.5) {
        return Err(TplabError::domain(
            "small_time_constant",
            format!("alpha*beta = {ab} outside (1/2, 3/2)"),
        ));
    }
    let p = 2.0 * ab;
    let mut head = 0.0;
    let mut fact = 1.0; // (2n)!
    for n in 1..30 {
        let nf = n as f64;
        fact *= (2.0 * nf - 1.0) * (2.0 * nf);
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        head += sign / (2.0 * fact * (2.0 * nf + 1.0 - p));
    }
    let opts = FourierOptions::new(1e-13, ab, 1.0);
    let osc = cos_transform_from(|k: f64| k.powf(-p), 1.0, 1.0, &opts)?;
    let tail = 1.0 / (2.0 * (p - 1.0)) - 0.5 * osc.value;
    Ok(4.0 / PI * (head + tail))
}

/// Leading behaviour c(αβ)·|t|^{2αβ−1} of the increment variance as t → 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallTimeLaw {
    pub leading_coeff: f64,
    pub exponent: f64,
}

impl SmallTimeLaw {
    pub fn evaluate(&self, t: f64) -> f64 {
        self.leading_coeff * t.abs().powf(self.exponent)
    }
}

/// Small-time increment-variance law. Depends on α and β only through αβ;
/// at αβ = 1 the constant is exactly 1.
pub fn twoindex_smalltime_incvar(q: &TwoIndexParams) -> Result<SmallTimeLaw> {
    let ab = q.alpha() * q.beta();
    q.require_asymptotic_range("twoindex_smalltime_incvar")?;
    Ok(SmallTimeLaw {
        leading_coeff: small_time_constant(ab)?,
        exponent: 2.0 * ab - 1.0,
    })
}

/// Increment variance 2(C(0) − C(t)) = (4/π) ∫₀^∞ sin²(kt/2) (k^{2β}+λ^{2β})^{−α} dk.
///
/// Computed in the rescaled variable u = k|t| so that small t loses no
/// precision to cancellation.
pub fn twoindex_increment_variance(q: &TwoIndexParams, t: f64) -> Result<QuadResult> {
    let t = t.abs();
    if t == 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            subdivisions: 0,
        });
    }
    let (a, b) = (q.alpha(), q.beta());
    let ab = a * b;
    let eps = q.lambda() * t;
    let e2b = eps.powf(2.0 * b);
    let g = |u: f64| (u.powf(2.0 * b) + e2b).powf(-a);
    // Split at a zero of cos u past both 10 and 4ε.
    let m = ((10.0f64.max(4.0 * eps) / PI) - 0.5).ceil();
    let u0 = (m + 0.5) * PI;
    let mut pts = vec![0.0];
    for x in [eps, 1.0] {
        if x > *pts.last().unwrap() && x < u0 {
            pts.push(x);
        }
    }
    pts.push(u0);
    let body = integrate_points(
        |u: f64| {
            let s = (0.5 * u).sin();
            s * s * g(u)
        },
        &pts,
        &QuadConfig::relative(1e-13),
    )?;
    // (1/2) ∫_{u0}^∞ g by the binomial series of (1 + (ε/u)^{2β})^{−α}.
    let ratio = (eps / u0).powf(2.0 * b);
    let mut coeff = 1.0;
    let mut series = 0.0;
    let mut converged = false;
    for j in 0..2000 {
        let jf = j as f64;
        let term = coeff * ratio.powi(j) * u0.powf(1.0 - 2.0 * ab) / (2.0 * ab + 2.0 * b * jf - 1.0);
        series += term;
        if term.abs() <= 1e-17 * series.abs() {
            converged = true;
            break;
        }
        coeff *= (-a - jf) / (jf + 1.0);
    }
    if !converged {
        return Err(TplabError::Accuracy {
            function: "twoindex_increment_variance",
            requested: 1e-17,
            achieved: f64::NAN,
        });
    }
    let scale_tol = 1e-14 * body.value.abs().max(series.abs());
    let opts = FourierOptions::new(scale_tol, ab, 1.0);
    let osc = cos_transform_from(g, u0, 1.0, &opts)?;
    let integral = body.value + 0.5 * series - 0.5 * osc.value;
    let scale = 4.0 / PI * t.powf(2.0 * ab - 1.0);
    Ok(QuadResult {
        value: scale * integral,
        abs_error_estimate: scale * (body.abs_error_estimate + 0.5 * osc.abs_error_estimate),
        subdivisions: body.subdivisions + osc.subdivisions,
    })
}
