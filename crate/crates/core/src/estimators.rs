//! Variogram-based roughness estimators and empirical correlations.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TplabError};
use crate::sampler::{GaussianPath, TimeGrid};

/// Fewest paths accepted by the variogram estimators.
pub const MIN_PATHS: usize = 100;
/// Fewest lags in a fit window.
pub const MIN_FIT_POINTS: usize = 6;
const BATCHES: usize = 10;

/// λ·dt above which tempering contaminates the local law.
pub const REGIME_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariogramEstimate {
    /// Lags in time units.
    pub lags: Vec<f64>,
    pub gamma_hat: Vec<f64>,
    /// Slope of log γ̂ against log τ over the fit window.
    pub slope: f64,
    /// Spread of the slope over path batches.
    pub slope_stderr: f64,
    /// Number of leading lags used in the fit.
    pub fit_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HurstEstimate {
    pub h_hat: f64,
    pub stderr: f64,
    /// λ·dt exceeded [`REGIME_LIMIT`].
    pub regime_warning: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub d_hat: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowedHurst {
    pub t_center: f64,
    pub h_hat: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub tau: f64,
    pub r_hat: f64,
    pub stderr: f64,
}

fn common_grid(paths: &[GaussianPath]) -> Result<TimeGrid> {
    let first = paths
        .first()
        .ok_or_else(|| TplabError::InsufficientData("no paths".into()))?;
    if paths
        .iter()
        .any(|p| p.grid != first.grid || p.values.len() != first.grid.len())
    {
        return Err(TplabError::InvalidParameter("paths must share one grid".into()));
    }
    Ok(first.grid)
}

/// Lag steps 1..=k with k = min(10, n/4), the default fit decade.
pub fn default_lag_steps(n: usize) -> Vec<usize> {
    (1..=(n / 4).clamp(1, 10)).collect()
}

/// Mean squared increment at each lag over `values[range]` of every path.
fn gamma_hat(paths: &[&[f64]], lag_steps: &[usize], lo: usize, hi: usize) -> Vec<f64> {
    lag_steps
        .iter()
        .map(|&l| {
            let mut sum = 0.0;
            let mut count = 0usize;
            for v in paths {
                for i in lo..hi.saturating_sub(l) {
                    let d = v[i + l] - v[i];
                    sum += d * d;
                }
                count += hi.saturating_sub(l).saturating_sub(lo);
            }
            sum / count as f64
        })
        .collect()
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Leading lags within one decade of the smallest, at least [`MIN_FIT_POINTS`].
fn fit_window(lags: &[usize]) -> usize {
    let decade = lags.iter().take_while(|&&l| l <= 10 * lags[0]).count();
    decade.max(MIN_FIT_POINTS).min(lags.len())
}

fn log_slope(lags: &[usize], dt: f64, g: &[f64], k: usize) -> f64 {
    let x: Vec<f64> = lags[..k].iter().map(|&l| (l as f64 * dt).ln()).collect();
    let y: Vec<f64> = g[..k].iter().map(|v| v.ln()).collect();
    least_squares_slope(&x, &y)
}

fn check_lags(lag_steps: &[usize], span: usize) -> Result<()> {
    if lag_steps.len() < MIN_FIT_POINTS {
        return Err(TplabError::InsufficientData(format!(
            "need at least {MIN_FIT_POINTS} lags, got {}",
            lag_steps.len()
        )));
    }
    if lag_steps[0] == 0 || lag_steps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TplabError::InvalidParameter(
            "lags must be positive and increasing".into(),
        ));
    }
    if *lag_steps.last().unwrap() >= span {
        return Err(TplabError::InsufficientData(
            "largest lag does not fit in the window".into(),
        ));
    }
    Ok(())
}

fn variogram_range(paths: &[GaussianPath], lag_steps: &[usize], lo: usize, hi: usize) -> Result<VariogramEstimate> {
    let grid = common_grid(paths)?;
    if paths.len() < MIN_PATHS {
        return Err(TplabError::InsufficientData(format!(
            "need at least {MIN_PATHS} paths, got {}",
            paths.len()
        )));
    }
    check_lags(lag_steps, hi - lo)?;
    let dt = grid.dt();
    let values: Vec<&[f64]> = paths.iter().map(|p| p.values.as_slice()).collect();
    let g = gamma_hat(&values, lag_steps, lo, hi);
    if g.iter().any(|&v| !(v > 0.0)) {
        return Err(TplabError::InsufficientData("zero mean squared increment".into()));
    }
    let k = fit_window(lag_steps);
    let slope = log_slope(lag_steps, dt, &g, k);
    let size = values.len() / BATCHES;
    let batch: Vec<f64> = (0..BATCHES)
        .map(|b| {
            let gb = gamma_hat(&values[b * size..(b + 1) * size], lag_steps, lo, hi);
            log_slope(lag_steps, dt, &gb, k)
        })
        .collect();
    let mean = batch.iter().sum::<f64>() / BATCHES as f64;
    let var = batch.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (BATCHES - 1) as f64;
    Ok(VariogramEstimate {
        lags: lag_steps.iter().map(|&l| l as f64 * dt).collect(),
        gamma_hat: g,
        slope,
        slope_stderr: (var / BATCHES as f64).sqrt(),
        fit_points: k,
    })
}

/// Pooled variogram over all paths and start times.
pub fn variogram(paths: &[GaussianPath], lag_steps: &[usize]) -> Result<VariogramEstimate> {
    let n = common_grid(paths)?.len();
    variogram_range(paths, lag_steps, 0, n)
}

fn regime_warning(paths: &[GaussianPath]) -> bool {
    let p = &paths[0];
    let x = p.process.lambda() * p.grid.dt();
    if x > REGIME_LIMIT {
        log::warn!("lambda*dt = {x} exceeds {REGIME_LIMIT}; the local law may be tempered away");
        true
    } else {
        false
    }
}

/// H = slope/2 of the small-lag variogram.
pub fn hurst_local(paths: &[GaussianPath], lag_steps: &[usize]) -> Result<HurstEstimate> {
    let v = variogram(paths, lag_steps)?;
    Ok(HurstEstimate {
        h_hat: 0.5 * v.slope,
        stderr: 0.5 * v.slope_stderr,
        regime_warning: regime_warning(paths),
    })
}

/// D = 2 − Ĥ.
pub fn fractal_dimension(paths: &[GaussianPath], lag_steps: &[usize]) -> Result<DimensionEstimate> {
    let h = hurst_local(paths, lag_steps)?;
    Ok(DimensionEstimate {
        d_hat: 2.0 - h.h_hat,
        stderr: h.stderr,
    })
}

/// Window width in grid points: 1/(4λ) in time, at most n/8 points.
pub fn window_points(grid: &TimeGrid, lambda: f64) -> usize {
    let w = (0.25 / (lambda * grid.dt())).floor();
    let cap = grid.len() / 8;
    if w.is_finite() && (w as usize) < cap {
        w as usize
    } else {
        cap
    }
}

/// Ĥ(t) over non-overlapping windows of `width` points, for
/// time-varying roughness.
pub fn hurst_windowed(paths: &[GaussianPath], lag_steps: &[usize], width: usize) -> Result<Vec<WindowedHurst>> {
    let grid = common_grid(paths)?;
    if width < 2 || width > grid.len() {
        return Err(TplabError::InvalidParameter(format!(
            "window width {width} out of range"
        )));
    }
    regime_warning(paths);
    (0..grid.len() / width)
        .map(|w| {
            let (lo, hi) = (w * width, (w + 1) * width);
            let v = variogram_range(paths, lag_steps, lo, hi)?;
            Ok(WindowedHurst {
                t_center: 0.5 * (grid.time(lo) + grid.time(hi - 1)),
                h_hat: 0.5 * v.slope,
                stderr: 0.5 * v.slope_stderr,
            })
        })
        .collect()
}

/// Empirical correlation of X(t) and X(t + τ) for each τ step, assuming
/// mean zero, with standard error (1 − ρ̂²)/√N.
pub fn lrd_plateau_empirical(
    paths: &[GaussianPath],
    t_index: usize,
    tau_steps: &[usize],
) -> Result<Vec<CorrelationEstimate>> {
    let grid = common_grid(paths)?;
    if paths.len() < 2 {
        return Err(TplabError::InsufficientData("need at least two paths".into()));
    }
    let n = paths.len() as f64;
    tau_steps
        .iter()
        .map(|&k| {
            let j = t_index + k;
            if j >= grid.len() {
                return Err(TplabError::InsufficientData(format!(
                    "t + tau step {k} runs off the grid"
                )));
            }
            let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
            for p in paths {
                let (x, y) = (p.values[t_index], p.values[j]);
                sxy += x * y;
                sxx += x * x;
                syy += y * y;
            }
            if sxx == 0.0 || syy == 0.0 {
                return Err(TplabError::InsufficientData("zero variance at t".into()));
            }
            let r = sxy / (sxx * syy).sqrt();
            Ok(CorrelationEstimate {
                tau: k as f64 * grid.dt(),
                r_hat: r,
                stderr: (1.0 - r * r) / n.sqrt(),
            })
        })
        .collect()
}
