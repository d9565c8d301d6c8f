//! Gaussian path synthesis: exact (dense Cholesky) for every family and
//! circulant embedding of the stationary increments for TFBM.
//!
//! Path `i` of a run with master seed `s` draws its normals from
//! `ChaCha8Rng::seed_from_u64(derive_substream_seed(s, i))`, so results do not
//! depend on how paths are scheduled across threads.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TplabError};
use crate::kernels::{tfbm_increment_cov, FracOUParams, ProcessSpec};

/// Largest grid accepted by the dense sampler.
pub const MAX_EXACT_POINTS: usize = 4096;

/// Name of the pinned generator; part of every reproducibility statement.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Uniform grid t0, t0 + dt, …, t0 + (n−1)dt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct TimeGrid {
    t0: f64,
    dt: f64,
    n: usize,
}

#[derive(Deserialize)]
struct RawGrid {
    t0: f64,
    dt: f64,
    n: usize,
}

impl TryFrom<RawGrid> for TimeGrid {
    type Error = TplabError;
    fn try_from(r: RawGrid) -> Result<Self> {
        TimeGrid::new(r.t0, r.dt, r.n)
    }
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, n: usize) -> Result<Self> {
        if !t0.is_finite() || !(dt > 0.0) || !dt.is_finite() || n == 0 {
            return Err(TplabError::invalid(format!("bad grid t0 = {t0}, dt = {dt}, n = {n}")));
        }
        if !(t0 + dt * (n as f64)).is_finite() {
            return Err(TplabError::invalid("grid end overflows"));
        }
        Ok(TimeGrid { t0, dt, n })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.time(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMethod {
    Cholesky,
    SpectralIncrements,
}

/// One sampled path with everything needed to regenerate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPath {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub process: ProcessSpec,
    /// Master seed of the run.
    pub seed: u64,
    pub path_index: u64,
    pub method: SamplingMethod,
    /// Diagonal jitter added before factorization (0 for spectral paths).
    pub jitter: f64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of substream `path_index` under `master`.
///
/// `master + index·φ` is injective in the index for an odd φ, and the
/// splitmix64 finalizer is a bijection, so distinct indices give distinct
/// seeds.
pub fn derive_substream_seed(master: u64, path_index: u64) -> u64 {
    const PHI: u64 = 0x9E37_79B9_7F4A_7C15;
    splitmix64(master.wrapping_add(path_index.wrapping_mul(PHI)))
}

fn rng_for(master: u64, path_index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_substream_seed(master, path_index))
}

/// Gram matrix of `process` on `grid`. Entries are computed independently,
/// so the parallel fill gives the same matrix on any thread count.
pub fn gram_matrix(process: &ProcessSpec, grid: &TimeGrid) -> Result<DMatrix<f64>> {
    let n = grid.len();
    let t = grid.times();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..=i).map(|j| process.cov(t[i], t[j])).collect::<Result<Vec<f64>>>())
        .collect::<Result<_>>()?;
    let mut g = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

/// Lower Cholesky factor over the rows with nonzero variance.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    pub lower: DMatrix<f64>,
    /// Indices of the factored rows; the rest are identically zero.
    pub active: Vec<usize>,
    pub jitter: f64,
}

/// Factorizes `gram`, retrying with diagonal jitter 1e-14·mean(diag), ×10
/// per attempt, up to 1e-10·trace/n.
pub fn cholesky_with_jitter(gram: &DMatrix<f64>) -> Result<CholeskyFactor> {
    let n = gram.nrows();
    let active: Vec<usize> = (0..n).filter(|&i| gram[(i, i)] != 0.0).collect();
    let m = active.len();
    let sub = DMatrix::from_fn(m, m, |i, j| gram[(active[i], active[j])]);
    if m == 0 {
        return Ok(CholeskyFactor {
            lower: sub,
            active,
            jitter: 0.0,
        });
    }
    let trace: f64 = (0..m).map(|i| sub[(i, i)]).sum();
    let mean = trace / m as f64;
    let cap = 1e-10 * trace / m as f64;
    let mut jitter = 0.0;
    loop {
        let mut a = sub.clone();
        for i in 0..m {
            a[(i, i)] += jitter;
        }
        if let Some(c) = nalgebra::linalg::Cholesky::new(a) {
            if jitter > 0.0 {
                log::warn!("Cholesky needed diagonal jitter {jitter:e}");
            }
            return Ok(CholeskyFactor {
                lower: c.l(),
                active,
                jitter,
            });
        }
        jitter = if jitter == 0.0 { 1e-14 * mean } else { jitter * 10.0 };
        if jitter > cap * (1.0 + 1e-12) {
            return Err(TplabError::NotPsd { max_jitter: cap });
        }
    }
}

fn draw_normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Exact sampling from the Gram matrix; mean zero.
pub fn sample_exact(process: &ProcessSpec, grid: &TimeGrid, seed: u64, n_paths: usize) -> Result<Vec<GaussianPath>> {
    process.validate()?;
    if grid.len() > MAX_EXACT_POINTS {
        return Err(TplabError::invalid(format!(
            "exact sampling supports at most {MAX_EXACT_POINTS} points, got {}",
            grid.len()
        )));
    }
    let gram = gram_matrix(process, grid)?;
    let factor = cholesky_with_jitter(&gram)?;
    Ok(sample_with_factor(process, grid, &factor, seed, 0..n_paths as u64))
}

/// Paths `indices` from an existing factorization.
pub fn sample_with_factor(
    process: &ProcessSpec,
    grid: &TimeGrid,
    factor: &CholeskyFactor,
    seed: u64,
    indices: std::ops::Range<u64>,
) -> Vec<GaussianPath> {
    let m = factor.active.len();
    indices
        .into_par_iter()
        .map(|index| {
            let mut rng = rng_for(seed, index);
            let z = DVector::from_vec(draw_normals(&mut rng, m));
            let x = &factor.lower * z;
            let mut values = vec![0.0; grid.len()];
            for (k, &row) in factor.active.iter().enumerate() {
                values[row] = x[k];
            }
            GaussianPath {
                grid: *grid,
                values,
                process: process.clone(),
                seed,
                path_index: index,
                method: SamplingMethod::Cholesky,
                jitter: factor.jitter,
            }
        })
        .collect()
}

/// Square roots of the circulant eigenvalues scaled for synthesis, or an
/// embedding failure.
#[derive(Debug, Clone)]
pub struct CirculantEmbedding {
    sqrt_eig: Vec<f64>,
    len: usize,
}

impl CirculantEmbedding {
    /// Embeds the lag sequence r(0..m) in a circulant of size 2·(next power
    /// of two ≥ m), extending with further lags of `r`.
    pub fn new<F: Fn(usize) -> f64>(r: F, m: usize) -> Result<Self> {
        let half = m.max(1).next_power_of_two();
        let size = 2 * half;
        let mut c: Vec<Complex64> = (0..size)
            .map(|k| Complex64::new(r(if k <= half { k } else { size - k }), 0.0))
            .collect();
        FftPlanner::new().plan_fft_forward(size).process(&mut c);
        let max = c.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let min = c.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        if min < -1e-8 * max {
            return Err(TplabError::EmbeddingFailure {
                min_eigenvalue: min,
                relative: min / max,
            });
        }
        if min < 0.0 {
            log::warn!("clamping circulant eigenvalues down to {min:e} to zero");
        }
        let sqrt_eig = c.iter().map(|z| (z.re.max(0.0) / size as f64).sqrt()).collect();
        Ok(CirculantEmbedding { sqrt_eig, len: m })
    }

    /// One stationary sequence of the embedded length.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let size = self.sqrt_eig.len();
        let mut w: Vec<Complex64> = self
            .sqrt_eig
            .iter()
            .map(|&s| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(s * re, s * im)
            })
            .collect();
        FftPlanner::new().plan_fft_forward(size).process(&mut w);
        w[..self.len].iter().map(|z| z.re).collect()
    }
}

/// TFBM paths by circulant embedding of the increment covariance, summed
/// from 0. Falls back to [`sample_exact`] with a warning when the embedding
/// is not nonnegative definite.
pub fn sample_tfbm_spectral(p: &FracOUParams, grid: &TimeGrid, seed: u64, n_paths: usize) -> Result<Vec<GaussianPath>> {
    let process = ProcessSpec::Tfbm { params: *p };
    process.validate()?;
    if grid.t0() != 0.0 {
        return Err(TplabError::invalid(
            "spectral TFBM sampling needs a grid starting at t = 0",
        ));
    }
    let m = grid.len() - 1;
    let dt = grid.dt();
    let emb = match CirculantEmbedding::new(|k| tfbm_increment_cov(p, dt, k as f64 * dt), m) {
        Ok(e) => e,
        Err(e) => {
            log::warn!("{e}; falling back to exact sampling");
            return sample_exact(&process, grid, seed, n_paths);
        }
    };
    Ok((0..n_paths as u64)
        .into_par_iter()
        .map(|index| {
            let mut rng = rng_for(seed, index);
            let inc = if m > 0 { emb.sample(&mut rng) } else { Vec::new() };
            let mut values = Vec::with_capacity(grid.len());
            let mut acc = 0.0;
            values.push(0.0);
            for d in inc {
                acc += d;
                values.push(acc);
            }
            GaussianPath {
                grid: *grid,
                values,
                process: process.clone(),
                seed,
                path_index: index,
                method: SamplingMethod::SpectralIncrements,
                jitter: 0.0,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_by_two_factor() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
        let f = cholesky_with_jitter(&g).unwrap();
        assert_eq!(f.jitter, 0.0);
        assert_relative_eq!(f.lower[(0, 0)], 1.0);
        assert_relative_eq!(f.lower[(1, 0)], 0.5);
        assert_relative_eq!(f.lower[(1, 1)], 0.75f64.sqrt(), max_relative = 1e-15);
        assert_eq!(f.lower[(0, 1)], 0.0);
    }

    #[test]
    fn zero_rows_are_skipped_and_indefinite_rejected() {
        let g = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 2.0, 1.0, 0.0, 1.0, 2.0]);
        let f = cholesky_with_jitter(&g).unwrap();
        assert_eq!(f.active, vec![1, 2]);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(cholesky_with_jitter(&bad), Err(TplabError::NotPsd { .. })));
    }

    #[test]
    fn substreams_are_distinct_and_stable() {
        assert_ne!(derive_substream_seed(7, 0), derive_substream_seed(7, 1));
        assert_eq!(derive_substream_seed(7, 3), derive_substream_seed(7, 3));
        let mut seen = std::collections::HashSet::new();
        for i in 0..10_000 {
            assert!(seen.insert(derive_substream_seed(42, i)));
        }
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 0.0, 4).is_err());
        assert!(TimeGrid::new(0.0, 0.1, 0).is_err());
        let g = TimeGrid::new(1.0, 0.5, 3).unwrap();
        assert_eq!(g.times(), vec![1.0, 1.5, 2.0]);
    }

    #[test]
    fn embedding_reproduces_white_noise() {
        let e = CirculantEmbedding::new(|k| if k == 0 { 1.0 } else { 0.0 }, 5).unwrap();
        for s in &e.sqrt_eig {
            assert_relative_eq!(*s, (1.0f64 / 16.0).sqrt(), max_relative = 1e-12);
        }
        let bad = CirculantEmbedding::new(|k| if k == 1 { 1.0 } else { 0.0 }, 4);
        assert!(bad.is_err());
    }

    #[test]
    fn pinned_paths_and_determinism() {
        let p = FracOUParams::new(1.25, 0.5).unwrap();
        let grid = TimeGrid::new(0.0, 0.1, 32).unwrap();
        let spec = ProcessSpec::Tfbm { params: p };
        let a = sample_exact(&spec, &grid, 9, 4).unwrap();
        let b = sample_exact(&spec, &grid, 9, 4).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|x| x.values[0] == 0.0));
        assert_ne!(a[0].values, a[1].values);
        let s = sample_tfbm_spectral(&p, &grid, 9, 4).unwrap();
        assert!(s.iter().all(|x| x.values[0] == 0.0 && x.values.len() == 32));
        assert_eq!(s, sample_tfbm_spectral(&p, &grid, 9, 4).unwrap());
    }

    #[test]
    fn single_path_regenerates() {
        let spec = ProcessSpec::Fou {
            params: FracOUParams::new(1.25, 0.5).unwrap(),
        };
        let grid = TimeGrid::new(0.0, 0.1, 16).unwrap();
        let many = sample_exact(&spec, &grid, 5, 3).unwrap();
        let factor = cholesky_with_jitter(&gram_matrix(&spec, &grid).unwrap()).unwrap();
        let one = sample_with_factor(&spec, &grid, &factor, 5, 2..3);
        assert_eq!(one[0], many[2]);
    }
}
