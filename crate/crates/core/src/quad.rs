//! Adaptive Gauss–Kronrod quadrature and half-line cosine transforms.
//!
//! These routines are the independent oracle that every closed-form kernel
//! is checked against, so they are deliberately generic and know nothing
//! about the processes themselves.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TplabError};

pub const DEFAULT_MAX_SUBDIVISIONS: usize = 10_000;

/// Outcome of a successful integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub subdivisions: usize,
}

/// Tolerances for [`integrate`]. Convergence means
/// `error <= max(abs_tol, rel_tol * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadConfig {
    pub fn absolute(tol: f64) -> Self {
        QuadConfig {
            abs_tol: tol,
            rel_tol: 0.0,
            max_subdivisions: DEFAULT_MAX_SUBDIVISIONS,
        }
    }

    pub fn relative(tol: f64) -> Self {
        QuadConfig {
            abs_tol: 0.0,
            rel_tol: tol,
            max_subdivisions: DEFAULT_MAX_SUBDIVISIONS,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_subdivisions: DEFAULT_MAX_SUBDIVISIONS,
        }
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    // Largest error first; ties broken by position so the order is total.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resg = 0.0;
    let mut resk = fc * WGK[10];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Segment { a, b, value, error }
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], cfg: &QuadConfig) -> Result<QuadResult> {
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        heap.push(gk21(f, w[0], w[1]));
    }
    let (mut value, mut error) = totals(&heap);
    let mut subdivisions = 0usize;
    loop {
        if !value.is_finite() || !error.is_finite() {
            return Err(TplabError::NonConvergence {
                value,
                error,
                subdivisions,
            });
        }
        if error <= cfg.target(value) {
            let (value, error) = totals(&heap);
            return Ok(QuadResult {
                value,
                abs_error_estimate: error,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        let too_narrow = (worst.b - worst.a).abs() <= 1e3 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE);
        if subdivisions >= cfg.max_subdivisions || too_narrow {
            heap.push(worst);
            let (value, error) = totals(&heap);
            return Err(TplabError::NonConvergence {
                value,
                error,
                subdivisions,
            });
        }
        let left = gk21(f, worst.a, mid);
        let right = gk21(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        // Refresh the running sums now and then so cancellation cannot drift.
        if subdivisions % 64 == 0 {
            (value, error) = totals(&heap);
        }
    }
}

// Summation in left-to-right order keeps results independent of heap layout.
fn totals(heap: &BinaryHeap<Segment>) -> (f64, f64) {
    let mut segs: Vec<&Segment> = heap.iter().collect();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segs.iter().map(|s| s.value).sum();
    let error = segs.iter().map(|s| s.error).sum();
    (value, error)
}

/// Integrates `f` over `[a, b]`; `b` may be `f64::INFINITY`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    integrate_points(f, &[a, b], cfg)
}

/// Integrates over consecutive intervals of `points`, which must be
/// increasing. Only the last point may be `+inf`.
pub fn integrate_points<F: Fn(f64) -> f64>(f: F, points: &[f64], cfg: &QuadConfig) -> Result<QuadResult> {
    if points.len() < 2 {
        return Err(TplabError::invalid("integration needs at least two points"));
    }
    if points.windows(2).any(|w| !(w[0] < w[1])) || points[..points.len() - 1].iter().any(|p| !p.is_finite()) {
        return Err(TplabError::invalid("integration points must be finite and increasing"));
    }
    let last = points.len() - 1;
    if points[last].is_finite() {
        return adaptive(&f, points, cfg);
    }
    // x = origin + (1-u)/u maps (0,1] onto [origin, inf). Algebraic tails
    // become endpoint singularities at u = 0, where bisection has the full
    // floating-point range to work with.
    let origin = points[last - 1];
    let mapped = |u: f64| {
        let y = f(origin + (1.0 - u) / u) / (u * u);
        if y.is_finite() {
            y
        } else {
            0.0
        }
    };
    if last == 1 {
        return adaptive(&mapped, &[0.0, 1.0], cfg);
    }
    let half = QuadConfig {
        abs_tol: 0.5 * cfg.abs_tol,
        ..*cfg
    };
    let head = adaptive(&f, &points[..last], &half)?;
    let tail = adaptive(&mapped, &[0.0, 1.0], &half)?;
    Ok(QuadResult {
        value: head.value + tail.value,
        abs_error_estimate: head.abs_error_estimate + tail.abs_error_estimate,
        subdivisions: head.subdivisions + tail.subdivisions,
    })
}

/// `∫ f` over `[a, b]` (or `[a, inf)`) to absolute tolerance `tol`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            subdivisions: 0,
        });
    }
    if a > b {
        let r = integrate(&f, b, a, &QuadConfig::absolute(tol))?;
        return Ok(QuadResult { value: -r.value, ..r });
    }
    integrate(f, a, b, &QuadConfig::absolute(tol))
}

/// Options for the oscillatory half-line transforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierOptions {
    /// Absolute tolerance on the transform.
    pub tol: f64,
    /// Exponent `p` in the declared envelope `|g(k)| <= C k^{-2p}`.
    pub decay_exponent: f64,
    /// Constant `C` in the declared envelope.
    pub decay_constant: f64,
    /// Maximum number of half-periods summed before giving up.
    pub max_half_periods: usize,
}

impl FourierOptions {
    pub fn new(tol: f64, decay_exponent: f64, decay_constant: f64) -> Self {
        FourierOptions {
            tol,
            decay_exponent,
            decay_constant,
            max_half_periods: 4000,
        }
    }
}

/// Analytic bound on `∫_K^∞ C k^{-2p} dk`.
pub fn envelope_tail_bound(c: f64, p: f64, k: f64) -> f64 {
    c * k.powf(1.0 - 2.0 * p) / (2.0 * p - 1.0)
}

/// `∫₀^∞ g(k) cos(kτ) dk` for an even, decaying amplitude `g`.
///
/// Integrates between consecutive zeros of `cos(kτ)` and extrapolates the
/// partial sums with the epsilon algorithm.
pub fn fourier_cos_halfline<G: Fn(f64) -> f64>(g: G, tau: f64, opts: &FourierOptions) -> Result<QuadResult> {
    let tau = tau.abs();
    if tau == 0.0 {
        let cfg = QuadConfig {
            abs_tol: opts.tol,
            rel_tol: 0.0,
            max_subdivisions: DEFAULT_MAX_SUBDIVISIONS,
        };
        return integrate(g, 0.0, f64::INFINITY, &cfg);
    }
    cos_transform_from(g, 0.0, tau, opts)
}

/// `∫_a^∞ g(k) cos(kτ) dk` for `τ > 0`, summed over half-periods.
pub fn cos_transform_from<G: Fn(f64) -> f64>(g: G, a: f64, tau: f64, opts: &FourierOptions) -> Result<QuadResult> {
    if !(tau > 0.0) {
        return Err(TplabError::invalid("oscillatory transform needs tau > 0"));
    }
    let f = |k: f64| g(k) * (k * tau).cos();
    let half = std::f64::consts::PI / tau;
    // First zero of cos(kτ) strictly after a.
    let j0 = ((a * tau / std::f64::consts::PI) - 0.5).floor() + 1.0;
    let first = (j0 + 0.5) * half;
    let edges = std::iter::once(a).chain((0..).map(move |j| first + j as f64 * half));
    sum_pieces(f, edges, opts)
}

/// `∫₀^∞ g(k) cos(kτ) dk` for an amplitude analytic and decaying in the strip
/// `|Im k| < strip` with `g(conj z) = conj g(z)` and `g(-z) = g(z)`.
///
/// The contour is moved to `Im k = strip - 1/τ`, which pulls out the factor
/// `exp(-(strip - 1/τ)τ)` exactly and avoids the cancellation that makes the
/// real-line sum useless once the transform is exponentially small. Falls
/// back to the real line when the shift would not be positive.
pub fn fourier_cos_halfline_shifted<G>(g: G, strip: f64, tau: f64, opts: &FourierOptions) -> Result<QuadResult>
where
    G: Fn(Complex64) -> Complex64,
{
    let tau = tau.abs();
    let c = if tau > 0.0 { strip - 1.0 / tau } else { 0.0 };
    if c <= 0.0 {
        return fourier_cos_halfline(|k| g(Complex64::new(k, 0.0)).re, tau, opts);
    }
    let scale = (-c * tau).exp();
    let f = |x: f64| {
        let w = g(Complex64::new(x, c));
        let (s, co) = (x * tau).sin_cos();
        w.re * co - w.im * s
    };
    let half = std::f64::consts::PI / tau;
    let edges = std::iter::once(0.0).chain((0..).map(move |j| (j as f64 + 0.5) * half));
    let inner = FourierOptions {
        tol: opts.tol / scale,
        ..*opts
    };
    let r = sum_pieces(f, edges, &inner)?;
    Ok(QuadResult {
        value: scale * r.value,
        abs_error_estimate: scale * r.abs_error_estimate,
        subdivisions: r.subdivisions,
    })
}

fn sum_pieces<F, I>(f: F, mut edges: I, opts: &FourierOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
    I: Iterator<Item = f64>,
{
    let mut left = edges.next().expect("edge iterator is infinite");
    let mut right = edges.next().expect("edge iterator is infinite");
    // Pieces that nearly cancel cannot beat roundoff relative to the size of
    // the integrand, so the floor is tied to the first piece's magnitude.
    let magnitude = gk21(&|k: f64| f(k).abs(), left, right).value.abs();
    let piece_cfg = QuadConfig {
        abs_tol: (opts.tol * 1e-3).max(1e-14 * magnitude),
        rel_tol: 1e-13,
        max_subdivisions: 200,
    };
    let mut partial = 0.0;
    let mut quad_err = 0.0;
    let mut subdivisions = 0;
    let mut eps = Epsilon::default();
    let mut last_estimates: Vec<f64> = Vec::new();
    for n in 0..opts.max_half_periods {
        if n > 0 {
            left = right;
            right = edges.next().expect("edge iterator is infinite");
        }
        let r = integrate(&f, left, right, &piece_cfg)?;
        partial += r.value;
        quad_err += r.abs_error_estimate;
        subdivisions += r.subdivisions;

        let tail = envelope_tail_bound(opts.decay_constant, opts.decay_exponent, right);
        if tail < 0.5 * opts.tol {
            return Ok(QuadResult {
                value: partial,
                abs_error_estimate: tail + quad_err,
                subdivisions,
            });
        }
        let est = eps.push(partial);
        last_estimates.push(est);
        if n >= 8 {
            let k = last_estimates.len();
            let spread = (last_estimates[k - 1] - last_estimates[k - 2])
                .abs()
                .max((last_estimates[k - 1] - last_estimates[k - 3]).abs());
            if spread + quad_err < 0.5 * opts.tol {
                return Ok(QuadResult {
                    value: last_estimates[k - 1],
                    abs_error_estimate: spread + quad_err,
                    subdivisions,
                });
            }
        }
    }
    let k = last_estimates.len();
    let value = last_estimates[k - 1];
    let error = (last_estimates[k - 1] - last_estimates[k - 2]).abs() + quad_err;
    Err(TplabError::SlowDecay { value, error })
}

/// Wynn epsilon table over a growing sequence of partial sums.
#[derive(Debug, Default)]
struct Epsilon {
    // Last anti-diagonal of the table: row[j] = eps_j for the newest entry.
    row: Vec<f64>,
    count: usize,
}

impl Epsilon {
    // Only the most recent ~50 terms matter; older ones are dropped.
    const DEPTH: usize = 50;

    fn push(&mut self, s: f64) -> f64 {
        let mut new_row = Vec::with_capacity(self.row.len() + 1);
        new_row.push(s);
        let mut prev_lower = 0.0; // eps_{j-1} of the previous anti-diagonal
        for j in 0..self.row.len().min(Self::DEPTH) {
            let diff = new_row[j] - self.row[j];
            if diff == 0.0 || !diff.is_finite() {
                break;
            }
            let next = prev_lower + 1.0 / diff;
            if !next.is_finite() {
                break;
            }
            prev_lower = self.row[j];
            new_row.push(next);
        }
        self.row = new_row;
        self.count += 1;
        // Even columns hold the extrapolated values; take the deepest one.
        let last_even = (self.row.len() - 1) & !1;
        self.row[last_even]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{E, PI};

    #[test]
    fn exponential_on_half_line() {
        let r = integrate_adaptive(|k| (-k).exp(), 0.0, f64::INFINITY, 1e-10).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-12);
        assert!(r.abs_error_estimate <= 1e-10);
    }

    #[test]
    fn lorentzian_on_half_line() {
        let r = integrate_adaptive(|k| 1.0 / (1.0 + k * k), 0.0, f64::INFINITY, 1e-11).unwrap();
        assert_relative_eq!(r.value, PI / 2.0, max_relative = 1e-11);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let r = integrate_adaptive(|x| x * x, 1.0, 0.0, 1e-13).unwrap();
        assert_relative_eq!(r.value, -1.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, &QuadConfig::relative(1e-10)).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-10);
    }

    #[test]
    fn breakpoints_with_infinite_tail() {
        let r = integrate_points(
            |x: f64| (-x.abs()).exp(),
            &[-1.0, 0.0, 2.0, f64::INFINITY],
            &QuadConfig::relative(1e-12),
        )
        .unwrap();
        assert_relative_eq!(r.value, 2.0 - (-1.0f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn cap_reports_partial_value() {
        let cfg = QuadConfig {
            abs_tol: 1e-15,
            rel_tol: 0.0,
            max_subdivisions: 3,
        };
        match integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &cfg) {
            Err(TplabError::NonConvergence {
                value, subdivisions, ..
            }) => {
                assert!(value.is_finite());
                assert_eq!(subdivisions, 3);
            }
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn cosine_transform_of_lorentzian() {
        let opts = FourierOptions::new(1e-12, 1.0, 1.0);
        let r = fourier_cos_halfline(|k| 1.0 / (k * k + 1.0), 1.0, &opts).unwrap();
        assert_relative_eq!(r.value, PI / (2.0 * E), max_relative = 1e-10);
        assert_relative_eq!(r.value, 0.5778636748954609, max_relative = 1e-10);
    }

    #[test]
    fn cosine_transform_at_zero_lag() {
        let opts = FourierOptions::new(1e-12, 1.0, 1.0);
        let r = fourier_cos_halfline(|k| (-k).exp(), 0.0, &opts).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn ou_spectrum_transform() {
        // (1/π)∫(k²+1/4)^{-1} cos(2k) dk = e^{-1}
        let opts = FourierOptions::new(1e-12, 1.0, 1.0);
        let r = fourier_cos_halfline(|k| 1.0 / (k * k + 0.25), 2.0, &opts).unwrap();
        assert_relative_eq!(r.value / PI, (-1.0f64).exp(), max_relative = 1e-10);
    }

    #[test]
    fn shifted_contour_matches_real_line_and_resolves_tiny_values() {
        let g = |z: Complex64| (z * z + 1.0).powf(-1.0);
        let opts = FourierOptions::new(1e-13, 1.0, 1.0);
        let r = fourier_cos_halfline_shifted(g, 1.0, 3.0, &opts).unwrap();
        assert_relative_eq!(r.value, PI / 2.0 * (-3.0f64).exp(), max_relative = 1e-10);
        let opts = FourierOptions::new(1e-30, 1.0, 1.0);
        let r = fourier_cos_halfline_shifted(g, 1.0, 40.0, &opts).unwrap();
        assert_relative_eq!(r.value, PI / 2.0 * (-40.0f64).exp(), max_relative = 1e-9);
    }

    #[test]
    fn slowly_decaying_amplitude() {
        // ∫₀^∞ cos(k)/(1+k)^{1.1}: alternating sum with a slow envelope.
        let opts = FourierOptions::new(1e-10, 0.55, 1.0);
        let a = fourier_cos_halfline(|k| (1.0 + k).powf(-1.1), 1.0, &opts).unwrap();
        let tight = FourierOptions::new(1e-12, 0.55, 1.0);
        let b = fourier_cos_halfline(|k| (1.0 + k).powf(-1.1), 1.0, &tight).unwrap();
        assert!((a.value - b.value).abs() <= a.abs_error_estimate.max(1e-10));
    }

    #[test]
    fn transform_tail_from_offset() {
        // ∫_1^∞ cos(k) e^{-k} dk = e^{-1}(cos 1 - sin 1)/2
        let opts = FourierOptions::new(1e-13, 5.0, 10.0);
        let r = cos_transform_from(|k| (-k).exp(), 1.0, 1.0, &opts).unwrap();
        let exact = (-1.0f64).exp() * (1.0f64.cos() - 1.0f64.sin()) / 2.0;
        assert_relative_eq!(r.value, exact, max_relative = 1e-11);
    }
}
