use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use tplab::estimators::{
    default_lag_steps, fractal_dimension, hurst_local, hurst_windowed, lrd_plateau_empirical, variogram, window_points,
};
use tplab::kernels::{fou_cov, tfbm_cov, FracOUParams, ProcessSpec};
use tplab::sampler::{sample_exact, sample_tfbm_spectral, GaussianPath, SamplingMethod, TimeGrid, RNG_ALGORITHM};
use tplab::validate::{run_suite, Suite, SuiteOptions};

use crate::config::{out_dir, ConfigEcho};
use crate::error::CliError;

/// Writes to `<out>/<name>` when an output directory is configured, else stdout.
fn sink(echo: &ConfigEcho, name: &str) -> Result<Box<dyn Write>, CliError> {
    match out_dir(&echo.resolved) {
        Some(dir) => {
            std::fs::create_dir_all(&dir)?;
            Ok(Box::new(BufWriter::new(File::create(dir.join(name))?)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

pub fn cov(echo: &ConfigEcho) -> Result<(), CliError> {
    let cfg = &echo.resolved;
    if cfg.figure1 {
        return figure1(echo);
    }
    let spec = cfg.process_spec()?;
    let grid = cfg.grid()?;
    let mut w = csv::Writer::from_writer(sink(echo, "cov.csv")?);
    w.write_record(["t", "value"])?;
    for t in grid.times() {
        let v = match (cfg.s, spec.is_stationary()) {
            (Some(s), _) => spec.cov(t, s)?,
            (None, true) => spec.cov(t, 0.0)?,
            (None, false) => spec.var(t)?,
        };
        w.write_record([t.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// FOU C(t − s) and TFBM C(t, s) at s = 0.5, λ = 0.5, H = 0.75 over [0, 10].
fn figure1(echo: &ConfigEcho) -> Result<(), CliError> {
    let p = FracOUParams::from_hurst(0.75, 0.5)?;
    let s = 0.5;
    let grid = TimeGrid::new(0.0, 0.05, 201)?;
    let mut w = csv::Writer::from_writer(sink(echo, "figure1.csv")?);
    w.write_record(["t", "fou", "tfbm"])?;
    for t in grid.times() {
        w.write_record([
            t.to_string(),
            fou_cov(&p, t - s).to_string(),
            tfbm_cov(&p, t, s).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One JSON-lines record per path.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathRecord {
    pub family: String,
    pub seed: u64,
    pub path_index: u64,
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
    pub method: SamplingMethod,
    pub jitter: f64,
    pub rng: String,
    pub process: ProcessSpec,
}

impl From<&GaussianPath> for PathRecord {
    fn from(p: &GaussianPath) -> Self {
        PathRecord {
            family: p.process.name().to_string(),
            seed: p.seed,
            path_index: p.path_index,
            t0: p.grid.t0(),
            dt: p.grid.dt(),
            values: p.values.clone(),
            method: p.method,
            jitter: p.jitter,
            rng: RNG_ALGORITHM.to_string(),
            process: p.process.clone(),
        }
    }
}

impl PathRecord {
    fn into_path(self) -> Result<GaussianPath, String> {
        if self.family != self.process.name() {
            return Err(format!(
                "family '{}' does not match process '{}'",
                self.family,
                self.process.name()
            ));
        }
        let grid = TimeGrid::new(self.t0, self.dt, self.values.len()).map_err(|e| e.to_string())?;
        Ok(GaussianPath {
            grid,
            values: self.values,
            process: self.process,
            seed: self.seed,
            path_index: self.path_index,
            method: self.method,
            jitter: self.jitter,
        })
    }
}

pub fn sample(echo: &ConfigEcho) -> Result<(), CliError> {
    let cfg = &echo.resolved;
    let spec = cfg.process_spec()?;
    let grid = cfg.grid()?;
    let n_paths = cfg.paths.unwrap_or(100);
    let paths = match (cfg.method.as_str(), &spec) {
        ("exact", _) => sample_exact(&spec, &grid, cfg.seed, n_paths)?,
        ("spectral", ProcessSpec::Tfbm { params }) => sample_tfbm_spectral(params, &grid, cfg.seed, n_paths)?,
        ("spectral", _) => return Err(CliError::Usage("spectral sampling is available for tfbm only".into())),
        (m, _) => return Err(CliError::Usage(format!("unknown method '{m}'"))),
    };
    let mut w = sink(echo, "paths.jsonl")?;
    for p in &paths {
        serde_json::to_writer(&mut w, &PathRecord::from(p))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a path file, reporting schema errors with their line number.
pub fn read_paths(path: &Path) -> Result<Vec<GaussianPath>, CliError> {
    let file = File::open(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| CliError::Usage(format!("{}:{}: {msg}", path.display(), i + 1));
        let rec: PathRecord = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        out.push(rec.into_path().map_err(bad)?);
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("{}: no paths", path.display())));
    }
    Ok(out)
}

pub fn estimate(echo: &ConfigEcho) -> Result<(), CliError> {
    let cfg = &echo.resolved;
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::Usage("estimate needs --input".into()))?;
    let paths = read_paths(Path::new(input))?;
    let grid = paths[0].grid;
    let lags = if cfg.lags.is_empty() {
        default_lag_steps(grid.len())
    } else {
        cfg.lags.clone()
    };
    let which = cfg.estimator.as_str();
    let all = which == "all";
    if !["all", "variogram", "hurst", "dimension", "windowed", "plateau"].contains(&which) {
        return Err(CliError::Usage(format!("unknown estimator '{which}'")));
    }
    let mut w = csv::Writer::from_writer(sink(echo, "estimate.csv")?);
    w.write_record(["estimator", "x", "value", "stderr"])?;
    let row = |w: &mut csv::Writer<Box<dyn Write>>, name: &str, x: Option<f64>, v: f64, se: Option<f64>| {
        let opt = |o: Option<f64>| o.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([name.to_string(), opt(x), v.to_string(), opt(se)])
    };
    if all || which == "variogram" {
        let v = variogram(&paths, &lags)?;
        for (lag, g) in v.lags.iter().zip(&v.gamma_hat) {
            row(&mut w, "variogram", Some(*lag), *g, None)?;
        }
        row(&mut w, "slope", None, v.slope, Some(v.slope_stderr))?;
    }
    if all || which == "hurst" {
        let h = hurst_local(&paths, &lags)?;
        row(&mut w, "h_hat", None, h.h_hat, Some(h.stderr))?;
    }
    if all || which == "dimension" {
        let d = fractal_dimension(&paths, &lags)?;
        row(&mut w, "d_hat", None, d.d_hat, Some(d.stderr))?;
    }
    let is_tmbm = matches!(paths[0].process, ProcessSpec::Tmbm { .. });
    if which == "windowed" || (all && is_tmbm) {
        let width = cfg
            .window
            .unwrap_or_else(|| window_points(&grid, paths[0].process.lambda()));
        let hs = hurst_windowed(&paths, &lags, width)?;
        for h in &hs {
            row(&mut w, "h_window", Some(h.t_center), h.h_hat, Some(h.stderr))?;
        }
        // Least-squares slope of Ĥ against window centre.
        if hs.len() >= 2 {
            let n = hs.len() as f64;
            let mt = hs.iter().map(|h| h.t_center).sum::<f64>() / n;
            let mh = hs.iter().map(|h| h.h_hat).sum::<f64>() / n;
            let sxy: f64 = hs.iter().map(|h| (h.t_center - mt) * (h.h_hat - mh)).sum();
            let sxx: f64 = hs.iter().map(|h| (h.t_center - mt).powi(2)).sum();
            row(&mut w, "h_window_trend", None, sxy / sxx, None)?;
        }
    }
    if which == "plateau" || (all && !cfg.tau_steps.is_empty()) {
        if cfg.tau_steps.is_empty() {
            return Err(CliError::Usage("plateau needs --tau-steps".into()));
        }
        for r in lrd_plateau_empirical(&paths, cfg.t_index, &cfg.tau_steps)? {
            row(&mut w, "plateau", Some(r.tau), r.r_hat, Some(r.stderr))?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Timing<'a> {
    suite: &'a str,
    wall_clock_seconds: f64,
    threads: usize,
}

pub fn validate(echo: &ConfigEcho) -> Result<(), CliError> {
    let cfg = &echo.resolved;
    let suite: Suite = cfg
        .suite
        .parse()
        .map_err(|e: tplab::TplabError| CliError::Usage(e.to_string()))?;
    let opts = SuiteOptions {
        seed: cfg.seed,
        mc_paths: cfg.paths.unwrap_or(SuiteOptions::default().mc_paths),
        overrides: cfg.tolerances.clone(),
    };
    let start = Instant::now();
    let report = run_suite(suite, &opts, serde_json::to_value(echo)?);
    let elapsed = start.elapsed().as_secs_f64();
    {
        let mut w = sink(echo, "report.json")?;
        serde_json::to_writer(&mut w, &report)?;
        w.write_all(b"\n")?;
        w.flush()?;
    }
    if let Some(dir) = out_dir(cfg) {
        let timing = Timing {
            suite: suite.name(),
            wall_clock_seconds: elapsed,
            threads: rayon::current_num_threads(),
        };
        std::fs::write(dir.join("report.timing.json"), serde_json::to_string(&timing)? + "\n")?;
    }
    eprintln!(
        "suite {}: {} checks, {} failed ({elapsed:.1}s)",
        report.suite, report.n_checks, report.n_failed
    );
    for c in report.failures() {
        match &c.error {
            Some(e) => eprintln!("  FAIL {}: {e}", c.id),
            None => eprintln!(
                "  FAIL {}: expected {} actual {} tolerance {}",
                c.id, c.expected, c.actual, c.tolerance
            ),
        }
    }
    if report.passed {
        Ok(())
    } else {
        Err(CliError::ValidationFailed(report.n_failed, report.n_checks))
    }
}
