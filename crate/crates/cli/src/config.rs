//! Run configuration: `key = value` files overridden by command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tplab::kernels::{
    FracOUParams, HurstProfile, MixtureComponent, MixtureParams, ProcessSpec, ProfileShape, TwoIndexParams,
};
use tplab::sampler::TimeGrid;

use crate::error::CliError;

/// Key/value pairs from one source, in canonical key spelling.
pub type Source = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub process: String,
    pub alpha: Vec<f64>,
    pub beta: Option<f64>,
    pub lambda: Vec<f64>,
    pub weights: Vec<f64>,
    pub profile: Option<String>,
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
    pub paths: Option<usize>,
    pub seed: u64,
    pub suite: String,
    pub out: Option<String>,
    pub s: Option<f64>,
    pub figure1: bool,
    pub method: String,
    pub input: Option<String>,
    pub estimator: String,
    pub t_index: usize,
    pub lags: Vec<usize>,
    pub tau_steps: Vec<usize>,
    pub window: Option<usize>,
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            process: "fou".into(),
            alpha: vec![1.25],
            beta: None,
            lambda: vec![0.5],
            weights: Vec::new(),
            profile: None,
            t0: 0.0,
            dt: 0.05,
            n: 256,
            paths: None,
            seed: 42,
            suite: "all".into(),
            out: None,
            s: None,
            figure1: false,
            method: "exact".into(),
            input: None,
            estimator: "all".into(),
            t_index: 1,
            lags: Vec::new(),
            tau_steps: Vec::new(),
            window: None,
            tolerances: BTreeMap::new(),
        }
    }
}

/// Everything echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub resolved: RunConfig,
    pub sources: Sources,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Sources {
    pub file: Source,
    pub flags: Source,
}

fn canonical(key: &str) -> String {
    key.trim().replace('-', "_")
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.trim()
        .parse()
        .map_err(|_| usage(format!("{key}: cannot parse '{v}'")))
}

fn list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, CliError> {
    v.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| num(key, x))
        .collect()
}

fn flag(key: &str, v: &str) -> Result<bool, CliError> {
    match v.trim() {
        "" | "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(usage(format!("{key}: expected a boolean, got '{v}'"))),
    }
}

impl RunConfig {
    fn apply(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        let text = || Some(v.trim().to_string());
        match key {
            "process" => self.process = v.trim().to_string(),
            "alpha" => self.alpha = list(key, v)?,
            "beta" => self.beta = Some(num(key, v)?),
            "lambda" => self.lambda = list(key, v)?,
            "weights" => self.weights = list(key, v)?,
            "profile" => self.profile = text(),
            "t0" => self.t0 = num(key, v)?,
            "dt" => self.dt = num(key, v)?,
            "n" => self.n = num(key, v)?,
            "paths" => self.paths = Some(num(key, v)?),
            "seed" => self.seed = num(key, v)?,
            "suite" => self.suite = v.trim().to_string(),
            "out" => self.out = text(),
            "s" => self.s = Some(num(key, v)?),
            "figure1" => self.figure1 = flag(key, v)?,
            "method" => self.method = v.trim().to_string(),
            "input" => self.input = text(),
            "estimator" => self.estimator = v.trim().to_string(),
            "t_index" => self.t_index = num(key, v)?,
            "lags" => self.lags = list(key, v)?,
            "tau_steps" => self.tau_steps = list(key, v)?,
            "window" => self.window = Some(num(key, v)?),
            k if k.starts_with("tol.") => {
                self.tolerances.insert(k["tol.".len()..].to_string(), num(key, v)?);
            }
            _ => return Err(usage(format!("unknown configuration key '{key}'"))),
        }
        Ok(())
    }

    /// Applies `file` then `flags`; flags win.
    pub fn resolve(sources: Sources) -> Result<ConfigEcho, CliError> {
        let mut cfg = RunConfig::default();
        for (k, v) in sources.file.iter().chain(sources.flags.iter()) {
            cfg.apply(k, v)?;
        }
        Ok(ConfigEcho { resolved: cfg, sources })
    }

    pub fn grid(&self) -> Result<TimeGrid, CliError> {
        Ok(TimeGrid::new(self.t0, self.dt, self.n)?)
    }

    fn one(&self, values: &[f64], what: &str) -> Result<f64, CliError> {
        match values {
            [x] => Ok(*x),
            _ => Err(usage(format!("{} needs exactly one {what}", self.process))),
        }
    }

    fn load_profile(&self) -> Result<HurstProfile, CliError> {
        match &self.profile {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| usage(format!("profile {path}: {e}")))?;
                let shape: ProfileShape =
                    serde_json::from_str(&text).map_err(|e| usage(format!("profile {path}: {e}")))?;
                Ok(HurstProfile::new(shape)?)
            }
            None => Ok(HurstProfile::constant(self.one(&self.alpha, "alpha")?)?),
        }
    }

    pub fn process_spec(&self) -> Result<ProcessSpec, CliError> {
        let single = || -> Result<FracOUParams, CliError> {
            Ok(FracOUParams::new(
                self.one(&self.alpha, "alpha")?,
                self.one(&self.lambda, "lambda")?,
            )?)
        };
        let spec = match self.process.as_str() {
            "fou" => ProcessSpec::Fou { params: single()? },
            "tfbm" => ProcessSpec::Tfbm { params: single()? },
            "tfgn" => ProcessSpec::Tfgn { params: single()? },
            "tfbm2" => {
                let beta = self.beta.ok_or_else(|| usage("tfbm2 needs beta"))?;
                ProcessSpec::Tfbm2 {
                    params: TwoIndexParams::new(
                        self.one(&self.alpha, "alpha")?,
                        beta,
                        self.one(&self.lambda, "lambda")?,
                    )?,
                }
            }
            "tmbm" => ProcessSpec::Tmbm {
                profile: self.load_profile()?,
                lambda: self.one(&self.lambda, "lambda")?,
            },
            "mixed" => {
                let k = self.alpha.len();
                let lambdas = match self.lambda.len() {
                    1 => vec![self.lambda[0]; k],
                    m if m == k => self.lambda.clone(),
                    _ => return Err(usage("mixed: lambda must be one value or one per alpha")),
                };
                let weights = if self.weights.is_empty() {
                    vec![1.0; k]
                } else {
                    self.weights.clone()
                };
                if weights.len() != k {
                    return Err(usage("mixed: weights must match alpha"));
                }
                let components = (0..k)
                    .map(|i| {
                        Ok(MixtureComponent {
                            weight: weights[i],
                            params: FracOUParams::new(self.alpha[i], lambdas[i])?,
                        })
                    })
                    .collect::<Result<Vec<_>, tplab::TplabError>>()?;
                ProcessSpec::Mixed {
                    mixture: MixtureParams::new(components)?,
                }
            }
            other => return Err(usage(format!("unknown process '{other}'"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Reads a `key = value` file, or the configuration echo of an earlier
/// JSON report.
pub fn read_config_file(path: &Path) -> Result<Sources, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("config {}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        #[derive(Deserialize)]
        struct Report {
            config: ConfigEcho,
        }
        let r: Report = serde_json::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))?;
        return Ok(r.config.sources);
    }
    let mut file = Source::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{}:{}: expected key = value", path.display(), i + 1)))?;
        file.insert(canonical(k), v.trim().to_string());
    }
    Ok(Sources {
        file,
        flags: Source::new(),
    })
}

/// Builds the flag source from (key, value) pairs that were given.
pub fn flag_source(pairs: impl IntoIterator<Item = (String, String)>) -> Source {
    pairs.into_iter().map(|(k, v)| (canonical(&k), v)).collect()
}

pub fn out_dir(cfg: &RunConfig) -> Option<PathBuf> {
    cfg.out.as_ref().map(PathBuf::from)
}
