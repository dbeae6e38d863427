//! Run configuration: command-line flags layered over an optional
//! `key = value` file. Flags win over the file, the file over defaults.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::Args;
use sldg_core::legendre::MAX_DEGREE;
use sldg_core::{Dynamics, ProblemSpec};

use crate::error::CliError;

/// Flags shared by `run` and `convergence`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Plain-text `key = value` file; explicit flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// weak_landau, strong_landau, equilibrium, advection, molenkamp_crowley or landau:<alpha>.
    #[arg(long)]
    pub problem: Option<String>,
    /// Cells in x.
    #[arg(long)]
    pub nx: Option<usize>,
    /// Cells in v.
    #[arg(long)]
    pub nv: Option<usize>,
    /// Polynomial degree per direction.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Time step.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    /// Final time.
    #[arg(long, allow_hyphen_values = true)]
    pub tmax: Option<f64>,
    /// Record diagnostics every this many steps.
    #[arg(long)]
    pub record_every: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Field dump to compare against (run) or to use as reference (convergence).
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Override the problem's dynamics: vlasov_poisson, free_streaming or solid_rotation.
    #[arg(long)]
    pub dynamics: Option<String>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub nx: usize,
    pub nv: usize,
    pub degree: usize,
    pub tau: f64,
    pub tmax: f64,
    pub record_every: usize,
    pub out: PathBuf,
    pub reference: Option<PathBuf>,
    pub workers: Option<usize>,
    /// Unconsumed file entries, for subcommand-specific keys.
    pub extra: HashMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<HashMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("{}:{}: expected `key = value`", path.display(), n + 1))
        })?;
        map.insert(normalize(k), v.trim().to_string());
    }
    Ok(map)
}

fn parsed<T: std::str::FromStr>(
    flag: Option<T>,
    file: &mut HashMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    let from_file = match file.remove(key) {
        Some(s) => Some(
            s.parse::<T>()
                .map_err(|_| CliError::Config(format!("bad value `{s}` for `{key}` in config file")))?,
        ),
        None => None,
    };
    Ok(flag.or(from_file))
}

pub fn parse_dynamics(name: &str, problem: &ProblemSpec) -> Result<Dynamics, CliError> {
    match name {
        "vlasov_poisson" | "vlasov-poisson" => Ok(Dynamics::VlasovPoisson),
        "free_streaming" | "free-streaming" => Ok(Dynamics::FreeStreaming),
        "solid_rotation" | "solid-rotation" => Ok(Dynamics::SolidRotation {
            omega: 2.0 * PI,
            x_axis: 0.5 * problem.length(),
        }),
        other => Err(CliError::Config(format!(
            "unknown dynamics `{other}` (expected vlasov_poisson, free_streaming or solid_rotation)"
        ))),
    }
}

fn positive(name: &str, value: f64) -> Result<f64, CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::Config(format!("--{name} must be positive, got {value}")))
    }
}

fn positive_count(name: &str, value: usize) -> Result<usize, CliError> {
    if value > 0 {
        Ok(value)
    } else {
        Err(CliError::Config(format!("--{name} must be positive")))
    }
}

impl RunArgs {
    /// Merges flags, the optional config file and defaults, then validates.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut file = match &self.config {
            Some(p) => read_config_file(p)?,
            None => HashMap::new(),
        };
        let f = &mut file;
        let problem_name = parsed(self.problem.clone(), f, "problem")?.unwrap_or_else(|| "weak_landau".into());
        let mut problem = ProblemSpec::by_name(&problem_name).map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(d) = parsed(self.dynamics.clone(), f, "dynamics")? {
            let dynamics = parse_dynamics(&d, &problem)?;
            problem = problem.with_dynamics(dynamics);
        }
        let nx = positive_count("nx", parsed(self.nx, f, "nx")?.unwrap_or(64))?;
        let nv = positive_count("nv", parsed(self.nv, f, "nv")?.unwrap_or(64))?;
        let degree = parsed(self.degree, f, "degree")?.unwrap_or(2);
        if degree > MAX_DEGREE {
            return Err(CliError::Config(format!(
                "--degree {degree} exceeds the supported maximum {MAX_DEGREE}"
            )));
        }
        let tau = positive("tau", parsed(self.tau, f, "tau")?.unwrap_or(0.1))?;
        let tmax = parsed(self.tmax, f, "tmax")?.unwrap_or(1.0);
        if !(tmax >= 0.0 && tmax.is_finite()) {
            return Err(CliError::Config(format!("--tmax must be non-negative, got {tmax}")));
        }
        let record_every = positive_count("record-every", parsed(self.record_every, f, "record_every")?.unwrap_or(1))?;
        let out = parsed(self.out.clone(), f, "out")?.unwrap_or_else(|| PathBuf::from("out"));
        let reference = parsed(self.reference.clone(), f, "reference")?;
        let workers = parsed(self.workers, f, "workers")?;
        if workers == Some(0) {
            return Err(CliError::Config("--workers must be positive".into()));
        }
        Ok(RunConfig {
            problem,
            nx,
            nv,
            degree,
            tau,
            tmax,
            record_every,
            out,
            reference,
            workers,
            extra: file,
        })
    }
}

impl RunConfig {
    /// Creates the output directory and checks that it accepts files.
    pub fn prepare_output(&self) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.out).map_err(|e| {
            CliError::Config(format!("cannot create output directory {}: {e}", self.out.display()))
        })?;
        let probe = self.out.join(".sldg-write-test");
        std::fs::write(&probe, b"").map_err(|e| {
            CliError::Config(format!("output directory {} is not writable: {e}", self.out.display()))
        })?;
        let _ = std::fs::remove_file(probe);
        Ok(())
    }

    /// Rejects file keys nobody consumed.
    pub fn finish(&self) -> Result<(), CliError> {
        if let Some(k) = self.extra.keys().min() {
            return Err(CliError::Config(format!("unknown config key `{k}`")));
        }
        Ok(())
    }
}

/// Comma-separated list, e.g. `16,32,64`.
pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| CliError::Config(format!("bad entry `{t}` in {what} list")))
        })
        .collect()
}
