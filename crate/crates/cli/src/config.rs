//! Run configuration: command-line flags layered over an optional JSON file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Deserializer, Serialize};
use yb_core::Scalar;

/// Configuration problems; reported with exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub(crate) fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    Adler,
    SolitonRank1,
    SolitonRankk,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Yb,
    Reversibility,
    TransferLaws,
    Lax,
    Monodromy,
    Poisson,
    FBracket,
    LeafAlgebra,
    Reduction,
    Refactorization,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Self::Yb => "yb",
            Self::Reversibility => "reversibility",
            Self::TransferLaws => "transfer-laws",
            Self::Lax => "lax",
            Self::Monodromy => "monodromy",
            Self::Poisson => "poisson",
            Self::FBracket => "f-bracket",
            Self::LeafAlgebra => "leaf-algebra",
            Self::Reduction => "reduction",
            Self::Refactorization => "refactorization",
        }
    }
}

/// Scalar lists accept JSON strings (`"3/2"`) or numbers (`1.5`).
fn scalar_list<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<String>>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Lit {
        S(String),
        N(serde_json::Number),
    }
    let v: Option<Vec<Lit>> = Option::deserialize(d)?;
    Ok(v.map(|xs| {
        xs.into_iter()
            .map(|x| match x {
                Lit::S(s) => s,
                Lit::N(n) => n.to_string(),
            })
            .collect()
    }))
}

/// Every setting is optional here; flags override the `--config` file and
/// [`RunConfig::resolve`] fills in defaults.
#[derive(Args, Deserialize, Clone, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct ConfigArgs {
    /// Suite to run (verify only)
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    /// Map under test
    #[arg(long, value_enum)]
    pub map: Option<MapKind>,
    /// Vector-space dimension of soliton states
    #[arg(long)]
    pub n: Option<usize>,
    /// Projector rank for soliton-rankk
    #[arg(long)]
    pub k: Option<usize>,
    /// Number of sites
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub sites: Option<usize>,
    /// Site parameters, comma separated (`3/2,-1,0.25`)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "scalar_list")]
    pub lambdas: Option<Vec<String>>,
    /// Scalar backend
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Float-mode tolerance (exact mode always requires zero)
    #[arg(long)]
    pub tol: Option<f64>,
    /// Central-difference step for Jacobians
    #[arg(long)]
    pub fd_step: Option<f64>,
    /// Number of spectral samples
    #[arg(long)]
    pub zeta_samples: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Iterations of the transfer map
    #[arg(long)]
    pub steps: Option<usize>,
    /// Which transfer map T_i to iterate (1-based)
    #[arg(long)]
    pub site: Option<usize>,
    /// Initial chain values, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "scalar_list")]
    pub f0: Option<Vec<String>>,
    /// Output path (JSON report for verify, CSV trajectory for simulations)
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Run the suite's designed decoy instead of the real map
    #[arg(long)]
    #[serde(default)]
    pub mutate: bool,
}

impl ConfigArgs {
    pub fn from_json_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| ConfigError(format!("bad config {}: {e}", path.display())))
    }

    /// `self` (flags) wins over `file`.
    pub fn over(self, file: ConfigArgs) -> ConfigArgs {
        ConfigArgs {
            suite: self.suite.or(file.suite),
            map: self.map.or(file.map),
            n: self.n.or(file.n),
            k: self.k.or(file.k),
            sites: self.sites.or(file.sites),
            lambdas: self.lambdas.or(file.lambdas),
            mode: self.mode.or(file.mode),
            trials: self.trials.or(file.trials),
            seed: self.seed.or(file.seed),
            tol: self.tol.or(file.tol),
            fd_step: self.fd_step.or(file.fd_step),
            zeta_samples: self.zeta_samples.or(file.zeta_samples),
            dt: self.dt.or(file.dt),
            t_end: self.t_end.or(file.t_end),
            steps: self.steps.or(file.steps),
            site: self.site.or(file.site),
            f0: self.f0.or(file.f0),
            output: self.output.or(file.output),
            mutate: self.mutate || file.mutate,
        }
    }
}

/// Fully resolved configuration; serialized verbatim as the report's
/// `config` echo (the output path is omitted so reports are path-stable).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub map: MapKind,
    pub n: usize,
    pub k: usize,
    #[serde(rename = "N")]
    pub sites: usize,
    pub lambdas: Option<Vec<String>>,
    pub mode: Mode,
    pub trials: usize,
    pub seed: u64,
    pub tol: Option<f64>,
    pub fd_step: f64,
    pub zeta_samples: Option<usize>,
    pub dt: f64,
    pub t_end: f64,
    pub steps: usize,
    pub site: usize,
    pub f0: Option<Vec<String>>,
    pub mutate: bool,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Applies defaults and the generic invariants. `default_mode` depends
    /// on the command and suite.
    pub fn resolve(a: ConfigArgs, default_mode: Mode) -> Result<Self, ConfigError> {
        let sites = match (a.sites, &a.lambdas) {
            (Some(n), _) => n,
            (None, Some(l)) => l.len(),
            (None, None) => 3,
        };
        let cfg = RunConfig {
            map: a.map.unwrap_or(MapKind::Adler),
            n: a.n.unwrap_or(2),
            k: a.k.unwrap_or(1),
            sites,
            lambdas: a.lambdas,
            mode: a.mode.unwrap_or(default_mode),
            trials: a.trials.unwrap_or(100),
            seed: a.seed.unwrap_or(0),
            tol: a.tol,
            fd_step: a.fd_step.unwrap_or(yb_core::matkit::DEFAULT_FD_STEP),
            zeta_samples: a.zeta_samples,
            dt: a.dt.unwrap_or(1e-3),
            t_end: a.t_end.unwrap_or(1.0),
            steps: a.steps.unwrap_or(50),
            site: a.site.unwrap_or(1),
            f0: a.f0,
            mutate: a.mutate,
            output: a.output,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.map != MapKind::Adler {
            if self.n < 2 {
                return bad(format!("n must be at least 2, got {}", self.n));
            }
            if self.k == 0 || self.k >= self.n {
                return bad(format!("need 1 <= k < n, got k={} n={}", self.k, self.n));
            }
            if self.map == MapKind::SolitonRank1 && self.k != 1 {
                return bad("soliton-rank1 requires k = 1");
            }
        }
        if self.sites < 2 {
            return bad(format!("N must be at least 2, got {}", self.sites));
        }
        if let Some(l) = &self.lambdas {
            if l.len() != self.sites {
                return bad(format!("{} lambdas given for N = {}", l.len(), self.sites));
            }
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return bad(format!("tol must be positive, got {tol}"));
            }
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return bad("fd-step must be positive");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) || !(self.t_end >= 0.0 && self.t_end.is_finite())
        {
            return bad("dt must be positive and t-end non-negative");
        }
        if self.trials == 0 {
            return bad("trials must be positive");
        }
        if self.zeta_samples == Some(0) {
            return bad("zeta-samples must be positive");
        }
        if self.site == 0 || self.site > self.sites {
            return bad(format!(
                "site must be in 1..={}, got {}",
                self.sites, self.site
            ));
        }
        self.lambda_values::<f64>()?;
        Ok(())
    }

    pub fn require_odd_sites(&self) -> Result<(), ConfigError> {
        if self.sites < 3 || self.sites % 2 == 0 {
            return bad(format!("N must be odd and at least 3, got {}", self.sites));
        }
        Ok(())
    }

    pub fn require_float(&self, what: &str) -> Result<(), ConfigError> {
        if self.mode != Mode::Float {
            return bad(format!("{what} requires --mode float"));
        }
        Ok(())
    }

    pub fn lambda_values<T: Scalar>(&self) -> Result<Option<Vec<T>>, ConfigError> {
        parse_list(self.lambdas.as_deref(), "lambdas")
    }

    pub fn f0_values<T: Scalar>(&self) -> Result<Option<Vec<T>>, ConfigError> {
        let v = parse_list::<T>(self.f0.as_deref(), "f0")?;
        if let Some(f) = &v {
            if f.len() != self.sites {
                return bad(format!(
                    "{} initial values given for N = {}",
                    f.len(),
                    self.sites
                ));
            }
        }
        Ok(v)
    }
}

fn parse_list<T: Scalar>(
    raw: Option<&[String]>,
    what: &str,
) -> Result<Option<Vec<T>>, ConfigError> {
    raw.map(|xs| {
        xs.iter()
            .map(|s| {
                T::parse_canonical(s)
                    .filter(Scalar::is_finite)
                    .ok_or_else(|| ConfigError(format!("cannot parse {what} entry {s:?}")))
            })
            .collect()
    })
    .transpose()
}
