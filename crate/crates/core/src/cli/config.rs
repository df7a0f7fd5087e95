//! TOML model configuration, one table per model:
//!
//! ```toml
//! [discrete]
//! prior = [1.0, 1.0, 1.0]
//! hamiltonians = [[0.0, 1.0, 2.0]]   # one row per Hamiltonian
//!
//! [qubit]
//! domain_margin = 1e-12
//!
//! [coherent]
//! r = 1.0
//! hbar = 1.0
//! nmax = 64
//! bound = 10.0
//!
//! [regression]
//! data = "points.csv"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::canonical::CanonicalModel;
use crate::coherent::{CoherentModel, PhaseConstants, DEFAULT_BOUND, DEFAULT_NMAX};
use crate::discrete::{DiscreteFamily, DiscreteModel};
use crate::error::{Error, Result};
use crate::qubit::QubitModel;
use crate::regression::RegressionData;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub discrete: Option<DiscreteConfig>,
    pub qubit: Option<QubitConfig>,
    pub coherent: Option<CoherentConfig>,
    pub regression: Option<RegressionConfig>,
    /// Directory of the config file, for resolving relative paths.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteConfig {
    pub prior: Option<Vec<f64>>,
    pub hamiltonians: Vec<Vec<f64>>,
}

impl Default for DiscreteConfig {
    fn default() -> Self {
        Self {
            prior: None,
            hamiltonians: vec![vec![0.0, 1.0]],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitConfig {
    #[serde(default = "default_margin")]
    pub domain_margin: f64,
}

fn default_margin() -> f64 {
    QubitModel::DEFAULT_MARGIN
}

impl Default for QubitConfig {
    fn default() -> Self {
        Self {
            domain_margin: default_margin(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherentConfig {
    #[serde(default = "one")]
    pub r: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "default_nmax")]
    pub nmax: usize,
    #[serde(default = "default_bound")]
    pub bound: f64,
}

fn one() -> f64 {
    1.0
}

fn default_nmax() -> usize {
    DEFAULT_NMAX
}

fn default_bound() -> f64 {
    DEFAULT_BOUND
}

impl Default for CoherentConfig {
    fn default() -> Self {
        Self {
            r: 1.0,
            hbar: 1.0,
            nmax: DEFAULT_NMAX,
            bound: DEFAULT_BOUND,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegressionConfig {
    pub data: PathBuf,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::parse(&text)?;
        config.base_dir = path.parent().map(Path::to_path_buf);
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))
    }

    pub fn discrete_model(&self) -> Result<DiscreteModel> {
        let c = self.discrete.clone().unwrap_or_default();
        let family = match c.prior {
            Some(prior) => DiscreteFamily::new(prior, c.hamiltonians)?,
            None => DiscreteFamily::with_unit_prior(c.hamiltonians)?,
        };
        DiscreteModel::new(family)
    }

    pub fn qubit_model(&self) -> Result<QubitModel> {
        QubitModel::new(self.qubit.clone().unwrap_or_default().domain_margin)
    }

    pub fn coherent_model(&self, nmax_override: Option<usize>) -> Result<CoherentModel> {
        let c = self.coherent.clone().unwrap_or_default();
        CoherentModel::new(PhaseConstants::new(c.r, c.hbar)?, nmax_override.unwrap_or(c.nmax), c.bound)
    }

    pub fn canonical(&self, name: &str, nmax_override: Option<usize>) -> Result<CanonicalModel> {
        Ok(match name {
            "discrete" => CanonicalModel::Discrete(self.discrete_model()?),
            "qubit" => CanonicalModel::Qubit(self.qubit_model()?),
            "coherent" => CanonicalModel::Coherent(self.coherent_model(nmax_override)?),
            other => {
                return Err(Error::InvalidParameter(format!(
                    "model '{other}' has no canonical structure"
                )))
            }
        })
    }

    /// Regression data from `explicit` or the config's `data` path.
    pub fn regression_data(&self, explicit: Option<&Path>) -> Result<RegressionData> {
        let path = match (explicit, &self.regression) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(r)) => match &self.base_dir {
                Some(dir) if r.data.is_relative() => dir.join(&r.data),
                _ => r.data.clone(),
            },
            (None, None) => {
                return Err(Error::InvalidParameter("regression needs --data or [regression] data".into()))
            }
        };
        let file = std::fs::File::open(&path)
            .map_err(|e| Error::InvalidParameter(format!("cannot open {}: {e}", path.display())))?;
        RegressionData::from_csv(file)
    }
}
