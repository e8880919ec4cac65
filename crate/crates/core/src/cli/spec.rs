use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::binary::{BinaryModel, EntropyMode, TieRule};
use crate::error::{Error, Result};
use crate::gaussian::GaussianModel;
use crate::model::Model;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Gaussian,
    Binary,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SpecOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy_mode: Option<EntropyMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tie_rule: Option<TieRule>,
}

/// JSON model description accepted by `--spec`. Unknown keys are ignored, so
/// any JSON report the tool prints can be fed back in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpecFile {
    pub model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ps: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub sum_rate: f64,
    /// Per-sensor rates for commands that evaluate a fixed allocation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<f64>>,
    #[serde(default)]
    pub options: SpecOptions,
}

pub const DEFAULT_STEP: f64 = 0.01;
pub const DEFAULT_SAMPLES: usize = 1_000_000;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TOL: f64 = 1e-10;

/// Options with defaults filled in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub step: f64,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub entropy_mode: EntropyMode,
    pub tie_rule: TieRule,
}

impl SpecOptions {
    pub fn settings(&self) -> Settings {
        Settings {
            step: self.step.unwrap_or(DEFAULT_STEP),
            samples: self.samples.unwrap_or(DEFAULT_SAMPLES),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            tol: self.tol.unwrap_or(DEFAULT_TOL),
            entropy_mode: self.entropy_mode.unwrap_or_default(),
            tie_rule: self.tie_rule.unwrap_or_default(),
        }
    }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

impl ModelSpecFile {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Domain(format!("malformed model spec: {e}")))
    }

    fn params(&self) -> Result<&[f64]> {
        match (self.model, &self.gammas, &self.ps) {
            (ModelKind::Gaussian, Some(g), None) => Ok(g),
            (ModelKind::Binary, None, Some(p)) => Ok(p),
            (_, Some(_), Some(_)) => invalid("give either gammas or ps, not both"),
            (ModelKind::Gaussian, _, _) => invalid("a gaussian model needs gammas"),
            (ModelKind::Binary, _, _) => invalid("a binary model needs ps"),
        }
    }

    /// Checks the spec and puts sensors in the order the models store them
    /// (SNRs non-increasing, crossovers non-decreasing), permuting `rates`
    /// along with them.
    pub fn normalize(mut self) -> Result<Self> {
        if !(self.sum_rate >= 0.0 && self.sum_rate.is_finite()) {
            return invalid(format!("sum_rate {} must be finite and nonnegative", self.sum_rate));
        }
        if self.model == ModelKind::Gaussian && self.alpha.is_some() {
            return invalid("alpha applies to binary models only");
        }
        let params = self.params()?.to_vec();
        if params.iter().any(|v| v.is_nan()) {
            return invalid("model parameters must be numbers");
        }
        if let Some(r) = &self.rates {
            if r.len() != params.len() {
                return Err(Error::Dimension {
                    expected: params.len(),
                    got: r.len(),
                });
            }
        }
        let mut order: Vec<usize> = (0..params.len()).collect();
        match self.model {
            ModelKind::Gaussian => order.sort_by(|&a, &b| params[b].total_cmp(&params[a])),
            ModelKind::Binary => order.sort_by(|&a, &b| params[a].total_cmp(&params[b])),
        }
        let sorted: Vec<f64> = order.iter().map(|&i| params[i]).collect();
        match self.model {
            ModelKind::Gaussian => self.gammas = Some(sorted),
            ModelKind::Binary => self.ps = Some(sorted),
        }
        if let Some(r) = &self.rates {
            self.rates = Some(order.iter().map(|&i| r[i]).collect());
        }
        Ok(self)
    }

    pub fn settings(&self) -> Settings {
        self.options.settings()
    }

    pub fn build(&self) -> Result<Model> {
        let params = self.params()?.to_vec();
        match self.model {
            ModelKind::Gaussian => Ok(GaussianModel::new(params)?.into()),
            ModelKind::Binary => {
                let s = self.settings();
                let m = BinaryModel::new(params, self.alpha.unwrap_or(0.5))?
                    .with_entropy_mode(s.entropy_mode)
                    .with_tie_rule(s.tie_rule);
                Ok(m.into())
            }
        }
    }
}
