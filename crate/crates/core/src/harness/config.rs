use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::exponent::PExponent;
use crate::polytope::MAX_DIM;
use crate::{Error, Result};

/// How many generators to draw for each dimension of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NRule {
    Formula(NFormula),
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NFormula {
    #[serde(rename = "n+1")]
    NPlusOne,
    #[serde(rename = "2n")]
    TwoN,
    /// `max(n+1, ⌊e^{√n}⌋)`: the largest count inside the
    /// exponential-in-√n regime.
    #[serde(rename = "cap_exp_sqrt_n")]
    CapExpSqrtN,
}

impl NRule {
    /// Generator counts to run for dimension `n`.
    pub fn counts_for(&self, n: usize) -> Vec<usize> {
        match self {
            NRule::Formula(NFormula::NPlusOne) => vec![n + 1],
            NRule::Formula(NFormula::TwoN) => vec![2 * n],
            NRule::Formula(NFormula::CapExpSqrtN) => {
                let cap = (n as f64).sqrt().exp().floor() as usize;
                vec![cap.max(n + 1)]
            }
            NRule::Explicit(list) => list.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Full description of one experiment run. Unknown JSON keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p_grid: Vec<f64>,
    pub n_grid: Vec<usize>,
    #[serde(rename = "N_rule")]
    pub n_rule: NRule,
    pub trials: usize,
    pub master_seed: u64,
    pub mc_samples: usize,
    pub band: f64,
    pub parallel_workers: usize,
    pub output_path: PathBuf,
    pub output_format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            p_grid: vec![1.0, 1.5, 2.0, 3.0],
            n_grid: vec![4, 5, 6, 7, 8],
            n_rule: NRule::Formula(NFormula::CapExpSqrtN),
            trials: 50,
            master_seed: 7_240_821,
            mc_samples: 2_000,
            band: 10.0,
            parallel_workers: 1,
            output_path: PathBuf::from("trials.csv"),
            output_format: OutputFormat::Csv,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for &p in &self.p_grid {
            PExponent::new(p)?;
        }
        for &n in &self.n_grid {
            if !(2..=MAX_DIM).contains(&n) {
                return Err(Error::InvalidArgument(format!(
                    "dimension {n} outside 2..={MAX_DIM}"
                )));
            }
        }
        if let NRule::Explicit(list) = &self.n_rule {
            if list.is_empty() {
                return Err(Error::InvalidArgument("empty explicit N list".into()));
            }
        }
        if self.trials < 1 {
            return Err(Error::InvalidArgument("trials must be >= 1".into()));
        }
        if self.mc_samples < 1_000 {
            return Err(Error::InvalidArgument("mc_samples must be >= 1000".into()));
        }
        if !(self.band >= 1.0) {
            return Err(Error::InvalidArgument("band must be >= 1".into()));
        }
        if self.parallel_workers < 1 {
            return Err(Error::InvalidArgument(
                "parallel_workers must be >= 1".into(),
            ));
        }
        Ok(())
    }
}
