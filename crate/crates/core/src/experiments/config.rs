//! Experiment configuration: a TOML file with defaults for every key.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bits::{Bitstring, MAX_NATURAL_BITS};
use crate::machine::{Labels, Program, MAX_LABEL_BITS};
use crate::measures::{Budgets, MAX_CONFIRM_BITS};
use crate::network::Selector;
use crate::tvg::Family;

use super::ExpError;

/// Environment variable that overrides the configured seed.
pub const SEED_ENV: &str = "ALGNET_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectorKind {
    PHalt,
    Identity,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BbConfig {
    pub max_bits: usize,
    pub budget: u64,
}

impl Default for BbConfig {
    fn default() -> Self {
        BbConfig {
            max_bits: 24,
            budget: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynergyConfig {
    /// Enumeration limits for complexity estimates.
    pub bits: usize,
    pub steps: u64,
    /// Requested synergy levels.
    pub xs: Vec<usize>,
    /// Defaults to `c_copy + 4`.
    pub slack: Option<usize>,
    /// Input the labels must be complex relative to.
    pub w_min: Bitstring,
}

impl Default for SynergyConfig {
    fn default() -> Self {
        SynergyConfig {
            bits: 20,
            steps: 10_000,
            xs: vec![5, 10, 20],
            slack: None,
            w_min: "1".parse().expect("literal"),
        }
    }
}

impl SynergyConfig {
    pub fn budgets(&self) -> Budgets {
        Budgets {
            bits: self.bits,
            steps: self.steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Population size for single-size commands.
    pub n: usize,
    /// Population sizes for sweeps.
    pub n_sweep: Vec<usize>,
    pub trials: usize,
    pub family: Family,
    /// Graph file used instead of the generator.
    pub tvg_file: Option<PathBuf>,
    pub c_0: usize,
    /// Defaults to `c_0 + |T| + 1`.
    pub n_cycles: Option<usize>,
    /// Steps per node program run.
    pub budget: u64,
    pub max_program_bits: usize,
    /// Network input.
    pub w: Bitstring,
    /// When set, sweeps cycle through every codeword of at most this length.
    pub w_sweep_bits: Option<usize>,
    pub selector: SelectorKind,
    pub selector_bits: Option<Bitstring>,
    pub labels: Labels,
    /// Steps the decider gets to settle the reference answer for `w`.
    pub reference_budget: u64,
    pub bb: BbConfig,
    pub synergy: SynergyConfig,
    /// Not part of the fingerprint.
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            n: 64,
            n_sweep: vec![16, 32, 64, 128, 256, 512],
            trials: 200,
            family: Family::ReplicatedHypercube,
            tvg_file: None,
            c_0: 0,
            n_cycles: None,
            budget: 100_000,
            max_program_bits: 64,
            w: "1".parse().expect("literal"),
            w_sweep_bits: None,
            selector: SelectorKind::PHalt,
            selector_bits: None,
            labels: Labels::default(),
            reference_budget: 1_000_000,
            bb: BbConfig::default(),
            synergy: SynergyConfig::default(),
            out: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<ExperimentConfig, ExpError> {
        toml::from_str(text).map_err(|e| ExpError::Validation(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig, ExpError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExpError::Validation(format!("cannot read {}: {e}", path.display())))?;
        ExperimentConfig::from_toml(&text)
    }

    /// Replaces the seed with `ALGNET_SEED` when that variable is set.
    pub fn apply_env(&mut self) -> Result<(), ExpError> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v
                .trim()
                .parse()
                .map_err(|_| ExpError::Validation(format!("{SEED_ENV}={v} is not a u64")))?;
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form, output directory excluded.
    pub fn fingerprint(&self) -> String {
        let mut canon = self.clone();
        canon.out = PathBuf::new();
        let json = serde_json::to_string(&canon).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn selector(&self) -> Result<Selector, ExpError> {
        Ok(match self.selector {
            SelectorKind::PHalt => Selector::PHalt {
                labels: self.labels.clone(),
            },
            SelectorKind::Identity => Selector::Identity,
            SelectorKind::Custom => Selector::Custom {
                bits: self.selector_bits.clone().ok_or_else(|| {
                    ExpError::Validation("custom selector needs selector_bits".into())
                })?,
            },
        })
    }

    /// Inputs a sweep cycles through: every short codeword, or just `w`.
    pub fn w_list(&self) -> Vec<Bitstring> {
        match self.w_sweep_bits {
            Some(k) => crate::machine::codewords(k)
                .into_iter()
                .map(|p| p.encoding().clone())
                .collect(),
            None => vec![self.w.clone()],
        }
    }

    pub fn validate(&self) -> Result<(), ExpError> {
        let bad = |m: String| Err(ExpError::Validation(m));
        if self.n == 0 || self.n_sweep.contains(&0) {
            return bad("population sizes must be positive".into());
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if self.budget == 0 || self.reference_budget == 0 || self.bb.budget == 0 {
            return bad("step budgets must be positive".into());
        }
        if self.max_program_bits == 0 {
            return bad("max_program_bits must be positive".into());
        }
        if self.w.len() > MAX_NATURAL_BITS {
            return bad(format!("w has more than {MAX_NATURAL_BITS} bits"));
        }
        if self.selector == SelectorKind::PHalt && Program::parse(&self.w).is_err() {
            return bad(format!("w = {} is not a single program", self.w));
        }
        if let Some(k) = self.w_sweep_bits {
            if !(1..=20).contains(&k) {
                return bad("w_sweep_bits must lie in 1..=20".into());
            }
        }
        if self.labels.halting == self.labels.non_halting {
            return bad("halting labels must differ".into());
        }
        if self.labels.halting.len() > MAX_LABEL_BITS
            || self.labels.non_halting.len() > MAX_LABEL_BITS
        {
            return bad(format!("labels are limited to {MAX_LABEL_BITS} bits"));
        }
        if self.bb.max_bits == 0 || self.bb.max_bits > 30 {
            return bad("bb.max_bits must lie in 1..=30".into());
        }
        if self.synergy.bits > MAX_CONFIRM_BITS || self.synergy.w_min.len() > MAX_NATURAL_BITS {
            return bad(format!("synergy.bits is limited to {MAX_CONFIRM_BITS}"));
        }
        self.selector()?;
        Ok(())
    }
}
