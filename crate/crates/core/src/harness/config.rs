use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::codes::{presets, DegreeDistribution, Slacks};
use crate::error::{Error, Result};
use crate::quantizer::QuantizerParams;
use crate::splitter::SplitStrategy;

/// Full description of one Monte Carlo campaign.
///
/// ```toml
/// [scenario]
/// n = 10000
/// p = [0.1, 0.1, 0.1]
/// seed = 1
///
/// [codes]
/// mode = "corner"
/// d = [0.102, 0.1031, 0.1025]
/// m = [5400, 5400, 5400]
/// syndrome_bits = [4800, 4800]
///
/// [run]
/// trials = 50
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSection,
    pub codes: CodesSection,
    /// `target_distortion` is replaced by each link's `d_i` and `seed` by a
    /// per-trial, per-link stream.
    #[serde(default)]
    pub quantizer: QuantizerParams,
    #[serde(default)]
    pub split: Option<SplitSection>,
    #[serde(default)]
    pub decoder: DecoderSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    /// Block length.
    pub n: usize,
    /// Observation noise of every link.
    pub p: Vec<f64>,
    /// Master seed of every random stream in the campaign.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Corner,
    Split,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodesSection {
    pub mode: Mode,
    /// Quantizer distortion targets.
    pub d: Vec<f64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: Vec<f64>,
    #[serde(default = "default_delta")]
    pub delta: Vec<f64>,
    /// Explicit quantizer sizes; planned from `d` and `epsilon` when absent.
    #[serde(default)]
    pub m: Option<Vec<usize>>,
    /// Explicit syndrome lengths per binning block in chain order (sub-code
    /// lengths for split parts).
    #[serde(default)]
    pub syndrome_bits: Option<Vec<usize>>,
    /// Corner-mode decode order as a permutation of `1..=l`.
    #[serde(default)]
    pub order: Option<Vec<usize>>,
    /// Degree distribution of the LDGM generators (preset name).
    #[serde(default = "default_ldgm")]
    pub ldgm: String,
    /// Degree distribution of the LDPC parity matrices (preset name).
    #[serde(default = "default_ldpc")]
    pub ldpc: String,
    /// Seed of code construction, independent of the scenario seed.
    #[serde(default = "default_code_seed")]
    pub seed: u64,
    /// Corner mode only: alist stems of one LDGM generator per link.
    #[serde(default)]
    pub ldgm_files: Option<Vec<PathBuf>>,
    /// Corner mode only: alist stems of one parity matrix per block.
    #[serde(default)]
    pub ldpc_files: Option<Vec<PathBuf>>,
}

fn default_epsilon() -> Vec<f64> {
    vec![0.01]
}
fn default_delta() -> Vec<f64> {
    vec![0.005]
}
fn default_ldgm() -> String {
    "systematic-6".into()
}
fn default_ldpc() -> String {
    "column-2".into()
}
fn default_code_seed() -> u64 {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    LinearInfo,
    Concatenation,
    Threshold,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSection {
    #[serde(default = "default_kind")]
    pub kind: StrategyKind,
    /// Concatenation split index; defaults to `n / 2`.
    #[serde(default)]
    pub n_prime: Option<usize>,
    /// Threshold `T` in hexadecimal.
    #[serde(default)]
    pub threshold: Option<String>,
    /// Trials spent measuring α and β before the LDPC codes are sized.
    #[serde(default = "default_pilot")]
    pub pilot_trials: usize,
    /// Known α and β; when both are given the pilot is skipped.
    #[serde(default)]
    pub alpha: Option<Vec<f64>>,
    #[serde(default)]
    pub beta: Option<Vec<f64>>,
}

fn default_kind() -> StrategyKind {
    StrategyKind::LinearInfo
}
fn default_pilot() -> usize {
    20
}

impl Default for SplitSection {
    fn default() -> Self {
        Self {
            kind: default_kind(),
            n_prime: None,
            threshold: None,
            pilot_trials: default_pilot(),
            alpha: None,
            beta: None,
        }
    }
}

impl SplitSection {
    pub fn strategy(&self, n: usize) -> Result<SplitStrategy> {
        match self.kind {
            StrategyKind::LinearInfo => Ok(SplitStrategy::LinearInfo),
            StrategyKind::Concatenation => Ok(SplitStrategy::Concatenation {
                n_prime: self.n_prime.unwrap_or(n / 2),
            }),
            StrategyKind::Threshold => {
                let text = self
                    .threshold
                    .as_deref()
                    .ok_or_else(|| Error::Config("threshold split needs `threshold`".into()))?;
                SplitStrategy::threshold_from_hex(text)
            }
        }
    }
}

/// Where each stage's decoder crossover comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossoverSource {
    /// `P_target ∗ P_side` from the measured per-link distortions.
    Measured,
    /// The crossover the rates were planned with.
    Planned,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderSection {
    #[serde(default = "default_iters")]
    pub max_iters: usize,
    #[serde(default = "default_crossover")]
    pub crossover: CrossoverSource,
}

fn default_iters() -> usize {
    crate::wz::DEFAULT_MAX_ITERS
}
fn default_crossover() -> CrossoverSource {
    CrossoverSource::Measured
}

impl Default for DecoderSection {
    fn default() -> Self {
        Self {
            max_iters: default_iters(),
            crossover: default_crossover(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Largest tolerated fraction of (trial, link) quantizations that miss
    /// their target.
    #[serde(default = "default_budget")]
    pub failure_budget: f64,
    /// Worker threads; all available cores when absent.
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub trial_csv: Option<PathBuf>,
    #[serde(default)]
    pub summary_csv: Option<PathBuf>,
}

fn default_trials() -> usize {
    50
}
fn default_budget() -> f64 {
    0.1
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            trials: default_trials(),
            failure_budget: default_budget(),
            threads: None,
            trial_csv: None,
            summary_csv: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn l(&self) -> usize {
        self.scenario.p.len()
    }

    pub fn slacks(&self) -> Slacks {
        Slacks {
            epsilon: self.codes.epsilon.clone(),
            delta: self.codes.delta.clone(),
        }
    }

    pub fn ldgm_distribution(&self) -> Result<DegreeDistribution> {
        presets::lookup(&self.codes.ldgm)
    }

    pub fn ldpc_distribution(&self) -> Result<DegreeDistribution> {
        presets::lookup(&self.codes.ldpc)
    }

    /// Decode order as 0-based link indices.
    pub fn order(&self) -> Vec<usize> {
        match &self.codes.order {
            Some(o) => o.iter().map(|i| i - 1).collect(),
            None => (0..self.l()).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.l();
        let bad = |msg: String| Err(Error::Config(msg));
        if l == 0 {
            return bad("scenario needs at least one link".into());
        }
        if self.scenario.n < 2 {
            return bad(format!("block length {} is too short", self.scenario.n));
        }
        if self.codes.d.len() != l {
            return bad(format!("{} distortion targets for {l} links", self.codes.d.len()));
        }
        if let Some(m) = &self.codes.m {
            if m.len() != l {
                return bad(format!("{} quantizer sizes for {l} links", m.len()));
            }
        }
        if self.run.trials == 0 {
            return bad("at least one trial is required".into());
        }
        if !(0.0..=1.0).contains(&self.run.failure_budget) {
            return bad(format!("failure budget {} outside [0, 1]", self.run.failure_budget));
        }
        if self.run.threads == Some(0) {
            return bad("thread count must be positive".into());
        }
        if self.decoder.max_iters == 0 {
            return bad("decoder needs at least one iteration".into());
        }
        self.ldgm_distribution()?;
        self.ldpc_distribution()?;
        match self.codes.mode {
            Mode::Corner => {
                if self.split.is_some() {
                    return bad("[split] is only meaningful in split mode".into());
                }
                let mut order = self.order();
                order.sort_unstable();
                if order != (0..l).collect::<Vec<_>>() {
                    return bad(format!(
                        "decode order {:?} is not a permutation of 1..={l}",
                        self.codes.order
                    ));
                }
            }
            Mode::Split => {
                if l < 2 {
                    return bad("split mode needs at least two links".into());
                }
                let split = self
                    .split
                    .as_ref()
                    .ok_or_else(|| Error::Config("split mode needs a [split] section".into()))?;
                let strategy = split.strategy(self.scenario.n)?;
                if matches!(strategy, SplitStrategy::Threshold { .. }) {
                    return bad("threshold splits do not produce codewords of a sub-code and cannot be decoded".into());
                }
                if let SplitStrategy::Concatenation { n_prime } = strategy {
                    if n_prime != self.scenario.n / 2 {
                        return bad(format!("concatenation split must cut at n/2, got {n_prime}"));
                    }
                }
                let explicit = split.alpha.is_some() as u8 + split.beta.is_some() as u8;
                if explicit == 1 {
                    return bad("give both alpha and beta or neither".into());
                }
                if explicit == 0 && split.pilot_trials == 0 {
                    return bad("without alpha and beta the pilot needs at least one trial".into());
                }
                for v in [&split.alpha, &split.beta].into_iter().flatten() {
                    if v.len() != l - 1 {
                        return bad(format!("alpha and beta need {} entries", l - 1));
                    }
                }
                if self.codes.order.is_some() {
                    return bad("decode order applies to corner mode only".into());
                }
                if self.codes.ldgm_files.is_some() || self.codes.ldpc_files.is_some() {
                    return bad("codes loaded from files are supported in corner mode only".into());
                }
            }
        }
        Ok(())
    }
}
