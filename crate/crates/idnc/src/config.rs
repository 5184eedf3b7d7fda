//! Experiment specification, ingested from a TOML key-value file.
//!
//! ```toml
//! mode = "density"         # density | delay | goodput | verify
//! receivers = 50
//! packets = 20
//! erasure_low = 0.01
//! erasure_high = 0.30
//! # erasure_worst = 0.5    # optional override of the range's upper end
//! strategy = "all"         # or one of / a comma list of: rnd mc mwc-r mowps wort
//! solver = "greedy"        # exact | greedy
//! bias_n = 1.0
//! exact_size_limit = 60
//! iterations = 500
//! seed = 1
//! out = "results"
//! sweep_mn = [20, 30, 40]  # delay/goodput: points with M = N
//! # sweep_m = [20, 60]     # or cross sweeps with the other dimension fixed
//! # sweep_n = [10, 30]
//! goodput_aggregation = "per-receiver"   # or "pooled"
//! ```
//!
//! Unknown keys are rejected with a diagnostic naming the key. CLI flags
//! override file values.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{IdncError, Result};
use crate::sim::GoodputAggregation;
use crate::state::ChannelConfig;
use crate::strategies::{SolverKind, StrategyConfig, StrategyKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Density,
    Delay,
    Goodput,
    Verify,
}

impl FromStr for Mode {
    type Err = IdncError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "density" => Ok(Mode::Density),
            "delay" => Ok(Mode::Delay),
            "goodput" => Ok(Mode::Goodput),
            "verify" => Ok(Mode::Verify),
            other => Err(IdncError::Config(format!(
                "unknown mode '{other}' (expected density | delay | goodput | verify)"
            ))),
        }
    }
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Density => "density",
            Mode::Delay => "delay",
            Mode::Goodput => "goodput",
            Mode::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSpec {
    pub mode: Mode,
    pub receivers: usize,
    pub packets: usize,
    pub erasure_low: f64,
    pub erasure_high: f64,
    pub erasure_worst: Option<f64>,
    pub strategy: String,
    pub solver: String,
    pub bias_n: f64,
    pub exact_size_limit: usize,
    pub iterations: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// Sweep points with `M = N` (delay/goodput modes).
    pub sweep_mn: Vec<usize>,
    /// Sweep over receiver counts with `packets` fixed.
    pub sweep_m: Vec<usize>,
    /// Sweep over packet counts with `receivers` fixed.
    pub sweep_n: Vec<usize>,
    /// Worst-erasure sweep (density mode): one run per value, each with the
    /// erasure range's upper end replaced.
    pub sweep_ew: Vec<f64>,
    pub goodput_aggregation: String,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            mode: Mode::Density,
            receivers: 50,
            packets: 20,
            erasure_low: 0.01,
            erasure_high: 0.30,
            erasure_worst: None,
            strategy: "all".into(),
            solver: "greedy".into(),
            bias_n: 1.0,
            exact_size_limit: crate::strategies::DEFAULT_EXACT_SIZE_LIMIT,
            iterations: 500,
            seed: 1,
            out: PathBuf::from("results"),
            sweep_mn: Vec::new(),
            sweep_m: Vec::new(),
            sweep_n: Vec::new(),
            sweep_ew: Vec::new(),
            goodput_aggregation: "per-receiver".into(),
        }
    }
}

impl ExperimentSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: ExperimentSpec =
            toml::from_str(text).map_err(|e| IdncError::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            IdncError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(IdncError::Config("iterations must be >= 1".into()));
        }
        if self.receivers == 0 || self.packets == 0 {
            return Err(IdncError::Config(
                "receivers and packets must be >= 1".into(),
            ));
        }
        self.channel()?;
        self.strategies()?;
        self.solver()?;
        self.goodput_aggregation()?;
        for &p in self.sweep_mn.iter().chain(&self.sweep_m).chain(&self.sweep_n) {
            if p == 0 {
                return Err(IdncError::Config("sweep points must be >= 1".into()));
            }
        }
        for &w in &self.sweep_ew {
            if !(self.erasure_low..1.0).contains(&w) {
                return Err(IdncError::Config(format!(
                    "sweep_ew value {w} outside [erasure_low, 1)"
                )));
            }
        }
        Ok(())
    }

    /// The channel with the erasure range's upper end replaced by `worst`.
    pub fn channel_with_worst(&self, worst: f64) -> Result<ChannelConfig> {
        ChannelConfig::new(self.erasure_low, self.erasure_high)?.with_worst_erasure(worst)
    }

    pub fn channel(&self) -> Result<ChannelConfig> {
        let channel = ChannelConfig::new(self.erasure_low, self.erasure_high)?;
        match self.erasure_worst {
            Some(w) => channel.with_worst_erasure(w),
            None => Ok(channel),
        }
    }

    /// The strategy list: `all`, a single name, or a comma-separated list.
    pub fn strategies(&self) -> Result<Vec<StrategyKind>> {
        if self.strategy.eq_ignore_ascii_case("all") {
            return Ok(StrategyKind::ALL.to_vec());
        }
        self.strategy
            .split(',')
            .map(|s| s.trim().parse::<StrategyKind>())
            .collect()
    }

    pub fn solver(&self) -> Result<SolverKind> {
        self.solver.parse()
    }

    pub fn goodput_aggregation(&self) -> Result<GoodputAggregation> {
        match self.goodput_aggregation.to_ascii_lowercase().as_str() {
            "per-receiver" | "per_receiver" => Ok(GoodputAggregation::PerReceiverMean),
            "pooled" => Ok(GoodputAggregation::Pooled),
            other => Err(IdncError::Config(format!(
                "unknown goodput_aggregation '{other}' (expected per-receiver | pooled)"
            ))),
        }
    }

    pub fn strategy_config(&self, kind: StrategyKind) -> Result<StrategyConfig> {
        Ok(StrategyConfig::new(kind, self.solver()?)
            .with_bias(self.bias_n)
            .with_exact_size_limit(self.exact_size_limit))
    }

    /// The `(M, N)` points a delay/goodput sweep visits.
    pub fn sweep_points(&self) -> Vec<(usize, usize)> {
        let mut points = Vec::new();
        for &s in &self.sweep_mn {
            points.push((s, s));
        }
        for &m in &self.sweep_m {
            points.push((m, self.packets));
        }
        for &n in &self.sweep_n {
            points.push((self.receivers, n));
        }
        if points.is_empty() {
            points.push((self.receivers, self.packets));
        }
        points
    }
}
