use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;

use crate::environment::{QualityPresets, ShockMode, ShockSchedule, SignalChannel, TRUTH_BOUNDS};
use crate::error::{Error, Result};
use crate::network::CentralizationMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    /// Isolated agents; beliefs are the private signals.
    Solo,
    /// Learning on the initial random graph, never rewired.
    Static,
    /// Learning plus performance-based rewiring every round.
    Dynamic,
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "solo" => Ok(Condition::Solo),
            "static" => Ok(Condition::Static),
            "dynamic" => Ok(Condition::Dynamic),
            other => Err(Error::Config(format!(
                "unknown condition {other:?} (expected solo, static or dynamic)"
            ))),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Solo => "solo",
            Condition::Static => "static",
            Condition::Dynamic => "dynamic",
        })
    }
}

/// Everything that determines a run. Two equal configs give bit-identical
/// traces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub condition: Condition,
    pub n: usize,
    pub rounds: usize,
    pub kappa: u32,
    pub self_weight: u32,
    /// Retrospective window: performance averages the current round and
    /// the `lambda` before it.
    pub lambda: u32,
    /// Standard deviation of the noise on relative-error feedback.
    pub eta: f64,
    /// Multiplier applied to raw relative errors (belief units) before
    /// they are clamped to [0, 1] and fed to rewiring.
    pub pi_scale: f64,
    pub shock: ShockSchedule,
    pub signal_channel: SignalChannel,
    pub qualities: QualityPresets,
    pub seed: u64,
    pub replications: usize,
    /// Averaging passes per round.
    pub stages: u32,
    /// Dynamic condition only; `false` freezes the graph.
    pub rewire: bool,
    pub centralization_mode: CentralizationMode,
    pub truth_bounds: (f64, f64),
}

pub const DEFAULT_LAMBDA: u32 = 2;
pub const DEFAULT_PI_SCALE: f64 = 8.0;

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            condition: Condition::Dynamic,
            n: 12,
            rounds: 20,
            kappa: 3,
            self_weight: 3,
            lambda: DEFAULT_LAMBDA,
            eta: 0.0,
            pi_scale: DEFAULT_PI_SCALE,
            shock: ShockSchedule::Fixed(vec![10]),
            signal_channel: SignalChannel::Gaussian,
            qualities: QualityPresets::default(),
            seed: 0,
            replications: 1,
            stages: 2,
            rewire: true,
            centralization_mode: CentralizationMode::Binary,
            truth_bounds: TRUTH_BOUNDS,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("need at least 2 agents, got {}", self.n)));
        }
        if self.rounds < 1 {
            return Err(Error::Config("need at least 1 round".into()));
        }
        if self.condition != Condition::Solo && (self.kappa < 1 || self.kappa as usize >= self.n) {
            return Err(Error::Config(format!("kappa must be in 1..={}, got {}", self.n - 1, self.kappa)));
        }
        if self.self_weight < 1 {
            return Err(Error::Config("self_weight must be >= 1".into()));
        }
        if !self.eta.is_finite() || self.eta < 0.0 {
            return Err(Error::Config(format!("eta must be finite and >= 0, got {}", self.eta)));
        }
        if !self.pi_scale.is_finite() || self.pi_scale <= 0.0 {
            return Err(Error::Config(format!("pi_scale must be finite and > 0, got {}", self.pi_scale)));
        }
        if self.replications < 1 {
            return Err(Error::Config("replications must be >= 1".into()));
        }
        let (lo, hi) = self.truth_bounds;
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::Config(format!("truth bounds [{lo}, {hi}] must satisfy 0 <= lo < hi <= 1")));
        }
        self.shock.validate()?;
        self.qualities.validate()
    }

    /// Read a config file and apply it over the defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let mut config = RunConfig::default();
        ConfigOverrides::from_file(path)?.apply(&mut config)?;
        Ok(config)
    }
}

/// Flat `key = value` settings; every key mirrors a [`RunConfig`] field
/// (quality levels are spelled `<level>_<field>`). Unknown keys are
/// rejected. The CLI fills the same struct from its flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub condition: Option<Condition>,
    pub n: Option<usize>,
    pub rounds: Option<usize>,
    pub kappa: Option<u32>,
    pub self_weight: Option<u32>,
    pub lambda: Option<u32>,
    pub eta: Option<f64>,
    pub pi_scale: Option<f64>,
    pub shock_mode: Option<ShockMode>,
    pub rho: Option<u32>,
    pub shock_rounds: Option<Vec<usize>>,
    pub signal_channel: Option<SignalChannel>,
    pub seed: Option<u64>,
    pub replications: Option<usize>,
    pub stages: Option<u32>,
    pub rewire: Option<bool>,
    pub centralization_mode: Option<CentralizationMode>,
    pub truth_lo: Option<f64>,
    pub truth_hi: Option<f64>,

    pub high_noise_sd: Option<f64>,
    pub high_bias: Option<f64>,
    pub high_points: Option<usize>,
    pub high_outliers: Option<usize>,
    pub high_nonlinear: Option<bool>,
    pub medium_noise_sd: Option<f64>,
    pub medium_bias: Option<f64>,
    pub medium_points: Option<usize>,
    pub medium_outliers: Option<usize>,
    pub medium_nonlinear: Option<bool>,
    pub low_noise_sd: Option<f64>,
    pub low_bias: Option<f64>,
    pub low_points: Option<usize>,
    pub low_outliers: Option<usize>,
    pub low_nonlinear: Option<bool>,
}

macro_rules! set {
    ($src:expr => $dst:expr) => {
        if let Some(v) = $src {
            $dst = v;
        }
    };
}

impl ConfigOverrides {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Apply every set key to `config`, then validate the result.
    pub fn apply(&self, config: &mut RunConfig) -> Result<()> {
        set!(self.condition => config.condition);
        set!(self.n => config.n);
        set!(self.rounds => config.rounds);
        set!(self.kappa => config.kappa);
        set!(self.self_weight => config.self_weight);
        set!(self.lambda => config.lambda);
        set!(self.eta => config.eta);
        set!(self.pi_scale => config.pi_scale);
        set!(self.signal_channel => config.signal_channel);
        set!(self.seed => config.seed);
        set!(self.replications => config.replications);
        set!(self.stages => config.stages);
        set!(self.rewire => config.rewire);
        set!(self.centralization_mode => config.centralization_mode);
        set!(self.truth_lo => config.truth_bounds.0);
        set!(self.truth_hi => config.truth_bounds.1);

        let q = &mut config.qualities;
        set!(self.high_noise_sd => q.high.noise_sd);
        set!(self.high_bias => q.high.bias);
        set!(self.high_points => q.high.n_points);
        set!(self.high_outliers => q.high.outlier_count);
        set!(self.high_nonlinear => q.high.nonlinear);
        set!(self.medium_noise_sd => q.medium.noise_sd);
        set!(self.medium_bias => q.medium.bias);
        set!(self.medium_points => q.medium.n_points);
        set!(self.medium_outliers => q.medium.outlier_count);
        set!(self.medium_nonlinear => q.medium.nonlinear);
        set!(self.low_noise_sd => q.low.noise_sd);
        set!(self.low_bias => q.low.bias);
        set!(self.low_points => q.low.n_points);
        set!(self.low_outliers => q.low.outlier_count);
        set!(self.low_nonlinear => q.low.nonlinear);

        config.shock = self.resolve_shock(&config.shock)?;
        config.validate()
    }

    fn resolve_shock(&self, current: &ShockSchedule) -> Result<ShockSchedule> {
        let current_rho = match current {
            ShockSchedule::Every { rho } | ShockSchedule::Bernoulli { rho } => Some(*rho),
            _ => None,
        };
        let rho = self.rho.or(current_rho);
        let need_rho = |mode: ShockMode| {
            rho.ok_or_else(|| Error::Config(format!("shock mode {mode} needs rho")))
        };
        let mode = match (self.shock_mode, self.rho, &self.shock_rounds) {
            (Some(mode), _, _) => mode,
            (None, _, Some(_)) => ShockMode::Fixed,
            // rho alone: keep a rho-driven mode, otherwise Bernoulli arrivals
            (None, Some(_), None) => match current {
                ShockSchedule::Every { .. } => ShockMode::Every,
                _ => ShockMode::Bernoulli,
            },
            (None, None, None) => return Ok(current.clone()),
        };
        Ok(match mode {
            ShockMode::None => ShockSchedule::None,
            ShockMode::Fixed => match (&self.shock_rounds, current) {
                (Some(rounds), _) => ShockSchedule::Fixed(rounds.clone()),
                (None, ShockSchedule::Fixed(rounds)) => ShockSchedule::Fixed(rounds.clone()),
                (None, _) => {
                    return Err(Error::Config("shock mode fixed needs shock_rounds".into()));
                }
            },
            ShockMode::Every => ShockSchedule::Every { rho: need_rho(mode)? },
            ShockMode::Bernoulli => ShockSchedule::Bernoulli { rho: need_rho(mode)? },
        })
    }
}
