//! Ground truth, private signals and information shocks.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bounds of the per-round truth draw.
pub const TRUTH_BOUNDS: (f64, f64) = (0.1, 0.9);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QualityLabel {
    High,
    Medium,
    Low,
}

impl QualityLabel {
    pub const ALL: [QualityLabel; 3] = [QualityLabel::High, QualityLabel::Medium, QualityLabel::Low];

    pub fn as_str(self) -> &'static str {
        match self {
            QualityLabel::High => "High",
            QualityLabel::Medium => "Medium",
            QualityLabel::Low => "Low",
        }
    }
}

impl fmt::Display for QualityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parameters of one signal-quality level.
///
/// `noise_sd` and `bias` drive the gaussian channel; `n_points`,
/// `outlier_count` and `nonlinear` drive the scatter channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityLevel {
    pub label: QualityLabel,
    pub noise_sd: f64,
    pub bias: f64,
    pub n_points: usize,
    pub outlier_count: usize,
    pub nonlinear: bool,
}

impl QualityLevel {
    pub fn validate(&self) -> Result<()> {
        if !self.noise_sd.is_finite() || self.noise_sd < 0.0 {
            return Err(Error::Config(format!("{}: noise_sd must be finite and >= 0", self.label)));
        }
        if !self.bias.is_finite() {
            return Err(Error::Config(format!("{}: bias must be finite", self.label)));
        }
        if self.n_points < 3 {
            return Err(Error::Config(format!("{}: n_points must be >= 3", self.label)));
        }
        if self.outlier_count >= self.n_points {
            return Err(Error::Config(format!(
                "{}: outlier_count must be < n_points",
                self.label
            )));
        }
        Ok(())
    }
}

/// The three quality levels used by a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityPresets {
    pub high: QualityLevel,
    pub medium: QualityLevel,
    pub low: QualityLevel,
}

impl Default for QualityPresets {
    fn default() -> Self {
        QualityPresets {
            high: QualityLevel {
                label: QualityLabel::High,
                noise_sd: 0.05,
                bias: 0.0,
                n_points: 100,
                outlier_count: 0,
                nonlinear: false,
            },
            medium: QualityLevel {
                label: QualityLabel::Medium,
                noise_sd: 0.15,
                bias: 0.15,
                n_points: 30,
                outlier_count: 2,
                nonlinear: false,
            },
            low: QualityLevel {
                label: QualityLabel::Low,
                noise_sd: 0.30,
                bias: 0.30,
                n_points: 12,
                outlier_count: 3,
                nonlinear: true,
            },
        }
    }
}

impl QualityPresets {
    pub fn get(&self, label: QualityLabel) -> &QualityLevel {
        match label {
            QualityLabel::High => &self.high,
            QualityLabel::Medium => &self.medium,
            QualityLabel::Low => &self.low,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for label in QualityLabel::ALL {
            let level = self.get(label);
            if level.label != label {
                return Err(Error::Config(format!("preset slot {label} holds a {} level", level.label)));
            }
            level.validate()?;
        }
        if !(self.high.noise_sd < self.medium.noise_sd && self.medium.noise_sd < self.low.noise_sd) {
            return Err(Error::Config(
                "noise_sd must be strictly increasing from High to Medium to Low".into(),
            ));
        }
        Ok(())
    }
}

/// State of the information environment for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldRound {
    pub round: usize,
    pub truth: f64,
    pub quality_of: Vec<QualityLabel>,
}

/// Agent `i` gets High, Medium, Low, High, ... by index.
pub fn round_robin_assignment(n: usize) -> Vec<QualityLabel> {
    (0..n).map(|i| QualityLabel::ALL[i % 3]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShockMode {
    None,
    Fixed,
    Every,
    Bernoulli,
}

impl FromStr for ShockMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ShockMode::None),
            "fixed" => Ok(ShockMode::Fixed),
            "every" => Ok(ShockMode::Every),
            "bernoulli" => Ok(ShockMode::Bernoulli),
            other => Err(Error::Config(format!(
                "unknown shock mode {other:?} (expected none, fixed, every or bernoulli)"
            ))),
        }
    }
}

impl fmt::Display for ShockMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShockMode::None => "none",
            ShockMode::Fixed => "fixed",
            ShockMode::Every => "every",
            ShockMode::Bernoulli => "bernoulli",
        })
    }
}

/// When the quality assignment gets reshuffled.
///
/// Rounds are 1-indexed. A shock "after round r" takes effect from round
/// r + 1 onward.
#[derive(Debug, Clone, PartialEq)]
pub enum ShockSchedule {
    None,
    /// Shocks after each listed round (strictly increasing).
    Fixed(Vec<usize>),
    /// A shock after every `rho`-th round.
    Every { rho: u32 },
    /// After each round a shock happens with probability 1/rho.
    Bernoulli { rho: u32 },
}

impl ShockSchedule {
    pub fn validate(&self) -> Result<()> {
        match self {
            ShockSchedule::None => Ok(()),
            ShockSchedule::Fixed(rounds) => {
                if rounds.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Config("shock rounds must be strictly increasing".into()));
                }
                if rounds.first() == Some(&0) {
                    return Err(Error::Config("shock rounds are 1-indexed".into()));
                }
                Ok(())
            }
            ShockSchedule::Every { rho } | ShockSchedule::Bernoulli { rho } => {
                if *rho < 1 {
                    return Err(Error::Config("rho must be >= 1".into()));
                }
                Ok(())
            }
        }
    }

    pub fn mode(&self) -> ShockMode {
        match self {
            ShockSchedule::None => ShockMode::None,
            ShockSchedule::Fixed(_) => ShockMode::Fixed,
            ShockSchedule::Every { .. } => ShockMode::Every,
            ShockSchedule::Bernoulli { .. } => ShockMode::Bernoulli,
        }
    }

    /// Whether a shock follows `round` (1-indexed).
    ///
    /// The Bernoulli mode takes exactly one uniform draw per call, whether
    /// or not a shock fires; the other modes take none.
    pub fn fires_after<R: Rng + ?Sized>(&self, round: usize, rng: &mut R) -> bool {
        match self {
            ShockSchedule::None => false,
            ShockSchedule::Fixed(rounds) => rounds.binary_search(&round).is_ok(),
            ShockSchedule::Every { rho } => round.is_multiple_of(*rho as usize),
            ShockSchedule::Bernoulli { rho } => {
                let u: f64 = rng.random();
                u < 1.0 / f64::from(*rho)
            }
        }
    }
}

/// Uniform truth draw on `[lo, hi]`. Takes exactly one `u64` from `rng`.
pub fn next_truth<R: Rng + ?Sized>(rng: &mut R, bounds: (f64, f64)) -> Result<f64> {
    let (lo, hi) = bounds;
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(Error::Config(format!("truth bounds [{lo}, {hi}] must satisfy 0 <= lo < hi <= 1")));
    }
    let u: f64 = rng.random();
    Ok((lo + (hi - lo) * u).clamp(lo, hi))
}

/// Gaussian-channel signal: `clamp(truth + bias + noise_sd * z, 0, 1)`.
/// Takes one standard normal from `rng` even when `noise_sd` is zero.
pub fn draw_signal<R: Rng + ?Sized>(truth: f64, quality: &QualityLevel, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    (truth + quality.bias + quality.noise_sd * z).clamp(0.0, 1.0)
}

/// Reshuffle the quality assignment with a uniformly random permutation.
pub fn apply_shock<R: Rng + ?Sized>(round_state: &WorldRound, rng: &mut R) -> WorldRound {
    let mut next = round_state.clone();
    if next.quality_of.len() >= 2 {
        next.quality_of.shuffle(rng);
    }
    next
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterTask {
    pub points: Vec<(f64, f64)>,
    pub target_correlation: f64,
    pub quality: QualityLevel,
}

impl ScatterTask {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let io_err = |source| Error::Io { path: path.to_path_buf(), source };
        let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
        writeln!(out, "x,y").map_err(io_err)?;
        for (x, y) in &self.points {
            writeln!(out, "{x:.16e},{y:.16e}").map_err(io_err)?;
        }
        out.flush().map_err(io_err)
    }
}

/// Vertical offset range for outliers, in standard deviations of y.
const OUTLIER_OFFSET: (f64, f64) = (3.0, 5.0);

/// Generate a correlation-estimation scatter plot.
///
/// Main points are `x ~ N(0,1)`, `y = r x + sqrt(1 - r^2) z`. When the
/// quality level is nonlinear, `y` is warped by the monotone map `y -> y^3`.
/// Outliers sit on the regression line shifted up or down by 3 to 5 units.
///
/// Draw order: for each main point `x` then `z`; for each outlier `x`, a
/// sign bit, then an offset uniform.
pub fn generate_scatter<R: Rng + ?Sized>(
    target_correlation: f64,
    quality: &QualityLevel,
    rng: &mut R,
) -> Result<ScatterTask> {
    if !(-1.0..=1.0).contains(&target_correlation) {
        return Err(Error::Argument(format!(
            "target correlation {target_correlation} outside [-1, 1]"
        )));
    }
    let r = target_correlation;
    let resid = (1.0 - r * r).max(0.0).sqrt();
    let mut points = Vec::with_capacity(quality.n_points + quality.outlier_count);
    for _ in 0..quality.n_points {
        let x: f64 = rng.sample(StandardNormal);
        let z: f64 = rng.sample(StandardNormal);
        let mut y = r * x + resid * z;
        if quality.nonlinear {
            y = y * y * y;
        }
        points.push((x, y));
    }
    for _ in 0..quality.outlier_count {
        let x: f64 = rng.sample(StandardNormal);
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let offset = rng.random_range(OUTLIER_OFFSET.0..OUTLIER_OFFSET.1);
        points.push((x, r * x + sign * offset));
    }
    Ok(ScatterTask { points, target_correlation, quality: *quality })
}

/// Pearson correlation of a point cloud.
pub fn sample_correlation(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::DegenerateTask(format!("{} points, need at least 2", points.len())));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::DegenerateTask("zero variance in a coordinate".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalChannel {
    Gaussian,
    Scatter,
}

impl FromStr for SignalChannel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(SignalChannel::Gaussian),
            "scatter" => Ok(SignalChannel::Scatter),
            other => Err(Error::Config(format!(
                "unknown signal channel {other:?} (expected gaussian or scatter)"
            ))),
        }
    }
}

impl fmt::Display for SignalChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignalChannel::Gaussian => "gaussian",
            SignalChannel::Scatter => "scatter",
        })
    }
}

/// Private signals for every agent, in agent order.
///
/// The scatter channel reports the sample correlation of a task generated
/// at the round's truth, clamped into `[0, 1]`.
pub fn draw_signals<R: Rng + ?Sized>(
    world: &WorldRound,
    presets: &QualityPresets,
    channel: SignalChannel,
    rng: &mut R,
) -> Result<Vec<f64>> {
    world
        .quality_of
        .iter()
        .map(|&label| {
            let quality = presets.get(label);
            match channel {
                SignalChannel::Gaussian => Ok(draw_signal(world.truth, quality, rng)),
                SignalChannel::Scatter => {
                    let task = generate_scatter(world.truth, quality, rng)?;
                    Ok(sample_correlation(&task.points)?.clamp(0.0, 1.0))
                }
            }
        })
        .collect()
}
