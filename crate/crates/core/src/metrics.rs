//! Outcome measures: crowd vs. network error, normalized errors, top-k
//! aggregates, resistance to social influence.

use crate::error::{Error, Result};
use crate::network::AttentionGraph;
use crate::stats::{mean, population_sd};
use crate::trace::RunTrace;

#[derive(Debug, Clone, PartialEq)]
pub struct RoundMetrics {
    pub round: usize,
    pub wc_error: f64,
    pub wdn_error: f64,
    pub individual_errors: Vec<f64>,
    /// Freeman value of the network after this round's rewiring; `None`
    /// when the group has no network or fewer than 3 agents.
    pub centralization: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopKCurve {
    pub k: usize,
    pub mean_abs_error: f64,
    pub sd_abs_error: f64,
}

fn collective_error(values: &[f64], truth: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Argument("collective error of an empty group".into()));
    }
    Ok((truth - mean(values)).abs())
}

/// Error of the plain average of private signals.
pub fn wc_error(signals: &[f64], truth: f64) -> Result<f64> {
    collective_error(signals, truth)
}

/// Error of the average of post-learning beliefs.
pub fn wdn_error(beliefs: &[f64], truth: f64) -> Result<f64> {
    collective_error(beliefs, truth)
}

pub fn individual_errors(beliefs: &[f64], truth: f64) -> Vec<f64> {
    beliefs.iter().map(|p| (p - truth).abs()).collect()
}

fn baseline_mean(baseline_errors: &[f64]) -> Result<f64> {
    let base = mean(baseline_errors);
    if baseline_errors.is_empty() || base.is_nan() || base <= 0.0 {
        return Err(Error::UndefinedNormalization(format!("baseline mean error is {base}")));
    }
    Ok(base)
}

/// Each error divided by the mean of the baseline errors.
pub fn normalized_error(errors: &[f64], baseline_errors: &[f64]) -> Result<Vec<f64>> {
    let base = baseline_mean(baseline_errors)?;
    Ok(errors.iter().map(|e| e / base).collect())
}

/// Mean error over the pool divided by the mean baseline error.
pub fn pooled_normalized_error(errors: &[f64], baseline_errors: &[f64]) -> Result<f64> {
    let base = baseline_mean(baseline_errors)?;
    if errors.is_empty() {
        return Err(Error::Argument("no errors to normalize".into()));
    }
    Ok(mean(errors) / base)
}

/// Rounds 6-10 and 16-20 of a 20-round run, scaled to `rounds`: every
/// 1-indexed round `r` with `T/4 < r <= T/2` or `3T/4 < r <= T`.
pub fn adapted_rounds(rounds: usize) -> Vec<usize> {
    (1..=rounds)
        .filter(|&r| (4 * r > rounds && 2 * r <= rounds) || 4 * r > 3 * rounds)
        .collect()
}

fn records_for<'a>(trace: &'a RunTrace, rounds: &[usize]) -> Result<Vec<&'a crate::trace::RoundRecord>> {
    if rounds.is_empty() {
        return Err(Error::Argument("no evaluation rounds".into()));
    }
    rounds
        .iter()
        .map(|&r| {
            trace
                .record(r)
                .ok_or_else(|| Error::Argument(format!("round {r} not in trace of {} rounds", trace.rounds.len())))
        })
        .collect()
}

/// Agents ordered by mean absolute belief error over `rounds` (1-indexed),
/// best first. Ties go to the lower agent index.
pub fn rank_members(trace: &RunTrace, rounds: &[usize]) -> Result<Vec<usize>> {
    let records = records_for(trace, rounds)?;
    let n = trace.n_agents();
    let scores: Vec<f64> = (0..n)
        .map(|i| {
            let errs: Vec<f64> = records.iter().map(|r| (r.beliefs[i] - r.world.truth).abs()).collect();
            mean(&errs)
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    Ok(order)
}

/// Mean belief of the `k` best-ranked agents.
///
/// The selected beliefs are summed in agent-index order, so `k = n`
/// reproduces the plain group mean bit for bit.
pub fn top_k_estimate(beliefs: &[f64], ranking: &[usize], k: usize) -> Result<f64> {
    if k == 0 || k > beliefs.len() || k > ranking.len() {
        return Err(Error::Argument(format!("k = {k} outside 1..={}", beliefs.len())));
    }
    let mut chosen = ranking[..k].to_vec();
    chosen.sort_unstable();
    let picked: Vec<f64> = chosen.iter().map(|&i| beliefs[i]).collect();
    Ok(mean(&picked))
}

/// Mean and population standard deviation of `|top_k - truth|` over
/// `rounds`, for every k, using one ex-post ranking over the same rounds.
pub fn mean_variance_curve(trace: &RunTrace, rounds: &[usize]) -> Result<Vec<TopKCurve>> {
    let records = records_for(trace, rounds)?;
    let ranking = rank_members(trace, rounds)?;
    (1..=trace.n_agents())
        .map(|k| {
            let errs = records
                .iter()
                .map(|r| Ok((r.world.truth - top_k_estimate(&r.beliefs, &ranking, k)?).abs()))
                .collect::<Result<Vec<f64>>>()?;
            Ok(TopKCurve { k, mean_abs_error: mean(&errs), sd_abs_error: population_sd(&errs) })
        })
        .collect()
}

/// `1 - |u2 - u1| / |m - u1|`, clamped into `[0, 1]`.
///
/// Returns `None` when `m == u1`; such cases carry no information about
/// influence and are left out of aggregates.
pub fn resistance_to_influence(u1: f64, u2: f64, m: f64) -> Option<f64> {
    let reach = (m - u1).abs();
    if reach == 0.0 {
        return None;
    }
    Some((1.0 - (u2 - u1).abs() / reach).clamp(0.0, 1.0))
}

/// Per-agent resistance for one round: initial guess is the signal, final
/// guess the belief, and the advice is the share-weighted mean of the
/// followed peers' signals.
pub fn round_resistance(graph: &AttentionGraph, signals: &[f64], beliefs: &[f64]) -> Vec<Option<f64>> {
    (0..graph.n())
        .map(|i| {
            let (mut num, mut den) = (0.0, 0.0);
            for (j, s) in graph.out_edges(i) {
                num += f64::from(s) * signals[j];
                den += f64::from(s);
            }
            if den == 0.0 {
                return None;
            }
            resistance_to_influence(signals[i], beliefs[i], num / den)
        })
        .collect()
}
