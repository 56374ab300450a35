//! Round-by-round record of one run.

use crate::environment::WorldRound;
use crate::metrics::RoundMetrics;
use crate::network::AttentionGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    /// 1-indexed round number.
    pub round: usize,
    pub world: WorldRound,
    pub signals: Vec<f64>,
    pub beliefs: Vec<f64>,
    /// Graph the beliefs were formed on; `None` for isolated agents.
    pub graph: Option<AttentionGraph>,
    pub metrics: RoundMetrics,
    /// A shock reshuffled qualities after this round.
    pub shock_after: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub run_id: String,
    pub seed: u64,
    pub rounds: Vec<RoundRecord>,
}

impl RunTrace {
    pub fn n_agents(&self) -> usize {
        self.rounds.first().map_or(0, |r| r.beliefs.len())
    }

    pub fn record(&self, round: usize) -> Option<&RoundRecord> {
        round.checked_sub(1).and_then(|i| self.rounds.get(i))
    }

    pub fn wdn_series(&self) -> Vec<f64> {
        self.rounds.iter().map(|r| r.metrics.wdn_error).collect()
    }

    pub fn wc_series(&self) -> Vec<f64> {
        self.rounds.iter().map(|r| r.metrics.wc_error).collect()
    }

    pub fn centralization_series(&self) -> Vec<Option<f64>> {
        self.rounds.iter().map(|r| r.metrics.centralization).collect()
    }

    /// Rounds (1-indexed) after which a shock happened.
    pub fn shock_rounds(&self) -> Vec<usize> {
        self.rounds.iter().filter(|r| r.shock_after).map(|r| r.round).collect()
    }
}
