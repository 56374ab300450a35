use crate::environment::{apply_shock, draw_signals, next_truth, round_robin_assignment, WorldRound};
use crate::error::{Error, Result};
use crate::learning::{degroot, solo_beliefs};
use crate::metrics::{individual_errors, wc_error, wdn_error, RoundMetrics};
use crate::network::AttentionGraph;
use crate::rewiring::{feedback_view, relative_errors, rewire_step, PerformanceLedger};
use crate::rng::RunStreams;
use crate::trace::{RoundRecord, RunTrace};

use super::config::{Condition, RunConfig};

/// Simulate one seeded run.
///
/// Each round: draw the truth, draw signals, form beliefs (signals for
/// solo, `stages` averaging passes otherwise), record metrics and errors,
/// rewire (dynamic only) from feedback on this round's outcome, then
/// reshuffle qualities if a shock follows the round. A round's
/// centralization is taken on the network the round ends with, i.e. after
/// that round's rewiring; its `graph` is the one the beliefs used. Quality labels start
/// round-robin (High, Medium, Low, High, ...).
pub fn run(config: &RunConfig) -> Result<RunTrace> {
    config.validate()?;
    let n = config.n;
    let mut streams = RunStreams::new(config.seed);
    let mut graph = match config.condition {
        Condition::Solo => None,
        Condition::Static | Condition::Dynamic => Some(
            AttentionGraph::init_random(n, config.kappa, &mut streams.topology)?
                .with_self_weight(config.self_weight),
        ),
    };
    let rewiring = config.condition == Condition::Dynamic && config.rewire;
    let mut quality_of = round_robin_assignment(n);
    let mut ledger = PerformanceLedger::new(n, config.lambda);
    let mut records = Vec::with_capacity(config.rounds);

    for round in 1..=config.rounds {
        let truth = next_truth(&mut streams.truth, config.truth_bounds)?;
        let world = WorldRound { round, truth, quality_of: quality_of.clone() };
        let signals = draw_signals(&world, &config.qualities, config.signal_channel, &mut streams.signals)?;
        let beliefs = match &graph {
            None => solo_beliefs(&signals),
            Some(g) => degroot(&g.build_matrix()?, &signals, config.stages)?,
        };
        let mut metrics = RoundMetrics {
            round,
            wc_error: wc_error(&signals, truth)?,
            wdn_error: wdn_error(&beliefs, truth)?,
            individual_errors: individual_errors(&beliefs, truth),
            centralization: None,
        };
        ledger.record(&signals, &beliefs, truth)?;

        let next_graph = match (&graph, rewiring) {
            (Some(g), true) => {
                let pi = relative_errors(&ledger.belief_epsilons()?, config.pi_scale);
                let pi_signal = relative_errors(&ledger.signal_epsilons()?, config.pi_scale);
                let views = (0..n)
                    .map(|i| feedback_view(&pi, pi_signal[i], i, config.eta, &mut streams.feedback))
                    .collect::<Result<Vec<_>>>()?;
                let next = rewire_step(g, &views, &mut streams.rewire).map_err(|e| match e {
                    Error::Invariant(msg) => Error::Invariant(format!(
                        "seed {} round {round}: {msg}; graph before step: {:?}",
                        config.seed,
                        (0..n).map(|i| g.row(i).to_vec()).collect::<Vec<_>>()
                    )),
                    other => other,
                })?;
                Some(next)
            }
            _ => None,
        };

        metrics.centralization = next_graph
            .as_ref()
            .or(graph.as_ref())
            .and_then(|g| g.freeman_centralization(config.centralization_mode).ok());

        let shock_after = config.shock.fires_after(round, &mut streams.shocks);
        if shock_after {
            quality_of = apply_shock(&world, &mut streams.shocks).quality_of;
        }

        records.push(RoundRecord {
            round,
            world,
            signals,
            beliefs,
            graph: graph.clone(),
            metrics,
            shock_after,
        });
        if let Some(next) = next_graph {
            graph = Some(next);
        }
    }

    Ok(RunTrace { run_id: config.seed.to_string(), seed: config.seed, rounds: records })
}
