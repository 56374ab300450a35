//! Performance tracking, feedback views and the detach/attach rewiring step.
//!
//! Every round each agent sees a vector of relative errors: its peers'
//! post-learning errors and, in its own slot, the error of its private
//! signal. From that view it detaches held shares with probability
//! `sqrt(pi_own * pi_peer)` and re-places every detached share by a
//! multinomial draw with weights `((1 - pi_j) / (n - sum pi))^2`,
//! normalized over the peers.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::network::AttentionGraph;

/// Rolling absolute errors per agent.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceLedger {
    lambda: u32,
    belief_errors: Vec<Vec<f64>>,
    signal_errors: Vec<Vec<f64>>,
}

impl PerformanceLedger {
    pub fn new(n: usize, lambda: u32) -> Self {
        PerformanceLedger {
            lambda,
            belief_errors: vec![Vec::new(); n],
            signal_errors: vec![Vec::new(); n],
        }
    }

    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    pub fn rounds(&self) -> usize {
        self.belief_errors.first().map_or(0, Vec::len)
    }

    pub fn record(&mut self, signals: &[f64], beliefs: &[f64], truth: f64) -> Result<()> {
        let n = self.belief_errors.len();
        if signals.len() != n || beliefs.len() != n {
            return Err(Error::Invariant(format!(
                "ledger for {n} agents got {} signals and {} beliefs",
                signals.len(),
                beliefs.len()
            )));
        }
        for i in 0..n {
            self.belief_errors[i].push((beliefs[i] - truth).abs());
            self.signal_errors[i].push((signals[i] - truth).abs());
        }
        Ok(())
    }

    pub fn belief_history(&self, agent: usize) -> &[f64] {
        &self.belief_errors[agent]
    }

    pub fn signal_history(&self, agent: usize) -> &[f64] {
        &self.signal_errors[agent]
    }

    /// Windowed belief error of every agent at the latest round.
    pub fn belief_epsilons(&self) -> Result<Vec<f64>> {
        self.epsilons(&self.belief_errors)
    }

    /// Windowed private-signal error of every agent at the latest round.
    pub fn signal_epsilons(&self) -> Result<Vec<f64>> {
        self.epsilons(&self.signal_errors)
    }

    fn epsilons(&self, histories: &[Vec<f64>]) -> Result<Vec<f64>> {
        let t = self
            .rounds()
            .checked_sub(1)
            .ok_or_else(|| Error::UndefinedPerformance("no rounds recorded".into()))?;
        histories.iter().map(|h| cumulative_error(h, t, self.lambda)).collect()
    }
}

/// Mean of `history[t - lambda ..= t]`, truncated at the start of the run.
pub fn cumulative_error(history: &[f64], t: usize, lambda: u32) -> Result<f64> {
    if history.is_empty() {
        return Err(Error::UndefinedPerformance("empty error history".into()));
    }
    if t >= history.len() {
        return Err(Error::UndefinedPerformance(format!(
            "round {t} beyond history of length {}",
            history.len()
        )));
    }
    let window = (lambda as usize + 1).min(t + 1);
    let slice = &history[t + 1 - window..=t];
    Ok(slice.iter().sum::<f64>() / window as f64)
}

/// Distance of each agent's error from the group's best, multiplied by
/// `scale` and clamped to [0, 1]. With `scale = 1` this is the raw gap in
/// belief units.
pub fn relative_errors(epsilons: &[f64], scale: f64) -> Vec<f64> {
    let min = epsilons.iter().cloned().fold(f64::INFINITY, f64::min);
    epsilons.iter().map(|e| (scale * (e - min)).clamp(0.0, 1.0)).collect()
}

/// What agent `owner` knows about everyone's relative error this round.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackView {
    pub owner: usize,
    /// Peer relative errors; the owner's slot holds its private-signal
    /// relative error.
    pub pi: Vec<f64>,
    /// The owner's own post-learning relative error, as perceived.
    pub own_pi: f64,
    pub noise_sd: f64,
}

/// Build a (possibly noisy) view for `owner`.
///
/// Each slot is `clamp(value + eta * z, 0, 1)` with `z` standard normal.
/// Draw order: one normal per slot in index order, then one for `own_pi`.
/// The draws are taken even when `eta` is zero.
pub fn feedback_view<R: Rng + ?Sized>(
    pi: &[f64],
    pi_signal_own: f64,
    owner: usize,
    eta: f64,
    rng: &mut R,
) -> Result<FeedbackView> {
    if eta.is_nan() || eta < 0.0 {
        return Err(Error::Argument(format!("feedback noise must be >= 0, got {eta}")));
    }
    if owner >= pi.len() {
        return Err(Error::Argument(format!("owner {owner} outside group of {}", pi.len())));
    }
    let mut noisy = |value: f64| {
        let z: f64 = rng.sample(StandardNormal);
        (value + eta * z).clamp(0.0, 1.0)
    };
    let view: Vec<f64> = pi
        .iter()
        .enumerate()
        .map(|(j, &p)| if j == owner { noisy(pi_signal_own) } else { noisy(p) })
        .collect();
    let own_pi = noisy(pi[owner]);
    Ok(FeedbackView { owner, pi: view, own_pi, noise_sd: eta })
}

/// `sqrt(pi_own * pi_peer)`.
pub fn detach_probability(pi_own: f64, pi_peer_viewed: f64) -> f64 {
    (pi_own * pi_peer_viewed).sqrt().clamp(0.0, 1.0)
}

/// Attachment distribution over the group; the owner's entry is zero.
///
/// Falls back to uniform over peers when every peer weight is zero.
pub fn attach_probabilities(view: &FeedbackView) -> Vec<f64> {
    let n = view.pi.len();
    let owner = view.owner;
    let total: f64 = view.pi.iter().sum();
    let denom = n as f64 - total;
    let mut weights: Vec<f64> = (0..n)
        .map(|j| {
            if j == owner || denom <= 0.0 {
                0.0
            } else {
                let r = (1.0 - view.pi[j]) / denom;
                r * r
            }
        })
        .collect();
    let sum: f64 = weights.iter().sum();
    if sum > 0.0 && sum.is_finite() {
        for w in &mut weights {
            *w /= sum;
        }
    } else if n > 1 {
        let p = 1.0 / (n - 1) as f64;
        for (j, w) in weights.iter_mut().enumerate() {
            *w = if j == owner { 0.0 } else { p };
        }
    }
    weights
}

/// Index drawn from `probs` using one uniform.
fn categorical<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (j, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = j;
        if u < acc {
            return j;
        }
    }
    last
}

/// One round of detachment and attachment for every agent.
///
/// Agents go in index order. For agent `i`, every held share on peer `j`
/// (peers in index order) takes one uniform for its Bernoulli(beta_ij)
/// detachment; then each detached share takes one uniform for its
/// categorical attachment draw, which together form the multinomial.
/// All decisions read the incoming graph.
pub fn rewire_step<R: Rng + ?Sized>(
    graph: &AttentionGraph,
    views: &[FeedbackView],
    rng: &mut R,
) -> Result<AttentionGraph> {
    let n = graph.n();
    if views.len() != n {
        return Err(Error::Invariant(format!("{} feedback views for {n} agents", views.len())));
    }
    let mut next = graph.clone();
    for (i, view) in views.iter().enumerate() {
        if view.owner != i || view.pi.len() != n {
            return Err(Error::Invariant(format!("feedback view {i} is malformed")));
        }
        let row = graph.row(i);
        let mut detached = vec![0u32; n];
        for j in (0..n).filter(|&j| j != i) {
            let beta = detach_probability(view.own_pi, view.pi[j]);
            for _ in 0..row[j] {
                if rng.random::<f64>() < beta {
                    detached[j] += 1;
                }
            }
        }
        let moved: u32 = detached.iter().sum();
        if moved == 0 {
            continue;
        }
        let alpha = attach_probabilities(view);
        let out = next.row_mut(i);
        for j in 0..n {
            out[j] -= detached[j];
        }
        for _ in 0..moved {
            out[categorical(&alpha, rng)] += 1;
        }
    }
    next.check_invariants()?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn view(owner: usize, pi: Vec<f64>, own_pi: f64) -> FeedbackView {
        FeedbackView { owner, pi, own_pi, noise_sd: 0.0 }
    }

    #[test]
    fn cumulative_error_windows() {
        assert_eq!(cumulative_error(&[0.5, 0.2], 1, 0).unwrap(), 0.2);
        assert!((cumulative_error(&[0.9, 0.2, 0.4], 2, 1).unwrap() - 0.3).abs() < 1e-15);
        assert!((cumulative_error(&[0.2, 0.4], 1, 5).unwrap() - 0.3).abs() < 1e-15);
        assert!(matches!(cumulative_error(&[], 0, 1), Err(Error::UndefinedPerformance(_))));
        assert!(cumulative_error(&[0.1], 3, 1).is_err());
    }

    #[test]
    fn relative_error_cases() {
        assert_eq!(relative_errors(&[0.3, 0.3, 0.3], 1.0), vec![0.0; 3]);
        let pi = relative_errors(&[0.1, 0.3, 0.6], 1.0);
        for (got, want) in pi.iter().zip([0.0, 0.2, 0.5]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert_eq!(relative_errors(&[0.7], 1.0), vec![0.0]);
        // scaled gaps saturate at 1; the best agent stays at 0
        assert_eq!(relative_errors(&[0.25, 0.375, 0.5, 1.0], 2.0), vec![0.0, 0.25, 0.5, 1.0]);
    }

    #[test]
    fn noiseless_view_substitutes_owner_slot() {
        let mut rng = SimRng::seed_from_u64(0);
        let v = feedback_view(&[0.0, 0.2], 0.4, 1, 0.0, &mut rng).unwrap();
        assert_eq!(v.pi, vec![0.0, 0.4]);
        assert_eq!(v.own_pi, 0.2);
        assert!(feedback_view(&[0.0], 0.0, 0, -1.0, &mut rng).is_err());
    }

    #[test]
    fn very_noisy_view_loses_correlation() {
        let mut rng = SimRng::seed_from_u64(8);
        let pi = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for _ in 0..5000 {
            let v = feedback_view(&pi, 0.0, 0, 1e6, &mut rng).unwrap();
            for j in 1..pi.len() {
                xs.push(pi[j]);
                ys.push(v.pi[j]);
            }
        }
        let pts: Vec<_> = xs.into_iter().zip(ys).collect();
        let r = crate::environment::sample_correlation(&pts).unwrap();
        assert!(r.abs() < 0.03, "r = {r}");
    }

    #[test]
    fn detach_cases() {
        assert_eq!(detach_probability(0.0, 0.9), 0.0);
        assert_eq!(detach_probability(1.0, 1.0), 1.0);
        assert!((detach_probability(0.25, 0.64) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn attach_cases() {
        assert_eq!(attach_probabilities(&view(0, vec![0.0, 0.3, 0.3], 0.0)), vec![0.0, 0.5, 0.5]);
        assert_eq!(attach_probabilities(&view(0, vec![0.5, 0.0, 1.0], 0.0)), vec![0.0, 1.0, 0.0]);
        let a = attach_probabilities(&view(0, vec![0.1, 0.2, 0.6], 0.0));
        assert!((a[1] - 0.8).abs() < 1e-12 && (a[2] - 0.2).abs() < 1e-12);
        // every peer maximally bad: uniform fallback
        assert_eq!(attach_probabilities(&view(1, vec![1.0, 0.0, 1.0], 0.0)), vec![0.5, 0.0, 0.5]);
        assert_eq!(attach_probabilities(&view(1, vec![1.0, 1.0, 1.0], 0.0)), vec![0.5, 0.0, 0.5]);
    }

    #[test]
    fn zero_detachment_leaves_graph() {
        let mut rng = SimRng::seed_from_u64(1);
        let g = AttentionGraph::init_random(6, 2, &mut rng).unwrap();
        let views: Vec<_> = (0..6).map(|i| view(i, vec![0.5; 6], 0.0)).collect();
        assert_eq!(rewire_step(&g, &views, &mut rng).unwrap(), g);
    }

    #[test]
    fn forced_move_of_all_shares() {
        let g = AttentionGraph::from_shares(3, 3, 1, vec![0, 3, 0, 3, 0, 0, 3, 0, 0]).unwrap();
        let views = vec![
            view(0, vec![0.2, 1.0, 0.0], 1.0),
            view(1, vec![0.0, 0.0, 0.0], 0.0),
            view(2, vec![0.0, 0.0, 0.0], 0.0),
        ];
        let mut rng = SimRng::seed_from_u64(3);
        let next = rewire_step(&g, &views, &mut rng).unwrap();
        assert_eq!(next.row(0), &[0, 0, 3]);
        assert_eq!(next.row(1), g.row(1));
    }

    #[test]
    fn malformed_views_rejected() {
        let mut rng = SimRng::seed_from_u64(1);
        let g = AttentionGraph::init_random(3, 1, &mut rng).unwrap();
        let views = vec![view(0, vec![0.0; 3], 0.0)];
        assert!(matches!(rewire_step(&g, &views, &mut rng), Err(Error::Invariant(_))));
        let views: Vec<_> = (0..3).map(|_| view(0, vec![0.0; 3], 0.0)).collect();
        assert!(matches!(rewire_step(&g, &views, &mut rng), Err(Error::Invariant(_))));
    }

    fn golden_views() -> Vec<FeedbackView> {
        vec![
            view(0, vec![0.1, 0.2, 0.4, 1.0], 1.0),
            view(1, vec![0.3, 0.0, 0.4, 0.8], 0.0),
            view(2, vec![0.3, 0.6, 0.3, 0.8], 0.7),
            view(3, vec![0.3, 0.6, 0.4, 0.5], 0.9),
        ]
    }

    const GOLDEN_INIT_99: [u32; 16] = [0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0, 1, 1, 1, 0, 0];
    const GOLDEN_REWIRE_99: [u32; 16] = [0, 2, 0, 0, 1, 0, 1, 0, 1, 1, 0, 0, 2, 0, 0, 0];

    #[test]
    fn rewire_golden_seed_99() {
        let g = AttentionGraph::from_shares(4, 2, 1, GOLDEN_INIT_99.to_vec()).unwrap();
        let mut rng = SimRng::seed_from_u64(99);
        let next = rewire_step(&g, &golden_views(), &mut rng).unwrap();
        let flat: Vec<u32> = (0..4).flat_map(|i| next.row(i).to_vec()).collect();
        assert_eq!(flat, GOLDEN_REWIRE_99.to_vec());
    }

    #[test]
    fn persistent_best_keeps_gaining_followers() {
        // Agent 0 is always best (pi = 0); its in-degree can only grow.
        for seed in 0..1000u64 {
            let mut rng = SimRng::seed_from_u64(seed);
            let n = 8;
            let mut g = AttentionGraph::init_random(n, 3, &mut rng).unwrap();
            let pi: Vec<f64> = (0..n).map(|j| if j == 0 { 0.0 } else { rng.random_range(0.05..0.6) }).collect();
            let views: Vec<_> = (0..n)
                .map(|i| feedback_view(&pi, pi[i], i, 0.0, &mut rng).unwrap())
                .collect();
            let mut prev = g.in_degree()[0];
            for _ in 0..10 {
                g = rewire_step(&g, &views, &mut rng).unwrap();
                let now = g.in_degree()[0];
                assert!(now >= prev, "seed {seed}: in-degree fell {prev} -> {now}");
                prev = now;
            }
        }
    }

    proptest! {
        #[test]
        fn detach_monotone_and_bounded(own in 0.0f64..=1.0, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let beta_lo = detach_probability(own, lo);
            let beta_hi = detach_probability(own, hi);
            prop_assert!((0.0..=1.0).contains(&beta_lo) && (0.0..=1.0).contains(&beta_hi));
            prop_assert!(beta_lo <= beta_hi);
        }

        #[test]
        fn attach_monotone_and_normalized(
            pi in proptest::collection::vec(0.0f64..=1.0, 2..12),
            target in 0usize..12,
            bump in 0.0f64..=1.0,
        ) {
            let n = pi.len();
            let target = 1 + target % (n - 1);
            let base = attach_probabilities(&view(0, pi.clone(), 0.0));
            let sum: f64 = base.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(base.iter().all(|p| (0.0..=1.0).contains(p)));
            prop_assert_eq!(base[0], 0.0);

            let mut worse = pi.clone();
            worse[target] = (worse[target] + bump).min(1.0);
            let after = attach_probabilities(&view(0, worse, 0.0));
            // the uniform fallback can only kick in when every peer is at 1
            let fallback = (1..n).all(|j| j == target || pi[j] >= 1.0);
            if !fallback {
                prop_assert!(after[target] <= base[target] + 1e-12);
            }
        }

        #[test]
        fn rewire_conserves_shares(n in 3usize..20, k in 1u32..=5, seed: u64) {
            prop_assume!((k as usize) < n);
            let mut rng = SimRng::seed_from_u64(seed);
            let mut g = AttentionGraph::init_random(n, k, &mut rng).unwrap();
            for _ in 0..5 {
                let pi: Vec<f64> = (0..n).map(|_| rng.random()).collect();
                let views: Vec<_> = (0..n)
                    .map(|i| feedback_view(&pi, rng.random(), i, 0.3, &mut rng).unwrap())
                    .collect();
                g = rewire_step(&g, &views, &mut rng).unwrap();
                for i in 0..n {
                    prop_assert_eq!(g.row(i).iter().sum::<u32>(), k);
                    prop_assert_eq!(g.shares(i, i), 0);
                }
            }
        }
    }
}
