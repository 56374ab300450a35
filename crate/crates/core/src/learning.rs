//! Belief formation from private signals.

use crate::error::{Error, Result};
use crate::network::InfluenceMatrix;

/// `stages` successive neighbour-averaging passes with the same matrix.
pub fn degroot(matrix: &InfluenceMatrix, signals: &[f64], stages: u32) -> Result<Vec<f64>> {
    if signals.len() != matrix.n() {
        return Err(Error::Invariant(format!(
            "{} signals for a group of {}",
            signals.len(),
            matrix.n()
        )));
    }
    let n = signals.len();
    let mut beliefs = signals.to_vec();
    for _ in 0..stages {
        // Offset form of sum_j M_ij v_j (rows sum to 1), so a consensus
        // stays exactly put.
        beliefs = (0..n)
            .map(|i| {
                let own = beliefs[i];
                let row = matrix.row(i);
                own + (0..n).filter(|&j| j != i).map(|j| row[j] * (beliefs[j] - own)).sum::<f64>()
            })
            .collect();
    }
    // Rounding can leave a convex combination a few ulps outside [0, 1].
    for b in &mut beliefs {
        *b = b.clamp(0.0, 1.0);
    }
    Ok(beliefs)
}

/// Post-learning beliefs `M (M s)`.
pub fn degroot_two_stage(matrix: &InfluenceMatrix, signals: &[f64]) -> Result<Vec<f64>> {
    degroot(matrix, signals, 2)
}

/// Isolated agents keep their private signal.
pub fn solo_beliefs(signals: &[f64]) -> Vec<f64> {
    signals.to_vec()
}
