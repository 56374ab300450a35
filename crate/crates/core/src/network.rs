//! Directed attention-share graph, its row-stochastic influence matrix and
//! in-degree centralization.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Who pays attention to whom.
///
/// `shares[i * n + j]` is the number of attention shares agent `i` places on
/// agent `j`. Every row off the diagonal sums to `kappa`; the diagonal is
/// always zero and the agent's own weight is `self_weight`, which rewiring
/// never touches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttentionGraph {
    n: usize,
    kappa: u32,
    self_weight: u32,
    shares: Vec<u32>,
}

impl AttentionGraph {
    pub fn from_shares(n: usize, kappa: u32, self_weight: u32, shares: Vec<u32>) -> Result<Self> {
        if shares.len() != n * n {
            return Err(Error::Argument(format!("share table has {} entries, expected {}", shares.len(), n * n)));
        }
        let graph = AttentionGraph { n, kappa, self_weight, shares };
        graph.check_invariants()?;
        Ok(graph)
    }

    /// Each agent puts one share on each of `kappa` distinct, uniformly
    /// chosen peers. Agents draw in index order.
    pub fn init_random<R: Rng + ?Sized>(n: usize, kappa: u32, rng: &mut R) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("need at least 2 agents, got {n}")));
        }
        if kappa < 1 || kappa as usize > n - 1 {
            return Err(Error::Config(format!("kappa must be in 1..={}, got {kappa}", n - 1)));
        }
        let mut shares = vec![0; n * n];
        for i in 0..n {
            for pick in index::sample(rng, n - 1, kappa as usize) {
                let j = if pick >= i { pick + 1 } else { pick };
                shares[i * n + j] = 1;
            }
        }
        Ok(AttentionGraph { n, kappa, self_weight: 1, shares })
    }

    pub fn with_self_weight(mut self, self_weight: u32) -> Self {
        self.self_weight = self_weight;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn self_weight(&self) -> u32 {
        self.self_weight
    }

    pub fn shares(&self, i: usize, j: usize) -> u32 {
        self.shares[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.shares[i * self.n..(i + 1) * self.n]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [u32] {
        &mut self.shares[i * self.n..(i + 1) * self.n]
    }

    /// Outgoing edges of `i` as `(dst, shares)` with `shares > 0`.
    pub fn out_edges(&self, i: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.row(i).iter().enumerate().filter(|(_, &s)| s > 0).map(|(j, &s)| (j, s))
    }

    pub fn check_invariants(&self) -> Result<()> {
        for i in 0..self.n {
            let row = self.row(i);
            if row[i] != 0 {
                return Err(Error::Invariant(format!("agent {i} holds {} shares on itself", row[i])));
            }
            let total: u32 = row.iter().sum();
            if total != self.kappa {
                return Err(Error::Invariant(format!(
                    "agent {i} holds {total} shares, expected {}; row {:?}",
                    self.kappa, row
                )));
            }
        }
        Ok(())
    }

    /// Row-normalize shares plus the self weight.
    pub fn build_matrix(&self) -> Result<InfluenceMatrix> {
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            let row = self.row(i);
            let total = f64::from(self.self_weight) + row.iter().map(|&s| f64::from(s)).sum::<f64>();
            if total <= 0.0 {
                return Err(Error::Invariant(format!("agent {i} has zero total attention weight")));
            }
            for j in 0..n {
                let w = if i == j { self.self_weight } else { row[j] };
                entries[i * n + j] = f64::from(w) / total;
            }
        }
        Ok(InfluenceMatrix { n, entries })
    }

    /// Shares received by each agent (column sums, diagonal excluded).
    pub fn in_degree(&self) -> Vec<u32> {
        let mut deg = vec![0; self.n];
        for i in 0..self.n {
            for (j, s) in self.out_edges(i) {
                deg[j] += s;
            }
        }
        deg
    }

    /// Number of distinct followers of each agent.
    pub fn follower_counts(&self) -> Vec<u32> {
        let mut deg = vec![0; self.n];
        for i in 0..self.n {
            for (j, _) in self.out_edges(i) {
                deg[j] += 1;
            }
        }
        deg
    }

    pub fn freeman_centralization(&self, mode: CentralizationMode) -> Result<f64> {
        match mode {
            CentralizationMode::Binary => freeman_centralization(&self.follower_counts()),
            CentralizationMode::Shares => freeman_centralization(&self.in_degree()),
        }
    }

    /// `dst:shares` pairs joined by `;`.
    pub fn format_out_edges(&self, i: usize) -> String {
        let parts: Vec<String> = self.out_edges(i).map(|(j, s)| format!("{j}:{s}")).collect();
        parts.join(";")
    }

    /// Append this graph's edges as `round,src,dst,shares` rows.
    pub fn write_edge_rows<W: Write>(&self, round: usize, out: &mut W) -> io::Result<()> {
        for i in 0..self.n {
            for (j, s) in self.out_edges(i) {
                writeln!(out, "{round},{i},{j},{s}")?;
            }
        }
        Ok(())
    }
}

pub const EDGE_LIST_HEADER: &str = "round,src,dst,shares";

/// Dense row-stochastic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl InfluenceMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Argument("influence matrix must be square".into()));
        }
        Ok(InfluenceMatrix { n, entries: rows.concat() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n {
            return Err(Error::Invariant(format!(
                "matrix of order {} applied to vector of length {}",
                self.n,
                v.len()
            )));
        }
        Ok((0..self.n).map(|i| self.row(i).iter().zip(v).map(|(m, x)| m * x).sum()).collect())
    }

    pub fn mul(&self, other: &InfluenceMatrix) -> Result<InfluenceMatrix> {
        if other.n != self.n {
            return Err(Error::Invariant("matrix order mismatch".into()));
        }
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Ok(InfluenceMatrix { n, entries })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CentralizationMode {
    /// Count followers, ignoring how many shares each one places.
    Binary,
    /// Count shares.
    Shares,
}

impl FromStr for CentralizationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(CentralizationMode::Binary),
            "shares" => Ok(CentralizationMode::Shares),
            other => Err(Error::Config(format!(
                "unknown centralization mode {other:?} (expected binary or shares)"
            ))),
        }
    }
}

impl fmt::Display for CentralizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CentralizationMode::Binary => "binary",
            CentralizationMode::Shares => "shares",
        })
    }
}

/// Freeman in-degree centralization:
/// `sum_i (C_max - C_i) / ((n - 1)(n - 2))`.
///
/// With share-weighted degrees this is not bounded by 1.
pub fn freeman_centralization(in_degrees: &[u32]) -> Result<f64> {
    let n = in_degrees.len();
    if n < 3 {
        return Err(Error::UndefinedMetric(format!("centralization needs n >= 3, got {n}")));
    }
    let max = *in_degrees.iter().max().expect("n >= 3");
    let spread: u64 = in_degrees.iter().map(|&c| u64::from(max - c)).sum();
    Ok(spread as f64 / ((n - 1) * (n - 2)) as f64)
}
