#![allow(dead_code)]

use std::io::Write;

use statrs::distribution::{Binomial, ContinuousCDF, DiscreteCDF, StudentsT};
use woc_core::stats::{mean, percentile};

/// One verdict line per criterion, written past the test harness's output
/// capture so it shows up in a plain `cargo test` run.
pub fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("[acceptance {id:>2}] {verdict} {name}: {detail}\n");
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
}

/// Two-sided exact sign test for `wins` successes out of `trials`.
pub fn sign_test_p(wins: u64, trials: u64) -> f64 {
    let b = Binomial::new(0.5, trials).unwrap();
    let lower = b.cdf(wins);
    let upper = if wins == 0 { 1.0 } else { 1.0 - b.cdf(wins - 1) };
    (2.0 * lower.min(upper)).min(1.0)
}

fn sample_sd(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

fn two_sided_t(t: f64, df: f64) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, df).unwrap();
    2.0 * (1.0 - dist.cdf(t.abs()))
}

/// Paired t statistic and two-sided p for `a - b`.
pub fn paired_t(a: &[f64], b: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let t = mean(&d) / (sample_sd(&d) / (d.len() as f64).sqrt());
    (t, two_sided_t(t, (d.len() - 1) as f64))
}

/// Ranks starting at 1, ties sharing their average rank.
fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Spearman rho and its two-sided p from the t approximation.
pub fn spearman(x: &[f64], y: &[f64]) -> (f64, f64) {
    let rho = pearson(&ranks(x), &ranks(y));
    let df = (x.len() - 2) as f64;
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    (rho, two_sided_t(t, df))
}

/// Central `level` percentile interval of `xs`.
pub fn percentile_interval(xs: &[f64], level: f64) -> (f64, f64) {
    let tail = (1.0 - level) / 2.0;
    (percentile(xs, tail), percentile(xs, 1.0 - tail))
}

/// Percentile bootstrap interval of the mean, resampling whole entries.
pub fn bootstrap_mean_interval(xs: &[f64], resamples: usize, level: f64, seed: u64) -> (f64, f64) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let means: Vec<f64> = (0..resamples)
        .map(|_| {
            let draw: Vec<f64> = (0..xs.len()).map(|_| xs[rng.random_range(0..xs.len())]).collect();
            mean(&draw)
        })
        .collect();
    percentile_interval(&means, level)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_test_reference_values() {
        // P(X <= 2 | 10, 1/2) = 56/1024
        assert!((sign_test_p(2, 10) - 112.0 / 1024.0).abs() < 1e-12);
        assert_eq!(sign_test_p(5, 10), 1.0);
    }

    #[test]
    fn spearman_of_monotone_data_is_one() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [0.1, 0.4, 0.5, 2.0, 9.0];
        assert!((spearman(&x, &y).0 - 1.0).abs() < 1e-12);
        assert_eq!(ranks(&[3.0, 1.0, 3.0]), vec![2.5, 1.0, 2.5]);
    }
}
