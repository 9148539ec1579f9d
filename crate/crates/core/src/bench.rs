//! Benchmark sweeps over generated suites.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pcm::{baseline_combined, run_pass, PassConfig};
use crate::randgen::{generate_suite, GenConfig, GenError};
use crate::sim::derive_seed;
use crate::Circuit;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("circuit count must be positive")]
    EmptySuite,
    #[error("scale must be positive")]
    ZeroScale,
    #[error("n_pcm values must be positive")]
    ZeroBudget,
    #[error(transparent)]
    Gen(#[from] GenError),
}

/// One circuit (`circuit = Some(i)`) or the sum over a suite (`None`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub scale: usize,
    pub n_pcm: usize,
    pub circuit: Option<usize>,
    pub original_dynamic: usize,
    pub removed_meas: usize,
    pub removed_resets: usize,
    pub removal_pct: f64,
    /// Sample standard deviation of per-circuit `removal_pct`; aggregates only.
    pub removal_pct_sd: Option<f64>,
    pub introduced_gates: i64,
    pub synth_time_s: f64,
    pub baseline_removed: usize,
}

impl BenchRow {
    pub fn removed(&self) -> usize {
        self.removed_meas + self.removed_resets
    }
}

pub fn percent(removed: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * removed as f64 / total as f64
    }
}

pub fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    var.sqrt()
}

/// Runs the pass for every `n_pcm` over one suite per scale. Rows come out
/// grouped by (scale, n_pcm): per-circuit rows in suite order, then the
/// aggregate.
pub fn run_bench(
    scales: &[usize],
    n_pcm: &[usize],
    count: usize,
    seed: u64,
    base: &PassConfig,
) -> Result<Vec<BenchRow>, BenchError> {
    if count == 0 {
        return Err(BenchError::EmptySuite);
    }
    if scales.contains(&0) {
        return Err(BenchError::ZeroScale);
    }
    if n_pcm.contains(&0) {
        return Err(BenchError::ZeroBudget);
    }
    let mut rows = Vec::new();
    for &scale in scales {
        let suite = generate_suite(&GenConfig::scale(scale, derive_seed(seed, scale as u64)), count)?;
        rows.extend(sweep_suite(&suite, scale, n_pcm, base));
    }
    Ok(rows)
}

/// Per-circuit and aggregate rows for an existing suite.
pub fn sweep_suite(suite: &[Circuit], scale: usize, n_pcm: &[usize], base: &PassConfig) -> Vec<BenchRow> {
    let baseline: Vec<usize> = suite.par_iter().map(|c| baseline_combined(c).1).collect();
    let mut rows = Vec::new();
    for &n in n_pcm {
        let cfg = PassConfig { n_pcm: n, ..*base };
        let per: Vec<BenchRow> = suite
            .par_iter()
            .enumerate()
            .map(|(i, c)| {
                let (_, report) = run_pass(c, &cfg);
                let original = c.count_ops().dynamic();
                BenchRow {
                    scale,
                    n_pcm: n,
                    circuit: Some(i),
                    original_dynamic: original,
                    removed_meas: report.removed_measurements,
                    removed_resets: report.removed_resets,
                    removal_pct: percent(report.removed(), original),
                    removal_pct_sd: None,
                    introduced_gates: report.introduced_static_gates,
                    synth_time_s: report.synthesis_time,
                    baseline_removed: baseline[i],
                }
            })
            .collect();
        let original: usize = per.iter().map(|r| r.original_dynamic).sum();
        let removed: usize = per.iter().map(|r| r.removed()).sum();
        let pcts: Vec<f64> = per.iter().map(|r| r.removal_pct).collect();
        let aggregate = BenchRow {
            scale,
            n_pcm: n,
            circuit: None,
            original_dynamic: original,
            removed_meas: per.iter().map(|r| r.removed_meas).sum(),
            removed_resets: per.iter().map(|r| r.removed_resets).sum(),
            removal_pct: percent(removed, original),
            removal_pct_sd: Some(sample_sd(&pcts)),
            introduced_gates: per.iter().map(|r| r.introduced_gates).sum(),
            synth_time_s: per.iter().map(|r| r.synth_time_s).sum(),
            baseline_removed: baseline.iter().sum(),
        };
        rows.extend(per);
        rows.push(aggregate);
    }
    rows
}
