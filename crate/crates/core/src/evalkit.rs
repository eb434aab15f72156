//! Control-quality metrics and the comparison harness that scores parameter
//! sets over held-out scenario suites.

use crate::controller::ParameterSet;
use crate::plant::PlantParams;
use crate::scenario::Scenario;
use crate::tsenv::{eval_scenario, EnvConfig};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("trajectory too short: need at least 2 samples, got {0}")]
    TooShort(usize),
    #[error("trajectory series have mismatched lengths")]
    LengthMismatch,
}

/// The four control-quality scores of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    /// Mean absolute control error (K).
    pub mae: f64,
    /// Root-mean-square control error (K).
    pub rmse: f64,
    /// Mean square of the valve command rate ((1/s)^2).
    pub ms_udot: f64,
    /// Mean total variation of the controlled temperature (K per sample).
    pub mtv_y: f64,
}

/// Metrics over a trajectory sampled at `dt`:
/// MAE = mean|e|, RMSE = sqrt(mean e^2),
/// MS_udot = (1/N) * sum ((u[n+1]-u[n])/dt)^2,
/// MTV_y = (1/(N-1)) * sum |T_D[n+1]-T_D[n]|.
pub fn metrics(e_t: &[f64], u_vlv: &[f64], t_d: &[f64], dt: f64) -> Result<Metrics, MetricsError> {
    let n = e_t.len();
    if n < 2 {
        return Err(MetricsError::TooShort(n));
    }
    if u_vlv.len() != n || t_d.len() != n {
        return Err(MetricsError::LengthMismatch);
    }
    let mae = e_t.iter().map(|e| e.abs()).sum::<f64>() / n as f64;
    let rmse = (e_t.iter().map(|e| e * e).sum::<f64>() / n as f64).sqrt();
    let ms_udot = u_vlv
        .windows(2)
        .map(|w| {
            let rate = (w[1] - w[0]) / dt;
            rate * rate
        })
        .sum::<f64>()
        / n as f64;
    let mtv_y = t_d.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (n as f64 - 1.0);
    Ok(Metrics {
        mae,
        rmse,
        ms_udot,
        mtv_y,
    })
}

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub scenario_id: usize,
    pub label: String,
    pub metrics: Metrics,
    /// Simulation blew up; metrics cover the partial trajectory.
    pub failed: bool,
    /// Lowest score among all sets on this scenario, per metric
    /// `[mae, rmse, ms_udot, mtv_y]`.
    pub best: [bool; 4],
}

/// Score every labeled parameter set on every scenario of the suite.
/// Deterministic given (sets, suite, theta, config); evaluations run in
/// parallel per (set, scenario) pair.
pub fn compare(
    sets: &[(String, ParameterSet)],
    suite: &[Scenario],
    theta: &PlantParams,
    cfg: &EnvConfig,
) -> Vec<MetricReport> {
    assert!(!sets.is_empty() && !suite.is_empty());
    let pairs: Vec<(usize, usize)> = (0..suite.len())
        .flat_map(|s| (0..sets.len()).map(move |p| (s, p)))
        .collect();
    let mut rows: Vec<MetricReport> = pairs
        .par_iter()
        .map(|&(s, p)| {
            let out = eval_scenario(&suite[s], theta, &sets[p].1, cfg);
            let t = &out.trajectory;
            let m = metrics(&t.e_t, &t.u_vlv, &t.t_d, t.dt).unwrap_or(Metrics {
                mae: f64::INFINITY,
                rmse: f64::INFINITY,
                ms_udot: f64::INFINITY,
                mtv_y: f64::INFINITY,
            });
            MetricReport {
                scenario_id: s,
                label: sets[p].0.clone(),
                metrics: m,
                failed: out.failed,
                best: [false; 4],
            }
        })
        .collect();

    // Mark the lowest score per scenario and metric when comparing 2+ sets.
    if sets.len() > 1 {
        for s in 0..suite.len() {
            let idx: Vec<usize> = (0..rows.len())
                .filter(|&k| rows[k].scenario_id == s)
                .collect();
            for metric in 0..4 {
                let value = |k: usize| match metric {
                    0 => rows[k].metrics.mae,
                    1 => rows[k].metrics.rmse,
                    2 => rows[k].metrics.ms_udot,
                    _ => rows[k].metrics.mtv_y,
                };
                if let Some(&kbest) = idx
                    .iter()
                    .min_by(|&&a, &&b| value(a).total_cmp(&value(b)))
                {
                    rows[kbest].best[metric] = true;
                }
            }
        }
    }
    rows
}
