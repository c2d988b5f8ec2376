//! Regret-regime statistics over logged records.
//!
//! Everything here is a function of the CSV rows alone (plus ground-truth
//! labels), so `stats` on a saved file reproduces what `run` reported.

use serde::{Deserialize, Serialize};

use super::StepRecord;
use crate::env::{analyze_all, BanditInstance};

/// Length of the trailing window for the trigger rate; every step in it is
/// logged.
pub const TAIL_WINDOW: u64 = 1000;

/// Ground-truth labels needed by the phase statistics.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// `|Φ*|`, the number of realizable candidates.
    pub n_realizable: Option<usize>,
    /// Id of the representation the learner should lock onto.
    pub target_rep: Option<String>,
}

impl GroundTruth {
    /// Realizable count plus the realizable HLS rep (or, failing that, the
    /// realizable weak-HLS rep) as lock target.
    pub fn from_instance(instance: &BanditInstance) -> Self {
        let reports = analyze_all(instance);
        let pick = |weak: bool| {
            reports
                .iter()
                .enumerate()
                .find(|(k, r)| instance.is_realizable(*k) && if weak { r.is_weak_hls } else { r.is_hls })
                .map(|(_, r)| r.rep_id.clone())
        };
        Self {
            n_realizable: Some(instance.star_ids().len()),
            target_rep: pick(false).or_else(|| pick(true)),
        }
    }
}

/// Per-run summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub run_id: u32,
    pub final_regret: f64,
    /// `R(T) - R(0.8 T)`.
    pub tail_growth: f64,
    pub loglog_slope: f64,
    /// First phase start with `|Φ_t| = |Φ*|` (`None` = never).
    pub elimination_time: Option<u64>,
    /// Start of the final stretch during which the target rep stays active.
    pub hls_lock_time: Option<u64>,
    pub glrt_tail_rate: f64,
    pub subopt_pulls: u64,
}

/// Aggregate over runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeStats {
    pub n_runs: usize,
    pub horizon: u64,
    pub final_regret_mean: f64,
    pub final_regret_std: f64,
    pub tail_growth_mean: f64,
    /// Slope of the run-averaged curve on the grid `t ≥ T/10`.
    pub loglog_slope: f64,
    pub glrt_tail_rate_mean: f64,
    pub runs: Vec<RunStats>,
}

/// OLS slope of `ln y` on `ln t` over points with `y > 0`; `0` when fewer
/// than two usable points remain (e.g. identically zero regret).
pub fn loglog_slope(points: &[(u64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(t, y)| *t > 0 && *y > 0.0)
        .map(|(t, y)| ((*t as f64).ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

fn value_at(rows: &[&StepRecord], t: u64) -> f64 {
    rows.iter()
        .take_while(|r| r.t <= t)
        .last()
        .map_or(0.0, |r| r.cum_regret)
}

fn slope_grid(rows: &[&StepRecord], horizon: u64, log_every: u64) -> Vec<(u64, f64)> {
    let start = horizon.div_ceil(10);
    rows.iter()
        .filter(|r| r.t >= start && r.t % log_every == 0)
        .map(|r| (r.t, r.cum_regret))
        .collect()
}

fn run_stats(run_id: u32, rows: &[&StepRecord], horizon: u64, log_every: u64, truth: &GroundTruth) -> RunStats {
    let last = rows.last().expect("nonempty run");
    let final_regret = last.cum_regret;
    let tail_growth = final_regret - value_at(rows, (4 * horizon / 5).max(1));

    let tail: Vec<&&StepRecord> = rows.iter().filter(|r| r.t + TAIL_WINDOW > horizon).collect();
    let glrt_tail_rate = if tail.is_empty() {
        0.0
    } else {
        tail.iter().filter(|r| r.glrt_triggered).count() as f64 / tail.len() as f64
    };

    // Phase starts: t = 1 for phase 0, then the first row of each new phase.
    let mut starts: Vec<(u64, &StepRecord)> = Vec::new();
    let mut prev_phase = None;
    for r in rows {
        if prev_phase != Some(r.phase) {
            starts.push((if prev_phase.is_none() && r.phase == 0 { 1 } else { r.t }, r));
            prev_phase = Some(r.phase);
        }
    }
    let elimination_time = truth.n_realizable.and_then(|n| {
        starts
            .iter()
            .find(|(_, r)| r.n_active_reps == n)
            .map(|(t, _)| *t)
    });
    let hls_lock_time = truth.target_rep.as_ref().and_then(|target| {
        let mut lock = None;
        for (t, r) in &starts {
            if &r.rep_id == target {
                lock.get_or_insert(*t);
            } else {
                lock = None;
            }
        }
        // Reps only change at phase starts, but guard against foreign rows.
        if rows.iter().any(|r| Some(r.t) >= lock && &r.rep_id != target) {
            return None;
        }
        lock
    });

    RunStats {
        run_id,
        final_regret,
        tail_growth,
        loglog_slope: loglog_slope(&slope_grid(rows, horizon, log_every)),
        elimination_time,
        hls_lock_time,
        glrt_tail_rate,
        subopt_pulls: last.subopt_pulls,
    }
}

/// Computes [`RegimeStats`] from the rows of one configuration (any number
/// of runs, rows grouped by run in increasing `t`).
pub fn fit_regime(records: &[StepRecord], horizon: u64, log_every: u64, truth: &GroundTruth) -> RegimeStats {
    let mut ids: Vec<u32> = records.iter().map(|r| r.run_id).collect();
    ids.sort_unstable();
    ids.dedup();
    let per_run: Vec<Vec<&StepRecord>> = ids
        .iter()
        .map(|id| records.iter().filter(|r| r.run_id == *id).collect())
        .collect();
    let runs: Vec<RunStats> = ids
        .iter()
        .zip(&per_run)
        .map(|(id, rows)| run_stats(*id, rows, horizon, log_every, truth))
        .collect();

    let n = runs.len().max(1) as f64;
    let mean = |f: &dyn Fn(&RunStats) -> f64| runs.iter().map(f).sum::<f64>() / n;
    let final_regret_mean = mean(&|r| r.final_regret);
    let var = runs
        .iter()
        .map(|r| (r.final_regret - final_regret_mean).powi(2))
        .sum::<f64>()
        / (runs.len().saturating_sub(1).max(1)) as f64;

    // Average curve over the grid points shared by every run.
    let mut curve: Vec<(u64, f64)> = Vec::new();
    if let Some(first) = per_run.first() {
        for (t, _) in slope_grid(first, horizon, log_every) {
            let vals: Vec<f64> = per_run
                .iter()
                .filter_map(|rows| rows.iter().find(|r| r.t == t).map(|r| r.cum_regret))
                .collect();
            if vals.len() == per_run.len() {
                curve.push((t, vals.iter().sum::<f64>() / vals.len() as f64));
            }
        }
    }

    RegimeStats {
        n_runs: runs.len(),
        horizon,
        final_regret_mean,
        final_regret_std: var.sqrt(),
        tail_growth_mean: mean(&|r| r.tail_growth),
        loglog_slope: loglog_slope(&curve),
        glrt_tail_rate_mean: mean(&|r| r.glrt_tail_rate),
        runs,
    }
}
