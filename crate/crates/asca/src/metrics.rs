//! Evaluation metrics over trajectory logs, plus the hard separation
//! audit.
//!
//! `minimum_separation` and `collision_audit` are computed by independent
//! passes so each can cross-check the other: the minimum dipping under
//! `d_min` and the audit reporting an agent pair must coincide.

use crate::error::{Error, Result};
use crate::planner::SimParams;
use crate::sim::{SimOutcome, TrajectoryLog};
use crate::vec::Coord;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunMetrics {
    /// Simulated seconds until the last agent reached its goal
    /// (`steps × Δt`); equals `t_final` for non-converged runs.
    pub travel_time: f64,
    pub avg_trajectory_length: f64,
    /// `None` when the run has fewer than two agents.
    pub min_separation: Option<f64>,
    pub converged: bool,
}

pub fn travel_time(outcome: &SimOutcome, params: &SimParams) -> f64 {
    outcome.steps as f64 * params.dt
}

/// Mean over agents of the polyline length of the logged positions.
pub fn average_trajectory_length<V: Coord>(log: &TrajectoryLog<V>) -> f64 {
    let n = log.agent_count();
    if n == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    for window in log.steps.windows(2) {
        for (prev, next) in window[0].agents.iter().zip(&window[1].agents) {
            total += prev.position.dist(next.position);
        }
    }
    total / n as f64
}

/// Smallest center distance between any two agents over the whole log.
pub fn minimum_separation<V: Coord>(log: &TrajectoryLog<V>) -> Result<f64> {
    let n = log.agent_count();
    if n < 2 {
        return Err(Error::UndefinedMetric(
            "minimum separation needs at least two agents".into(),
        ));
    }
    let mut best = f64::INFINITY;
    for record in &log.steps {
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.min(record.agents[i].position.dist(record.agents[j].position));
            }
        }
    }
    Ok(best)
}

/// Spread of travel times as a percentage of the largest:
/// `(max − min) / max × 100`.
pub fn aspect_ratio(travel_times: &[f64]) -> Result<f64> {
    let max = travel_times.iter().copied().fold(f64::NAN, f64::max);
    if travel_times.is_empty() || max.is_nan() || max <= 0.0 {
        return Err(Error::UndefinedMetric(
            "aspect ratio needs a non-empty list with a positive maximum".into(),
        ));
    }
    let min = travel_times.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((max - min) / max * 100.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BodyRef {
    Agent(usize),
    Obstacle(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeparationViolation {
    pub step: usize,
    pub time: f64,
    pub first: BodyRef,
    pub second: BodyRef,
    pub distance: f64,
    pub threshold: f64,
}

/// Every sub-threshold approach in a log; empty means the run was safe.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CollisionReport {
    pub violations: Vec<SeparationViolation>,
}

impl CollisionReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }
}

/// Lists every (step, pair) whose center distance fell under the pair's
/// threshold: `d_min` for agent pairs, avoidance radius plus obstacle
/// radius for agent-obstacle pairs. Descriptive, never preventive: a
/// scripted obstacle ramming the swarm still produces a full report.
pub fn collision_audit<V: Coord>(log: &TrajectoryLog<V>, params: &SimParams) -> CollisionReport {
    let mut violations = Vec::new();
    let n = log.agent_count();
    for (step, record) in log.steps.iter().enumerate() {
        for i in 0..n {
            for j in (i + 1)..n {
                let distance = record.agents[i].position.dist(record.agents[j].position);
                if distance < params.d_min {
                    violations.push(SeparationViolation {
                        step,
                        time: record.time,
                        first: BodyRef::Agent(i),
                        second: BodyRef::Agent(j),
                        distance,
                        threshold: params.d_min,
                    });
                }
            }
            for (oi, obstacle) in record.obstacles.iter().enumerate() {
                let threshold =
                    log.agent_radius + log.obstacle_radii.get(oi).copied().unwrap_or(0.0);
                let distance = record.agents[i].position.dist(obstacle.position);
                if distance < threshold {
                    violations.push(SeparationViolation {
                        step,
                        time: record.time,
                        first: BodyRef::Agent(i),
                        second: BodyRef::Obstacle(oi),
                        distance,
                        threshold,
                    });
                }
            }
        }
    }
    CollisionReport { violations }
}

pub fn compute_run_metrics<V: Coord>(
    log: &TrajectoryLog<V>,
    outcome: &SimOutcome,
    params: &SimParams,
) -> RunMetrics {
    RunMetrics {
        travel_time: travel_time(outcome, params),
        avg_trajectory_length: average_trajectory_length(log),
        min_separation: minimum_separation(log).ok(),
        converged: outcome.converged,
    }
}

/// Box-plot statistics: five-number summary plus whiskers at the furthest
/// data points within 1.5 interquartile ranges of the quartiles; anything
/// beyond is an outlier.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Distribution {
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let idx = p * (sorted.len() - 1) as f64;
    let lo = idx.floor() as usize;
    let hi = idx.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = idx - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}

pub fn five_number_summary(samples: &[f64]) -> Result<Distribution> {
    if samples.is_empty() {
        return Err(Error::UndefinedMetric("summary of an empty sample".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("samples must not be NaN"));
    let q1 = quantile(&sorted, 0.25);
    let median = quantile(&sorted, 0.5);
    let q3 = quantile(&sorted, 0.75);
    let iqr = q3 - q1;
    let fence_low = q1 - 1.5 * iqr;
    let fence_high = q3 + 1.5 * iqr;
    let whisker_low = sorted
        .iter()
        .copied()
        .find(|&x| x >= fence_low)
        .unwrap_or(sorted[0]);
    let whisker_high = sorted
        .iter()
        .rev()
        .copied()
        .find(|&x| x <= fence_high)
        .unwrap_or(*sorted.last().unwrap());
    let outliers = sorted
        .iter()
        .copied()
        .filter(|&x| x < fence_low || x > fence_high)
        .collect();
    Ok(Distribution {
        count: sorted.len(),
        min: sorted[0],
        q1,
        median,
        q3,
        max: *sorted.last().unwrap(),
        whisker_low,
        whisker_high,
        outliers,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through the points; `None` with fewer than two
/// points or a degenerate x spread.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<LinearFit> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    Some(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}
