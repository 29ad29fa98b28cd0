//! Benchmark scenario generators and validity checks.
//!
//! Every generator is a pure function of its arguments (plus an explicit
//! seed for the random family) and returns a scenario that already passed
//! [`validate`]: pairwise start distances at least the activation diameter
//! and pairwise goal distances strictly greater than `2·d_min`, the
//! precondition under which settled agents cannot wall off anyone else's
//! goal.

use crate::error::{Error, Result};
use crate::planner::{avoidance_radius, SimParams};
use crate::sim::Obstacle;
use crate::vec::{Coord, Vec2, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::f64::consts::{PI, TAU};

/// Name of the seeded generator that produced a scenario, recorded so
/// instances can be regenerated elsewhere.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Provenance {
    pub generator: String,
    pub seed: Option<u64>,
    pub rng: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario<V> {
    pub label: String,
    pub starts: Vec<V>,
    pub goals: Vec<V>,
    pub obstacles: Vec<Obstacle<V>>,
    pub provenance: Provenance,
}

impl<V> Scenario<V> {
    pub fn agent_count(&self) -> usize {
        self.starts.len()
    }
}

/// Checks the scenario invariants against `params`, naming the violated
/// constraint on failure.
pub fn validate<V: Coord>(scenario: &Scenario<V>, params: &SimParams) -> Result<()> {
    params.validate()?;
    let n = scenario.starts.len();
    if n == 0 {
        return Err(Error::InvalidScenario("scenario has no agents".into()));
    }
    if scenario.goals.len() != n {
        return Err(Error::InvalidScenario(format!(
            "start/goal count mismatch: {} starts vs {} goals",
            n,
            scenario.goals.len()
        )));
    }
    for (i, p) in scenario.starts.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::InvalidScenario(format!("start {i} is not finite")));
        }
    }
    for (i, p) in scenario.goals.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::InvalidScenario(format!("goal {i} is not finite")));
        }
    }
    let start_gap = 2.0 * avoidance_radius(params);
    let goal_gap = 2.0 * params.d_min;
    for i in 0..n {
        for j in (i + 1)..n {
            let ds = scenario.starts[i].dist(scenario.starts[j]);
            if ds < start_gap {
                return Err(Error::InvalidScenario(format!(
                    "start spacing: agents {i} and {j} are {ds:.6} m apart; \
                     at least {start_gap:.6} m (the activation diameter) is required"
                )));
            }
            let dg = scenario.goals[i].dist(scenario.goals[j]);
            if dg <= goal_gap {
                return Err(Error::InvalidScenario(format!(
                    "goal spacing: goals {i} and {j} are {dg:.6} m apart; \
                     more than {goal_gap:.6} m (twice d_min) is required for completeness"
                )));
            }
        }
    }
    for (i, o) in scenario.obstacles.iter().enumerate() {
        if !(o.radius.is_finite() && o.radius > 0.0) {
            return Err(Error::InvalidScenario(format!(
                "obstacle {i} has non-positive radius {}",
                o.radius
            )));
        }
        if !o.initial_position.is_finite() {
            return Err(Error::InvalidScenario(format!(
                "obstacle {i} position is not finite"
            )));
        }
    }
    Ok(())
}

fn square_side(n: usize) -> Result<usize> {
    let side = (n as f64).sqrt().round() as usize;
    if side * side != n || n == 0 {
        return Err(Error::InvalidScenario(format!(
            "n = {n} is not a positive perfect square"
        )));
    }
    Ok(side)
}

fn grid_points(side: usize, spacing: f64) -> Vec<Vec2> {
    let mut points = Vec::with_capacity(side * side);
    for row in 0..side {
        for col in 0..side {
            points.push(Vec2::new(col as f64 * spacing, row as f64 * spacing));
        }
    }
    points
}

/// A √n × √n grid of starts; each goal is the start reflected across the
/// grid's max-x side, so the whole formation crosses itself left to right.
pub fn mirror_swap(n: usize, spacing: f64, params: &SimParams) -> Result<Scenario<Vec2>> {
    let side = square_side(n)?;
    let starts = grid_points(side, spacing);
    let axis = (side - 1) as f64 * spacing;
    let goals = starts
        .iter()
        .map(|p| Vec2::new(2.0 * axis - p.x, p.y))
        .collect();
    let scenario = Scenario {
        label: "mirror swap".into(),
        starts,
        goals,
        obstacles: vec![],
        provenance: Provenance {
            generator: format!("mirror_swap(n={n}, spacing={spacing})"),
            ..Provenance::default()
        },
    };
    validate(&scenario, params)?;
    Ok(scenario)
}

/// Same grid; goals are reflections of the starts across the grid's
/// vertical center line, so the two halves of the formation swap in place
/// and every row meets itself head-on.
pub fn diagonal_swap(n: usize, spacing: f64, params: &SimParams) -> Result<Scenario<Vec2>> {
    let side = square_side(n)?;
    let starts = grid_points(side, spacing);
    let extent = (side - 1) as f64 * spacing;
    let goals = starts
        .iter()
        .map(|p| Vec2::new(extent - p.x, p.y))
        .collect();
    let scenario = Scenario {
        label: "diagonal swap".into(),
        starts,
        goals,
        obstacles: vec![],
        provenance: Provenance {
            generator: format!("diagonal_swap(n={n}, spacing={spacing})"),
            ..Provenance::default()
        },
    };
    validate(&scenario, params)?;
    Ok(scenario)
}

/// Smallest circle radius for `n` equispaced agents whose adjacent chord
/// satisfies both spacing invariants. The chord bound on goals is strict,
/// so callers should nudge this up by a hair (see [`circle_radius_default`]).
pub fn min_circle_radius(n: usize, params: &SimParams) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let half_chord = params.d_min.max(avoidance_radius(params));
    half_chord / (PI / n as f64).sin()
}

/// The minimal feasible circle radius with a relative nudge past the
/// strict goal-spacing bound.
pub fn circle_radius_default(n: usize, params: &SimParams) -> f64 {
    min_circle_radius(n, params) * (1.0 + 1e-6)
}

/// `n` agents equispaced on a circle around the origin; every goal is the
/// antipode of its start.
pub fn circle_swap(n: usize, radius: f64, params: &SimParams) -> Result<Scenario<Vec2>> {
    if n == 0 {
        return Err(Error::InvalidScenario("n must be positive".into()));
    }
    let min_radius = min_circle_radius(n, params);
    if n >= 2 && radius <= min_radius {
        return Err(Error::InvalidScenario(format!(
            "circle radius {radius} too small for {n} agents; \
             the adjacent chord violates the spacing invariants below \
             the minimum feasible radius {min_radius:.6}"
        )));
    }
    let starts: Vec<Vec2> = (0..n)
        .map(|k| {
            let theta = TAU * k as f64 / n as f64;
            Vec2::new(radius * theta.cos(), radius * theta.sin())
        })
        .collect();
    let goals = starts.iter().map(|&p| -p).collect();
    let scenario = Scenario {
        label: "circle swap".into(),
        starts,
        goals,
        obstacles: vec![],
        provenance: Provenance {
            generator: format!("circle_swap(n={n}, radius={radius})"),
            ..Provenance::default()
        },
    };
    validate(&scenario, params)?;
    Ok(scenario)
}

/// Largest agent count a ring of this radius can hold; one agent always
/// fits. Beyond the scenario invariants, adjacent goals must leave a
/// corridor wider than twice the activation diameter: a late agent headed
/// for its own goal has to pass between two already-settled neighbors,
/// and while both are active every heading that closes in on either is
/// forbidden, so a narrower gap turns into a permanent orbit around the
/// ring.
fn ring_capacity(radius: f64, params: &SimParams) -> usize {
    let strict = 2.0 * params.d_min;
    let closed = 2.0 * avoidance_radius(params);
    // Corridors exactly at the passable width leave a sliver-thin feasible
    // cone that takes forever to thread; 10% headroom keeps late arrivals
    // moving.
    let passable = 4.0 * avoidance_radius(params) * 1.1;
    let chord_ok = |m: usize| {
        let chord = 2.0 * radius * (PI / m as f64).sin();
        chord > strict && chord >= closed && chord > passable
    };
    let req = strict.max(closed).max(passable);
    let ratio = req / (2.0 * radius);
    if ratio >= 1.0 || !chord_ok(2) {
        return 1;
    }
    let mut m = (PI / ratio.asin()).floor() as usize + 2;
    while m > 2 && !chord_ok(m) {
        m -= 1;
    }
    m
}

/// Concentric rings spaced `ring_spacing` apart, innermost first, each
/// filled to its chord capacity before the next opens; the remainder is
/// spread evenly over the outermost ring. Goals are antipodes on the same
/// ring.
pub fn disk_swap(
    n: usize,
    inner_radius: f64,
    ring_spacing: f64,
    params: &SimParams,
) -> Result<Scenario<Vec2>> {
    if n == 0 {
        return Err(Error::InvalidScenario("n must be positive".into()));
    }
    if !(inner_radius.is_finite() && inner_radius > 0.0)
        || !(ring_spacing.is_finite() && ring_spacing > 0.0)
    {
        return Err(Error::InvalidScenario(
            "disk swap needs positive inner radius and ring spacing".into(),
        ));
    }
    let mut rings: Vec<(f64, usize)> = Vec::new();
    let mut remaining = n;
    let mut k = 0usize;
    while remaining > 0 {
        if k > n {
            // Cannot happen with capacity >= 1 per ring; guard anyway.
            return Err(Error::InvalidScenario("disk packing failed".into()));
        }
        let radius = inner_radius + k as f64 * ring_spacing;
        let take = ring_capacity(radius, params).min(remaining);
        rings.push((radius, take));
        remaining -= take;
        k += 1;
    }
    let mut starts = Vec::with_capacity(n);
    for &(radius, count) in &rings {
        for j in 0..count {
            let theta = TAU * j as f64 / count as f64;
            starts.push(Vec2::new(radius * theta.cos(), radius * theta.sin()));
        }
    }
    let goals = starts.iter().map(|&p| -p).collect();
    let scenario = Scenario {
        label: "disk swap".into(),
        starts,
        goals,
        obstacles: vec![],
        provenance: Provenance {
            generator: format!(
                "disk_swap(n={n}, inner_radius={inner_radius}, ring_spacing={ring_spacing})"
            ),
            ..Provenance::default()
        },
    };
    validate(&scenario, params)?;
    Ok(scenario)
}

fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden_angle = PI * (3.0 - 5.0f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2 * k + 1) as f64 / n as f64;
            let ring = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * k as f64;
            Vec3::new(ring * phi.cos(), ring * phi.sin(), z)
        })
        .collect()
}

fn min_pairwise<V: Coord>(points: &[V]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            best = best.min(points[i].dist(points[j]));
        }
    }
    best
}

/// Smallest sphere radius at which the `n`-point quasi-uniform lattice
/// satisfies the spacing invariants.
pub fn min_sphere_radius(n: usize, params: &SimParams) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let unit_gap = min_pairwise(&fibonacci_sphere(n));
    (2.0 * params.d_min).max(2.0 * avoidance_radius(params)) / unit_gap
}

/// `n` starts quasi-uniform on a sphere around the origin (Fibonacci
/// lattice, reproducible); each goal is the antipode of its start.
pub fn sphere_swap(n: usize, radius: f64, params: &SimParams) -> Result<Scenario<Vec3>> {
    if n == 0 {
        return Err(Error::InvalidScenario("n must be positive".into()));
    }
    let min_radius = min_sphere_radius(n, params);
    if n >= 2 && radius <= min_radius {
        return Err(Error::InvalidScenario(format!(
            "sphere radius {radius} too small for {n} agents; \
             minimum feasible radius is {min_radius:.6}"
        )));
    }
    let starts: Vec<Vec3> = fibonacci_sphere(n).iter().map(|&u| u * radius).collect();
    let goals = starts.iter().map(|&p| -p).collect();
    let scenario = Scenario {
        label: "sphere swap".into(),
        starts,
        goals,
        obstacles: vec![],
        provenance: Provenance {
            generator: format!("sphere_swap(n={n}, radius={radius})"),
            ..Provenance::default()
        },
    };
    validate(&scenario, params)?;
    Ok(scenario)
}

/// Uniform rejection-sampled starts and goals in an axis-aligned box,
/// fully determined by the seed.
pub fn random_scenario(
    n: usize,
    bounds: (Vec2, Vec2),
    seed: u64,
    params: &SimParams,
) -> Result<Scenario<Vec2>> {
    if n == 0 {
        return Err(Error::InvalidScenario("n must be positive".into()));
    }
    let (lo, hi) = bounds;
    if !(lo.is_finite() && hi.is_finite() && hi.x > lo.x && hi.y > lo.y) {
        return Err(Error::InvalidScenario(format!(
            "sampling box [{},{}]x[{},{}] is degenerate",
            lo.x, hi.x, lo.y, hi.y
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let budget = n as u64 * 10_000;
    let mut attempts = 0u64;
    let mut sample_set = |min_gap: f64, rng: &mut ChaCha20Rng| -> Result<Vec<Vec2>> {
        let mut points: Vec<Vec2> = Vec::with_capacity(n);
        while points.len() < n {
            attempts += 1;
            if attempts > budget {
                return Err(Error::SamplingExhausted { attempts });
            }
            let c = Vec2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
            if points.iter().all(|p| p.dist(c) > min_gap) {
                points.push(c);
            }
        }
        Ok(points)
    };
    let starts = sample_set(2.0 * avoidance_radius(params), &mut rng)?;
    // Goals need more room than the bare completeness bound: an agent
    // arriving after its neighbors have settled must still find a corridor
    // wider than twice the activation diameter between any two of them.
    let goal_gap = (2.0 * params.d_min).max(4.0 * avoidance_radius(params) * 1.1);
    let goals = sample_set(goal_gap, &mut rng)?;
    let scenario = Scenario {
        label: format!("random {seed}"),
        starts,
        goals,
        obstacles: vec![],
        provenance: Provenance {
            generator: format!(
                "random(n={n}, box=[{},{}]x[{},{}], seed={seed})",
                lo.x, hi.x, lo.y, hi.y
            ),
            seed: Some(seed),
            rng: Some("chacha20".into()),
        },
    };
    validate(&scenario, params)?;
    Ok(scenario)
}
