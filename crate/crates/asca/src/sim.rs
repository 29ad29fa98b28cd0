//! Synchronous fixed-timestep simulation.
//!
//! Every step reads one immutable snapshot: all agents plan against the
//! same pre-step positions, then all positions commit at once (double
//! buffering), so the result cannot depend on evaluation order. Time is
//! kept as an integer step counter; obstacle positions are evaluated in
//! closed form from their script, never integrated.

use crate::error::{Error, Result};
use crate::planner::{avoidance_radius, NeighborView, PlanInput, Plannable, SimParams};
use crate::scenario::Scenario;
use crate::vec::Coord;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgentState<V> {
    pub id: u32,
    pub position: V,
    pub velocity: V,
    pub start: V,
    pub goal: V,
    /// Avoidance radius; equal to `avoidance_radius(params)` for every
    /// simulator-controlled agent.
    pub radius: f64,
}

/// Scripted obstacle motion. The simulator never writes obstacle state;
/// positions come from evaluating the script at the logged times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ObstacleMotion<V> {
    Static,
    Linear { velocity: V },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Obstacle<V> {
    pub initial_position: V,
    pub radius: f64,
    pub motion: ObstacleMotion<V>,
}

impl<V: Coord> Obstacle<V> {
    pub fn position_at(&self, time: f64) -> V {
        match self.motion {
            ObstacleMotion::Static => self.initial_position,
            ObstacleMotion::Linear { velocity } => self.initial_position + velocity * time,
        }
    }

    pub fn velocity_at(&self, _time: f64) -> V {
        match self.motion {
            ObstacleMotion::Static => V::zero(),
            ObstacleMotion::Linear { velocity } => velocity,
        }
    }
}

#[derive(Clone, Debug)]
pub struct WorldState<V> {
    step: u64,
    pub agents: Vec<AgentState<V>>,
    pub obstacles: Vec<Obstacle<V>>,
    pub params: SimParams,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BodyRecord<V> {
    pub position: V,
    pub velocity: V,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord<V> {
    pub time: f64,
    pub agents: Vec<BodyRecord<V>>,
    pub obstacles: Vec<BodyRecord<V>>,
}

/// Time-indexed record of every body; one entry per step plus the initial
/// state. All metrics read this undecimated stream.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryLog<V> {
    pub params: SimParams,
    pub agent_radius: f64,
    pub obstacle_radii: Vec<f64>,
    pub steps: Vec<StepRecord<V>>,
}

impl<V> TrajectoryLog<V> {
    pub fn agent_count(&self) -> usize {
        self.steps.first().map_or(0, |r| r.agents.len())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimOutcome {
    pub converged: bool,
    pub steps: u64,
    pub elapsed_sim_time: f64,
    /// Maximum distance to goal over all agents at the final step.
    pub d_max_final: f64,
}

impl<V: Plannable> WorldState<V> {
    /// Builds the initial world. Scenario validity is checked by [`run`],
    /// not here, so tests and bindings can construct edge-case worlds.
    pub fn new(scenario: &Scenario<V>, params: &SimParams) -> WorldState<V> {
        let radius = avoidance_radius(params);
        let agents = scenario
            .starts
            .iter()
            .zip(&scenario.goals)
            .enumerate()
            .map(|(i, (&start, &goal))| AgentState {
                id: i as u32,
                position: start,
                velocity: V::zero(),
                start,
                goal,
                radius,
            })
            .collect();
        WorldState {
            step: 0,
            agents,
            obstacles: scenario.obstacles.clone(),
            params: *params,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Simulated time, always an exact multiple of the step length.
    pub fn time(&self) -> f64 {
        self.step as f64 * self.params.dt
    }

    pub fn max_goal_distance(&self) -> f64 {
        self.agents
            .iter()
            .map(|a| a.position.dist(a.goal))
            .fold(0.0, f64::max)
    }

    pub fn record(&self) -> StepRecord<V> {
        let time = self.time();
        StepRecord {
            time,
            agents: self
                .agents
                .iter()
                .map(|a| BodyRecord {
                    position: a.position,
                    velocity: a.velocity,
                })
                .collect(),
            obstacles: self
                .obstacles
                .iter()
                .map(|o| BodyRecord {
                    position: o.position_at(time),
                    velocity: o.velocity_at(time),
                })
                .collect(),
        }
    }

    /// Advances one step: plan every agent from the pre-step snapshot,
    /// then commit `p ← p + Δt·v` for all of them.
    pub fn step(&self) -> Result<WorldState<V>> {
        let order: Vec<usize> = (0..self.agents.len()).collect();
        self.step_with_eval_order(&order)
    }

    /// Same as [`step`](Self::step) but planning agents in the given
    /// order. The post-step state is bit-identical for every permutation;
    /// exposed so that that property can be tested rather than assumed.
    pub fn step_with_eval_order(&self, order: &[usize]) -> Result<WorldState<V>> {
        let n = self.agents.len();
        let mut seen = vec![false; n];
        for &i in order {
            if i >= n || seen[i] {
                return Err(Error::InvalidParams(
                    "evaluation order is not a permutation of the agents".into(),
                ));
            }
            seen[i] = true;
        }
        if order.len() != n {
            return Err(Error::InvalidParams(
                "evaluation order is not a permutation of the agents".into(),
            ));
        }

        let time = self.time();
        let obstacle_views: Vec<NeighborView<V>> = self
            .obstacles
            .iter()
            .map(|o| NeighborView {
                position: o.position_at(time),
                radius: o.radius,
            })
            .collect();

        let mut velocities: Vec<V> = vec![V::zero(); n];
        for &i in order {
            let agent = &self.agents[i];
            let mut neighbors = Vec::with_capacity(n.saturating_sub(1) + obstacle_views.len());
            for (j, other) in self.agents.iter().enumerate() {
                if j != i {
                    neighbors.push(NeighborView {
                        position: other.position,
                        radius: other.radius,
                    });
                }
            }
            neighbors.extend_from_slice(&obstacle_views);
            let input = PlanInput {
                self_position: agent.position,
                goal: agent.goal,
                self_radius: agent.radius,
                neighbors,
                params: self.params,
            };
            velocities[i] = V::select_velocity(&input).map_err(|e| Error::Planning {
                agent: agent.id,
                source: Box::new(e),
            })?;
        }

        let dt = self.params.dt;
        let agents = self
            .agents
            .iter()
            .zip(&velocities)
            .map(|(a, &v)| AgentState {
                position: a.position + v * dt,
                velocity: v,
                ..*a
            })
            .collect();
        Ok(WorldState {
            step: self.step + 1,
            agents,
            obstacles: self.obstacles.clone(),
            params: self.params,
        })
    }
}

/// Activation diameter `2·avoidance_radius = d_min + 2·v_max·Δt`: two
/// agents closing head-on at full speed cover `2·v_max·Δt` in one step, so
/// constraining inside this distance keeps them at least `d_min` apart.
pub fn collision_free_radius_check(params: &SimParams) -> f64 {
    2.0 * avoidance_radius(params)
}

/// Runs a validated scenario to convergence (every agent within `d_final`
/// of its goal) or to `t_final`, logging every step.
pub fn run<V: Plannable>(
    scenario: &Scenario<V>,
    params: &SimParams,
) -> Result<(TrajectoryLog<V>, SimOutcome)> {
    params.validate()?;
    if params.dims != V::DIMS {
        return Err(Error::InvalidParams(format!(
            "params.dims = {} but scenario is {}-dimensional",
            params.dims,
            V::DIMS
        )));
    }
    crate::scenario::validate(scenario, params)?;

    let max_steps = (params.t_final / params.dt + 1e-9).floor() as u64;
    let mut world = WorldState::new(scenario, params);
    let mut log = TrajectoryLog {
        params: *params,
        agent_radius: avoidance_radius(params),
        obstacle_radii: scenario.obstacles.iter().map(|o| o.radius).collect(),
        steps: vec![world.record()],
    };
    let mut d_max = world.max_goal_distance();
    let mut converged = d_max < params.d_final;
    while !converged && world.step_count() < max_steps {
        world = world.step()?;
        log.steps.push(world.record());
        d_max = world.max_goal_distance();
        converged = d_max < params.d_final;
    }
    let steps = world.step_count();
    let outcome = SimOutcome {
        converged,
        steps,
        elapsed_sim_time: steps as f64 * params.dt,
        d_max_final: d_max,
    };
    Ok((log, outcome))
}
