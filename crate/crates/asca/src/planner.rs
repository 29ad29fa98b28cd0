//! Per-agent velocity selection.
//!
//! Each step an agent folds one half-circle heading constraint per nearby
//! body into a feasible range, then moves toward its goal if that heading
//! is permitted, else along the range's lower limit, else not at all. In
//! 3D the same 2D decision runs on the XY, XZ, and YZ projections and the
//! planar components are summed back into one velocity.

use crate::angle::{bearing, half_circle_constraint, FeasibleRange};
use crate::error::{Error, Result};
use crate::vec::{Coord, Vec2, Vec3};
use serde::{Deserialize, Serialize};

/// Which center distance activates a neighbor's heading constraint.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ActivationMode {
    /// Constrain when closer than the sum of both avoidance radii
    /// (`2r` for homogeneous agents). This is the distance the
    /// non-collision guarantee is argued from, and the default.
    #[default]
    CombinedRadii,
    /// Constrain when closer than `d_min`. Compatibility mode for the
    /// tighter activation some formulations use; it does not carry the
    /// same per-step safety margin.
    MinSeparation,
}

/// Global simulation parameters shared by every agent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    /// Minimum required pairwise separation (meters).
    pub d_min: f64,
    /// Maximum agent speed (meters/second).
    pub v_max: f64,
    /// Step length (seconds).
    pub dt: f64,
    /// Maximum allowed simulated time (seconds).
    pub t_final: f64,
    /// Distance to goal below which an agent counts as arrived (meters).
    pub d_final: f64,
    /// Spatial dimensionality, 2 or 3.
    pub dims: usize,
    #[serde(default)]
    pub activation: ActivationMode,
}

impl Default for SimParams {
    fn default() -> SimParams {
        SimParams {
            d_min: 5.0,
            v_max: 15.0,
            dt: 0.02,
            t_final: 200.0,
            d_final: 0.05,
            dims: 2,
            activation: ActivationMode::CombinedRadii,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("d_min", self.d_min),
            ("v_max", self.v_max),
            ("dt", self.dt),
            ("t_final", self.t_final),
            ("d_final", self.d_final),
        ];
        for (name, value) in positives {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and strictly positive, got {value}"
                )));
            }
        }
        if self.d_final >= self.d_min {
            return Err(Error::InvalidParams(format!(
                "d_final ({}) must be smaller than d_min ({})",
                self.d_final, self.d_min
            )));
        }
        if self.dims != 2 && self.dims != 3 {
            return Err(Error::InvalidParams(format!(
                "dims must be 2 or 3, got {}",
                self.dims
            )));
        }
        Ok(())
    }

    pub fn with_dims(mut self, dims: usize) -> SimParams {
        self.dims = dims;
        self
    }
}

/// Planning radius `d_min/2 + v_max·Δt`: inflating the protected disk by
/// the worst-case single-step motion keeps true separation above `d_min`.
pub fn avoidance_radius(params: &SimParams) -> f64 {
    params.d_min / 2.0 + params.v_max * params.dt
}

/// What the planner needs to know about one nearby body.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeighborView<V> {
    pub position: V,
    pub radius: f64,
}

/// One agent's view of the world for a single decision.
#[derive(Clone, Debug)]
pub struct PlanInput<V> {
    pub self_position: V,
    pub goal: V,
    pub self_radius: f64,
    pub neighbors: Vec<NeighborView<V>>,
    pub params: SimParams,
}

fn activation_threshold(params: &SimParams, self_radius: f64, neighbor_radius: f64) -> f64 {
    match params.activation {
        ActivationMode::CombinedRadii => self_radius + neighbor_radius,
        ActivationMode::MinSeparation => params.d_min,
    }
}

/// Folds constraints from every activated neighbor, starting from the full
/// circle.
pub fn feasible_range_2d(input: &PlanInput<Vec2>) -> Result<FeasibleRange> {
    let mut range = FeasibleRange::Full;
    for neighbor in &input.neighbors {
        let dist = input.self_position.dist(neighbor.position);
        if dist < activation_threshold(&input.params, input.self_radius, neighbor.radius) {
            let theta = bearing(input.self_position, neighbor.position)?;
            range = range.intersect(&half_circle_constraint(theta));
            if range.is_empty() {
                break;
            }
        }
    }
    Ok(range)
}

/// The 2D decision: heading from the feasible range, speed equal to the
/// remaining goal distance capped at `v_max`, zero when no heading is
/// permitted.
pub fn select_velocity_2d(input: &PlanInput<Vec2>) -> Result<Vec2> {
    let to_goal = input.goal - input.self_position;
    let dist = to_goal.norm();
    if dist == 0.0 {
        // Speed is the goal distance, so the answer is zero regardless of
        // the range; in 3D this also covers planes whose projected goal
        // coincides with the agent.
        return Ok(Vec2::ZERO);
    }
    let range = feasible_range_2d(input)?;
    if range.is_empty() {
        // Stopping has priority over moving in a wrong direction.
        return Ok(Vec2::ZERO);
    }
    let speed = dist.min(input.params.v_max);
    let goal_heading = bearing(input.self_position, input.goal)?;
    if range.contains(goal_heading) {
        // Scale the goal vector directly so unobstructed motion is exactly
        // collinear with it.
        Ok(to_goal * (speed / dist))
    } else {
        let theta = range.lower_bound()?.radians();
        Ok(Vec2::new(speed * theta.cos(), speed * theta.sin()))
    }
}

/// A coordinate plane of 3D space. The planar axes are ordered (x,y),
/// (x,z), and (y,z) respectively.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Plane {
    Xy,
    Xz,
    Yz,
}

impl Plane {
    fn project(self, v: Vec3) -> Vec2 {
        match self {
            Plane::Xy => Vec2::new(v.x, v.y),
            Plane::Xz => Vec2::new(v.x, v.z),
            Plane::Yz => Vec2::new(v.y, v.z),
        }
    }
}

/// Drops the orthogonal coordinate from every point of a 3D plan input.
/// A sphere projects to a circle of equal radius, so radii are unchanged.
pub fn project_to_plane(plane: Plane, input: &PlanInput<Vec3>) -> PlanInput<Vec2> {
    PlanInput {
        self_position: plane.project(input.self_position),
        goal: plane.project(input.goal),
        self_radius: input.self_radius,
        neighbors: input
            .neighbors
            .iter()
            .map(|n| NeighborView {
                position: plane.project(n.position),
                radius: n.radius,
            })
            .collect(),
        params: input.params,
    }
}

/// The 3D decision: solve the three coordinate-plane projections
/// independently, sum the planar components axis by axis (each axis
/// receives contributions from the two planes containing it), then cap the
/// combined magnitude at `v_max`.
///
/// A neighbor activates on its true center distance, as in the 2D case;
/// its projection then constrains every plane (a projection is never
/// farther than the body itself, so the planar activation tests stay
/// satisfied). Gating on projected distances instead would let bodies far
/// along the dropped axis pin an agent indefinitely: goal spacing is
/// guaranteed in full space, not per plane, so settled agents could
/// block a neighbor's plane forever and the swarm would deadlock short
/// of convergence.
pub fn select_velocity_3d(input: &PlanInput<Vec3>) -> Result<Vec3> {
    let active = PlanInput {
        self_position: input.self_position,
        goal: input.goal,
        self_radius: input.self_radius,
        neighbors: input
            .neighbors
            .iter()
            .filter(|n| {
                input.self_position.dist(n.position)
                    < activation_threshold(&input.params, input.self_radius, n.radius)
            })
            .copied()
            .collect(),
        params: input.params,
    };
    let input = &active;
    let vxy = select_velocity_2d(&project_to_plane(Plane::Xy, input))?;
    let vxz = select_velocity_2d(&project_to_plane(Plane::Xz, input))?;
    let vyz = select_velocity_2d(&project_to_plane(Plane::Yz, input))?;
    let combined = Vec3::new(vxy.x + vxz.x, vxy.y + vyz.x, vxz.y + vyz.y);
    let magnitude = combined.norm();
    if magnitude > input.params.v_max {
        Ok(combined * (input.params.v_max / magnitude))
    } else {
        Ok(combined)
    }
}

/// Dispatch point that lets the simulation loop run the appropriate
/// decision for its coordinate type.
pub trait Plannable: Coord {
    fn select_velocity(input: &PlanInput<Self>) -> Result<Self>;
}

impl Plannable for Vec2 {
    fn select_velocity(input: &PlanInput<Vec2>) -> Result<Vec2> {
        select_velocity_2d(input)
    }
}

impl Plannable for Vec3 {
    fn select_velocity(input: &PlanInput<Vec3>) -> Result<Vec3> {
        select_velocity_3d(input)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    fn params() -> SimParams {
        SimParams::default()
    }

    fn input_2d(pos: Vec2, goal: Vec2, neighbors: Vec<NeighborView<Vec2>>) -> PlanInput<Vec2> {
        let p = params();
        PlanInput {
            self_position: pos,
            goal,
            self_radius: avoidance_radius(&p),
            neighbors,
            params: p,
        }
    }

    fn input_3d(pos: Vec3, goal: Vec3, neighbors: Vec<NeighborView<Vec3>>) -> PlanInput<Vec3> {
        let p = params().with_dims(3);
        PlanInput {
            self_position: pos,
            goal,
            self_radius: avoidance_radius(&p),
            neighbors,
            params: p,
        }
    }

    #[test]
    fn avoidance_radius_values() {
        assert!(close(avoidance_radius(&params()), 2.8));
        // Static-agents limit.
        let static_case = SimParams {
            d_min: 2.0,
            v_max: 0.0,
            dt: 1.0,
            ..params()
        };
        assert!(close(avoidance_radius(&static_case), 1.0));
        let flight = SimParams {
            d_min: 0.3,
            v_max: 0.5,
            dt: 0.1,
            ..params()
        };
        assert!(close(avoidance_radius(&flight), 0.2));
    }

    #[test]
    fn params_validation() {
        assert!(params().validate().is_ok());
        let mut p = params();
        p.d_final = 5.0;
        assert!(p.validate().is_err());
        let mut p = params();
        p.dims = 4;
        assert!(p.validate().is_err());
        let mut p = params();
        p.dt = 0.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn feasible_range_no_neighbors_is_full() {
        let input = input_2d(Vec2::ZERO, Vec2::new(1.0, 0.0), vec![]);
        assert_eq!(feasible_range_2d(&input).unwrap(), FeasibleRange::Full);
    }

    #[test]
    fn feasible_range_one_neighbor_due_east() {
        let input = input_2d(
            Vec2::ZERO,
            Vec2::new(10.0, 0.0),
            vec![NeighborView {
                position: Vec2::new(4.0, 0.0),
                radius: 2.8,
            }],
        );
        match feasible_range_2d(&input).unwrap() {
            FeasibleRange::Arc(arc) => {
                assert!(close(arc.start(), FRAC_PI_2));
                assert!(close(arc.end(), 3.0 * FRAC_PI_2));
            }
            other => panic!("expected half circle, got {other:?}"),
        }
    }

    #[test]
    fn feasible_range_three_surrounding_neighbors_is_empty() {
        let neighbors = [0.0, TAU / 3.0, 2.0 * TAU / 3.0]
            .iter()
            .map(|t| NeighborView {
                position: Vec2::new(4.0 * t.cos(), 4.0 * t.sin()),
                radius: 2.8,
            })
            .collect();
        let input = input_2d(Vec2::ZERO, Vec2::new(10.0, 0.0), neighbors);
        assert!(feasible_range_2d(&input).unwrap().is_empty());
    }

    #[test]
    fn feasible_range_outside_activation_ignored() {
        let input = input_2d(
            Vec2::ZERO,
            Vec2::new(10.0, 0.0),
            vec![NeighborView {
                position: Vec2::new(5.7, 0.0),
                radius: 2.8,
            }],
        );
        assert_eq!(feasible_range_2d(&input).unwrap(), FeasibleRange::Full);
    }

    #[test]
    fn min_separation_activation_mode() {
        let mut p = params();
        p.activation = ActivationMode::MinSeparation;
        let input = PlanInput {
            self_position: Vec2::ZERO,
            goal: Vec2::new(10.0, 0.0),
            self_radius: avoidance_radius(&p),
            neighbors: vec![NeighborView {
                position: Vec2::new(5.5, 0.0),
                radius: 2.8,
            }],
            params: p,
        };
        // 5.5 is inside 2r = 5.6 but outside d_min = 5.0.
        assert_eq!(feasible_range_2d(&input).unwrap(), FeasibleRange::Full);
    }

    #[test]
    fn coincident_neighbor_is_an_error() {
        let input = input_2d(
            Vec2::new(1.0, 2.0),
            Vec2::new(10.0, 0.0),
            vec![NeighborView {
                position: Vec2::new(1.0, 2.0),
                radius: 2.8,
            }],
        );
        assert!(matches!(
            feasible_range_2d(&input),
            Err(Error::DegenerateBearing)
        ));
    }

    #[test]
    fn velocity_unobstructed_uncapped() {
        let input = input_2d(Vec2::ZERO, Vec2::new(3.0, 4.0), vec![]);
        let v = select_velocity_2d(&input).unwrap();
        assert_eq!(v, Vec2::new(3.0, 4.0));
        assert!(close(v.norm(), 5.0));
    }

    #[test]
    fn velocity_unobstructed_capped() {
        let input = input_2d(Vec2::ZERO, Vec2::new(30.0, 40.0), vec![]);
        let v = select_velocity_2d(&input).unwrap();
        assert!(close(v.x, 9.0) && close(v.y, 12.0));
    }

    #[test]
    fn velocity_blocked_goal_takes_lower_limit() {
        let input = input_2d(
            Vec2::ZERO,
            Vec2::new(10.0, 0.0),
            vec![NeighborView {
                position: Vec2::new(4.0, 0.0),
                radius: 2.8,
            }],
        );
        let v = select_velocity_2d(&input).unwrap();
        // Goal heading 0 is infeasible; lower limit π/2 at speed 10.
        assert!(v.x.abs() < 1e-9);
        assert!(close(v.y, 10.0));
    }

    #[test]
    fn velocity_empty_range_is_zero() {
        let neighbors = [0.0, TAU / 3.0, 2.0 * TAU / 3.0]
            .iter()
            .map(|t| NeighborView {
                position: Vec2::new(4.0 * t.cos(), 4.0 * t.sin()),
                radius: 2.8,
            })
            .collect();
        let input = input_2d(Vec2::ZERO, Vec2::new(10.0, 0.0), neighbors);
        assert_eq!(select_velocity_2d(&input).unwrap(), Vec2::ZERO);
    }

    #[test]
    fn velocity_at_goal_is_zero() {
        let input = input_2d(Vec2::new(2.0, 2.0), Vec2::new(2.0, 2.0), vec![]);
        assert_eq!(select_velocity_2d(&input).unwrap(), Vec2::ZERO);
    }

    #[test]
    fn projection_drops_coordinates() {
        let input = input_3d(
            Vec3::new(1.0, 2.0, 3.0),
            Vec3::new(4.0, -1.0, 9.0),
            vec![NeighborView {
                position: Vec3::new(0.0, 5.0, 7.0),
                radius: 2.8,
            }],
        );
        let xy = project_to_plane(Plane::Xy, &input);
        assert_eq!(xy.self_position, Vec2::new(1.0, 2.0));
        let xz = project_to_plane(Plane::Xz, &input);
        assert_eq!(xz.goal, Vec2::new(4.0, 9.0));
        let yz = project_to_plane(Plane::Yz, &input);
        assert_eq!(yz.neighbors[0].position, Vec2::new(5.0, 7.0));
        assert_eq!(yz.neighbors[0].radius, 2.8);
    }

    #[test]
    fn velocity_3d_composition_doubles() {
        let mut p = params().with_dims(3);
        p.v_max = 100.0;
        let input = PlanInput {
            self_position: Vec3::ZERO,
            goal: Vec3::new(1.0, 2.0, 2.0),
            self_radius: avoidance_radius(&p),
            neighbors: vec![],
            params: p,
        };
        let v = select_velocity_3d(&input).unwrap();
        assert_eq!(v, Vec3::new(2.0, 4.0, 4.0));
    }

    #[test]
    fn velocity_3d_cap_dominates() {
        let input = input_3d(Vec3::ZERO, Vec3::new(30.0, 0.0, 0.0), vec![]);
        let v = select_velocity_3d(&input).unwrap();
        assert!(close(v.x, 15.0) && v.y == 0.0 && v.z == 0.0);
    }

    #[test]
    fn velocity_3d_blocked_ahead_moves_tangentially() {
        // Neighbor straight ahead on +x: the XY and XZ planes both forbid
        // +x and pick their lower limits; the YZ plane sees a zero goal
        // offset. Compare against evaluating the three planes by hand.
        let input = input_3d(
            Vec3::ZERO,
            Vec3::new(10.0, 0.0, 0.0),
            vec![NeighborView {
                position: Vec3::new(4.0, 0.0, 0.0),
                radius: 2.8,
            }],
        );
        let v = select_velocity_3d(&input).unwrap();

        let xy = select_velocity_2d(&project_to_plane(Plane::Xy, &input)).unwrap();
        let xz = select_velocity_2d(&project_to_plane(Plane::Xz, &input)).unwrap();
        let yz = select_velocity_2d(&project_to_plane(Plane::Yz, &input)).unwrap();
        let mut expected = Vec3::new(xy.x + xz.x, xy.y + yz.x, xz.y + yz.y);
        let m = expected.norm();
        if m > input.params.v_max {
            expected = expected * (input.params.v_max / m);
        }
        assert_eq!(v, expected);

        // Both constrained planes contribute no +x motion.
        assert!(v.x.abs() < 1e-9);
        assert!(v.norm() > 0.0);
    }

    #[test]
    fn output_direction_stays_in_range() {
        let input = input_2d(
            Vec2::ZERO,
            Vec2::new(10.0, 3.0),
            vec![NeighborView {
                position: Vec2::new(4.0, 1.0),
                radius: 2.8,
            }],
        );
        let range = feasible_range_2d(&input).unwrap();
        let v = select_velocity_2d(&input).unwrap();
        assert!(v.norm() > 0.0);
        let heading = bearing(Vec2::ZERO, v).unwrap();
        assert!(range.contains(heading));
    }

    #[test]
    fn rotation_equivariance() {
        // Rotating all positions and the goal rotates the output.
        let theta = 0.7f64;
        let rot = |v: Vec2| {
            Vec2::new(
                v.x * theta.cos() - v.y * theta.sin(),
                v.x * theta.sin() + v.y * theta.cos(),
            )
        };
        let base = input_2d(
            Vec2::new(1.0, -2.0),
            Vec2::new(9.0, 4.0),
            vec![
                NeighborView {
                    position: Vec2::new(4.0, 0.5),
                    radius: 2.8,
                },
                NeighborView {
                    position: Vec2::new(3.0, -4.0),
                    radius: 2.8,
                },
            ],
        );
        let rotated = PlanInput {
            self_position: rot(base.self_position),
            goal: rot(base.goal),
            self_radius: base.self_radius,
            neighbors: base
                .neighbors
                .iter()
                .map(|n| NeighborView {
                    position: rot(n.position),
                    radius: n.radius,
                })
                .collect(),
            params: base.params,
        };
        let v = select_velocity_2d(&base).unwrap();
        let vr = select_velocity_2d(&rotated).unwrap();
        let expected = rot(v);
        assert!((vr - expected).norm() < 1e-9, "{vr:?} vs {expected:?}");
    }

    #[test]
    fn per_plane_coincidence_is_an_error() {
        // A neighbor sharing x and y projects onto the agent in the XY
        // plane; there is no dividing line to respect, so this is reported
        // rather than guessed around.
        let input = input_3d(
            Vec3::ZERO,
            Vec3::new(10.0, 0.0, 0.0),
            vec![NeighborView {
                position: Vec3::new(0.0, 0.0, 1.0),
                radius: 2.8,
            }],
        );
        assert!(matches!(
            select_velocity_3d(&input),
            Err(Error::DegenerateBearing)
        ));
    }

    #[test]
    fn speed_pi_mirror_heading() {
        // Goal direction exactly on the constraint boundary is permitted
        // (closed arcs): moving perpendicular to the neighbor bearing.
        let input = input_2d(
            Vec2::ZERO,
            Vec2::new(0.0, 7.0),
            vec![NeighborView {
                position: Vec2::new(4.0, 0.0),
                radius: 2.8,
            }],
        );
        let v = select_velocity_2d(&input).unwrap();
        assert_eq!(v, Vec2::new(0.0, 7.0));
    }
}
