//! C ABI for the asca simulator.
//!
//! The surface is a single opaque simulation handle plus plain-old-data
//! parameter/outcome structs and an error-code enum. Positions flow in and
//! out as flat row-major `double` arrays of `n * dims` values. The
//! declarations live in `include/asca.h`; a test keeps the header and the
//! exported symbols in sync.

use asca::error::Error;
use asca::planner::{ActivationMode, SimParams};
use asca::scenario::{self, Provenance, Scenario};
use asca::sim::{Obstacle, ObstacleMotion, WorldState};
use asca::vec::{Coord, Vec2, Vec3};
use libc::{c_char, c_int, size_t};

/// Simulation parameters, mirrored from the library defaults.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct AscaParams {
    pub d_min: f64,
    pub v_max: f64,
    pub dt: f64,
    pub t_final: f64,
    pub d_final: f64,
    /// Nonzero selects the `d_min` activation distance instead of the
    /// combined avoidance radii.
    pub use_min_separation_activation: c_int,
}

#[repr(C)]
#[derive(Clone, Copy)]
pub struct AscaOutcome {
    pub converged: c_int,
    pub steps: u64,
    pub elapsed_sim_time: f64,
    pub d_max_final: f64,
}

#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AscaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidScenario = 3,
    PlanningFailed = 4,
    BufferTooSmall = 5,
}

fn status_of(e: &Error) -> AscaStatus {
    match e {
        Error::InvalidScenario(_) | Error::SamplingExhausted { .. } => AscaStatus::InvalidScenario,
        Error::InvalidParams(_) | Error::Config(_) => AscaStatus::InvalidArgument,
        _ => AscaStatus::PlanningFailed,
    }
}

enum World {
    D2(WorldState<Vec2>),
    D3(WorldState<Vec3>),
}

/// Opaque simulation handle.
pub struct AscaSim {
    world: World,
    params: SimParams,
    max_steps: u64,
    min_separation: f64,
    converged: bool,
}

fn sim_params(params: &AscaParams, dims: usize) -> SimParams {
    SimParams {
        d_min: params.d_min,
        v_max: params.v_max,
        dt: params.dt,
        t_final: params.t_final,
        d_final: params.d_final,
        dims,
        activation: if params.use_min_separation_activation != 0 {
            ActivationMode::MinSeparation
        } else {
            ActivationMode::CombinedRadii
        },
    }
}

fn pairwise_min<V: Coord>(world: &WorldState<V>) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..world.agents.len() {
        for j in (i + 1)..world.agents.len() {
            best = best.min(world.agents[i].position.dist(world.agents[j].position));
        }
    }
    best
}

unsafe fn read_points<V: Coord>(data: *const f64, n: usize) -> Vec<V> {
    let flat = std::slice::from_raw_parts(data, n * V::DIMS);
    flat.chunks_exact(V::DIMS)
        .map(|chunk| {
            let mut c = [0.0; 3];
            c[..V::DIMS].copy_from_slice(chunk);
            V::from_coords(c)
        })
        .collect()
}

fn build_world<V: asca::planner::Plannable>(
    starts: Vec<V>,
    goals: Vec<V>,
    params: &SimParams,
) -> Result<WorldState<V>, Error> {
    let scenario = Scenario {
        label: "ffi".to_string(),
        starts,
        goals,
        obstacles: vec![],
        provenance: Provenance::default(),
    };
    scenario::validate(&scenario, params)?;
    Ok(WorldState::new(&scenario, params))
}

/// Returns the default parameter set (N-independent).
#[no_mangle]
pub extern "C" fn asca_params_default() -> AscaParams {
    let p = SimParams::default();
    AscaParams {
        d_min: p.d_min,
        v_max: p.v_max,
        dt: p.dt,
        t_final: p.t_final,
        d_final: p.d_final,
        use_min_separation_activation: 0,
    }
}

/// Planning radius `d_min/2 + v_max*dt`; NaN on null input.
///
/// # Safety
/// `params` must be null or point to a valid `AscaParams`.
#[no_mangle]
pub unsafe extern "C" fn asca_avoidance_radius(params: *const AscaParams) -> f64 {
    if params.is_null() {
        return f64::NAN;
    }
    asca::planner::avoidance_radius(&sim_params(&*params, 2))
}

/// Creates a simulation with `n` agents in `dims` (2 or 3) dimensions.
/// `starts` and `goals` hold `n * dims` doubles each, row-major per agent.
/// On success writes the new handle into `out`.
///
/// # Safety
/// `starts`, `goals`, `params`, and `out` must point to valid memory of
/// the documented sizes.
#[no_mangle]
pub unsafe extern "C" fn asca_sim_new(
    dims: c_int,
    n: size_t,
    starts: *const f64,
    goals: *const f64,
    params: *const AscaParams,
    out: *mut *mut AscaSim,
) -> AscaStatus {
    if starts.is_null() || goals.is_null() || params.is_null() || out.is_null() {
        return AscaStatus::NullPointer;
    }
    if n == 0 || !(dims == 2 || dims == 3) {
        return AscaStatus::InvalidArgument;
    }
    let params = sim_params(&*params, dims as usize);
    if let Err(e) = params.validate() {
        let _ = e;
        return AscaStatus::InvalidArgument;
    }
    let world = if dims == 2 {
        build_world::<Vec2>(read_points(starts, n), read_points(goals, n), &params).map(World::D2)
    } else {
        build_world::<Vec3>(read_points(starts, n), read_points(goals, n), &params).map(World::D3)
    };
    match world {
        Ok(world) => {
            let min_separation = match &world {
                World::D2(w) => pairwise_min(w),
                World::D3(w) => pairwise_min(w),
            };
            let max_steps = (params.t_final / params.dt + 1e-9).floor() as u64;
            let converged = match &world {
                World::D2(w) => w.max_goal_distance() < params.d_final,
                World::D3(w) => w.max_goal_distance() < params.d_final,
            };
            let handle = Box::new(AscaSim {
                world,
                params,
                max_steps,
                min_separation,
                converged,
            });
            *out = Box::into_raw(handle);
            AscaStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Adds a circular/spherical obstacle before the first step. `velocity`
/// may be null for a static obstacle, else it holds `dims` doubles.
///
/// # Safety
/// `sim` must be a live handle from `asca_sim_new`; `position` (and
/// `velocity` when non-null) must hold `dims` doubles.
#[no_mangle]
pub unsafe extern "C" fn asca_sim_add_obstacle(
    sim: *mut AscaSim,
    position: *const f64,
    radius: f64,
    velocity: *const f64,
) -> AscaStatus {
    if sim.is_null() || position.is_null() {
        return AscaStatus::NullPointer;
    }
    let sim = &mut *sim;
    if !(radius.is_finite() && radius > 0.0) {
        return AscaStatus::InvalidArgument;
    }
    match &mut sim.world {
        World::D2(w) => {
            if w.step_count() != 0 {
                return AscaStatus::InvalidArgument;
            }
            let motion = if velocity.is_null() {
                ObstacleMotion::Static
            } else {
                ObstacleMotion::Linear {
                    velocity: read_points::<Vec2>(velocity, 1)[0],
                }
            };
            w.obstacles.push(Obstacle {
                initial_position: read_points::<Vec2>(position, 1)[0],
                radius,
                motion,
            });
        }
        World::D3(w) => {
            if w.step_count() != 0 {
                return AscaStatus::InvalidArgument;
            }
            let motion = if velocity.is_null() {
                ObstacleMotion::Static
            } else {
                ObstacleMotion::Linear {
                    velocity: read_points::<Vec3>(velocity, 1)[0],
                }
            };
            w.obstacles.push(Obstacle {
                initial_position: read_points::<Vec3>(position, 1)[0],
                radius,
                motion,
            });
        }
    }
    AscaStatus::Ok
}

fn advance(sim: &mut AscaSim) -> Result<(), Error> {
    match &mut sim.world {
        World::D2(w) => {
            *w = w.step()?;
            sim.min_separation = sim.min_separation.min(pairwise_min(w));
            sim.converged = w.max_goal_distance() < sim.params.d_final;
        }
        World::D3(w) => {
            *w = w.step()?;
            sim.min_separation = sim.min_separation.min(pairwise_min(w));
            sim.converged = w.max_goal_distance() < sim.params.d_final;
        }
    }
    Ok(())
}

/// Advances the simulation by one step.
///
/// # Safety
/// `sim` must be a live handle from `asca_sim_new`.
#[no_mangle]
pub unsafe extern "C" fn asca_sim_step(sim: *mut AscaSim) -> AscaStatus {
    if sim.is_null() {
        return AscaStatus::NullPointer;
    }
    match advance(&mut *sim) {
        Ok(()) => AscaStatus::Ok,
        Err(e) => status_of(&e),
    }
}

/// Steps until every agent is within `d_final` of its goal or the time
/// budget runs out, then fills `outcome` (which may be null).
///
/// # Safety
/// `sim` must be a live handle; `outcome` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn asca_sim_run_to_completion(
    sim: *mut AscaSim,
    outcome: *mut AscaOutcome,
) -> AscaStatus {
    if sim.is_null() {
        return AscaStatus::NullPointer;
    }
    let sim = &mut *sim;
    while !sim.converged && asca_sim_step_count(sim) < sim.max_steps {
        if let Err(e) = advance(sim) {
            return status_of(&e);
        }
    }
    if !outcome.is_null() {
        *outcome = AscaOutcome {
            converged: sim.converged as c_int,
            steps: asca_sim_step_count(sim),
            elapsed_sim_time: asca_sim_time(sim),
            d_max_final: asca_sim_max_goal_distance(sim),
        };
    }
    AscaStatus::Ok
}

/// Number of committed steps.
///
/// # Safety
/// `sim` must be a live handle (null returns 0).
#[no_mangle]
pub unsafe extern "C" fn asca_sim_step_count(sim: *const AscaSim) -> u64 {
    if sim.is_null() {
        return 0;
    }
    match &(*sim).world {
        World::D2(w) => w.step_count(),
        World::D3(w) => w.step_count(),
    }
}

/// Simulated seconds elapsed.
///
/// # Safety
/// `sim` must be a live handle (null returns NaN).
#[no_mangle]
pub unsafe extern "C" fn asca_sim_time(sim: *const AscaSim) -> f64 {
    if sim.is_null() {
        return f64::NAN;
    }
    match &(*sim).world {
        World::D2(w) => w.time(),
        World::D3(w) => w.time(),
    }
}

/// Number of agents.
///
/// # Safety
/// `sim` must be a live handle (null returns 0).
#[no_mangle]
pub unsafe extern "C" fn asca_sim_agent_count(sim: *const AscaSim) -> size_t {
    if sim.is_null() {
        return 0;
    }
    match &(*sim).world {
        World::D2(w) => w.agents.len(),
        World::D3(w) => w.agents.len(),
    }
}

unsafe fn copy_out<V: Coord>(
    agents: impl Iterator<Item = V>,
    count: usize,
    out: *mut f64,
    len: size_t,
) -> AscaStatus {
    let needed = count * V::DIMS;
    if len < needed {
        return AscaStatus::BufferTooSmall;
    }
    let out = std::slice::from_raw_parts_mut(out, needed);
    for (slot, v) in out.chunks_exact_mut(V::DIMS).zip(agents) {
        slot.copy_from_slice(&v.coords()[..V::DIMS]);
    }
    AscaStatus::Ok
}

/// Copies current agent positions into `out` (`len >= n * dims`).
///
/// # Safety
/// `sim` must be a live handle; `out` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn asca_sim_positions(
    sim: *const AscaSim,
    out: *mut f64,
    len: size_t,
) -> AscaStatus {
    if sim.is_null() || out.is_null() {
        return AscaStatus::NullPointer;
    }
    match &(*sim).world {
        World::D2(w) => copy_out(
            w.agents.iter().map(|a| a.position),
            w.agents.len(),
            out,
            len,
        ),
        World::D3(w) => copy_out(
            w.agents.iter().map(|a| a.position),
            w.agents.len(),
            out,
            len,
        ),
    }
}

/// Copies current agent velocities into `out` (`len >= n * dims`).
///
/// # Safety
/// As for `asca_sim_positions`.
#[no_mangle]
pub unsafe extern "C" fn asca_sim_velocities(
    sim: *const AscaSim,
    out: *mut f64,
    len: size_t,
) -> AscaStatus {
    if sim.is_null() || out.is_null() {
        return AscaStatus::NullPointer;
    }
    match &(*sim).world {
        World::D2(w) => copy_out(
            w.agents.iter().map(|a| a.velocity),
            w.agents.len(),
            out,
            len,
        ),
        World::D3(w) => copy_out(
            w.agents.iter().map(|a| a.velocity),
            w.agents.len(),
            out,
            len,
        ),
    }
}

/// Largest distance from any agent to its goal.
///
/// # Safety
/// `sim` must be a live handle (null returns NaN).
#[no_mangle]
pub unsafe extern "C" fn asca_sim_max_goal_distance(sim: *const AscaSim) -> f64 {
    if sim.is_null() {
        return f64::NAN;
    }
    match &(*sim).world {
        World::D2(w) => w.max_goal_distance(),
        World::D3(w) => w.max_goal_distance(),
    }
}

/// Smallest pairwise agent distance seen so far (infinity for one agent).
///
/// # Safety
/// `sim` must be a live handle (null returns NaN).
#[no_mangle]
pub unsafe extern "C" fn asca_sim_min_separation(sim: *const AscaSim) -> f64 {
    if sim.is_null() {
        return f64::NAN;
    }
    (*sim).min_separation
}

/// Nonzero once every agent is within `d_final` of its goal.
///
/// # Safety
/// `sim` must be a live handle (null returns 0).
#[no_mangle]
pub unsafe extern "C" fn asca_sim_converged(sim: *const AscaSim) -> c_int {
    if sim.is_null() {
        return 0;
    }
    (*sim).converged as c_int
}

/// Frees a handle; null is ignored.
///
/// # Safety
/// `sim` must be null or a handle from `asca_sim_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn asca_sim_free(sim: *mut AscaSim) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn asca_status_str(status: AscaStatus) -> *const c_char {
    let text: &'static [u8] = match status {
        AscaStatus::Ok => b"ok\0",
        AscaStatus::NullPointer => b"null pointer\0",
        AscaStatus::InvalidArgument => b"invalid argument\0",
        AscaStatus::InvalidScenario => b"invalid scenario\0",
        AscaStatus::PlanningFailed => b"planning failed\0",
        AscaStatus::BufferTooSmall => b"buffer too small\0",
    };
    text.as_ptr() as *const c_char
}
