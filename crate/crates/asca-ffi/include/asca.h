/* C ABI for the asca swarm collision-avoidance simulator.
 *
 * Generated with: cbindgen --config cbindgen.toml --crate asca-ffi --output include/asca.h
 */

#ifndef ASCA_H
#define ASCA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AscaStatus {
  ASCA_STATUS_OK = 0,
  ASCA_STATUS_NULL_POINTER = 1,
  ASCA_STATUS_INVALID_ARGUMENT = 2,
  ASCA_STATUS_INVALID_SCENARIO = 3,
  ASCA_STATUS_PLANNING_FAILED = 4,
  ASCA_STATUS_BUFFER_TOO_SMALL = 5,
} AscaStatus;

/**
 * Opaque simulation handle.
 */
typedef struct AscaSim AscaSim;

/**
 * Simulation parameters, mirrored from the library defaults.
 */
typedef struct AscaParams {
  double d_min;
  double v_max;
  double dt;
  double t_final;
  double d_final;
  /**
   * Nonzero selects the `d_min` activation distance instead of the
   * combined avoidance radii.
   */
  int use_min_separation_activation;
} AscaParams;

typedef struct AscaOutcome {
  int converged;
  uint64_t steps;
  double elapsed_sim_time;
  double d_max_final;
} AscaOutcome;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the default parameter set (N-independent).
 */
struct AscaParams asca_params_default(void);

/**
 * Planning radius `d_min/2 + v_max*dt`; NaN on null input.
 *
 * # Safety
 * `params` must be null or point to a valid `AscaParams`.
 */
double asca_avoidance_radius(const struct AscaParams *params);

/**
 * Creates a simulation with `n` agents in `dims` (2 or 3) dimensions.
 * `starts` and `goals` hold `n * dims` doubles each, row-major per agent.
 * On success writes the new handle into `out`.
 *
 * # Safety
 * `starts`, `goals`, `params`, and `out` must point to valid memory of
 * the documented sizes.
 */
enum AscaStatus asca_sim_new(int dims,
                             size_t n,
                             const double *starts,
                             const double *goals,
                             const struct AscaParams *params,
                             struct AscaSim **out);

/**
 * Adds a circular/spherical obstacle before the first step. `velocity`
 * may be null for a static obstacle, else it holds `dims` doubles.
 *
 * # Safety
 * `sim` must be a live handle from `asca_sim_new`; `position` (and
 * `velocity` when non-null) must hold `dims` doubles.
 */
enum AscaStatus asca_sim_add_obstacle(struct AscaSim *sim,
                                      const double *position,
                                      double radius,
                                      const double *velocity);

/**
 * Advances the simulation by one step.
 *
 * # Safety
 * `sim` must be a live handle from `asca_sim_new`.
 */
enum AscaStatus asca_sim_step(struct AscaSim *sim);

/**
 * Steps until every agent is within `d_final` of its goal or the time
 * budget runs out, then fills `outcome` (which may be null).
 *
 * # Safety
 * `sim` must be a live handle; `outcome` must be null or valid.
 */
enum AscaStatus asca_sim_run_to_completion(struct AscaSim *sim, struct AscaOutcome *outcome);

/**
 * Number of committed steps.
 *
 * # Safety
 * `sim` must be a live handle (null returns 0).
 */
uint64_t asca_sim_step_count(const struct AscaSim *sim);

/**
 * Simulated seconds elapsed.
 *
 * # Safety
 * `sim` must be a live handle (null returns NaN).
 */
double asca_sim_time(const struct AscaSim *sim);

/**
 * Number of agents.
 *
 * # Safety
 * `sim` must be a live handle (null returns 0).
 */
size_t asca_sim_agent_count(const struct AscaSim *sim);

/**
 * Copies current agent positions into `out` (`len >= n * dims`).
 *
 * # Safety
 * `sim` must be a live handle; `out` must hold at least `len` doubles.
 */
enum AscaStatus asca_sim_positions(const struct AscaSim *sim, double *out, size_t len);

/**
 * Copies current agent velocities into `out` (`len >= n * dims`).
 *
 * # Safety
 * As for `asca_sim_positions`.
 */
enum AscaStatus asca_sim_velocities(const struct AscaSim *sim, double *out, size_t len);

/**
 * Largest distance from any agent to its goal.
 *
 * # Safety
 * `sim` must be a live handle (null returns NaN).
 */
double asca_sim_max_goal_distance(const struct AscaSim *sim);

/**
 * Smallest pairwise agent distance seen so far (infinity for one agent).
 *
 * # Safety
 * `sim` must be a live handle (null returns NaN).
 */
double asca_sim_min_separation(const struct AscaSim *sim);

/**
 * Nonzero once every agent is within `d_final` of its goal.
 *
 * # Safety
 * `sim` must be a live handle (null returns 0).
 */
int asca_sim_converged(const struct AscaSim *sim);

/**
 * Frees a handle; null is ignored.
 *
 * # Safety
 * `sim` must be null or a handle from `asca_sim_new`, not yet freed.
 */
void asca_sim_free(struct AscaSim *sim);

/**
 * Static description of a status code.
 */
const char *asca_status_str(enum AscaStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ASCA_H */
