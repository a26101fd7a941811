#ifndef NS1D_H
#define NS1D_H

/* Generated by cbindgen from ns1d-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Series selector for `ns1d_stability_series`.
typedef enum Ns1dStabilitySeries {
  NS1D_STABILITY_SERIES_TIMES = 0,
  NS1D_STABILITY_SERIES_REL_ENTROPY = 1,
  NS1D_STABILITY_SERIES_DISSIPATION = 2,
  NS1D_STABILITY_SERIES_LAMBDA = 3,
  NS1D_STABILITY_SERIES_BOUND = 4,
  NS1D_STABILITY_SERIES_MARGIN = 5,
} Ns1dStabilitySeries;

// Call outcome. Zero means success; anything else is an error class,
// with details from `ns1d_last_error()`.
typedef enum Ns1dStatus {
  NS1D_STATUS_OK = 0,
  NS1D_STATUS_INVALID_ARGUMENT = 1,
  NS1D_STATUS_DOMAIN = 2,
  NS1D_STATUS_UNSUPPORTED_REGIME = 3,
  NS1D_STATUS_STEP_FAILURE = 4,
  NS1D_STATUS_NUMERICAL = 5,
  NS1D_STATUS_BUDGET = 6,
  NS1D_STATUS_MISMATCH = 7,
  NS1D_STATUS_NOT_STRONG = 8,
  NS1D_STATUS_PARSE = 9,
  NS1D_STATUS_IO = 10,
  NS1D_STATUS_NULL_POINTER = 11,
  NS1D_STATUS_PANIC = 12,
} Ns1dStatus;

// Opaque initial-value problem handle.
typedef struct Ns1dScenario Ns1dScenario;

// Opaque stability-report handle.
typedef struct Ns1dStability Ns1dStability;

// Opaque trajectory handle; remembers its grid and parameters so the
// diagnostics need no extra arguments.
typedef struct Ns1dTrajectory Ns1dTrajectory;

// Fluid constants: `P(rho) = a rho^gamma`, `mu(rho) = mu rho^alpha`.
typedef struct Ns1dParams {
  double gamma;
  double a;
  double mu;
  double alpha;
  double delta;
} Ns1dParams;

// Uniform periodic/truncated box; `boundary`: 0 periodic, 1 extrapolate.
typedef struct Ns1dGrid {
  double length;
  size_t cells;
  int32_t boundary;
} Ns1dGrid;

// Time-stepping policy; `face_average`: 0 arithmetic, 1 harmonic.
typedef struct Ns1dControls {
  double t_end;
  double cfl_advective;
  double cfl_diffusive;
  uint64_t max_steps;
  uint64_t snapshot_stride;
  double density_floor;
  int32_t face_average;
} Ns1dControls;

// Energy accounting of one snapshot.
typedef struct Ns1dEnergy {
  double time;
  double kinetic;
  double potential;
  double dissipation_accum;
  double total;
} Ns1dEnergy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the most recent error on this thread. The pointer stays
// valid until the next failing ns1d call on the same thread.
const char *ns1d_last_error(void);

// Compactly supported density cap with optional interior velocity.
//
// # Safety
// `out` must be a valid pointer; the returned handle must be released
// with `ns1d_scenario_free`.
enum Ns1dStatus ns1d_scenario_vacuum_bump(struct Ns1dParams params,
                                          struct Ns1dGrid grid,
                                          double center,
                                          double width,
                                          double amplitude,
                                          double u0_amplitude,
                                          struct Ns1dScenario **out);

// Strictly positive periodic density and velocity profiles.
//
// # Safety
// See `ns1d_scenario_vacuum_bump`.
enum Ns1dStatus ns1d_scenario_smooth_periodic(struct Ns1dParams params,
                                              struct Ns1dGrid grid,
                                              double rho_min,
                                              double amplitude,
                                              uint32_t wavenumber,
                                              double u0_amplitude,
                                              struct Ns1dScenario **out);

// Sinusoidal perturbation of a generated scenario;
// `target`: 0 velocity, 1 density, 2 both.
//
// # Safety
// `base` must be a live scenario handle; see `ns1d_scenario_vacuum_bump`.
enum Ns1dStatus ns1d_scenario_perturb(const struct Ns1dScenario *base,
                                      double epsilon,
                                      int32_t target,
                                      uint32_t wavenumber,
                                      struct Ns1dScenario **out);

// # Safety
// `scenario` must come from a `ns1d_scenario_*` constructor or be null.
void ns1d_scenario_free(struct Ns1dScenario *scenario);

// Integrates a scenario; `formulation`: 0 for the primitive u-form,
// 1 for the effective-velocity v-form.
//
// # Safety
// `scenario` must be a live handle; the trajectory must be released
// with `ns1d_trajectory_free`.
enum Ns1dStatus ns1d_simulate(const struct Ns1dScenario *scenario,
                              struct Ns1dControls controls,
                              int32_t formulation,
                              struct Ns1dTrajectory **out);

// Like `ns1d_simulate`, but records exactly at the given times
// (strictly increasing, starting at 0, ending at `controls.t_end`).
// Two runs recorded on the same times can be compared snapshot by
// snapshot.
//
// # Safety
// `times` must point to `n_times` doubles; see `ns1d_simulate`.
enum Ns1dStatus ns1d_simulate_at_times(const struct Ns1dScenario *scenario,
                                       struct Ns1dControls controls,
                                       int32_t formulation,
                                       const double *times,
                                       size_t n_times,
                                       struct Ns1dTrajectory **out);

// # Safety
// `traj` must come from a simulate call or be null.
void ns1d_trajectory_free(struct Ns1dTrajectory *traj);

// Number of recorded snapshots; 0 for a null handle.
//
// # Safety
// `traj` must be a live handle or null.
size_t ns1d_trajectory_snapshots(const struct Ns1dTrajectory *traj);

// Number of grid cells; 0 for a null handle.
//
// # Safety
// `traj` must be a live handle or null.
size_t ns1d_trajectory_cells(const struct Ns1dTrajectory *traj);

// Snapshot times into `buf` (length = snapshot count).
//
// # Safety
// `buf` must point to `len` writable doubles.
enum Ns1dStatus ns1d_trajectory_times(const struct Ns1dTrajectory *traj, double *buf, size_t len);

// Density field of snapshot `k` into `buf` (length = cell count).
//
// # Safety
// `buf` must point to `len` writable doubles.
enum Ns1dStatus ns1d_trajectory_rho(const struct Ns1dTrajectory *traj,
                                    size_t k,
                                    double *buf,
                                    size_t len);

// Velocity field of snapshot `k`: the recovered `u` for u-form runs,
// `v` for v-form runs.
//
// # Safety
// `buf` must point to `len` writable doubles.
enum Ns1dStatus ns1d_trajectory_velocity(const struct Ns1dTrajectory *traj,
                                         size_t k,
                                         double *buf,
                                         size_t len);

// Energy report of snapshot `k` (u-form energy or BD energy per the
// trajectory's formulation).
//
// # Safety
// `out` must be a valid pointer.
enum Ns1dStatus ns1d_trajectory_energy(const struct Ns1dTrajectory *traj,
                                       size_t k,
                                       struct Ns1dEnergy *out);

// Total mass of snapshot `k`.
//
// # Safety
// `out` must be a valid pointer.
enum Ns1dStatus ns1d_trajectory_mass(const struct Ns1dTrajectory *traj, size_t k, double *out);

// Relative entropy between snapshot `k` of two v-form trajectories.
//
// # Safety
// Both handles must be live; `out` must be a valid pointer.
enum Ns1dStatus ns1d_relative_entropy(const struct Ns1dTrajectory *traj,
                                      const struct Ns1dTrajectory *reference,
                                      size_t k,
                                      double *out);

// Weak-strong stability certificate of `traj` against `reference`
// (both v-form, same grid and snapshot times). A negative `tolerance`
// applies the default `1e-6 + 0.1 H(0)` rule.
//
// # Safety
// Handles must be live; the report must be released with
// `ns1d_stability_free`.
enum Ns1dStatus ns1d_wsu_check(const struct Ns1dTrajectory *traj,
                               const struct Ns1dTrajectory *reference,
                               double tolerance,
                               struct Ns1dStability **out);

// # Safety
// `report` must come from `ns1d_wsu_check` or be null.
void ns1d_stability_free(struct Ns1dStability *report);

// 1 when the certificate held at every snapshot, else 0.
//
// # Safety
// `report` must be a live handle or null.
int32_t ns1d_stability_passed(const struct Ns1dStability *report);

// Number of snapshots in the report.
//
// # Safety
// `report` must be a live handle or null.
size_t ns1d_stability_len(const struct Ns1dStability *report);

// `sup_t H` over the run; NaN for a null handle.
//
// # Safety
// `report` must be a live handle or null.
double ns1d_stability_sup_h(const struct Ns1dStability *report);

// Copies one column of the stability report into `buf`.
//
// # Safety
// `buf` must point to `len` writable doubles.
enum Ns1dStatus ns1d_stability_series(const struct Ns1dStability *report,
                                      enum Ns1dStabilitySeries series,
                                      double *buf,
                                      size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NS1D_H */
