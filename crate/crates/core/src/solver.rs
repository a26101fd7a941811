//! Explicit finite-volume time steppers for both formulations.
//!
//! Convection uses the Rusanov (local Lax-Friedrichs) flux with wave
//! speed bound `|w| + c`; diffusion is explicit and centered; the
//! effective-velocity transport is first-order upwind on the sign of the
//! recovered `u`. Forward Euler in time with an adaptive step from the
//! advective/diffusive CFL bounds. On periodic grids the conservative
//! fluxes telescope, so mass is conserved to roundoff.
//!
//! The pressure term of the v-equation is evaluated through the
//! vacuum-regular identity `(1/rho) d/dx(a rho^gamma) =
//! (a gamma/(gamma-1)) d/dx(rho^(gamma-1))`, which stays finite where
//! the density vanishes.

use crate::error::{Error, Result};
use crate::model::{
    BoundaryKind, FluidParams, Formulation, Grid1D, Snapshots, StateU, StateV, TimeControls,
    Trajectory,
};
use crate::num::powr;
use crate::transform::{phi_grad, to_effective};

/// A labelled initial-value problem.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub grid: Grid1D,
    pub params: FluidParams,
    pub initial: StateU,
    pub label: String,
    /// Closed-form generator this scenario was built from, when there is
    /// one. Lets oracle runs re-sample the profile on refined grids
    /// instead of injecting piecewise-constant data.
    pub spec: Option<crate::scenarios::ScenarioSpec>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.initial.len() != self.grid.cells {
            return Err(Error::invalid(format!(
                "initial state has {} cells, grid has {}",
                self.initial.len(),
                self.grid.cells
            )));
        }
        Ok(())
    }
}

/// Pointwise source term `(x, t) -> (s_rho, s_mom)` for the u-form or
/// `(s_rho, s_v)` for the v-form. Used by manufactured-solution runs.
pub trait SourceTerm {
    fn eval(&self, x: f64, t: f64) -> (f64, f64);
}

/// Snapshot recording rule for a simulation run.
#[derive(Debug, Clone, Copy)]
pub enum RecordRule<'a> {
    /// Record every `snapshot_stride` steps and always at `t_end`.
    Stride,
    /// Land on and record exactly these times. Must start at 0 and end
    /// at `t_end`, strictly increasing. Lets two runs with different
    /// adaptive steps produce comparable trajectories.
    Times(&'a [f64]),
}

pub struct SimOptions<'a> {
    pub record: RecordRule<'a>,
    pub source: Option<&'a dyn SourceTerm>,
}

impl Default for SimOptions<'_> {
    fn default() -> Self {
        SimOptions { record: RecordRule::Stride, source: None }
    }
}

/// Uniform record times `k * t_end / n` for `k = 0..=n`, hitting both
/// endpoints exactly.
pub fn uniform_times(t_end: f64, n_intervals: usize) -> Vec<f64> {
    let n = n_intervals.max(1);
    (0..=n).map(|k| t_end * (k as f64 / n as f64)).collect()
}

fn extend(field: &[f64], boundary: BoundaryKind) -> Vec<f64> {
    let n = field.len();
    let mut ext = Vec::with_capacity(n + 2);
    ext.push(match boundary {
        BoundaryKind::Periodic => field[n - 1],
        BoundaryKind::Extrapolate => field[0],
    });
    ext.extend_from_slice(field);
    ext.push(match boundary {
        BoundaryKind::Periodic => field[0],
        BoundaryKind::Extrapolate => field[n - 1],
    });
    ext
}

/// Largest stable step for a u-form state: the advective bound
/// `cfl_adv h / (|u| + c)` and the diffusive bound `cfl_diff h^2 / nu`
/// with `nu = mu(rho) / max(rho, floor)`, minimized over cells and
/// capped at `t_end`.
pub fn stable_dt_u(
    state: &StateU,
    grid: &Grid1D,
    params: &FluidParams,
    controls: &TimeControls,
) -> f64 {
    let h = grid.spacing;
    let floor = controls.density_floor;
    let mut dt = controls.t_end;
    for (&r, &m) in state.rho.iter().zip(&state.mom) {
        let u = m / r.max(floor);
        let speed = u.abs() + params.sound_speed(r);
        if speed > 0.0 {
            dt = dt.min(controls.cfl_advective * h / speed);
        }
        let nu = params.mu * powr(r, params.alpha) / r.max(floor);
        if nu > 0.0 {
            dt = dt.min(controls.cfl_diffusive * h * h / nu);
        }
    }
    dt
}

/// v-form analogue. The convective wave bound uses `max(|u|, |v|) + c`
/// (the mass flux moves with `v`, the transport with `u`); the diffusive
/// bound uses the density-equation diffusivity `mu(rho)/max(rho, floor)`.
pub fn stable_dt_v(
    state: &StateV,
    grid: &Grid1D,
    params: &FluidParams,
    controls: &TimeControls,
) -> f64 {
    let h = grid.spacing;
    let floor = controls.density_floor;
    let mut dt = controls.t_end;
    let grad = match phi_grad(&state.rho, grid, params) {
        Ok(g) => g,
        // Singular potential: fall back to |v| alone for the bound.
        Err(_) => vec![0.0; state.len()],
    };
    for i in 0..state.len() {
        let r = state.rho[i];
        let v = state.v[i];
        let u = v - grad[i];
        let speed = u.abs().max(v.abs()) + params.sound_speed(r);
        if speed > 0.0 {
            dt = dt.min(controls.cfl_advective * h / speed);
        }
        let nu = params.mu * powr(r, params.alpha) / r.max(floor);
        if nu > 0.0 {
            dt = dt.min(controls.cfl_diffusive * h * h / nu);
        }
    }
    dt
}

/// One forward-Euler step of the conservative u-form system.
///
/// `source`, when given, holds pointwise `(s_rho, s_mom)` arrays already
/// evaluated at the step's start time. `t` only labels errors.
pub fn step_u(
    state: &StateU,
    dt: f64,
    grid: &Grid1D,
    params: &FluidParams,
    controls: &TimeControls,
    source: Option<(&[f64], &[f64])>,
    t: f64,
) -> Result<StateU> {
    let n = grid.cells;
    let h = grid.spacing;
    let floor = controls.density_floor;

    let rho_e = extend(&state.rho, grid.boundary);
    let mom_e = extend(&state.mom, grid.boundary);
    let mut u_e = vec![0.0; n + 2];
    let mut c_e = vec![0.0; n + 2];
    let mut p_e = vec![0.0; n + 2];
    for j in 0..n + 2 {
        u_e[j] = mom_e[j] / rho_e[j].max(floor);
        c_e[j] = params.sound_speed(rho_e[j]);
        p_e[j] = params.a * powr(rho_e[j], params.gamma);
    }

    // Face fluxes between extended cells j and j+1.
    let mut f_mass = vec![0.0; n + 1];
    let mut f_mom = vec![0.0; n + 1];
    let mut f_visc = vec![0.0; n + 1];
    for j in 0..=n {
        let (rl, rr) = (rho_e[j], rho_e[j + 1]);
        let (ul, ur) = (u_e[j], u_e[j + 1]);
        let (ml, mr) = (mom_e[j], mom_e[j + 1]);
        let s = (ul.abs() + c_e[j]).max(ur.abs() + c_e[j + 1]);
        f_mass[j] = 0.5 * (rl * ul + rr * ur) - 0.5 * s * (rr - rl);
        f_mom[j] =
            0.5 * (rl * ul * ul + p_e[j] + rr * ur * ur + p_e[j + 1]) - 0.5 * s * (mr - ml);
        let rho_face = controls.face_average.combine(rl, rr);
        f_visc[j] = params.mu * powr(rho_face, params.alpha) * (ur - ul) / h;
    }

    let dtoh = dt / h;
    let mut rho = vec![0.0; n];
    let mut mom = vec![0.0; n];
    for i in 0..n {
        rho[i] = state.rho[i] - dtoh * (f_mass[i + 1] - f_mass[i]);
        mom[i] = state.mom[i] - dtoh * (f_mom[i + 1] - f_mom[i])
            + dtoh * (f_visc[i + 1] - f_visc[i]);
        if let Some((s_rho, s_mom)) = source {
            rho[i] += dt * s_rho[i];
            mom[i] += dt * s_mom[i];
        }
    }

    finish_step_u(rho, mom, floor, t)
}

fn finish_step_u(rho: Vec<f64>, mut mom: Vec<f64>, floor: f64, t: f64) -> Result<StateU> {
    for i in 0..rho.len() {
        if rho[i].is_nan() || mom[i].is_nan() || rho[i].is_infinite() || mom[i].is_infinite() {
            return Err(Error::Numerical {
                time: t,
                reason: format!("non-finite fields in cell {i}"),
            });
        }
        if rho[i] < 0.0 {
            return Err(Error::StepFailure {
                time: t,
                reason: format!("negative density {} in cell {i}", rho[i]),
            });
        }
        if rho[i] < floor {
            mom[i] = 0.0;
        }
    }
    Ok(StateU { rho, mom })
}

/// One forward-Euler step of the v-form system: conservative density
/// update (Rusanov convection of `rho v` plus explicit degenerate
/// diffusion) and non-conservative upwind transport of `v` forced by the
/// vacuum-regular pressure gradient.
pub fn step_v(
    state: &StateV,
    dt: f64,
    grid: &Grid1D,
    params: &FluidParams,
    controls: &TimeControls,
    source: Option<(&[f64], &[f64])>,
    t: f64,
) -> Result<StateV> {
    if !(params.alpha > 1.0) {
        return Err(Error::invalid(format!(
            "v-form stepping requires alpha > 1, got {}",
            params.alpha
        )));
    }
    let n = grid.cells;
    let h = grid.spacing;

    // Recovered velocity u = v - D_c[phi(rho)] drives the transport.
    let grad_phi = phi_grad(&state.rho, grid, params)?;

    // (mu(rho)/rho) = mu rho^(alpha-1), evaluated directly: finite at
    // vacuum because alpha > 1.
    let kappa: Vec<f64> = state
        .rho
        .iter()
        .map(|&r| params.mu * powr(r, params.alpha - 1.0))
        .collect();

    // Pressure forcing (a gamma/(gamma-1)) D_c[rho^(gamma-1)].
    let pow_g: Vec<f64> = state
        .rho
        .iter()
        .map(|&r| powr(r, params.gamma - 1.0))
        .collect();
    let coef = params.a * params.gamma / (params.gamma - 1.0);
    let press: Vec<f64> = crate::transform::centered_grad(&pow_g, grid)?
        .into_iter()
        .map(|d| coef * d)
        .collect();

    let rho_e = extend(&state.rho, grid.boundary);
    let v_e = extend(&state.v, grid.boundary);
    let kappa_e = extend(&kappa, grid.boundary);
    let mut f_mass = vec![0.0; n + 1];
    let mut f_diff = vec![0.0; n + 1];
    for j in 0..=n {
        let (rl, rr) = (rho_e[j], rho_e[j + 1]);
        let (vl, vr) = (v_e[j], v_e[j + 1]);
        let cl = params.sound_speed(rl);
        let cr = params.sound_speed(rr);
        let s = (vl.abs() + cl).max(vr.abs() + cr);
        f_mass[j] = 0.5 * (rl * vl + rr * vr) - 0.5 * s * (rr - rl);
        f_diff[j] = controls.face_average.combine(kappa_e[j], kappa_e[j + 1]) * (rr - rl) / h;
    }

    let dtoh = dt / h;
    let mut rho = vec![0.0; n];
    let mut v = vec![0.0; n];
    for i in 0..n {
        rho[i] = state.rho[i] - dtoh * (f_mass[i + 1] - f_mass[i])
            + dtoh * (f_diff[i + 1] - f_diff[i]);

        let u = state.v[i] - grad_phi[i];
        let upwind = if u > 0.0 {
            (state.v[i] - state.v[grid.left(i)]) / h
        } else if u < 0.0 {
            (state.v[grid.right(i)] - state.v[i]) / h
        } else {
            0.0
        };
        v[i] = state.v[i] - dt * (u * upwind + press[i]);

        if let Some((s_rho, s_v)) = source {
            rho[i] += dt * s_rho[i];
            v[i] += dt * s_v[i];
        }
    }

    for i in 0..n {
        if !rho[i].is_finite() || !v[i].is_finite() {
            return Err(Error::Numerical {
                time: t,
                reason: format!("non-finite fields in cell {i}"),
            });
        }
        if rho[i] < 0.0 {
            return Err(Error::StepFailure {
                time: t,
                reason: format!("negative density {} in cell {i}", rho[i]),
            });
        }
    }
    Ok(StateV { rho, v })
}

/// Instantaneous viscous dissipation `int mu(rho) |du/dx|^2 dx` of the
/// u-form energy, on the same face stencil as the viscous flux.
pub fn viscous_dissipation_rate(
    state: &StateU,
    grid: &Grid1D,
    params: &FluidParams,
    controls: &TimeControls,
) -> f64 {
    let n = grid.cells;
    let h = grid.spacing;
    let floor = controls.density_floor;
    let rho_e = extend(&state.rho, grid.boundary);
    let mom_e = extend(&state.mom, grid.boundary);
    let mut acc = 0.0;
    // Faces 0..n cover each physical face exactly once on periodic
    // grids; the omitted extrapolate face has a zero jump anyway.
    for j in 0..n {
        let rho_face = controls.face_average.combine(rho_e[j], rho_e[j + 1]);
        let du = mom_e[j + 1] / rho_e[j + 1].max(floor) - mom_e[j] / rho_e[j].max(floor);
        acc += params.mu * powr(rho_face, params.alpha) * du * du / h;
    }
    acc
}

/// Instantaneous BD-entropy dissipation of the v-form energy,
/// `a mu gamma int rho^(gamma+alpha-3) |drho/dx|^2 dx`, evaluated in the
/// vacuum-regular power-difference form
/// `rho^((gamma+alpha-3)/2) drho/dx = (2/(gamma+alpha-1)) d/dx rho^((gamma+alpha-1)/2)`.
pub fn bd_dissipation_rate(rho: &[f64], grid: &Grid1D, params: &FluidParams) -> f64 {
    let e = 0.5 * (params.gamma + params.alpha - 1.0);
    let coef = 1.0 / e;
    let pw: Vec<f64> = rho.iter().map(|&r| powr(r, e)).collect();
    let grad = match crate::transform::centered_grad(&pw, grid) {
        Ok(g) => g,
        Err(_) => return 0.0,
    };
    let sum: f64 = grad.iter().map(|d| (coef * d) * (coef * d)).sum();
    params.a * params.mu * params.gamma * grid.spacing * sum
}

/// Integrates a scenario from 0 to `t_end` with stride-based snapshot
/// recording and no sources.
pub fn simulate(
    scenario: &Scenario,
    controls: &TimeControls,
    formulation: Formulation,
) -> Result<Trajectory> {
    simulate_opts(scenario, controls, formulation, &SimOptions::default())
}

/// Full-control variant: custom record times and manufactured sources.
pub fn simulate_opts(
    scenario: &Scenario,
    controls: &TimeControls,
    formulation: Formulation,
    opts: &SimOptions<'_>,
) -> Result<Trajectory> {
    scenario.validate()?;
    if let RecordRule::Times(times) = opts.record {
        validate_record_times(times, controls.t_end)?;
    }
    match formulation {
        Formulation::U => run_u(scenario, controls, opts),
        Formulation::V => run_v(scenario, controls, opts),
    }
}

fn validate_record_times(times: &[f64], t_end: f64) -> Result<()> {
    if times.is_empty() || times[0] != 0.0 {
        return Err(Error::invalid("record times must start at exactly 0"));
    }
    if times[times.len() - 1] != t_end {
        return Err(Error::invalid(format!(
            "record times must end at t_end = {t_end}, got {}",
            times[times.len() - 1]
        )));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("record times must be strictly increasing"));
    }
    Ok(())
}

/// Shared bookkeeping of the two integration loops.
struct Clock<'a> {
    t: f64,
    t_end: f64,
    step: u64,
    max_steps: u64,
    stride: u64,
    record_times: Option<&'a [f64]>,
    next_record: usize,
}

impl<'a> Clock<'a> {
    fn new(controls: &TimeControls, record: &RecordRule<'a>) -> Self {
        let record_times = match record {
            RecordRule::Stride => None,
            RecordRule::Times(ts) => Some(*ts),
        };
        Clock {
            t: 0.0,
            t_end: controls.t_end,
            step: 0,
            max_steps: controls.max_steps,
            stride: controls.snapshot_stride,
            record_times,
            next_record: 1,
        }
    }

    fn running(&self) -> bool {
        self.t < self.t_end
    }

    /// Clips `dt` to land exactly on the next target time; returns
    /// `(dt, lands)`. Accumulated rounding of `t += dt` can put `t` on
    /// (or an ulp past) the target already, so a landing step may have
    /// zero width; that just records without advancing the fields.
    fn clip(&self, dt: f64) -> (f64, bool) {
        let target = match self.record_times {
            Some(ts) => ts[self.next_record.min(ts.len() - 1)],
            None => self.t_end,
        };
        let remaining = target - self.t;
        if dt >= remaining {
            (remaining.max(0.0), true)
        } else {
            (dt, false)
        }
    }

    /// Advances the clock; returns whether to record a snapshot.
    fn advance(&mut self, dt: f64, landed: bool) -> bool {
        self.step += 1;
        if landed {
            match self.record_times {
                Some(ts) => {
                    self.t = ts[self.next_record.min(ts.len() - 1)];
                    self.next_record += 1;
                    true
                }
                None => {
                    self.t = self.t_end;
                    true
                }
            }
        } else {
            self.t += dt;
            self.record_times.is_none() && self.step % self.stride == 0
        }
    }
}

fn run_u(scenario: &Scenario, controls: &TimeControls, opts: &SimOptions<'_>) -> Result<Trajectory> {
    let grid = &scenario.grid;
    let params = &scenario.params;
    let mut state = scenario.initial.clone();
    let centers = grid.cell_centers();

    let mut times = vec![0.0];
    let mut snaps = vec![state.clone()];
    let mut diss = vec![0.0];
    let mut steps = vec![0u64];
    let mut accum = 0.0;
    let mut clock = Clock::new(controls, &opts.record);

    while clock.running() {
        if clock.step >= clock.max_steps {
            return Err(Error::BudgetExceeded {
                max_steps: clock.max_steps,
                time: clock.t,
                partial: Box::new(Trajectory {
                    times,
                    snapshots: Snapshots::U(snaps),
                    dissipation_accum: diss,
                    steps,
                }),
            });
        }
        let (dt, lands) = clock.clip(stable_dt_u(&state, grid, params, controls));
        if !lands && !(dt > 0.0) {
            return Err(Error::Numerical {
                time: clock.t,
                reason: format!("non-positive step size {dt}"),
            });
        }
        accum += dt * viscous_dissipation_rate(&state, grid, params, controls);
        let src = opts.source.map(|s| eval_source(s, &centers, clock.t));
        state = step_u(
            &state,
            dt,
            grid,
            params,
            controls,
            src.as_ref().map(|(a, b)| (a.as_slice(), b.as_slice())),
            clock.t,
        )?;
        if clock.advance(dt, lands) {
            times.push(clock.t);
            snaps.push(state.clone());
            diss.push(accum);
            steps.push(clock.step);
        }
    }

    Ok(Trajectory { times, snapshots: Snapshots::U(snaps), dissipation_accum: diss, steps })
}

fn run_v(scenario: &Scenario, controls: &TimeControls, opts: &SimOptions<'_>) -> Result<Trajectory> {
    let grid = &scenario.grid;
    let params = &scenario.params;
    if !(params.alpha > 1.0) {
        return Err(Error::invalid(format!(
            "v-form runs require alpha > 1, got {}",
            params.alpha
        )));
    }
    let mut state = to_effective(&scenario.initial, grid, params, controls.density_floor)?;
    let centers = grid.cell_centers();

    let mut times = vec![0.0];
    let mut snaps = vec![state.clone()];
    let mut diss = vec![0.0];
    let mut steps = vec![0u64];
    let mut accum = 0.0;
    let mut clock = Clock::new(controls, &opts.record);

    while clock.running() {
        if clock.step >= clock.max_steps {
            return Err(Error::BudgetExceeded {
                max_steps: clock.max_steps,
                time: clock.t,
                partial: Box::new(Trajectory {
                    times,
                    snapshots: Snapshots::V(snaps),
                    dissipation_accum: diss,
                    steps,
                }),
            });
        }
        let (dt, lands) = clock.clip(stable_dt_v(&state, grid, params, controls));
        if !lands && !(dt > 0.0) {
            return Err(Error::Numerical {
                time: clock.t,
                reason: format!("non-positive step size {dt}"),
            });
        }
        accum += dt * bd_dissipation_rate(&state.rho, grid, params);
        let src = opts.source.map(|s| eval_source(s, &centers, clock.t));
        state = step_v(
            &state,
            dt,
            grid,
            params,
            controls,
            src.as_ref().map(|(a, b)| (a.as_slice(), b.as_slice())),
            clock.t,
        )?;
        if clock.advance(dt, lands) {
            times.push(clock.t);
            snaps.push(state.clone());
            diss.push(accum);
            steps.push(clock.step);
        }
    }

    Ok(Trajectory { times, snapshots: Snapshots::V(snaps), dissipation_accum: diss, steps })
}

fn eval_source(src: &dyn SourceTerm, centers: &[f64], t: f64) -> (Vec<f64>, Vec<f64>) {
    let mut a = Vec::with_capacity(centers.len());
    let mut b = Vec::with_capacity(centers.len());
    for &x in centers {
        let (sa, sb) = src.eval(x, t);
        a.push(sa);
        b.push(sb);
    }
    (a, b)
}
