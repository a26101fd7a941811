//! C ABI for the ns1d solver and entropy diagnostics.
//!
//! Conventions: every fallible call returns an [`Ns1dStatus`] and writes
//! its result through an out-pointer; `NS1D_STATUS_OK` is zero. Handles
//! (`Ns1dScenario`, `Ns1dTrajectory`, `Ns1dStability`) are opaque and
//! must be released with the matching `_free` function. A textual
//! description of the most recent error on the calling thread is
//! available from `ns1d_last_error()` until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ns1d_core::entropy::{energy_u, energy_v, rel_entropy_total, wsu_check, StabilityReport};
use ns1d_core::error::Error;
use ns1d_core::model::{
    total_mass, BoundaryKind, FaceAverage, FluidParams, Formulation, Grid1D, TimeControls,
    Trajectory,
};
use ns1d_core::pipeline::auto_tolerance;
use ns1d_core::scenarios::{make_scenario, PerturbTarget, ScenarioSpec};
use ns1d_core::solver::{simulate, simulate_opts, RecordRule, Scenario, SimOptions};

/// Call outcome. Zero means success; anything else is an error class,
/// with details from `ns1d_last_error()`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ns1dStatus {
    Ok = 0,
    InvalidArgument = 1,
    Domain = 2,
    UnsupportedRegime = 3,
    StepFailure = 4,
    Numerical = 5,
    Budget = 6,
    Mismatch = 7,
    NotStrong = 8,
    Parse = 9,
    Io = 10,
    NullPointer = 11,
    Panic = 12,
}

/// Fluid constants: `P(rho) = a rho^gamma`, `mu(rho) = mu rho^alpha`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct Ns1dParams {
    pub gamma: f64,
    pub a: f64,
    pub mu: f64,
    pub alpha: f64,
    pub delta: f64,
}

/// Uniform periodic/truncated box; `boundary`: 0 periodic, 1 extrapolate.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct Ns1dGrid {
    pub length: f64,
    pub cells: usize,
    pub boundary: i32,
}

/// Time-stepping policy; `face_average`: 0 arithmetic, 1 harmonic.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct Ns1dControls {
    pub t_end: f64,
    pub cfl_advective: f64,
    pub cfl_diffusive: f64,
    pub max_steps: u64,
    pub snapshot_stride: u64,
    pub density_floor: f64,
    pub face_average: i32,
}

/// Energy accounting of one snapshot.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct Ns1dEnergy {
    pub time: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub dissipation_accum: f64,
    pub total: f64,
}

/// Opaque initial-value problem handle.
pub struct Ns1dScenario {
    scenario: Scenario,
}

/// Opaque trajectory handle; remembers its grid and parameters so the
/// diagnostics need no extra arguments.
pub struct Ns1dTrajectory {
    traj: Trajectory,
    grid: Grid1D,
    params: FluidParams,
    floor: f64,
}

/// Opaque stability-report handle.
pub struct Ns1dStability {
    report: StabilityReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_last_error(msg: String) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

/// Message of the most recent error on this thread. The pointer stays
/// valid until the next failing ns1d call on the same thread.
#[no_mangle]
pub extern "C" fn ns1d_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

fn status_of(e: &Error) -> Ns1dStatus {
    match e {
        Error::InvalidArgument(_) => Ns1dStatus::InvalidArgument,
        Error::Domain(_) => Ns1dStatus::Domain,
        Error::UnsupportedRegime(_) => Ns1dStatus::UnsupportedRegime,
        Error::StepFailure { .. } => Ns1dStatus::StepFailure,
        Error::Numerical { .. } => Ns1dStatus::Numerical,
        Error::BudgetExceeded { .. } => Ns1dStatus::Budget,
        Error::Mismatch(_) => Ns1dStatus::Mismatch,
        Error::NotStrong(_) => Ns1dStatus::NotStrong,
        Error::Parse { .. } => Ns1dStatus::Parse,
        Error::Io { .. } => Ns1dStatus::Io,
    }
}

fn fail(e: Error) -> Ns1dStatus {
    let status = status_of(&e);
    set_last_error(e.to_string());
    status
}

/// Runs `f`, stores the boxed result through `out`, and converts errors
/// and panics into statuses.
fn capture<T>(out: *mut *mut T, f: impl FnOnce() -> Result<T, Error>) -> Ns1dStatus {
    if out.is_null() {
        set_last_error("null output pointer".into());
        return Ns1dStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(value)) => {
            unsafe { *out = Box::into_raw(Box::new(value)) };
            Ns1dStatus::Ok
        }
        Ok(Err(e)) => fail(e),
        Err(_) => {
            set_last_error("internal panic".into());
            Ns1dStatus::Panic
        }
    }
}

fn convert_params(p: &Ns1dParams) -> Result<FluidParams, Error> {
    FluidParams::new(p.gamma, p.a, p.mu, p.alpha, p.delta)
}

fn convert_grid(g: &Ns1dGrid) -> Result<Grid1D, Error> {
    let boundary = match g.boundary {
        0 => BoundaryKind::Periodic,
        1 => BoundaryKind::Extrapolate,
        other => {
            return Err(Error::InvalidArgument(format!(
                "boundary code {other} (expected 0 periodic, 1 extrapolate)"
            )))
        }
    };
    Grid1D::new(g.length, g.cells, boundary)
}

fn convert_controls(c: &Ns1dControls) -> Result<TimeControls, Error> {
    let face_average = match c.face_average {
        0 => FaceAverage::Arithmetic,
        1 => FaceAverage::Harmonic,
        other => {
            return Err(Error::InvalidArgument(format!(
                "face_average code {other} (expected 0 arithmetic, 1 harmonic)"
            )))
        }
    };
    TimeControls::checked(
        c.t_end,
        c.cfl_advective,
        c.cfl_diffusive,
        c.max_steps,
        c.snapshot_stride,
        c.density_floor,
        face_average,
    )
}

fn convert_formulation(code: i32) -> Result<Formulation, Error> {
    match code {
        0 => Ok(Formulation::U),
        1 => Ok(Formulation::V),
        other => Err(Error::InvalidArgument(format!(
            "formulation code {other} (expected 0 for u, 1 for v)"
        ))),
    }
}

unsafe fn deref<'a, T>(ptr: *const T) -> Result<&'a T, Error> {
    ptr.as_ref()
        .ok_or_else(|| Error::InvalidArgument("null handle".into()))
}

fn fill(buf: *mut f64, len: usize, data: &[f64]) -> Result<(), Error> {
    if buf.is_null() {
        return Err(Error::InvalidArgument("null buffer".into()));
    }
    if len != data.len() {
        return Err(Error::Mismatch(format!(
            "buffer length {len} does not match data length {}",
            data.len()
        )));
    }
    unsafe { std::ptr::copy_nonoverlapping(data.as_ptr(), buf, data.len()) };
    Ok(())
}

/// Compactly supported density cap with optional interior velocity.
///
/// # Safety
/// `out` must be a valid pointer; the returned handle must be released
/// with `ns1d_scenario_free`.
#[no_mangle]
pub unsafe extern "C" fn ns1d_scenario_vacuum_bump(
    params: Ns1dParams,
    grid: Ns1dGrid,
    center: f64,
    width: f64,
    amplitude: f64,
    u0_amplitude: f64,
    out: *mut *mut Ns1dScenario,
) -> Ns1dStatus {
    capture(out, || {
        let params = convert_params(&params)?;
        let grid = convert_grid(&grid)?;
        let spec = ScenarioSpec::VacuumBump { center, width, amplitude, u0_amplitude };
        Ok(Ns1dScenario { scenario: make_scenario(&spec, &grid, &params)? })
    })
}

/// Strictly positive periodic density and velocity profiles.
///
/// # Safety
/// See `ns1d_scenario_vacuum_bump`.
#[no_mangle]
pub unsafe extern "C" fn ns1d_scenario_smooth_periodic(
    params: Ns1dParams,
    grid: Ns1dGrid,
    rho_min: f64,
    amplitude: f64,
    wavenumber: u32,
    u0_amplitude: f64,
    out: *mut *mut Ns1dScenario,
) -> Ns1dStatus {
    capture(out, || {
        let params = convert_params(&params)?;
        let grid = convert_grid(&grid)?;
        let spec =
            ScenarioSpec::SmoothPeriodic { rho_min, amplitude, wavenumber, u0_amplitude };
        Ok(Ns1dScenario { scenario: make_scenario(&spec, &grid, &params)? })
    })
}

/// Sinusoidal perturbation of a generated scenario;
/// `target`: 0 velocity, 1 density, 2 both.
///
/// # Safety
/// `base` must be a live scenario handle; see `ns1d_scenario_vacuum_bump`.
#[no_mangle]
pub unsafe extern "C" fn ns1d_scenario_perturb(
    base: *const Ns1dScenario,
    epsilon: f64,
    target: i32,
    wavenumber: u32,
    out: *mut *mut Ns1dScenario,
) -> Ns1dStatus {
    capture(out, || {
        let base = deref(base)?;
        let target = match target {
            0 => PerturbTarget::Velocity,
            1 => PerturbTarget::Density,
            2 => PerturbTarget::Both,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "perturb target code {other} (expected 0, 1 or 2)"
                )))
            }
        };
        let base_spec = base.scenario.spec.clone().ok_or_else(|| {
            Error::InvalidArgument("base scenario carries no closed-form profile".into())
        })?;
        let spec = ScenarioSpec::Perturbed {
            base: Box::new(base_spec.base_spec().clone()),
            epsilon,
            target,
            wavenumber,
        };
        Ok(Ns1dScenario {
            scenario: make_scenario(&spec, &base.scenario.grid, &base.scenario.params)?,
        })
    })
}

/// # Safety
/// `scenario` must come from a `ns1d_scenario_*` constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn ns1d_scenario_free(scenario: *mut Ns1dScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Integrates a scenario; `formulation`: 0 for the primitive u-form,
/// 1 for the effective-velocity v-form.
///
/// # Safety
/// `scenario` must be a live handle; the trajectory must be released
/// with `ns1d_trajectory_free`.
#[no_mangle]
pub unsafe extern "C" fn ns1d_simulate(
    scenario: *const Ns1dScenario,
    controls: Ns1dControls,
    formulation: i32,
    out: *mut *mut Ns1dTrajectory,
) -> Ns1dStatus {
    capture(out, || {
        let sc = deref(scenario)?;
        let controls = convert_controls(&controls)?;
        let formulation = convert_formulation(formulation)?;
        let traj = simulate(&sc.scenario, &controls, formulation)?;
        Ok(Ns1dTrajectory {
            traj,
            grid: sc.scenario.grid,
            params: sc.scenario.params,
            floor: controls.density_floor,
        })
    })
}

/// Like `ns1d_simulate`, but records exactly at the given times
/// (strictly increasing, starting at 0, ending at `controls.t_end`).
/// Two runs recorded on the same times can be compared snapshot by
/// snapshot.
///
/// # Safety
/// `times` must point to `n_times` doubles; see `ns1d_simulate`.
#[no_mangle]
pub unsafe extern "C" fn ns1d_simulate_at_times(
    scenario: *const Ns1dScenario,
    controls: Ns1dControls,
    formulation: i32,
    times: *const f64,
    n_times: usize,
    out: *mut *mut Ns1dTrajectory,
) -> Ns1dStatus {
    capture(out, || {
        let sc = deref(scenario)?;
        let controls = convert_controls(&controls)?;
        let formulation = convert_formulation(formulation)?;
        if times.is_null() {
            return Err(Error::InvalidArgument("null times pointer".into()));
        }
        let times = std::slice::from_raw_parts(times, n_times);
        let opts = SimOptions { record: RecordRule::Times(times), source: None };
        let traj = simulate_opts(&sc.scenario, &controls, formulation, &opts)?;
        Ok(Ns1dTrajectory {
            traj,
            grid: sc.scenario.grid,
            params: sc.scenario.params,
            floor: controls.density_floor,
        })
    })
}

/// # Safety
/// `traj` must come from a simulate call or be null.
#[no_mangle]
pub unsafe extern "C" fn ns1d_trajectory_free(traj: *mut Ns1dTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of recorded snapshots; 0 for a null handle.
///
/// # Safety
/// `traj` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ns1d_trajectory_snapshots(traj: *const Ns1dTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.traj.len())
}

/// Number of grid cells; 0 for a null handle.
///
/// # Safety
/// `traj` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ns1d_trajectory_cells(traj: *const Ns1dTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.grid.cells)
}

/// Snapshot times into `buf` (length = snapshot count).
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ns1d_trajectory_times(
    traj: *const Ns1dTrajectory,
    buf: *mut f64,
    len: usize,
) -> Ns1dStatus {
    match deref(traj).and_then(|t| fill(buf, len, &t.traj.times)) {
        Ok(()) => Ns1dStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Density field of snapshot `k` into `buf` (length = cell count).
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ns1d_trajectory_rho(
    traj: *const Ns1dTrajectory,
    k: usize,
    buf: *mut f64,
    len: usize,
) -> Ns1dStatus {
    let run = || -> Result<(), Error> {
        let t = deref(traj)?;
        fill(buf, len, t.traj.rho_at(k)?)
    };
    match run() {
        Ok(()) => Ns1dStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Velocity field of snapshot `k`: the recovered `u` for u-form runs,
/// `v` for v-form runs.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ns1d_trajectory_velocity(
    traj: *const Ns1dTrajectory,
    k: usize,
    buf: *mut f64,
    len: usize,
) -> Ns1dStatus {
    let run = || -> Result<(), Error> {
        let t = deref(traj)?;
        match t.traj.formulation() {
            Formulation::U => fill(buf, len, &t.traj.state_u(k)?.velocity(t.floor)),
            Formulation::V => fill(buf, len, &t.traj.state_v(k)?.v),
        }
    };
    match run() {
        Ok(()) => Ns1dStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Energy report of snapshot `k` (u-form energy or BD energy per the
/// trajectory's formulation).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ns1d_trajectory_energy(
    traj: *const Ns1dTrajectory,
    k: usize,
    out: *mut Ns1dEnergy,
) -> Ns1dStatus {
    let run = || -> Result<(), Error> {
        let t = deref(traj)?;
        if out.is_null() {
            return Err(Error::InvalidArgument("null output pointer".into()));
        }
        let e = match t.traj.formulation() {
            Formulation::U => energy_u(&t.traj, k, &t.grid, &t.params, t.floor)?,
            Formulation::V => energy_v(&t.traj, k, &t.grid, &t.params)?,
        };
        *out = Ns1dEnergy {
            time: e.time,
            kinetic: e.kinetic,
            potential: e.potential,
            dissipation_accum: e.dissipation_accum,
            total: e.total,
        };
        Ok(())
    };
    match run() {
        Ok(()) => Ns1dStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Total mass of snapshot `k`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ns1d_trajectory_mass(
    traj: *const Ns1dTrajectory,
    k: usize,
    out: *mut f64,
) -> Ns1dStatus {
    let run = || -> Result<(), Error> {
        let t = deref(traj)?;
        if out.is_null() {
            return Err(Error::InvalidArgument("null output pointer".into()));
        }
        *out = total_mass(t.traj.rho_at(k)?, &t.grid)?;
        Ok(())
    };
    match run() {
        Ok(()) => Ns1dStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Relative entropy between snapshot `k` of two v-form trajectories.
///
/// # Safety
/// Both handles must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ns1d_relative_entropy(
    traj: *const Ns1dTrajectory,
    reference: *const Ns1dTrajectory,
    k: usize,
    out: *mut f64,
) -> Ns1dStatus {
    let run = || -> Result<(), Error> {
        let t = deref(traj)?;
        let r = deref(reference)?;
        if out.is_null() {
            return Err(Error::InvalidArgument("null output pointer".into()));
        }
        *out = rel_entropy_total(t.traj.state_v(k)?, r.traj.state_v(k)?, &t.grid, &t.params)?;
        Ok(())
    };
    match run() {
        Ok(()) => Ns1dStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Weak-strong stability certificate of `traj` against `reference`
/// (both v-form, same grid and snapshot times). A negative `tolerance`
/// applies the default `1e-6 + 0.1 H(0)` rule.
///
/// # Safety
/// Handles must be live; the report must be released with
/// `ns1d_stability_free`.
#[no_mangle]
pub unsafe extern "C" fn ns1d_wsu_check(
    traj: *const Ns1dTrajectory,
    reference: *const Ns1dTrajectory,
    tolerance: f64,
    out: *mut *mut Ns1dStability,
) -> Ns1dStatus {
    capture(out, || {
        let t = deref(traj)?;
        let r = deref(reference)?;
        if t.grid != r.grid {
            return Err(Error::Mismatch("trajectories live on different grids".into()));
        }
        let tol = if tolerance >= 0.0 {
            tolerance
        } else {
            let h0 =
                rel_entropy_total(t.traj.state_v(0)?, r.traj.state_v(0)?, &t.grid, &t.params)?;
            auto_tolerance(h0)
        };
        Ok(Ns1dStability { report: wsu_check(&t.traj, &r.traj, &t.grid, &t.params, tol)? })
    })
}

/// # Safety
/// `report` must come from `ns1d_wsu_check` or be null.
#[no_mangle]
pub unsafe extern "C" fn ns1d_stability_free(report: *mut Ns1dStability) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// 1 when the certificate held at every snapshot, else 0.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ns1d_stability_passed(report: *const Ns1dStability) -> i32 {
    report.as_ref().map_or(0, |r| r.report.passed as i32)
}

/// Number of snapshots in the report.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ns1d_stability_len(report: *const Ns1dStability) -> usize {
    report.as_ref().map_or(0, |r| r.report.times.len())
}

/// `sup_t H` over the run; NaN for a null handle.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ns1d_stability_sup_h(report: *const Ns1dStability) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.report.sup_h)
}

/// Series selector for `ns1d_stability_series`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ns1dStabilitySeries {
    Times = 0,
    RelEntropy = 1,
    Dissipation = 2,
    Lambda = 3,
    Bound = 4,
    Margin = 5,
}

/// Copies one column of the stability report into `buf`.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ns1d_stability_series(
    report: *const Ns1dStability,
    series: Ns1dStabilitySeries,
    buf: *mut f64,
    len: usize,
) -> Ns1dStatus {
    let run = || -> Result<(), Error> {
        let r = deref(report)?;
        let data = match series {
            Ns1dStabilitySeries::Times => &r.report.times,
            Ns1dStabilitySeries::RelEntropy => &r.report.h,
            Ns1dStabilitySeries::Dissipation => &r.report.d,
            Ns1dStabilitySeries::Lambda => &r.report.lambda,
            Ns1dStabilitySeries::Bound => &r.report.bound,
            Ns1dStabilitySeries::Margin => &r.report.margin,
        };
        fill(buf, len, data)
    };
    match run() {
        Ok(()) => Ns1dStatus::Ok,
        Err(e) => fail(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;

    fn params() -> Ns1dParams {
        Ns1dParams { gamma: 2.0, a: 1.0, mu: 0.3, alpha: 2.0, delta: 0.1 }
    }

    fn grid(cells: usize) -> Ns1dGrid {
        Ns1dGrid { length: 1.0, cells, boundary: 0 }
    }

    fn controls(t_end: f64) -> Ns1dControls {
        Ns1dControls {
            t_end,
            cfl_advective: 0.45,
            cfl_diffusive: 0.25,
            max_steps: 10_000_000,
            snapshot_stride: 50,
            density_floor: 1e-12,
            face_average: 0,
        }
    }

    fn last_error() -> String {
        unsafe { CStr::from_ptr(ns1d_last_error()) }
            .to_string_lossy()
            .into_owned()
    }

    #[test]
    fn scenario_simulate_and_read_back() {
        unsafe {
            let mut sc: *mut Ns1dScenario = std::ptr::null_mut();
            let st = ns1d_scenario_smooth_periodic(params(), grid(64), 1.0, 0.2, 1, 0.1, &mut sc);
            assert_eq!(st, Ns1dStatus::Ok, "{}", last_error());

            let mut traj: *mut Ns1dTrajectory = std::ptr::null_mut();
            let st = ns1d_simulate(sc, controls(0.01), 0, &mut traj);
            assert_eq!(st, Ns1dStatus::Ok, "{}", last_error());

            let n = ns1d_trajectory_snapshots(traj);
            assert!(n >= 2);
            assert_eq!(ns1d_trajectory_cells(traj), 64);

            let mut times = vec![0.0; n];
            assert_eq!(ns1d_trajectory_times(traj, times.as_mut_ptr(), n), Ns1dStatus::Ok);
            assert_eq!(times[0], 0.0);
            assert_eq!(times[n - 1], 0.01);

            let mut rho = vec![0.0; 64];
            assert_eq!(ns1d_trajectory_rho(traj, n - 1, rho.as_mut_ptr(), 64), Ns1dStatus::Ok);
            assert!(rho.iter().all(|&r| r > 0.0));

            let mut vel = vec![0.0; 64];
            assert_eq!(
                ns1d_trajectory_velocity(traj, n - 1, vel.as_mut_ptr(), 64),
                Ns1dStatus::Ok
            );
            assert!(vel.iter().all(|x| x.is_finite()));

            let mut e = Ns1dEnergy { time: 0.0, kinetic: 0.0, potential: 0.0, dissipation_accum: 0.0, total: 0.0 };
            assert_eq!(ns1d_trajectory_energy(traj, 0, &mut e), Ns1dStatus::Ok);
            assert!(e.total > 0.0);

            let mut m0 = 0.0;
            let mut m1 = 0.0;
            assert_eq!(ns1d_trajectory_mass(traj, 0, &mut m0), Ns1dStatus::Ok);
            assert_eq!(ns1d_trajectory_mass(traj, n - 1, &mut m1), Ns1dStatus::Ok);
            assert!((m1 - m0).abs() <= 1e-12 * m0);

            ns1d_trajectory_free(traj);
            ns1d_scenario_free(sc);
        }
    }

    #[test]
    fn wsu_certificate_through_ffi() {
        unsafe {
            let mut base: *mut Ns1dScenario = std::ptr::null_mut();
            assert_eq!(
                ns1d_scenario_smooth_periodic(params(), grid(64), 1.0, 0.1, 1, 0.1, &mut base),
                Ns1dStatus::Ok
            );
            let mut pert: *mut Ns1dScenario = std::ptr::null_mut();
            assert_eq!(
                ns1d_scenario_perturb(base, 1e-2, 0, 1, &mut pert),
                Ns1dStatus::Ok,
                "{}",
                last_error()
            );

            let times: Vec<f64> = (0..=8).map(|k| 0.02 * k as f64 / 8.0).collect();
            let mut t_ref: *mut Ns1dTrajectory = std::ptr::null_mut();
            let mut t_pert: *mut Ns1dTrajectory = std::ptr::null_mut();
            assert_eq!(
                ns1d_simulate_at_times(base, controls(0.02), 1, times.as_ptr(), times.len(), &mut t_ref),
                Ns1dStatus::Ok,
                "{}",
                last_error()
            );
            assert_eq!(
                ns1d_simulate_at_times(pert, controls(0.02), 1, times.as_ptr(), times.len(), &mut t_pert),
                Ns1dStatus::Ok
            );

            let mut rep: *mut Ns1dStability = std::ptr::null_mut();
            assert_eq!(ns1d_wsu_check(t_pert, t_ref, -1.0, &mut rep), Ns1dStatus::Ok, "{}", last_error());
            assert_eq!(ns1d_stability_passed(rep), 1);
            assert_eq!(ns1d_stability_len(rep), times.len());
            assert!(ns1d_stability_sup_h(rep) > 0.0);

            let mut h = vec![0.0; times.len()];
            assert_eq!(
                ns1d_stability_series(rep, Ns1dStabilitySeries::RelEntropy, h.as_mut_ptr(), h.len()),
                Ns1dStatus::Ok
            );
            assert!(h.iter().all(|&x| x >= 0.0));

            let mut h0 = 0.0;
            assert_eq!(ns1d_relative_entropy(t_pert, t_ref, 0, &mut h0), Ns1dStatus::Ok);
            assert_eq!(h0, h[0]);

            ns1d_stability_free(rep);
            ns1d_trajectory_free(t_ref);
            ns1d_trajectory_free(t_pert);
            ns1d_scenario_free(pert);
            ns1d_scenario_free(base);
        }
    }

    #[test]
    fn error_paths_set_status_and_message() {
        unsafe {
            // Invalid gamma.
            let mut sc: *mut Ns1dScenario = std::ptr::null_mut();
            let bad = Ns1dParams { gamma: 0.9, ..params() };
            let st = ns1d_scenario_smooth_periodic(bad, grid(64), 1.0, 0.2, 1, 0.0, &mut sc);
            assert_eq!(st, Ns1dStatus::InvalidArgument);
            assert!(last_error().contains("gamma"));

            // Null output pointer.
            let st = ns1d_scenario_smooth_periodic(
                params(),
                grid(64),
                1.0,
                0.2,
                1,
                0.0,
                std::ptr::null_mut(),
            );
            assert_eq!(st, Ns1dStatus::NullPointer);

            // Null handle.
            assert_eq!(ns1d_trajectory_snapshots(std::ptr::null()), 0);
            let mut m = 0.0;
            assert_eq!(
                ns1d_trajectory_mass(std::ptr::null(), 0, &mut m),
                Ns1dStatus::InvalidArgument
            );

            // v-form stepping requires alpha > 1.
            let mut sc2: *mut Ns1dScenario = std::ptr::null_mut();
            let p = Ns1dParams { alpha: 0.5, ..params() };
            assert_eq!(
                ns1d_scenario_smooth_periodic(p, grid(64), 1.0, 0.2, 1, 0.0, &mut sc2),
                Ns1dStatus::Ok
            );
            let mut traj: *mut Ns1dTrajectory = std::ptr::null_mut();
            let st = ns1d_simulate(sc2, controls(0.01), 1, &mut traj);
            assert_eq!(st, Ns1dStatus::InvalidArgument, "{}", last_error());
            ns1d_scenario_free(sc2);
        }
    }

    #[test]
    fn wrong_codes_are_rejected() {
        unsafe {
            let mut sc: *mut Ns1dScenario = std::ptr::null_mut();
            assert_eq!(
                ns1d_scenario_smooth_periodic(
                    params(),
                    Ns1dGrid { boundary: 7, ..grid(64) },
                    1.0,
                    0.2,
                    1,
                    0.0,
                    &mut sc
                ),
                Ns1dStatus::InvalidArgument
            );
            assert_eq!(
                ns1d_scenario_smooth_periodic(params(), grid(64), 1.0, 0.2, 1, 0.0, &mut sc),
                Ns1dStatus::Ok
            );
            let mut traj: *mut Ns1dTrajectory = std::ptr::null_mut();
            assert_eq!(
                ns1d_simulate(sc, controls(0.01), 5, &mut traj),
                Ns1dStatus::InvalidArgument
            );
            ns1d_scenario_free(sc);
        }
    }
}
