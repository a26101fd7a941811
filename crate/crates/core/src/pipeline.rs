//! Drivers that compose solver runs into the studies the CLI exposes:
//! the weak-strong stability certificate, the perturbation-size sweep,
//! and the cross-formulation equivalence table.
//!
//! Runs that get compared are recorded on a shared uniform time grid so
//! that their snapshots line up exactly even though each run picks its
//! own adaptive step sizes.

use crate::entropy::{rel_entropy_total, wsu_check, StabilityReport};
use crate::error::{Error, Result};
use crate::model::{
    discrete_norm, FluidParams, Formulation, Grid1D, NormKind, TimeControls, Trajectory,
};
use crate::scenarios::{fine_grid_oracle, make_scenario, ScenarioSpec};
use crate::solver::{simulate_opts, uniform_times, RecordRule, SimOptions};
use crate::transform::to_primitive;

/// Documented default tolerance of the certificate:
/// `1e-6 + 0.1 H(0)`.
pub fn auto_tolerance(h0: f64) -> f64 {
    1e-6 + 0.1 * h0
}

/// Everything a certificate run produces.
#[derive(Debug, Clone)]
pub struct WsuRun {
    pub report: StabilityReport,
    pub reference: Trajectory,
    pub perturbed: Trajectory,
}

/// Runs the weak-strong stability certificate for a perturbed scenario:
/// the unperturbed base evolves as the strong reference (on a
/// `refinement`-times finer grid when `refinement > 1`, restricted
/// back), the perturbed scenario evolves on the given grid, and the
/// relative-entropy bound is checked at `n_snapshots + 1` shared times.
/// `tolerance = None` applies the `1e-6 + 0.1 H(0)` rule.
pub fn wsu_certificate(
    spec: &ScenarioSpec,
    grid: &Grid1D,
    params: &FluidParams,
    controls: &TimeControls,
    n_snapshots: usize,
    refinement: usize,
    tolerance: Option<f64>,
) -> Result<WsuRun> {
    if !matches!(spec, ScenarioSpec::Perturbed { .. }) {
        return Err(Error::invalid(
            "wsu_certificate needs a perturbed scenario (base + epsilon)",
        ));
    }
    let times = uniform_times(controls.t_end, n_snapshots);

    let base_scenario = make_scenario(spec.base_spec(), grid, params)?;
    let reference =
        fine_grid_oracle(&base_scenario, refinement, controls, Formulation::V, &times)?;

    let perturbed_scenario = make_scenario(spec, grid, params)?;
    let opts = SimOptions { record: RecordRule::Times(&times), source: None };
    let perturbed = simulate_opts(&perturbed_scenario, controls, Formulation::V, &opts)?;

    let h0 = rel_entropy_total(
        perturbed.state_v(0)?,
        reference.state_v(0)?,
        grid,
        params,
    )?;
    let tol = tolerance.unwrap_or_else(|| auto_tolerance(h0));
    let report = wsu_check(&perturbed, &reference, grid, params, tol)?;
    Ok(WsuRun { report, reference, perturbed })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub sup_h: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `ln sup_H` against `ln epsilon` over the
    /// rows with positive entries; NaN when fewer than two usable rows.
    pub exponent: f64,
}

/// Certificate runs over a list of perturbation sizes plus the fitted
/// scaling exponent of `sup_t H` versus epsilon.
pub fn sweep(
    spec: &ScenarioSpec,
    grid: &Grid1D,
    params: &FluidParams,
    controls: &TimeControls,
    n_snapshots: usize,
    refinement: usize,
    tolerance: Option<f64>,
    epsilons: &[f64],
) -> Result<SweepResult> {
    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let run = wsu_certificate(
            &spec.with_epsilon(eps)?,
            grid,
            params,
            controls,
            n_snapshots,
            refinement,
            tolerance,
        )?;
        rows.push(SweepRow { epsilon: eps, sup_h: run.report.sup_h, passed: run.report.passed });
    }
    let pairs: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.epsilon > 0.0 && r.sup_h > 0.0)
        .map(|r| (r.epsilon.ln(), r.sup_h.ln()))
        .collect();
    Ok(SweepResult { rows, exponent: fit_slope(&pairs) })
}

/// Least-squares slope of y against x.
pub fn fit_slope(pairs: &[(f64, f64)]) -> f64 {
    if pairs.len() < 2 {
        return f64::NAN;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(x, y) in pairs {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivLevel {
    pub cells: usize,
    pub err_rho: f64,
    pub err_velocity: f64,
    /// `sqrt(err_rho^2 + err_velocity^2)`.
    pub err_combined: f64,
    /// `err_combined(previous) / err_combined(this)`, absent on the
    /// first level.
    pub ratio: Option<f64>,
}

/// Integrates the same scenario in both formulations on a sequence of
/// grids (`base cells * 2^k`) and measures the L2 distance at `t_end`
/// between the u-form solution and the primitive recovery of the v-form
/// solution.
pub fn formulation_equivalence(
    spec: &ScenarioSpec,
    base_grid: &Grid1D,
    params: &FluidParams,
    controls: &TimeControls,
    levels: usize,
) -> Result<Vec<EquivLevel>> {
    if levels < 1 {
        return Err(Error::invalid("need at least 1 level"));
    }
    let times = [0.0, controls.t_end];
    let mut table: Vec<EquivLevel> = Vec::with_capacity(levels);
    for level in 0..levels {
        let grid = Grid1D::new(
            base_grid.length,
            base_grid.cells << level,
            base_grid.boundary,
        )?;
        let scenario = make_scenario(spec, &grid, params)?;
        let opts = SimOptions { record: RecordRule::Times(&times), source: None };
        let traj_u = simulate_opts(&scenario, controls, Formulation::U, &opts)?;
        let traj_v = simulate_opts(&scenario, controls, Formulation::V, &opts)?;
        let last_u = traj_u.state_u(traj_u.len() - 1)?;
        let last_v = to_primitive(
            traj_v.state_v(traj_v.len() - 1)?,
            &grid,
            params,
            controls.density_floor,
        )?;

        let d_rho: Vec<f64> = last_u
            .rho
            .iter()
            .zip(&last_v.rho)
            .map(|(a, b)| a - b)
            .collect();
        let u_u = last_u.velocity(controls.density_floor);
        let u_v = last_v.velocity(controls.density_floor);
        let d_u: Vec<f64> = u_u.iter().zip(&u_v).map(|(a, b)| a - b).collect();
        let err_rho = discrete_norm(&d_rho, &grid, NormKind::L2)?;
        let err_velocity = discrete_norm(&d_u, &grid, NormKind::L2)?;
        let err_combined = err_rho.hypot(err_velocity);
        let ratio = table.last().map(|p: &EquivLevel| p.err_combined / err_combined);
        table.push(EquivLevel { cells: grid.cells, err_rho, err_velocity, err_combined, ratio });
    }
    Ok(table)
}
