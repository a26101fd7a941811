//! Manufactured-solution verification.
//!
//! The manufactured pair is fixed so that convergence numbers are
//! reproducible across runs:
//!
//! `rho*(x,t) = 2 + sin(2 pi (x - t))`, `u*(x,t) = cos(2 pi x) exp(-t)`,
//!
//! positive and 1-periodic in `x`. The source terms are the residuals of
//! the chosen formulation's equations at `(rho*, u*)`, derived in closed
//! form; for the v-form the velocity equation is sourced in its
//! transport form `dv/dt + u dv/dx + (a gamma/(gamma-1)) d/dx
//! rho^(gamma-1) = s_v`, the same shape the stepper integrates.

use crate::error::{Error, Result};
use crate::model::{
    discrete_norm, FluidParams, Formulation, Grid1D, NormKind, StateU, TimeControls,
    DEFAULT_DENSITY_FLOOR,
};
use crate::num::powr;
use crate::solver::{simulate_opts, RecordRule, Scenario, SimOptions, SourceTerm};

use std::f64::consts::TAU;

/// The manufactured `(rho*, u*)` at a point.
pub fn mms_fields(x: f64, t: f64) -> (f64, f64) {
    let rho = 2.0 + (TAU * (x - t)).sin();
    let u = (TAU * x).cos() * (-t).exp();
    (rho, u)
}

/// Manufactured effective velocity `v* = u* + mu rho*^(alpha-2) drho*/dx`.
pub fn mms_effective_velocity(x: f64, t: f64, params: &FluidParams) -> f64 {
    let d = Derivs::at(x, t);
    d.u + params.mu * powr(d.rho, params.alpha - 2.0) * d.rho_x
}

struct Derivs {
    rho: f64,
    rho_t: f64,
    rho_x: f64,
    rho_xx: f64,
    rho_xt: f64,
    u: f64,
    u_t: f64,
    u_x: f64,
    u_xx: f64,
}

impl Derivs {
    fn at(x: f64, t: f64) -> Self {
        let theta = TAU * (x - t);
        let (s, c) = theta.sin_cos();
        let e = (-t).exp();
        let (sx, cx) = (TAU * x).sin_cos();
        Derivs {
            rho: 2.0 + s,
            rho_t: -TAU * c,
            rho_x: TAU * c,
            rho_xx: -TAU * TAU * s,
            rho_xt: TAU * TAU * s,
            u: cx * e,
            u_t: -cx * e,
            u_x: -TAU * sx * e,
            u_xx: -TAU * TAU * cx * e,
        }
    }
}

/// Closed-form residual of the chosen formulation at `(rho*, u*)`:
/// `(s_rho, s_mom)` for the u-form, `(s_rho, s_v)` for the v-form.
pub fn mms_sources(x: f64, t: f64, params: &FluidParams, formulation: Formulation) -> (f64, f64) {
    let d = Derivs::at(x, t);
    let (gamma, a, mu, alpha) = (params.gamma, params.a, params.mu, params.alpha);
    // Mass residual d/dt rho + d/dx (rho u); identical in both forms
    // because rho v - (mu(rho)/rho) drho/dx = rho u pointwise.
    let s_rho = d.rho_t + d.rho_x * d.u + d.rho * d.u_x;
    match formulation {
        Formulation::U => {
            let visc = mu
                * (alpha * powr(d.rho, alpha - 1.0) * d.rho_x * d.u_x
                    + powr(d.rho, alpha) * d.u_xx);
            let s_mom = d.rho_t * d.u
                + d.rho * d.u_t
                + d.rho_x * d.u * d.u
                + 2.0 * d.rho * d.u * d.u_x
                - visc
                + a * gamma * powr(d.rho, gamma - 1.0) * d.rho_x;
            (s_rho, s_mom)
        }
        Formulation::V => {
            // w = d/dx phi(rho*) = mu rho*^(alpha-2) drho*/dx.
            let w_t = mu
                * ((alpha - 2.0) * powr(d.rho, alpha - 3.0) * d.rho_t * d.rho_x
                    + powr(d.rho, alpha - 2.0) * d.rho_xt);
            let w_x = mu
                * ((alpha - 2.0) * powr(d.rho, alpha - 3.0) * d.rho_x * d.rho_x
                    + powr(d.rho, alpha - 2.0) * d.rho_xx);
            let v_t = d.u_t + w_t;
            let v_x = d.u_x + w_x;
            let s_v = v_t + d.u * v_x + a * gamma * powr(d.rho, gamma - 2.0) * d.rho_x;
            (s_rho, s_v)
        }
    }
}

/// [`SourceTerm`] adapter for the steppers.
pub struct MmsSource {
    pub params: FluidParams,
    pub formulation: Formulation,
}

impl SourceTerm for MmsSource {
    fn eval(&self, x: f64, t: f64) -> (f64, f64) {
        mms_sources(x, t, &self.params, self.formulation)
    }
}

/// The manufactured fields sampled as an initial state at `t = 0`.
pub fn mms_initial_state(grid: &Grid1D) -> Result<StateU> {
    let mut rho = Vec::with_capacity(grid.cells);
    let mut u = Vec::with_capacity(grid.cells);
    for i in 0..grid.cells {
        let (r, ui) = mms_fields(grid.cell_center(i), 0.0);
        rho.push(r);
        u.push(ui);
    }
    StateU::from_velocity(rho, &u, DEFAULT_DENSITY_FLOOR)
}

/// One row of the convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmsLevel {
    pub cells: usize,
    pub err_rho: f64,
    pub err_velocity: f64,
    /// `log2(e_prev / e_this)`, absent on the first level.
    pub order_rho: Option<f64>,
    pub order_velocity: Option<f64>,
}

/// Runs the manufactured problem on grids `base_cells * 2^k` for
/// `k = 0..levels` and reports the L2 errors at `t_end` against the
/// exact fields, plus observed orders between consecutive levels.
/// Requires the unit periodic box (the manufactured fields are
/// 1-periodic).
pub fn mms_convergence(
    levels: usize,
    base_cells: usize,
    controls: &TimeControls,
    params: &FluidParams,
    formulation: Formulation,
) -> Result<Vec<MmsLevel>> {
    if levels < 3 {
        return Err(Error::invalid(format!("need at least 3 levels, got {levels}")));
    }
    if !(controls.t_end > 0.0) {
        return Err(Error::invalid("mms_convergence needs t_end > 0"));
    }
    let mut table: Vec<MmsLevel> = Vec::with_capacity(levels);
    for level in 0..levels {
        let cells = base_cells << level;
        let (err_rho, err_velocity) = mms_run_error(cells, controls, params, formulation)?;
        let (order_rho, order_velocity) = match table.last() {
            Some(prev) => (
                Some((prev.err_rho / err_rho).log2()),
                Some((prev.err_velocity / err_velocity).log2()),
            ),
            None => (None, None),
        };
        table.push(MmsLevel { cells, err_rho, err_velocity, order_rho, order_velocity });
    }
    Ok(table)
}

/// L2 errors of one manufactured run at `t_end`: density error and
/// velocity error (`u` or `v` per formulation).
pub fn mms_run_error(
    cells: usize,
    controls: &TimeControls,
    params: &FluidParams,
    formulation: Formulation,
) -> Result<(f64, f64)> {
    let grid = Grid1D::new(1.0, cells, crate::model::BoundaryKind::Periodic)?;
    let scenario = Scenario {
        grid,
        params: *params,
        initial: mms_initial_state(&grid)?,
        label: "mms".into(),
        spec: None,
    };
    let source = MmsSource { params: *params, formulation };
    let times = [0.0, controls.t_end];
    let opts = SimOptions { record: RecordRule::Times(&times), source: Some(&source) };
    let traj = simulate_opts(&scenario, controls, formulation, &opts)?;
    let last = traj.len() - 1;
    let t = traj.times[last];

    let mut d_rho = Vec::with_capacity(cells);
    let mut d_vel = Vec::with_capacity(cells);
    match formulation {
        Formulation::U => {
            let state = traj.state_u(last)?;
            let u = state.velocity(controls.density_floor);
            for i in 0..cells {
                let x = grid.cell_center(i);
                let (r_exact, u_exact) = mms_fields(x, t);
                d_rho.push(state.rho[i] - r_exact);
                d_vel.push(u[i] - u_exact);
            }
        }
        Formulation::V => {
            let state = traj.state_v(last)?;
            for i in 0..cells {
                let x = grid.cell_center(i);
                let (r_exact, _) = mms_fields(x, t);
                d_rho.push(state.rho[i] - r_exact);
                d_vel.push(state.v[i] - mms_effective_velocity(x, t, params));
            }
        }
    }
    Ok((
        discrete_norm(&d_rho, &grid, NormKind::L2)?,
        discrete_norm(&d_vel, &grid, NormKind::L2)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(gamma: f64, a: f64, mu: f64, alpha: f64) -> FluidParams {
        FluidParams::new(gamma, a, mu, alpha, 0.1).unwrap()
    }

    #[test]
    fn fields_plug_in_values() {
        let (r, u) = mms_fields(0.0, 0.0);
        assert_eq!(r, 2.0);
        assert_eq!(u, 1.0);
        let (r, u) = mms_fields(0.25, 0.0);
        assert!((r - 3.0).abs() <= 1e-15);
        assert!(u.abs() <= 1e-15);
    }

    #[test]
    fn density_stays_above_one() {
        for i in 0..100 {
            for j in 0..20 {
                let (r, _) = mms_fields(i as f64 / 100.0, j as f64 / 10.0);
                assert!(r >= 1.0);
            }
        }
    }

    #[test]
    fn sources_periodic_in_x() {
        let p = params(2.0, 1.0, 1.0, 2.0);
        for form in [Formulation::U, Formulation::V] {
            for t in [0.0, 0.17, 0.5] {
                let (a0, b0) = mms_sources(0.0, t, &p, form);
                let (a1, b1) = mms_sources(1.0, t, &p, form);
                assert!((a0 - a1).abs() <= 1e-12 * a0.abs().max(1.0), "{form} s_rho");
                assert!((b0 - b1).abs() <= 1e-12 * b0.abs().max(1.0), "{form} s_2");
            }
        }
    }

    #[test]
    fn mass_residual_identical_across_formulations() {
        let p = params(1.7, 0.8, 0.9, 2.3);
        for &(x, t) in &[(0.13, 0.0), (0.77, 0.4), (0.5, 1.1)] {
            let (su, _) = mms_sources(x, t, &p, Formulation::U);
            let (sv, _) = mms_sources(x, t, &p, Formulation::V);
            assert_eq!(su, sv);
        }
    }

    #[test]
    fn sources_are_required_for_convergence() {
        // Without sources the manufactured fields are not a solution:
        // the run drifts O(1) away while the sourced run tracks them.
        let p = params(2.0, 1.0, 1.0, 2.0);
        let controls = TimeControls::new(0.05).unwrap();
        let n = 100;
        let (with_rho, _) = mms_run_error(n, &controls, &p, Formulation::U).unwrap();

        let grid = Grid1D::new(1.0, n, crate::model::BoundaryKind::Periodic).unwrap();
        let scenario = Scenario {
            grid,
            params: p,
            initial: mms_initial_state(&grid).unwrap(),
            label: "mms".into(),
            spec: None,
        };
        let times = [0.0, controls.t_end];
        let opts = SimOptions { record: RecordRule::Times(&times), source: None };
        let traj = simulate_opts(&scenario, &controls, Formulation::U, &opts).unwrap();
        let state = traj.state_u(traj.len() - 1).unwrap();
        let d: Vec<f64> = (0..n)
            .map(|i| state.rho[i] - mms_fields(grid.cell_center(i), controls.t_end).0)
            .collect();
        let without_rho = discrete_norm(&d, &grid, NormKind::L2).unwrap();
        assert!(
            without_rho > 10.0 * with_rho,
            "sourced {with_rho} vs unsourced {without_rho}"
        );
    }

    #[test]
    fn quick_convergence_smoke() {
        let p = params(2.0, 1.0, 1.0, 2.0);
        let controls = TimeControls::new(0.02).unwrap();
        let table = mms_convergence(3, 50, &controls, &p, Formulation::U).unwrap();
        assert_eq!(table.len(), 3);
        assert!(table.windows(2).all(|w| w[1].err_rho < w[0].err_rho));
        for row in &table[1..] {
            assert!(row.order_rho.unwrap() > 0.5, "{row:?}");
        }
    }

    #[test]
    fn convergence_rejects_too_few_levels() {
        let p = params(2.0, 1.0, 1.0, 2.0);
        let controls = TimeControls::new(0.02).unwrap();
        assert!(mms_convergence(2, 50, &controls, &p, Formulation::U).is_err());
    }
}
