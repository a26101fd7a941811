//! Energy functionals and the relative-entropy stability machinery.
//!
//! For the primitive form the energy is
//! `E(rho,u) = int [ rho u^2 / 2 + a rho^gamma / (gamma-1) ] dx
//!           + int_0^t int mu(rho) |du/dx|^2 dx ds`;
//! the effective form carries the BD-type energy with `v` in place of
//! `u` and the density-gradient dissipation
//! `a mu gamma int int rho^(gamma+alpha-3) |drho/dx|^2` (labelled
//! `bd_dissipation` in human-readable output).
//!
//! Distance to a reference solution `(rho_bar, v_bar)` is measured by
//! the relative entropy
//!
//! `H = || sqrt(rho) (v - v_bar) ||_L2^2
//!    + a (gamma/(gamma-1)) || F(rho_bar, rho - rho_bar) ||_L1`,
//!
//! where `F(rho_bar, R) = (R+rho_bar)^gamma / gamma
//!                      - rho_bar^(gamma-1) R - rho_bar^gamma / gamma`
//! is the convexity remainder of the pressure potential. Along two
//! solutions of the v-form system (alpha = gamma), H obeys
//! `dH/dt + D <= lambda(t) H` with the dissipation distance
//!
//! `D = a mu gamma || rho^(gamma-3/2) drho/dx
//!                 - sqrt(rho) rho_bar^(gamma-2) drho_bar/dx ||_L2^2`
//!
//! and the Gronwall rate
//!
//! `lambda = gamma ||du_bar/dx||_inf + ||dv_bar/dx||_inf
//!         + (mu / (2 a gamma)) ||dv_bar/dx||_inf^2`,
//!
//! obtained by Hoelder bounds on the two forcing terms and a Young
//! absorption of the cross term into half of D. The certificate checked
//! by [`wsu_check`] is `H(t_k) <= H(0) exp(sum lambda dt) + tol` at
//! every snapshot.

use crate::error::{Error, Result};
use crate::model::{
    discrete_norm, FluidParams, Formulation, Grid1D, NormKind, StateV, Trajectory,
};
use crate::num::powr;
use crate::transform::{centered_grad, phi_grad};

/// Energy accounting of a single snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub time: f64,
    /// `h sum rho w^2 / 2` with `w` = `u` or `v`.
    pub kinetic: f64,
    /// `a h sum rho^gamma / (gamma-1)`.
    pub potential: f64,
    /// Time-integrated dissipation up to this snapshot.
    pub dissipation_accum: f64,
    pub total: f64,
}

/// Per-snapshot relative-entropy certificate against a strong reference.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub times: Vec<f64>,
    /// Relative entropy H(t_k).
    pub h: Vec<f64>,
    /// Instantaneous dissipation distance D(t_k).
    pub d: Vec<f64>,
    /// Gronwall rate lambda(t_k) from the reference gradients.
    pub lambda: Vec<f64>,
    /// `H(0) exp(sum_{j<k} lambda_j dt_j)` (left-endpoint rule).
    pub bound: Vec<f64>,
    /// `bound - h`, per snapshot.
    pub margin: Vec<f64>,
    pub passed: bool,
    pub tolerance_used: f64,
    pub sup_h: f64,
    /// Strong-solution monitors: `sum ||du_bar/dx||_inf dt`,
    /// `sum ||dv_bar/dx||_inf dt`, and `sup_t ||u_bar||_inf`.
    pub u_grad_l1t: f64,
    pub v_grad_l1t: f64,
    pub u_sup: f64,
}

fn require_bd_regime(params: &FluidParams) -> Result<()> {
    if !params.is_bd_regime() {
        return Err(Error::UnsupportedRegime(format!(
            "diagnostics require alpha = gamma, got alpha = {}, gamma = {}",
            params.alpha, params.gamma
        )));
    }
    Ok(())
}

/// u-form energy of snapshot `k`.
pub fn energy_u(
    traj: &Trajectory,
    k: usize,
    grid: &Grid1D,
    params: &FluidParams,
    floor: f64,
) -> Result<EnergyReport> {
    if traj.formulation() != Formulation::U {
        return Err(Error::invalid("energy_u needs a u-form trajectory"));
    }
    let state = traj.state_u(k)?;
    let h = grid.spacing;
    let mut kin = 0.0;
    let mut pot = 0.0;
    for (&r, &m) in state.rho.iter().zip(&state.mom) {
        let u = m / r.max(floor);
        kin += 0.5 * r * u * u;
        pot += powr(r, params.gamma);
    }
    let kinetic = h * kin;
    let potential = params.a * h * pot / (params.gamma - 1.0);
    let dissipation_accum = traj.dissipation_accum[k];
    Ok(EnergyReport {
        time: traj.times[k],
        kinetic,
        potential,
        dissipation_accum,
        total: kinetic + potential + dissipation_accum,
    })
}

/// v-form (BD) energy of snapshot `k`; only defined for alpha = gamma.
pub fn energy_v(
    traj: &Trajectory,
    k: usize,
    grid: &Grid1D,
    params: &FluidParams,
) -> Result<EnergyReport> {
    if traj.formulation() != Formulation::V {
        return Err(Error::invalid("energy_v needs a v-form trajectory"));
    }
    require_bd_regime(params)?;
    let state = traj.state_v(k)?;
    let h = grid.spacing;
    let mut kin = 0.0;
    let mut pot = 0.0;
    for (&r, &v) in state.rho.iter().zip(&state.v) {
        kin += 0.5 * r * v * v;
        pot += powr(r, params.gamma);
    }
    let kinetic = h * kin;
    let potential = params.a * h * pot / (params.gamma - 1.0);
    let dissipation_accum = traj.dissipation_accum[k];
    Ok(EnergyReport {
        time: traj.times[k],
        kinetic,
        potential,
        dissipation_accum,
        total: kinetic + potential + dissipation_accum,
    })
}

/// Pointwise relative-entropy density `F(rho_bar, R)`: nonnegative,
/// zero exactly at `R = 0`.
pub fn rel_entropy_density(rho_bar: f64, r_diff: f64, params: &FluidParams) -> Result<f64> {
    if !(rho_bar >= 0.0) {
        return Err(Error::invalid(format!("rho_bar = {rho_bar} is negative or NaN")));
    }
    let rho = rho_bar + r_diff;
    if !(rho >= 0.0) {
        return Err(Error::invalid(format!(
            "rho_bar + R = {rho} is negative (rho_bar = {rho_bar}, R = {r_diff})"
        )));
    }
    let g = params.gamma;
    Ok(powr(rho, g) / g - powr(rho_bar, g - 1.0) * r_diff - powr(rho_bar, g) / g)
}

/// Total relative entropy between two v-form states on the same grid.
pub fn rel_entropy_total(
    state: &StateV,
    reference: &StateV,
    grid: &Grid1D,
    params: &FluidParams,
) -> Result<f64> {
    require_bd_regime(params)?;
    if state.len() != grid.cells || reference.len() != grid.cells {
        return Err(Error::Mismatch(format!(
            "states ({}, {}) do not match grid cells {}",
            state.len(),
            reference.len(),
            grid.cells
        )));
    }
    let h = grid.spacing;
    let mut kin = 0.0;
    let mut pot = 0.0;
    for i in 0..state.len() {
        let du = state.v[i] - reference.v[i];
        kin += state.rho[i] * du * du;
        pot += rel_entropy_density(reference.rho[i], state.rho[i] - reference.rho[i], params)?;
    }
    Ok(h * kin + params.a * params.gamma / (params.gamma - 1.0) * h * pot)
}

/// Dissipation distance between the density fields of a candidate and a
/// reference state. The candidate factor `rho^(gamma-3/2) drho/dx` is
/// evaluated in the vacuum-regular power-difference form
/// `(1/(gamma-1/2)) D_c[rho^(gamma-1/2)]`.
pub fn relative_dissipation(
    state: &StateV,
    reference: &StateV,
    grid: &Grid1D,
    params: &FluidParams,
) -> Result<f64> {
    require_bd_regime(params)?;
    if state.len() != grid.cells || reference.len() != grid.cells {
        return Err(Error::Mismatch("state length does not match grid".into()));
    }
    let g = params.gamma;
    let pw: Vec<f64> = state.rho.iter().map(|&r| powr(r, g - 0.5)).collect();
    let grad_pw = centered_grad(&pw, grid)?;
    let grad_ref = centered_grad(&reference.rho, grid)?;
    let coef = 1.0 / (g - 0.5);
    let mut sum = 0.0;
    for i in 0..grid.cells {
        let cand = coef * grad_pw[i];
        let refr = state.rho[i].sqrt() * powr(reference.rho[i], g - 2.0) * grad_ref[i];
        let x = cand - refr;
        sum += x * x;
    }
    Ok(params.a * params.mu * params.gamma * grid.spacing * sum)
}

/// Gronwall rate from the reference-solution gradient monitors
/// `||du_bar/dx||_inf` and `||dv_bar/dx||_inf`.
pub fn gronwall_rate(du_inf: f64, dv_inf: f64, params: &FluidParams) -> Result<f64> {
    if !(du_inf >= 0.0) || !(dv_inf >= 0.0) {
        return Err(Error::invalid(format!(
            "gradient norms must be >= 0, got ({du_inf}, {dv_inf})"
        )));
    }
    Ok(params.gamma * du_inf
        + dv_inf
        + params.mu / (2.0 * params.a * params.gamma) * dv_inf * dv_inf)
}

/// Checks the weak-strong stability certificate of `traj` against the
/// strong reference `ref_traj`: both v-form, same grid and snapshot
/// times. Passes iff `H(t_k) <= bound(t_k) + tolerance` for every k.
pub fn wsu_check(
    traj: &Trajectory,
    ref_traj: &Trajectory,
    grid: &Grid1D,
    params: &FluidParams,
    tolerance: f64,
) -> Result<StabilityReport> {
    require_bd_regime(params)?;
    if traj.formulation() != Formulation::V || ref_traj.formulation() != Formulation::V {
        return Err(Error::invalid("wsu_check needs v-form trajectories"));
    }
    if traj.len() != ref_traj.len() || traj.times != ref_traj.times {
        return Err(Error::Mismatch(
            "trajectories must share identical snapshot times".into(),
        ));
    }
    if traj.is_empty() {
        return Err(Error::invalid("empty trajectory"));
    }

    let n = traj.len();
    let mut h_series = Vec::with_capacity(n);
    let mut d_series = Vec::with_capacity(n);
    let mut lambda = Vec::with_capacity(n);
    let mut du_infs = Vec::with_capacity(n);
    let mut dv_infs = Vec::with_capacity(n);
    let mut u_sup = 0.0f64;

    for k in 0..n {
        let cand = traj.state_v(k)?;
        let refs = ref_traj.state_v(k)?;
        let u_bar: Vec<f64> = {
            let grad = phi_grad(&refs.rho, grid, params)?;
            refs.v.iter().zip(&grad).map(|(&v, &d)| v - d).collect()
        };
        let du_inf = discrete_norm(&centered_grad(&u_bar, grid)?, grid, NormKind::Linf)?;
        let dv_inf = discrete_norm(&centered_grad(&refs.v, grid)?, grid, NormKind::Linf)?;
        if !du_inf.is_finite() || !dv_inf.is_finite() {
            return Err(Error::NotStrong(format!(
                "non-finite reference gradient monitors at snapshot {k}"
            )));
        }
        u_sup = u_sup.max(discrete_norm(&u_bar, grid, NormKind::Linf)?);
        lambda.push(gronwall_rate(du_inf, dv_inf, params)?);
        du_infs.push(du_inf);
        dv_infs.push(dv_inf);
        h_series.push(rel_entropy_total(cand, refs, grid, params)?);
        d_series.push(relative_dissipation(cand, refs, grid, params)?);
    }

    // Left-endpoint time integrals of the rate and the L1_T(Linf)
    // monitors of the reference.
    let h0 = h_series[0];
    let mut bound = Vec::with_capacity(n);
    let mut margin = Vec::with_capacity(n);
    let mut integral = 0.0;
    let mut u_grad_l1t = 0.0;
    let mut v_grad_l1t = 0.0;
    bound.push(h0);
    margin.push(bound[0] - h_series[0]);
    for k in 1..n {
        let dt = traj.times[k] - traj.times[k - 1];
        integral += lambda[k - 1] * dt;
        u_grad_l1t += du_infs[k - 1] * dt;
        v_grad_l1t += dv_infs[k - 1] * dt;
        bound.push(h0 * integral.exp());
        margin.push(bound[k] - h_series[k]);
    }

    let passed = h_series
        .iter()
        .zip(&bound)
        .all(|(&h, &b)| h <= b + tolerance);
    let sup_h = h_series.iter().fold(0.0f64, |m, &x| m.max(x));

    Ok(StabilityReport {
        times: traj.times.clone(),
        h: h_series,
        d: d_series,
        lambda,
        bound,
        margin,
        passed,
        tolerance_used: tolerance,
        sup_h,
        u_grad_l1t,
        v_grad_l1t,
        u_sup,
    })
}
