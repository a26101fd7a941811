//! Initial-data generators, the admissibility checker, and the
//! fine-grid reference oracle.

use crate::error::{Error, Result};
use crate::model::{
    discrete_norm, BoundaryKind, FluidParams, Formulation, Grid1D, NormKind, Snapshots, StateU,
    TimeControls, Trajectory, DEFAULT_DENSITY_FLOOR,
};
use crate::num::powr;
use crate::solver::{simulate_opts, RecordRule, Scenario, SimOptions};
use crate::transform::to_effective;

/// Which initial fields an epsilon-perturbation touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbTarget {
    Velocity,
    Density,
    Both,
}

/// Closed-form initial-data family. Profiles are evaluated pointwise at
/// cell centers, so the same spec instantiates on any grid.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSpec {
    /// Compactly supported density cap
    /// `rho0 = A max(0, 1 - ((x-x0)/w)^2)^(1/(gamma-1))`, chosen so that
    /// `rho^(gamma-1)` is Lipschitz across the vacuum interface, with an
    /// optional odd velocity profile inside the support.
    VacuumBump {
        center: f64,
        width: f64,
        amplitude: f64,
        u0_amplitude: f64,
    },
    /// `rho0 = rho_min + A (1 + sin(2 pi k x / L))`, strictly positive,
    /// with `u0 = u0_amplitude sin(2 pi k x / L)`.
    SmoothPeriodic {
        rho_min: f64,
        amplitude: f64,
        wavenumber: u32,
        u0_amplitude: f64,
    },
    /// Base fields plus `eps * sin(2 pi m x / L)` on rho and/or u.
    Perturbed {
        base: Box<ScenarioSpec>,
        epsilon: f64,
        target: PerturbTarget,
        wavenumber: u32,
    },
}

impl ScenarioSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ScenarioSpec::VacuumBump { .. } => "vacuum_bump",
            ScenarioSpec::SmoothPeriodic { .. } => "smooth_periodic",
            ScenarioSpec::Perturbed { .. } => "perturbed",
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ScenarioSpec::VacuumBump { width, amplitude, .. } => {
                if !(*width > 0.0) {
                    return Err(Error::invalid("vacuum_bump width must be > 0"));
                }
                if !(*amplitude > 0.0) {
                    return Err(Error::invalid("vacuum_bump amplitude must be > 0"));
                }
            }
            ScenarioSpec::SmoothPeriodic { rho_min, amplitude, wavenumber, .. } => {
                if !(*rho_min > 0.0) {
                    return Err(Error::invalid("smooth_periodic rho_min must be > 0"));
                }
                if !(*amplitude >= 0.0) {
                    return Err(Error::invalid("smooth_periodic amplitude must be >= 0"));
                }
                if *wavenumber < 1 {
                    return Err(Error::invalid("smooth_periodic wavenumber must be >= 1"));
                }
            }
            ScenarioSpec::Perturbed { base, wavenumber, .. } => {
                if *wavenumber < 1 {
                    return Err(Error::invalid("perturbation wavenumber must be >= 1"));
                }
                if matches!(**base, ScenarioSpec::Perturbed { .. }) {
                    return Err(Error::invalid("perturbed base must not itself be perturbed"));
                }
                base.validate()?;
            }
        }
        Ok(())
    }

    /// Pointwise `(rho0, u0)` at position `x` on a box of length `length`.
    pub fn fields_at(&self, x: f64, length: f64, params: &FluidParams) -> (f64, f64) {
        match self {
            ScenarioSpec::VacuumBump { center, width, amplitude, u0_amplitude } => {
                let s = (x - center) / width;
                let cap = (1.0 - s * s).max(0.0);
                let rho = amplitude * powr(cap, 1.0 / (params.gamma - 1.0));
                let u = if cap > 0.0 {
                    u0_amplitude * (std::f64::consts::PI * s).sin()
                } else {
                    0.0
                };
                (rho, u)
            }
            ScenarioSpec::SmoothPeriodic { rho_min, amplitude, wavenumber, u0_amplitude } => {
                let phase = std::f64::consts::TAU * *wavenumber as f64 * x / length;
                let rho = rho_min + amplitude * (1.0 + phase.sin());
                let u = u0_amplitude * phase.sin();
                (rho, u)
            }
            ScenarioSpec::Perturbed { base, epsilon, target, wavenumber } => {
                let (mut rho, mut u) = base.fields_at(x, length, params);
                let shape = (std::f64::consts::TAU * *wavenumber as f64 * x / length).sin();
                match target {
                    PerturbTarget::Velocity => u += epsilon * shape,
                    PerturbTarget::Density => rho += epsilon * shape,
                    PerturbTarget::Both => {
                        rho += epsilon * shape;
                        u += epsilon * shape;
                    }
                }
                (rho, u)
            }
        }
    }

    /// A copy with the perturbation size replaced; errors for
    /// non-perturbed specs.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<ScenarioSpec> {
        match self {
            ScenarioSpec::Perturbed { base, target, wavenumber, .. } => {
                Ok(ScenarioSpec::Perturbed {
                    base: base.clone(),
                    epsilon,
                    target: *target,
                    wavenumber: *wavenumber,
                })
            }
            _ => Err(Error::invalid("with_epsilon needs a perturbed scenario spec")),
        }
    }

    /// The unperturbed base of a perturbed spec, or the spec itself.
    pub fn base_spec(&self) -> &ScenarioSpec {
        match self {
            ScenarioSpec::Perturbed { base, .. } => base,
            other => other,
        }
    }
}

/// Instantiates a closed-form spec on a grid.
pub fn make_scenario(spec: &ScenarioSpec, grid: &Grid1D, params: &FluidParams) -> Result<Scenario> {
    spec.validate()?;
    let mut rho = Vec::with_capacity(grid.cells);
    let mut u = Vec::with_capacity(grid.cells);
    for i in 0..grid.cells {
        let (r, ui) = spec.fields_at(grid.cell_center(i), grid.length, params);
        if !(r >= 0.0) {
            return Err(Error::invalid(format!(
                "scenario produces negative density {r} at x = {}",
                grid.cell_center(i)
            )));
        }
        rho.push(r);
        u.push(ui);
    }
    let initial = StateU::from_velocity(rho, &u, DEFAULT_DENSITY_FLOOR)?;
    Ok(Scenario {
        grid: *grid,
        params: *params,
        initial,
        label: spec.kind_name().to_string(),
        spec: Some(spec.clone()),
    })
}

/// Discrete renderings of the initial-data hypotheses: `||rho0||_L1`,
/// `||rho0||_Lgamma`, `||sqrt(rho0) u0||_L2`, `||sqrt(rho0) v0||_L2` and
/// the weighted `||rho0^(1/(2+delta)) u0||_L(2+delta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilityReport {
    pub mass_l1: f64,
    pub rho_lgamma: f64,
    pub kinetic_l2: f64,
    pub effective_l2: f64,
    pub weighted_l2plus: f64,
    pub admissible: bool,
}

/// On a finite grid every norm is finite, so the report's job is
/// magnitude monitoring; for extrapolate boundaries it additionally
/// rejects non-decaying tails (`rho0` at the boundary above
/// `1e-8 max rho0`).
pub fn check_admissibility(scenario: &Scenario) -> Result<AdmissibilityReport> {
    scenario.validate()?;
    let grid = &scenario.grid;
    let params = &scenario.params;
    let state = &scenario.initial;
    let h = grid.spacing;
    let u = state.velocity(DEFAULT_DENSITY_FLOOR);
    let sv = to_effective(state, grid, params, DEFAULT_DENSITY_FLOOR)?;

    let mass_l1 = discrete_norm(&state.rho, grid, NormKind::L1)?;
    let rho_lgamma = (h * state
        .rho
        .iter()
        .map(|&r| powr(r, params.gamma))
        .sum::<f64>())
    .powf(1.0 / params.gamma);
    let kinetic_l2 = (h * state
        .rho
        .iter()
        .zip(&u)
        .map(|(&r, &ui)| r * ui * ui)
        .sum::<f64>())
    .sqrt();
    let effective_l2 = (h * sv
        .rho
        .iter()
        .zip(&sv.v)
        .map(|(&r, &vi)| r * vi * vi)
        .sum::<f64>())
    .sqrt();
    let p = 2.0 + params.delta;
    let weighted_l2plus = (h * state
        .rho
        .iter()
        .zip(&u)
        .map(|(&r, &ui)| r * ui.abs().powf(p))
        .sum::<f64>())
    .powf(1.0 / p);

    let values = [mass_l1, rho_lgamma, kinetic_l2, effective_l2, weighted_l2plus];
    let mut admissible = values.iter().all(|x| x.is_finite());
    if grid.boundary == BoundaryKind::Extrapolate {
        let max_rho = state.rho.iter().fold(0.0f64, |m, &r| m.max(r));
        let tail = state.rho[0].max(state.rho[grid.cells - 1]);
        if tail > 1e-8 * max_rho {
            admissible = false;
        }
    }

    Ok(AdmissibilityReport {
        mass_l1,
        rho_lgamma,
        kinetic_l2,
        effective_l2,
        weighted_l2plus,
        admissible,
    })
}

/// Block mean over groups of `factor` fine cells.
pub fn restrict_field(fine: &[f64], factor: usize) -> Vec<f64> {
    let n = fine.len() / factor;
    let inv = 1.0 / factor as f64;
    (0..n)
        .map(|i| fine[i * factor..(i + 1) * factor].iter().sum::<f64>() * inv)
        .collect()
}

/// Runs the scenario on a `refinement`-times finer grid and returns the
/// cell-averaged restriction to the original grid at the given record
/// times. Ground truth for coarse-grid comparisons.
///
/// The fine initial data re-samples the scenario's closed-form profile
/// when available, and falls back to piecewise-constant injection of the
/// stored initial state otherwise.
pub fn fine_grid_oracle(
    scenario: &Scenario,
    refinement: usize,
    controls: &TimeControls,
    formulation: Formulation,
    record_times: &[f64],
) -> Result<Trajectory> {
    if !matches!(refinement, 1 | 2 | 4 | 8) {
        return Err(Error::invalid(format!(
            "refinement must be one of 1, 2, 4, 8; got {refinement}"
        )));
    }
    scenario.validate()?;
    let fine_grid = scenario.grid.refined(refinement)?;
    let fine_scenario = match &scenario.spec {
        Some(spec) => make_scenario(spec, &fine_grid, &scenario.params)?,
        None => {
            let inject = |field: &[f64]| -> Vec<f64> {
                field
                    .iter()
                    .flat_map(|&x| std::iter::repeat(x).take(refinement))
                    .collect()
            };
            Scenario {
                grid: fine_grid,
                params: scenario.params,
                initial: StateU::new(
                    inject(&scenario.initial.rho),
                    inject(&scenario.initial.mom),
                    controls.density_floor,
                )?,
                label: scenario.label.clone(),
                spec: None,
            }
        }
    };

    let opts = SimOptions { record: RecordRule::Times(record_times), source: None };
    let fine = simulate_opts(&fine_scenario, controls, formulation, &opts)?;

    let snapshots = match fine.snapshots {
        Snapshots::U(snaps) => Snapshots::U(
            snaps
                .into_iter()
                .map(|s| StateU {
                    rho: restrict_field(&s.rho, refinement),
                    mom: restrict_field(&s.mom, refinement),
                })
                .collect(),
        ),
        Snapshots::V(snaps) => Snapshots::V(
            snaps
                .into_iter()
                .map(|s| crate::model::StateV {
                    rho: restrict_field(&s.rho, refinement),
                    v: restrict_field(&s.v, refinement),
                })
                .collect(),
        ),
    };

    Ok(Trajectory {
        times: fine.times,
        snapshots,
        dissipation_accum: fine.dissipation_accum,
        steps: fine.steps,
    })
}
