//! Domain types shared by every module: fluid parameters, the spatial
//! grid, discrete states for both formulations, trajectories, and the
//! discrete norms used by the admissibility and stability monitors.

use crate::error::{Error, Result};
use crate::num;

/// Default density floor used when recovering `u = m / rho`. Never added
/// to the density itself; genuine vacuum stays at exactly zero.
pub const DEFAULT_DENSITY_FLOOR: f64 = 1e-12;

/// Physical constants of the gamma-law gas with power-law viscosity
/// `P(rho) = a rho^gamma`, `mu(rho) = mu rho^alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidParams {
    /// Adiabatic exponent, strictly > 1.
    pub gamma: f64,
    /// Pressure constant, > 0.
    pub a: f64,
    /// Viscosity constant, > 0.
    pub mu: f64,
    /// Viscosity exponent, >= 0 (alpha = 0 is the constant-viscosity case).
    pub alpha: f64,
    /// Integrability exponent for the weighted admissibility norm, > 0.
    pub delta: f64,
}

impl FluidParams {
    pub fn new(gamma: f64, a: f64, mu: f64, alpha: f64, delta: f64) -> Result<Self> {
        if !(gamma > 1.0) {
            return Err(Error::invalid(format!("gamma must be > 1, got {gamma}")));
        }
        if !(a > 0.0) {
            return Err(Error::invalid(format!("a must be > 0, got {a}")));
        }
        if !(mu > 0.0) {
            return Err(Error::invalid(format!("mu must be > 0, got {mu}")));
        }
        if !(alpha >= 0.0) {
            return Err(Error::invalid(format!("alpha must be >= 0, got {alpha}")));
        }
        if !(delta > 0.0) {
            return Err(Error::invalid(format!("delta must be > 0, got {delta}")));
        }
        Ok(Self { gamma, a, mu, alpha, delta })
    }

    /// Sound speed `c = sqrt(gamma a rho^(gamma-1))`, zero at vacuum.
    #[inline]
    pub fn sound_speed(&self, rho: f64) -> f64 {
        (self.gamma * self.a * num::powr(rho, self.gamma - 1.0)).sqrt()
    }

    /// Whether the diagnostics regime `alpha = gamma` applies.
    #[inline]
    pub fn is_bd_regime(&self) -> bool {
        self.alpha == self.gamma
    }
}

/// Boundary closure of the periodic/truncated box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Periodic,
    /// Zero-gradient ghost cells (far-field truncation).
    Extrapolate,
}

/// Uniform cell-centered 1D grid on `[0, length]` with centers at
/// `x_i = (i + 1/2) h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub length: f64,
    pub cells: usize,
    pub spacing: f64,
    pub boundary: BoundaryKind,
}

impl Grid1D {
    pub fn new(length: f64, cells: usize, boundary: BoundaryKind) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::invalid(format!("grid length must be > 0, got {length}")));
        }
        if cells < 4 {
            return Err(Error::invalid(format!("grid needs at least 4 cells, got {cells}")));
        }
        let spacing = length / cells as f64;
        Ok(Self { length, cells, spacing, boundary })
    }

    #[inline]
    pub fn cell_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing
    }

    pub fn cell_centers(&self) -> Vec<f64> {
        (0..self.cells).map(|i| self.cell_center(i)).collect()
    }

    /// Left neighbor index under the boundary closure.
    #[inline]
    pub fn left(&self, i: usize) -> usize {
        if i > 0 {
            i - 1
        } else {
            match self.boundary {
                BoundaryKind::Periodic => self.cells - 1,
                BoundaryKind::Extrapolate => 0,
            }
        }
    }

    /// Right neighbor index under the boundary closure.
    #[inline]
    pub fn right(&self, i: usize) -> usize {
        if i + 1 < self.cells {
            i + 1
        } else {
            match self.boundary {
                BoundaryKind::Periodic => 0,
                BoundaryKind::Extrapolate => self.cells - 1,
            }
        }
    }

    /// A grid with the same box and boundary, `factor` times finer.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::invalid("refinement factor must be >= 1"));
        }
        Grid1D::new(self.length, self.cells * factor, self.boundary)
    }
}

/// How face diffusivities are formed from the two adjacent cell values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FaceAverage {
    #[default]
    Arithmetic,
    /// Degenerates to zero next to vacuum and stalls the front; provided
    /// for comparison runs.
    Harmonic,
}

impl FaceAverage {
    #[inline]
    pub fn combine(&self, a: f64, b: f64) -> f64 {
        match self {
            FaceAverage::Arithmetic => 0.5 * (a + b),
            FaceAverage::Harmonic => {
                let s = a + b;
                if s > 0.0 {
                    2.0 * a * b / s
                } else {
                    0.0
                }
            }
        }
    }
}

/// Time-stepping policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeControls {
    pub t_end: f64,
    pub cfl_advective: f64,
    pub cfl_diffusive: f64,
    pub max_steps: u64,
    pub snapshot_stride: u64,
    pub density_floor: f64,
    pub face_average: FaceAverage,
}

impl TimeControls {
    pub const DEFAULT_CFL_ADVECTIVE: f64 = 0.45;
    pub const DEFAULT_CFL_DIFFUSIVE: f64 = 0.25;
    pub const DEFAULT_MAX_STEPS: u64 = 50_000_000;
    pub const DEFAULT_SNAPSHOT_STRIDE: u64 = 10;

    /// Controls with the documented defaults and the given horizon.
    pub fn new(t_end: f64) -> Result<Self> {
        Self::checked(
            t_end,
            Self::DEFAULT_CFL_ADVECTIVE,
            Self::DEFAULT_CFL_DIFFUSIVE,
            Self::DEFAULT_MAX_STEPS,
            Self::DEFAULT_SNAPSHOT_STRIDE,
            DEFAULT_DENSITY_FLOOR,
            FaceAverage::Arithmetic,
        )
    }

    #[allow(clippy::too_many_arguments)]
    pub fn checked(
        t_end: f64,
        cfl_advective: f64,
        cfl_diffusive: f64,
        max_steps: u64,
        snapshot_stride: u64,
        density_floor: f64,
        face_average: FaceAverage,
    ) -> Result<Self> {
        if !(t_end >= 0.0) {
            return Err(Error::invalid(format!("t_end must be >= 0, got {t_end}")));
        }
        if !(cfl_advective > 0.0 && cfl_advective <= 1.0) {
            return Err(Error::invalid(format!(
                "cfl_advective must lie in (0, 1], got {cfl_advective}"
            )));
        }
        if !(cfl_diffusive > 0.0 && cfl_diffusive <= 0.5) {
            return Err(Error::invalid(format!(
                "cfl_diffusive must lie in (0, 0.5], got {cfl_diffusive}"
            )));
        }
        if max_steps < 1 {
            return Err(Error::invalid("max_steps must be >= 1"));
        }
        if snapshot_stride < 1 {
            return Err(Error::invalid("snapshot_stride must be >= 1"));
        }
        if !(density_floor >= 0.0) {
            return Err(Error::invalid(format!(
                "density_floor must be >= 0, got {density_floor}"
            )));
        }
        Ok(Self {
            t_end,
            cfl_advective,
            cfl_diffusive,
            max_steps,
            snapshot_stride,
            density_floor,
            face_average,
        })
    }
}

/// Conserved-variable state of the primitive formulation: density and
/// momentum `m = rho u`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateU {
    pub rho: Vec<f64>,
    pub mom: Vec<f64>,
}

impl StateU {
    /// Validates the invariants: `rho >= 0` everywhere and zero momentum
    /// in vacuum cells (`rho < floor`).
    pub fn new(rho: Vec<f64>, mom: Vec<f64>, floor: f64) -> Result<Self> {
        if rho.len() != mom.len() {
            return Err(Error::invalid(format!(
                "rho and mom lengths differ: {} vs {}",
                rho.len(),
                mom.len()
            )));
        }
        for (i, &r) in rho.iter().enumerate() {
            if !(r >= 0.0) {
                return Err(Error::invalid(format!("rho[{i}] = {r} is negative or NaN")));
            }
            if r < floor && mom[i] != 0.0 {
                return Err(Error::invalid(format!(
                    "mom[{i}] = {} nonzero in vacuum cell (rho = {r})",
                    mom[i]
                )));
            }
        }
        if !num::all_finite(&mom) {
            return Err(Error::invalid("mom contains non-finite values"));
        }
        Ok(Self { rho, mom })
    }

    /// Builds from pointwise `(rho, u)`; momentum in vacuum cells is set
    /// to exactly zero as part of the construction contract.
    pub fn from_velocity(rho: Vec<f64>, u: &[f64], floor: f64) -> Result<Self> {
        if rho.len() != u.len() {
            return Err(Error::invalid("rho and u lengths differ"));
        }
        let mom = rho
            .iter()
            .zip(u)
            .map(|(&r, &ui)| if r < floor { 0.0 } else { r * ui })
            .collect();
        Self::new(rho, mom, floor)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.rho.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    /// Velocity recovery `u_i = m_i / max(rho_i, floor)`.
    pub fn velocity(&self, floor: f64) -> Vec<f64> {
        self.rho
            .iter()
            .zip(&self.mom)
            .map(|(&r, &m)| m / r.max(floor))
            .collect()
    }

    pub fn total_mass(&self, grid: &Grid1D) -> Result<f64> {
        total_mass(&self.rho, grid)
    }
}

/// State of the effective-velocity formulation: density and
/// `v = u + d/dx phi(rho)`. `v` is well defined at vacuum.
#[derive(Debug, Clone, PartialEq)]
pub struct StateV {
    pub rho: Vec<f64>,
    pub v: Vec<f64>,
}

impl StateV {
    pub fn new(rho: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if rho.len() != v.len() {
            return Err(Error::invalid(format!(
                "rho and v lengths differ: {} vs {}",
                rho.len(),
                v.len()
            )));
        }
        for (i, &r) in rho.iter().enumerate() {
            if !(r >= 0.0) {
                return Err(Error::invalid(format!("rho[{i}] = {r} is negative or NaN")));
            }
        }
        if !num::all_finite(&v) {
            return Err(Error::invalid("v contains non-finite values"));
        }
        Ok(Self { rho, v })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.rho.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn total_mass(&self, grid: &Grid1D) -> Result<f64> {
        total_mass(&self.rho, grid)
    }
}

/// Which system a run integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// Conservative (rho, m) form with viscous momentum flux.
    U,
    /// Parabolic-density / transported effective-velocity form.
    V,
}

impl std::fmt::Display for Formulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Formulation::U => write!(f, "u"),
            Formulation::V => write!(f, "v"),
        }
    }
}

/// Snapshot storage, tagged by formulation.
#[derive(Debug, Clone, PartialEq)]
pub enum Snapshots {
    U(Vec<StateU>),
    V(Vec<StateV>),
}

impl Snapshots {
    pub fn len(&self) -> usize {
        match self {
            Snapshots::U(s) => s.len(),
            Snapshots::V(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Time-ordered snapshots plus the running time integral of the matching
/// energy-dissipation term (left-endpoint rule, accumulated every step).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub snapshots: Snapshots,
    /// Accumulated dissipation integral at each snapshot; non-decreasing.
    pub dissipation_accum: Vec<f64>,
    /// Step counter at each snapshot (0 at t = 0).
    pub steps: Vec<u64>,
}

impl Trajectory {
    pub fn formulation(&self) -> Formulation {
        match self.snapshots {
            Snapshots::U(_) => Formulation::U,
            Snapshots::V(_) => Formulation::V,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state_u(&self, k: usize) -> Result<&StateU> {
        match &self.snapshots {
            Snapshots::U(s) => s
                .get(k)
                .ok_or_else(|| Error::invalid(format!("snapshot index {k} out of range"))),
            Snapshots::V(_) => Err(Error::invalid("trajectory holds v-form snapshots")),
        }
    }

    pub fn state_v(&self, k: usize) -> Result<&StateV> {
        match &self.snapshots {
            Snapshots::V(s) => s
                .get(k)
                .ok_or_else(|| Error::invalid(format!("snapshot index {k} out of range"))),
            Snapshots::U(_) => Err(Error::invalid("trajectory holds u-form snapshots")),
        }
    }

    pub fn rho_at(&self, k: usize) -> Result<&[f64]> {
        match &self.snapshots {
            Snapshots::U(s) => s
                .get(k)
                .map(|st| st.rho.as_slice())
                .ok_or_else(|| Error::invalid(format!("snapshot index {k} out of range"))),
            Snapshots::V(s) => s
                .get(k)
                .map(|st| st.rho.as_slice())
                .ok_or_else(|| Error::invalid(format!("snapshot index {k} out of range"))),
        }
    }
}

/// Spatial norm selector for monitors: `L^1`, `L^2` or `L^inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L1,
    L2,
    Linf,
}

/// Midpoint-rule discrete norm of a cell field.
pub fn discrete_norm(field: &[f64], grid: &Grid1D, kind: NormKind) -> Result<f64> {
    if field.len() != grid.cells {
        return Err(Error::invalid(format!(
            "field length {} does not match grid cells {}",
            field.len(),
            grid.cells
        )));
    }
    let h = grid.spacing;
    Ok(match kind {
        NormKind::L1 => h * field.iter().map(|x| x.abs()).sum::<f64>(),
        NormKind::L2 => (h * field.iter().map(|x| x * x).sum::<f64>()).sqrt(),
        NormKind::Linf => num::max_abs(field),
    })
}

/// `h * sum(rho_i)`: midpoint-rule total mass.
pub fn total_mass(rho: &[f64], grid: &Grid1D) -> Result<f64> {
    if rho.len() != grid.cells {
        return Err(Error::invalid(format!(
            "field length {} does not match grid cells {}",
            rho.len(),
            grid.cells
        )));
    }
    Ok(grid.spacing * rho.iter().sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_examples() {
        let g = Grid1D::new(1.0, 4, BoundaryKind::Periodic).unwrap();
        assert_eq!(g.spacing, 0.25);
        let g = Grid1D::new(2.0, 8, BoundaryKind::Periodic).unwrap();
        assert_eq!(g.spacing, 0.25);
        assert!(Grid1D::new(1.0, 3, BoundaryKind::Periodic).is_err());
        assert!(Grid1D::new(0.0, 8, BoundaryKind::Periodic).is_err());
        assert!(Grid1D::new(-1.0, 8, BoundaryKind::Periodic).is_err());
    }

    #[test]
    fn grid_spacing_consistent() {
        for &(l, n) in &[(1.0, 7usize), (2.5, 400), (4.0, 1001), (0.3, 17)] {
            let g = Grid1D::new(l, n, BoundaryKind::Periodic).unwrap();
            assert!((g.spacing * g.cells as f64 - g.length).abs() <= f64::EPSILON * g.length);
        }
    }

    #[test]
    fn cell_centers_at_midpoints() {
        let g = Grid1D::new(1.0, 4, BoundaryKind::Periodic).unwrap();
        assert_eq!(g.cell_center(0), 0.125);
        assert_eq!(g.cell_center(3), 0.875);
    }

    #[test]
    fn norm_zero_field() {
        let g = Grid1D::new(1.0, 8, BoundaryKind::Periodic).unwrap();
        let f = vec![0.0; 8];
        assert_eq!(discrete_norm(&f, &g, NormKind::L2).unwrap(), 0.0);
        assert_eq!(discrete_norm(&f, &g, NormKind::L1).unwrap(), 0.0);
        assert_eq!(discrete_norm(&f, &g, NormKind::Linf).unwrap(), 0.0);
    }

    #[test]
    fn norm_constant_field_l1() {
        let g = Grid1D::new(2.0, 8, BoundaryKind::Periodic).unwrap();
        let f = vec![1.0; 8];
        assert!((discrete_norm(&f, &g, NormKind::L1).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn norm_hand_computed_l2() {
        // f = (3, 4, 0, 0) with h = 1: sqrt(9 + 16) = 5.
        let g = Grid1D::new(4.0, 4, BoundaryKind::Periodic).unwrap();
        let f = vec![3.0, 4.0, 0.0, 0.0];
        assert!((discrete_norm(&f, &g, NormKind::L2).unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn norm_length_mismatch() {
        let g = Grid1D::new(1.0, 8, BoundaryKind::Periodic).unwrap();
        assert!(discrete_norm(&[1.0; 7], &g, NormKind::L2).is_err());
    }

    #[test]
    fn mass_constant_and_vacuum() {
        let g = Grid1D::new(1.0, 16, BoundaryKind::Periodic).unwrap();
        assert!((total_mass(&vec![1.0; 16], &g).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(total_mass(&vec![0.0; 16], &g).unwrap(), 0.0);
    }

    #[test]
    fn mass_compact_bump_matches_integral() {
        // rho(x) = max(0, 1 - (x-2)^2) on a [0,4] box; integral is 4/3.
        let n = 1000;
        let g = Grid1D::new(4.0, n, BoundaryKind::Periodic).unwrap();
        let rho: Vec<f64> = (0..n)
            .map(|i| {
                let x = g.cell_center(i) - 2.0;
                (1.0 - x * x).max(0.0)
            })
            .collect();
        let m = total_mass(&rho, &g).unwrap();
        assert!((m - 4.0 / 3.0).abs() < 1e-3, "mass = {m}");
    }

    #[test]
    fn state_u_rejects_vacuum_momentum() {
        let rho = vec![1.0, 0.0, 1.0, 1.0];
        let mom = vec![0.5, 0.1, 0.0, 0.0];
        assert!(StateU::new(rho, mom, DEFAULT_DENSITY_FLOOR).is_err());
    }

    #[test]
    fn state_u_rejects_negative_density() {
        assert!(StateU::new(vec![1.0, -0.1, 1.0, 1.0], vec![0.0; 4], 1e-12).is_err());
    }

    #[test]
    fn state_from_velocity_zeroes_vacuum() {
        let rho = vec![1.0, 0.0, 1e-13, 2.0];
        let u = vec![3.0, 5.0, 5.0, -1.0];
        let s = StateU::from_velocity(rho, &u, DEFAULT_DENSITY_FLOOR).unwrap();
        assert_eq!(s.mom[1], 0.0);
        assert_eq!(s.mom[2], 0.0);
        assert_eq!(s.mom[3], -2.0);
    }

    #[test]
    fn state_v_requires_finite_v() {
        assert!(StateV::new(vec![0.0; 4], vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
        assert!(StateV::new(vec![0.0; 4], vec![0.0; 4]).is_ok());
    }

    #[test]
    fn fluid_params_invariants() {
        assert!(FluidParams::new(2.0, 1.0, 1.0, 2.0, 0.1).is_ok());
        assert!(FluidParams::new(1.0, 1.0, 1.0, 2.0, 0.1).is_err());
        assert!(FluidParams::new(0.9, 1.0, 1.0, 2.0, 0.1).is_err());
        assert!(FluidParams::new(2.0, 0.0, 1.0, 2.0, 0.1).is_err());
        assert!(FluidParams::new(2.0, 1.0, -1.0, 2.0, 0.1).is_err());
        assert!(FluidParams::new(2.0, 1.0, 1.0, -0.5, 0.1).is_err());
        assert!(FluidParams::new(2.0, 1.0, 1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn controls_ranges() {
        assert!(TimeControls::new(1.0).is_ok());
        assert!(TimeControls::checked(1.0, 1.1, 0.25, 10, 1, 0.0, FaceAverage::Arithmetic).is_err());
        assert!(TimeControls::checked(1.0, 0.5, 0.6, 10, 1, 0.0, FaceAverage::Arithmetic).is_err());
        assert!(TimeControls::checked(-1.0, 0.5, 0.25, 10, 1, 0.0, FaceAverage::Arithmetic).is_err());
        assert!(TimeControls::checked(1.0, 0.5, 0.25, 0, 1, 0.0, FaceAverage::Arithmetic).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // |c| * norm(f) = norm(c f) within 1e-12 relative.
            #[test]
            fn norms_absolutely_homogeneous(
                vals in proptest::collection::vec(-1e3f64..1e3, 8..64),
                c in -1e3f64..1e3,
            ) {
                let g = Grid1D::new(2.0, vals.len(), BoundaryKind::Periodic).unwrap();
                let scaled: Vec<f64> = vals.iter().map(|x| c * x).collect();
                for kind in [NormKind::L1, NormKind::L2, NormKind::Linf] {
                    let lhs = discrete_norm(&scaled, &g, kind).unwrap();
                    let rhs = c.abs() * discrete_norm(&vals, &g, kind).unwrap();
                    prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
                }
            }

            #[test]
            fn l2_squared_is_h_times_sum_of_squares(
                vals in proptest::collection::vec(-1e2f64..1e2, 8..64),
            ) {
                let g = Grid1D::new(1.0, vals.len(), BoundaryKind::Periodic).unwrap();
                let n2 = discrete_norm(&vals, &g, NormKind::L2).unwrap();
                let direct = g.spacing * vals.iter().map(|x| x * x).sum::<f64>();
                prop_assert!((n2 * n2 - direct).abs() <= 1e-12 * direct.max(1e-300));
            }
        }
    }
}
