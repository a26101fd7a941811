//! Constitutive laws and the exact change of unknown between the
//! primitive state `(rho, m)` and the effective state `(rho, v)` with
//! `v = u + d/dx phi(rho)`, where `phi'(rho) = mu(rho) / rho^2`.
//!
//! The discrete derivative is always the centered difference of the
//! `phi` point values, so converting back and forth subtracts the very
//! same correction it added.

use crate::error::{Error, Result};
use crate::model::{FluidParams, Grid1D, StateU, StateV};
use crate::num::powr;

/// Gamma-law pressure `P(rho) = a rho^gamma`; zero at vacuum.
pub fn pressure(rho: f64, params: &FluidParams) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(Error::invalid(format!("pressure: rho = {rho} is negative or NaN")));
    }
    Ok(params.a * powr(rho, params.gamma))
}

/// Power-law viscosity `mu(rho) = mu rho^alpha`; constant for alpha = 0,
/// degenerate at vacuum for alpha > 0.
pub fn viscosity(rho: f64, params: &FluidParams) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(Error::invalid(format!("viscosity: rho = {rho} is negative or NaN")));
    }
    Ok(params.mu * powr(rho, params.alpha))
}

/// Antiderivative of `mu(rho) / rho^2`:
/// `mu rho^(alpha-1) / (alpha-1)` for alpha != 1, `mu ln rho` for alpha = 1.
/// The integration constant is fixed so that phi vanishes at vacuum when
/// alpha > 1; for alpha <= 1 the potential is singular at rho = 0 and the
/// vacuum evaluation is rejected.
pub fn phi(rho: f64, params: &FluidParams) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(Error::invalid(format!("phi: rho = {rho} is negative or NaN")));
    }
    if rho == 0.0 && params.alpha <= 1.0 {
        return Err(Error::Domain(format!(
            "phi is singular at vacuum for alpha = {} <= 1",
            params.alpha
        )));
    }
    if params.alpha == 1.0 {
        Ok(params.mu * rho.ln())
    } else {
        Ok(params.mu * powr(rho, params.alpha - 1.0) / (params.alpha - 1.0))
    }
}

/// Second-order centered difference with the grid's boundary closure
/// (periodic wrap, or zero-gradient ghosts for `Extrapolate`).
pub fn centered_grad(field: &[f64], grid: &Grid1D) -> Result<Vec<f64>> {
    if field.len() != grid.cells {
        return Err(Error::invalid(format!(
            "centered_grad: field length {} does not match grid cells {}",
            field.len(),
            grid.cells
        )));
    }
    let inv2h = 1.0 / (2.0 * grid.spacing);
    Ok((0..grid.cells)
        .map(|i| (field[grid.right(i)] - field[grid.left(i)]) * inv2h)
        .collect())
}

/// `D_c[phi(rho)]`: the discrete gradient of the potential, shared by
/// both conversion directions.
pub fn phi_grad(rho: &[f64], grid: &Grid1D, params: &FluidParams) -> Result<Vec<f64>> {
    let pot: Vec<f64> = rho
        .iter()
        .map(|&r| phi(r, params))
        .collect::<Result<_>>()?;
    centered_grad(&pot, grid)
}

/// `(rho, m)` -> `(rho, v)` with `v_i = u_i + D_c[phi(rho)]_i` and
/// `u_i = m_i / max(rho_i, floor)`.
pub fn to_effective(
    state: &StateU,
    grid: &Grid1D,
    params: &FluidParams,
    floor: f64,
) -> Result<StateV> {
    let grad = phi_grad(&state.rho, grid, params)?;
    let v = state
        .rho
        .iter()
        .zip(&state.mom)
        .zip(&grad)
        .map(|((&r, &m), &d)| m / r.max(floor) + d)
        .collect();
    StateV::new(state.rho.clone(), v)
}

/// `(rho, v)` -> `(rho, m)` with `u_i = v_i - D_c[phi(rho)]_i` and
/// `m_i = rho_i u_i` (zero in vacuum cells).
pub fn to_primitive(
    state: &StateV,
    grid: &Grid1D,
    params: &FluidParams,
    floor: f64,
) -> Result<StateU> {
    let grad = phi_grad(&state.rho, grid, params)?;
    let mom = state
        .rho
        .iter()
        .zip(&state.v)
        .zip(&grad)
        .map(|((&r, &vi), &d)| if r < floor { 0.0 } else { r * (vi - d) })
        .collect();
    StateU::new(state.rho.clone(), mom, floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BoundaryKind, DEFAULT_DENSITY_FLOOR as FLOOR};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(gamma: f64, a: f64, mu: f64, alpha: f64) -> FluidParams {
        FluidParams::new(gamma, a, mu, alpha, 0.1).unwrap()
    }

    #[test]
    fn pressure_examples() {
        let p = params(2.0, 1.0, 1.0, 2.0);
        assert_eq!(pressure(0.0, &p).unwrap(), 0.0);
        assert_eq!(pressure(2.0, &p).unwrap(), 4.0);
        let p = params(1.4, 0.5, 1.0, 2.0);
        let want = 0.5 * 1.5f64.powf(1.4);
        assert!((pressure(1.5, &p).unwrap() - want).abs() <= 1e-15 * want);
        assert!(pressure(-1.0, &p).is_err());
    }

    #[test]
    fn viscosity_examples() {
        assert_eq!(viscosity(3.0, &params(2.0, 1.0, 2.0, 0.0)).unwrap(), 2.0);
        assert_eq!(viscosity(0.0, &params(2.0, 1.0, 1.0, 1.0)).unwrap(), 0.0);
        assert_eq!(viscosity(2.0, &params(2.0, 1.0, 1.0, 2.0)).unwrap(), 4.0);
        assert!(viscosity(-0.5, &params(2.0, 1.0, 1.0, 2.0)).is_err());
    }

    #[test]
    fn phi_examples() {
        // Antiderivative mu rho^(alpha-1) / (alpha-1) at rho = 1, alpha = 2.
        assert_eq!(phi(1.0, &params(2.0, 1.0, 1.0, 2.0)).unwrap(), 1.0);
        // ln(1) = 0 for the alpha = 1 branch.
        assert_eq!(phi(1.0, &params(2.0, 1.0, 3.0, 1.0)).unwrap(), 0.0);
        assert!(matches!(
            phi(0.0, &params(2.0, 1.0, 1.0, 0.5)),
            Err(Error::Domain(_))
        ));
        // Vacuum-compatible exponent: phi(0) = 0.
        assert_eq!(phi(0.0, &params(2.0, 1.0, 1.0, 2.0)).unwrap(), 0.0);
    }

    #[test]
    fn effective_equals_u_for_constant_density() {
        let g = Grid1D::new(1.0, 16, BoundaryKind::Periodic).unwrap();
        let p = params(2.0, 1.0, 1.0, 2.0);
        let u: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).sin()).collect();
        let s = StateU::from_velocity(vec![1.7; 16], &u, FLOOR).unwrap();
        let sv = to_effective(&s, &g, &p, FLOOR).unwrap();
        let recovered = s.velocity(FLOOR);
        for i in 0..16 {
            assert_eq!(sv.v[i], recovered[i], "v = u exactly when rho is constant");
        }
    }

    #[test]
    fn effective_matches_analytic_gradient() {
        // rho = 2 + sin(2 pi x), u = 0, gamma = alpha = 2, mu = 1:
        // phi = mu rho, so v = mu d/dx rho = 2 pi cos(2 pi x) + O(h^2).
        let tau = std::f64::consts::TAU;
        let p = params(2.0, 1.0, 1.0, 2.0);
        let mut errs = Vec::new();
        for n in [128usize, 256] {
            let g = Grid1D::new(1.0, n, BoundaryKind::Periodic).unwrap();
            let rho: Vec<f64> = (0..n).map(|i| 2.0 + (tau * g.cell_center(i)).sin()).collect();
            let s = StateU::from_velocity(rho, &vec![0.0; n], FLOOR).unwrap();
            let sv = to_effective(&s, &g, &p, FLOOR).unwrap();
            let err = (0..n)
                .map(|i| (sv.v[i] - tau * (tau * g.cell_center(i)).cos()).abs())
                .fold(0.0f64, f64::max);
            // Centered-difference truncation: |f'''| h^2 / 6 = (2 pi)^3 h^2 / 6.
            let bound = tau.powi(3) * g.spacing * g.spacing / 6.0;
            assert!(err <= 1.05 * bound, "n = {n}: err {err} > bound {bound}");
            errs.push(err);
        }
        let ratio = errs[0] / errs[1];
        assert!((3.4..=4.6).contains(&ratio), "second-order ratio, got {ratio}");
    }

    #[test]
    fn effective_finite_at_vacuum_for_alpha_two() {
        let g = Grid1D::new(4.0, 64, BoundaryKind::Periodic).unwrap();
        let p = params(2.0, 1.0, 1.0, 2.0);
        let rho: Vec<f64> = (0..64)
            .map(|i| {
                let x = g.cell_center(i) - 2.0;
                (1.0 - x * x).max(0.0)
            })
            .collect();
        let s = StateU::from_velocity(rho, &vec![0.0; 64], FLOOR).unwrap();
        let sv = to_effective(&s, &g, &p, FLOOR).unwrap();
        assert!(sv.v.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn effective_propagates_phi_domain_error() {
        let g = Grid1D::new(1.0, 8, BoundaryKind::Periodic).unwrap();
        let p = params(2.0, 1.0, 1.0, 0.5);
        let mut rho = vec![1.0; 8];
        rho[3] = 0.0;
        let s = StateU::from_velocity(rho, &vec![0.0; 8], FLOOR).unwrap();
        assert!(matches!(to_effective(&s, &g, &p, FLOOR), Err(Error::Domain(_))));
    }

    #[test]
    fn primitive_constant_density_u_equals_v() {
        let g = Grid1D::new(1.0, 8, BoundaryKind::Periodic).unwrap();
        let p = params(2.0, 1.0, 1.0, 2.0);
        let v: Vec<f64> = (0..8).map(|i| i as f64 - 3.0).collect();
        let sv = StateV::new(vec![2.0; 8], v.clone()).unwrap();
        let su = to_primitive(&sv, &g, &p, FLOOR).unwrap();
        for i in 0..8 {
            assert_eq!(su.mom[i], 2.0 * v[i]);
        }
    }

    #[test]
    fn primitive_formula_direct() {
        // v = 1 everywhere: u = 1 - D_c[phi(rho)] by definition.
        let tau = std::f64::consts::TAU;
        let n = 64;
        let g = Grid1D::new(1.0, n, BoundaryKind::Periodic).unwrap();
        let p = params(2.0, 1.0, 1.0, 2.0);
        let rho: Vec<f64> = (0..n).map(|i| 2.0 + (tau * g.cell_center(i)).sin()).collect();
        let sv = StateV::new(rho.clone(), vec![1.0; n]).unwrap();
        let su = to_primitive(&sv, &g, &p, FLOOR).unwrap();
        let grad = phi_grad(&rho, &g, &p).unwrap();
        for i in 0..n {
            assert_eq!(su.mom[i], rho[i] * (1.0 - grad[i]));
        }
    }

    #[test]
    fn round_trip_density_exact_velocity_to_rounding() {
        // The same D_c[phi] is added and subtracted, so the round trip is
        // the identity up to the floating-point rounding of u + d; the
        // density round-trips bit-exactly.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let p = params(2.0, 1.0, 1.0, 2.0);
        let n = 64;
        let g = Grid1D::new(1.0, n, BoundaryKind::Periodic).unwrap();
        for _ in 0..100 {
            let rho: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..3.0)).collect();
            let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let s = StateU::from_velocity(rho.clone(), &u, FLOOR).unwrap();
            let back = to_primitive(&to_effective(&s, &g, &p, FLOOR).unwrap(), &g, &p, FLOOR)
                .unwrap();
            assert_eq!(back.rho, s.rho, "rho must round-trip bit-exactly");
            let grad = phi_grad(&rho, &g, &p).unwrap();
            for i in 0..n {
                let scale = u[i].abs().max(grad[i].abs()).max(1.0);
                let tol = 4.0 * f64::EPSILON * scale * rho[i];
                assert!(
                    (back.mom[i] - s.mom[i]).abs() <= tol,
                    "cell {i}: mom {} vs {}",
                    back.mom[i],
                    s.mom[i]
                );
            }
        }
    }

    #[test]
    fn discrete_identity_for_bd_viscosity() {
        // For mu(rho) = mu rho^gamma, D_c[phi(rho)] equals
        // (mu/(gamma-1)) D_c[rho^(gamma-1)] on the same point values.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &gamma in &[1.4f64, 5.0 / 3.0, 2.0, 3.0] {
            let p = params(gamma, 1.0, 0.7, gamma);
            let n = 128;
            let g = Grid1D::new(2.0, n, BoundaryKind::Periodic).unwrap();
            let rho: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..5.0)).collect();
            let lhs = phi_grad(&rho, &g, &p).unwrap();
            let pow: Vec<f64> = rho.iter().map(|&r| powr(r, gamma - 1.0)).collect();
            let rhs: Vec<f64> = centered_grad(&pow, &g)
                .unwrap()
                .iter()
                .map(|d| p.mu / (gamma - 1.0) * d)
                .collect();
            let scale = rhs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for i in 0..n {
                assert!(
                    (lhs[i] - rhs[i]).abs() <= 1e-12 * scale,
                    "gamma {gamma} cell {i}: {} vs {}",
                    lhs[i],
                    rhs[i]
                );
            }
        }
    }

    #[test]
    fn extrapolate_boundary_closure() {
        let g = Grid1D::new(1.0, 4, BoundaryKind::Extrapolate).unwrap();
        let f = vec![1.0, 2.0, 4.0, 8.0];
        let grad = centered_grad(&f, &g).unwrap();
        let h = g.spacing;
        assert_eq!(grad[0], (f[1] - f[0]) / (2.0 * h));
        assert_eq!(grad[3], (f[3] - f[2]) / (2.0 * h));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn pressure_and_viscosity_monotone(
                r1 in 0.0f64..10.0,
                dr in 0.0f64..10.0,
                gamma in 1.01f64..3.0,
                alpha in 0.0f64..3.0,
            ) {
                let p = FluidParams::new(gamma, 0.5, 0.7, alpha, 0.1).unwrap();
                prop_assert!(pressure(r1 + dr, &p).unwrap() >= pressure(r1, &p).unwrap());
                prop_assert!(viscosity(r1 + dr, &p).unwrap() >= viscosity(r1, &p).unwrap());
            }

            #[test]
            fn total_mass_preserved_by_transform(
                vals in proptest::collection::vec(0.1f64..4.0, 8..32),
            ) {
                let n = vals.len();
                let g = Grid1D::new(1.0, n, BoundaryKind::Periodic).unwrap();
                let p = FluidParams::new(2.0, 1.0, 1.0, 2.0, 0.1).unwrap();
                let s = StateU::from_velocity(vals, &vec![0.25; n], FLOOR).unwrap();
                let sv = to_effective(&s, &g, &p, FLOOR).unwrap();
                // Same density field bit for bit, hence the same mass.
                prop_assert_eq!(&sv.rho, &s.rho);
            }
        }
    }
}
