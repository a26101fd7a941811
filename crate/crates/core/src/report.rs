//! CSV serialization. Plain text, deterministic row order, every number
//! printed in Rust's shortest round-trip decimal form so files re-read
//! bit-exactly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::entropy::{energy_u, energy_v, StabilityReport};
use crate::error::{Error, Result};
use crate::model::{FluidParams, Formulation, Grid1D, Trajectory};

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(contents.as_bytes()).map_err(|e| io_err(path, e))
}

/// `energy.csv`: `t,kinetic,potential,dissipation_accum,total`, one row
/// per snapshot.
pub fn write_energy_csv(
    path: &Path,
    traj: &Trajectory,
    grid: &Grid1D,
    params: &FluidParams,
    floor: f64,
) -> Result<()> {
    let mut out = String::from("t,kinetic,potential,dissipation_accum,total\n");
    for k in 0..traj.len() {
        let e = match traj.formulation() {
            Formulation::U => energy_u(traj, k, grid, params, floor)?,
            Formulation::V => energy_v(traj, k, grid, params)?,
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            e.time, e.kinetic, e.potential, e.dissipation_accum, e.total
        ));
    }
    write_file(path, &out)
}

/// `stability.csv`: `t,H,D,lambda,bound,margin`.
pub fn write_stability_csv(path: &Path, report: &StabilityReport) -> Result<()> {
    let mut out = String::from("t,H,D,lambda,bound,margin\n");
    for k in 0..report.times.len() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            report.times[k],
            report.h[k],
            report.d[k],
            report.lambda[k],
            report.bound[k],
            report.margin[k]
        ));
    }
    write_file(path, &out)
}

/// `snapshot_<k>.csv`: `x,rho,u` or `x,rho,v` per formulation.
pub fn write_snapshot_csv(
    path: &Path,
    grid: &Grid1D,
    rho: &[f64],
    velocity_name: &str,
    velocity: &[f64],
) -> Result<()> {
    let mut out = format!("x,rho,{velocity_name}\n");
    for i in 0..grid.cells {
        out.push_str(&format!("{},{},{}\n", grid.cell_center(i), rho[i], velocity[i]));
    }
    write_file(path, &out)
}

/// Reads a snapshot CSV back: `(x, rho, velocity_name, velocity)`.
pub fn read_snapshot_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>, String, Vec<f64>)> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 1, msg: "empty snapshot file".into() })?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() != 3 || cols[0] != "x" || cols[1] != "rho" {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected snapshot header `{header}`"),
        });
    }
    let velocity_name = cols[2].to_string();
    let mut xs = Vec::new();
    let mut rho = Vec::new();
    let mut vel = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse {
                line: idx + 2,
                msg: format!("expected 3 columns, got `{line}`"),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse {
                line: idx + 2,
                msg: format!("bad number `{s}`"),
            })
        };
        xs.push(parse(parts[0])?);
        rho.push(parse(parts[1])?);
        vel.push(parse(parts[2])?);
    }
    Ok((xs, rho, velocity_name, vel))
}

/// Writes the full file set of a run into `dir`: `energy.csv`, one
/// `snapshot_<k>.csv` per snapshot, and `stability.csv` when a
/// certificate report is supplied. Returns the created paths.
pub fn write_timeseries(
    dir: &Path,
    traj: &Trajectory,
    grid: &Grid1D,
    params: &FluidParams,
    floor: f64,
    stability: Option<&StabilityReport>,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut written = Vec::new();

    let energy = dir.join("energy.csv");
    write_energy_csv(&energy, traj, grid, params, floor)?;
    written.push(energy);

    for k in 0..traj.len() {
        let path = dir.join(format!("snapshot_{k}.csv"));
        match traj.formulation() {
            Formulation::U => {
                let s = traj.state_u(k)?;
                write_snapshot_csv(&path, grid, &s.rho, "u", &s.velocity(floor))?;
            }
            Formulation::V => {
                let s = traj.state_v(k)?;
                write_snapshot_csv(&path, grid, &s.rho, "v", &s.v)?;
            }
        }
        written.push(path);
    }

    if let Some(report) = stability {
        let path = dir.join("stability.csv");
        write_stability_csv(&path, report)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BoundaryKind, Snapshots, StateU, TimeControls};
    use crate::solver::{simulate, Scenario};

    #[test]
    fn snapshot_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid1D::new(1.0, 16, BoundaryKind::Periodic).unwrap();
        let rho: Vec<f64> = (0..16).map(|i| (i as f64 * 0.7311).sin().abs() + 0.1).collect();
        let vel: Vec<f64> = (0..16).map(|i| (i as f64 * 1.9113).cos() / 3.0).collect();
        let path = dir.path().join("snapshot_0.csv");
        write_snapshot_csv(&path, &grid, &rho, "u", &vel).unwrap();
        let (xs, rho2, name, vel2) = read_snapshot_csv(&path).unwrap();
        assert_eq!(name, "u");
        assert_eq!(rho2, rho);
        assert_eq!(vel2, vel);
        assert_eq!(xs, grid.cell_centers());
    }

    #[test]
    fn single_snapshot_energy_file() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid1D::new(1.0, 8, BoundaryKind::Periodic).unwrap();
        let params = FluidParams::new(2.0, 1.0, 1.0, 2.0, 0.1).unwrap();
        let initial = StateU::from_velocity(vec![1.0; 8], &vec![0.0; 8], 1e-12).unwrap();
        let sc = Scenario { grid, params, initial, label: "eq".into(), spec: None };
        let controls = TimeControls::new(0.0).unwrap();
        let traj = simulate(&sc, &controls, Formulation::U).unwrap();
        let files = write_timeseries(dir.path(), &traj, &grid, &params, 1e-12, None).unwrap();
        assert_eq!(files.len(), 2); // energy.csv + snapshot_0.csv
        let text = fs::read_to_string(dir.path().join("energy.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,kinetic,potential,dissipation_accum,total");
        assert_eq!(lines.len(), 2, "exactly one data row at t = 0");
        assert!(lines[1].starts_with("0,"));
    }

    #[test]
    fn headers_are_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let report = StabilityReport {
            times: vec![0.0],
            h: vec![0.0],
            d: vec![0.0],
            lambda: vec![0.0],
            bound: vec![0.0],
            margin: vec![0.0],
            passed: true,
            tolerance_used: 0.0,
            sup_h: 0.0,
            u_grad_l1t: 0.0,
            v_grad_l1t: 0.0,
            u_sup: 0.0,
        };
        let path = dir.path().join("stability.csv");
        write_stability_csv(&path, &report).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("t,H,D,lambda,bound,margin\n"));

        let grid = Grid1D::new(1.0, 4, BoundaryKind::Periodic).unwrap();
        let vpath = dir.path().join("snap.csv");
        write_snapshot_csv(&vpath, &grid, &[0.0; 4], "v", &[0.0; 4]).unwrap();
        assert!(fs::read_to_string(&vpath).unwrap().starts_with("x,rho,v\n"));
    }

    #[test]
    fn trajectory_with_v_snapshots_writes_v_column() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid1D::new(1.0, 8, BoundaryKind::Periodic).unwrap();
        let params = FluidParams::new(2.0, 1.0, 1.0, 2.0, 0.1).unwrap();
        let traj = Trajectory {
            times: vec![0.0],
            snapshots: Snapshots::V(vec![crate::model::StateV::new(
                vec![1.0; 8],
                vec![0.5; 8],
            )
            .unwrap()]),
            dissipation_accum: vec![0.0],
            steps: vec![0],
        };
        write_timeseries(dir.path(), &traj, &grid, &params, 1e-12, None).unwrap();
        let (_, _, name, vel) = read_snapshot_csv(&dir.path().join("snapshot_0.csv")).unwrap();
        assert_eq!(name, "v");
        assert_eq!(vel, vec![0.5; 8]);
    }
}
