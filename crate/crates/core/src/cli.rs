//! Command-line surface.
//!
//! Exit codes: 0 success or PASS verdict, 1 FAIL verdict, 2 usage or
//! configuration error (including configs unsuitable for the chosen
//! subcommand), 3 runtime failure (numerical, domain, regime, budget,
//! i/o).

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_config, RunConfig};
use crate::error::Error;
use crate::model::{BoundaryKind, Formulation};
use crate::pipeline::{formulation_equivalence, sweep, wsu_certificate};
use crate::report::{write_stability_csv, write_timeseries};
use crate::scenarios::{check_admissibility, make_scenario, ScenarioSpec};
use crate::solver::simulate;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Parser)]
#[command(
    name = "ns1d",
    about = "1D compressible Navier-Stokes: simulation, entropy diagnostics and weak-strong stability certificates",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate one scenario and write energy + snapshot CSVs
    Simulate(CommonArgs),
    /// Cross-formulation error table under grid refinement
    Equiv(CommonArgs),
    /// Weak-strong stability certificate for a perturbed scenario
    #[command(name = "wsu-check")]
    WsuCheck(CommonArgs),
    /// Certificate sweep over perturbation sizes with fitted exponent
    Sweep(CommonArgs),
    /// Manufactured-solution convergence order table
    Mms(CommonArgs),
    /// Initial-data admissibility report
    Admissibility(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the run configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `[output] dir`
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Runs the CLI on an argv (including the program name) and returns the
/// process exit code.
pub fn run_cli(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (args, run): (&CommonArgs, fn(&RunConfig, &Path) -> Result<i32, Error>) =
        match &cli.command {
            Cmd::Simulate(a) => (a, cmd_simulate),
            Cmd::Equiv(a) => (a, cmd_equiv),
            Cmd::WsuCheck(a) => (a, cmd_wsu_check),
            Cmd::Sweep(a) => (a, cmd_sweep),
            Cmd::Mms(a) => (a, cmd_mms),
            Cmd::Admissibility(a) => (a, cmd_admissibility),
        };

    let text = match fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("ns1d: cannot read config {}: {e}", args.config.display());
            return EXIT_USAGE;
        }
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("ns1d: {}: {e}", args.config.display());
            return EXIT_USAGE;
        }
    };
    let out_dir = args.out.clone().unwrap_or_else(|| cfg.out_dir.clone());

    match run(&cfg, &out_dir) {
        Ok(code) => code,
        Err(e @ Error::Parse { .. }) | Err(e @ Error::InvalidArgument(_)) => {
            eprintln!("ns1d: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("ns1d: {e}");
            EXIT_RUNTIME
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })
}

fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<i32, Error> {
    let scenario = make_scenario(&cfg.scenario, &cfg.grid, &cfg.params)?;
    let traj = simulate(&scenario, &cfg.controls, cfg.formulation)?;
    ensure_dir(out)?;
    write_timeseries(out, &traj, &cfg.grid, &cfg.params, cfg.controls.density_floor, None)?;
    let m0 = crate::model::total_mass(traj.rho_at(0)?, &cfg.grid)?;
    let m1 = crate::model::total_mass(traj.rho_at(traj.len() - 1)?, &cfg.grid)?;
    let drift = if m0 > 0.0 { ((m1 - m0) / m0).abs() } else { 0.0 };
    let diss_label = match cfg.formulation {
        Formulation::U => "viscous_dissipation",
        Formulation::V => "bd_dissipation",
    };
    println!(
        "SIMULATE: ok formulation={} snapshots={} steps={} mass_drift={:e} {}={:e}",
        cfg.formulation,
        traj.len(),
        traj.steps.last().copied().unwrap_or(0),
        drift,
        diss_label,
        traj.dissipation_accum.last().copied().unwrap_or(0.0),
    );
    Ok(EXIT_OK)
}

fn cmd_equiv(cfg: &RunConfig, out: &Path) -> Result<i32, Error> {
    let levels = cfg.levels.unwrap_or(3);
    let table = formulation_equivalence(&cfg.scenario, &cfg.grid, &cfg.params, &cfg.controls, levels)?;
    ensure_dir(out)?;
    let mut csv = String::from("cells,err_rho,err_velocity,err_combined,ratio\n");
    for row in &table {
        let ratio = row.ratio.map(|r| r.to_string()).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.cells, row.err_rho, row.err_velocity, row.err_combined, ratio
        ));
        println!(
            "equiv: cells={} err_rho={:e} err_velocity={:e} ratio={}",
            row.cells,
            row.err_rho,
            row.err_velocity,
            row.ratio.map(|r| format!("{r:.3}")).unwrap_or_else(|| "-".into()),
        );
    }
    let path = out.join("equiv.csv");
    fs::write(&path, csv).map_err(|e| Error::Io { path, source: e })?;
    let min_ratio = table
        .iter()
        .filter_map(|r| r.ratio)
        .fold(f64::INFINITY, f64::min);
    println!("EQUIV: levels={} min_ratio={:.3}", table.len(), min_ratio);
    Ok(EXIT_OK)
}

fn cmd_wsu_check(cfg: &RunConfig, out: &Path) -> Result<i32, Error> {
    if !matches!(cfg.scenario, ScenarioSpec::Perturbed { .. }) {
        return Err(Error::InvalidArgument(
            "wsu-check needs `scenario.kind = perturbed`".into(),
        ));
    }
    let run = wsu_certificate(
        &cfg.scenario,
        &cfg.grid,
        &cfg.params,
        &cfg.controls,
        cfg.snapshots,
        cfg.refinement,
        cfg.tolerance,
    )?;
    ensure_dir(out)?;
    write_stability_csv(&out.join("stability.csv"), &run.report)?;
    let rep = &run.report;
    let max_violation = rep
        .h
        .iter()
        .zip(&rep.bound)
        .map(|(h, b)| h - b - rep.tolerance_used)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    println!(
        "WSU: {} sup_H={:e} max_violation={:e}",
        if rep.passed { "PASS" } else { "FAIL" },
        rep.sup_h,
        max_violation,
    );
    Ok(if rep.passed { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_sweep(cfg: &RunConfig, out: &Path) -> Result<i32, Error> {
    if !matches!(cfg.scenario, ScenarioSpec::Perturbed { .. }) {
        return Err(Error::InvalidArgument(
            "sweep needs `scenario.kind = perturbed`".into(),
        ));
    }
    let result = sweep(
        &cfg.scenario,
        &cfg.grid,
        &cfg.params,
        &cfg.controls,
        cfg.snapshots,
        cfg.refinement,
        cfg.tolerance,
        &cfg.epsilons,
    )?;
    ensure_dir(out)?;
    let mut csv = String::from("epsilon,sup_h,passed\n");
    for row in &result.rows {
        csv.push_str(&format!("{},{},{}\n", row.epsilon, row.sup_h, row.passed));
        println!(
            "sweep: epsilon={:e} sup_H={:e} {}",
            row.epsilon,
            row.sup_h,
            if row.passed { "PASS" } else { "FAIL" }
        );
    }
    let path = out.join("sweep.csv");
    fs::write(&path, csv).map_err(|e| Error::Io { path, source: e })?;
    println!("SWEEP: runs={} exponent={:.4}", result.rows.len(), result.exponent);
    Ok(EXIT_OK)
}

fn cmd_mms(cfg: &RunConfig, out: &Path) -> Result<i32, Error> {
    if cfg.grid.length != 1.0 || cfg.grid.boundary != BoundaryKind::Periodic {
        return Err(Error::InvalidArgument(
            "mms needs the unit periodic box (grid.length = 1, boundary = periodic)".into(),
        ));
    }
    let levels = cfg.levels.unwrap_or(4);
    let table = crate::mms::mms_convergence(
        levels,
        cfg.grid.cells,
        &cfg.controls,
        &cfg.params,
        cfg.formulation,
    )?;
    ensure_dir(out)?;
    let mut csv = String::from("cells,err_rho,err_velocity,order_rho,order_velocity\n");
    let mut min_order = f64::INFINITY;
    for row in &table {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.cells,
            row.err_rho,
            row.err_velocity,
            row.order_rho.map(|o| o.to_string()).unwrap_or_default(),
            row.order_velocity.map(|o| o.to_string()).unwrap_or_default(),
        ));
        println!(
            "mms: cells={} err_rho={:e} err_velocity={:e} order_rho={} order_velocity={}",
            row.cells,
            row.err_rho,
            row.err_velocity,
            row.order_rho.map(|o| format!("{o:.3}")).unwrap_or_else(|| "-".into()),
            row.order_velocity.map(|o| format!("{o:.3}")).unwrap_or_else(|| "-".into()),
        );
        for o in [row.order_rho, row.order_velocity].into_iter().flatten() {
            min_order = min_order.min(o);
        }
    }
    let path = out.join("mms.csv");
    fs::write(&path, csv).map_err(|e| Error::Io { path, source: e })?;
    println!("MMS: formulation={} levels={} min_order={:.3}", cfg.formulation, levels, min_order);
    Ok(EXIT_OK)
}

fn cmd_admissibility(cfg: &RunConfig, out: &Path) -> Result<i32, Error> {
    let scenario = make_scenario(&cfg.scenario, &cfg.grid, &cfg.params)?;
    let rep = check_admissibility(&scenario)?;
    ensure_dir(out)?;
    let csv = format!(
        "mass_l1,rho_lgamma,kinetic_l2,effective_l2,weighted_l2plus,admissible\n{},{},{},{},{},{}\n",
        rep.mass_l1, rep.rho_lgamma, rep.kinetic_l2, rep.effective_l2, rep.weighted_l2plus, rep.admissible
    );
    let path = out.join("admissibility.csv");
    fs::write(&path, csv).map_err(|e| Error::Io { path, source: e })?;
    println!(
        "ADMISSIBILITY: {} mass_l1={:e} rho_lgamma={:e} kinetic_l2={:e} effective_l2={:e} weighted_l2plus={:e}",
        if rep.admissible { "PASS" } else { "FAIL" },
        rep.mass_l1,
        rep.rho_lgamma,
        rep.kinetic_l2,
        rep.effective_l2,
        rep.weighted_l2plus,
    );
    Ok(if rep.admissible { EXIT_OK } else { EXIT_FAIL })
}
