//! Run configuration: a strict line-oriented `key = value` format with
//! `[section]` headers. Unknown sections or keys are fatal and name the
//! offending key and line; a typo in `gamma` or `alpha` would silently
//! change the physics regime otherwise.
//!
//! Sections: `scenario`, `params`, `grid`, `controls`, `output`,
//! `command`. Blank lines and `#` comments are allowed. Defaults exist
//! only for the keys documented in the README.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::model::{
    BoundaryKind, FaceAverage, FluidParams, Formulation, Grid1D, TimeControls,
    DEFAULT_DENSITY_FLOOR,
};
use crate::scenarios::{PerturbTarget, ScenarioSpec};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: ScenarioSpec,
    pub params: FluidParams,
    pub grid: Grid1D,
    pub controls: TimeControls,
    pub formulation: Formulation,
    pub out_dir: PathBuf,
    pub epsilons: Vec<f64>,
    pub levels: Option<usize>,
    pub refinement: usize,
    pub tolerance: Option<f64>,
    pub snapshots: usize,
}

const SECTIONS: [&str; 6] = ["scenario", "params", "grid", "controls", "output", "command"];

fn allowed_keys(section: &str) -> &'static [&'static str] {
    match section {
        "scenario" => &[
            "kind",
            "base_kind",
            "center",
            "width",
            "amplitude",
            "u0_amplitude",
            "rho_min",
            "wavenumber",
            "epsilon",
            "perturb_target",
            "perturb_wavenumber",
        ],
        "params" => &["gamma", "a", "mu", "alpha", "delta"],
        "grid" => &["length", "cells", "boundary"],
        "controls" => &[
            "t_end",
            "cfl_advective",
            "cfl_diffusive",
            "max_steps",
            "snapshot_stride",
            "density_floor",
            "face_average",
        ],
        "output" => &["dir"],
        "command" => &[
            "formulation",
            "epsilons",
            "levels",
            "refinement",
            "tolerance",
            "snapshots",
        ],
        _ => &[],
    }
}

struct Entry {
    section: String,
    key: String,
    value: String,
    line: usize,
    used: std::cell::Cell<bool>,
}

struct Raw {
    entries: Vec<Entry>,
}

impl Raw {
    fn parse(text: &str) -> Result<Raw> {
        let mut entries: Vec<Entry> = Vec::new();
        let mut section: Option<String> = None;
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw_line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if let Some(name) = trimmed.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| parse_err(line, "unterminated section header"))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(parse_err(line, format!("unknown section `[{name}]`")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = trimmed
                .split_once('=')
                .ok_or_else(|| parse_err(line, format!("expected `key = value`, got `{trimmed}`")))?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            let section = section
                .clone()
                .ok_or_else(|| parse_err(line, format!("key `{key}` before any [section]")))?;
            if key.is_empty() {
                return Err(parse_err(line, "empty key"));
            }
            if !allowed_keys(&section).contains(&key.as_str()) {
                return Err(parse_err(line, format!("unknown key `{section}.{key}`")));
            }
            if let Some(prev) = entries
                .iter()
                .find(|e| e.section == section && e.key == key)
            {
                return Err(parse_err(
                    line,
                    format!("duplicate key `{section}.{key}` (first set on line {})", prev.line),
                ));
            }
            entries.push(Entry {
                section,
                key,
                value,
                line,
                used: std::cell::Cell::new(false),
            });
        }
        Ok(Raw { entries })
    }

    fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries
            .iter()
            .find(|e| e.section == section && e.key == key)
            .inspect(|e| e.used.set(true))
    }

    fn require(&self, section: &str, key: &str) -> Result<&Entry> {
        self.get(section, key).ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("missing required key `{section}.{key}`"),
        })
    }

    fn first_unused(&self) -> Option<&Entry> {
        self.entries.iter().find(|e| !e.used.get())
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn f64_of(e: &Entry) -> Result<f64> {
    e.value.parse::<f64>().map_err(|_| {
        parse_err(
            e.line,
            format!("`{}.{}` expects a number, got `{}`", e.section, e.key, e.value),
        )
    })
}

fn usize_of(e: &Entry) -> Result<usize> {
    e.value.parse::<usize>().map_err(|_| {
        parse_err(
            e.line,
            format!("`{}.{}` expects a non-negative integer, got `{}`", e.section, e.key, e.value),
        )
    })
}

fn u64_of(e: &Entry) -> Result<u64> {
    e.value.parse::<u64>().map_err(|_| {
        parse_err(
            e.line,
            format!("`{}.{}` expects a non-negative integer, got `{}`", e.section, e.key, e.value),
        )
    })
}

fn u32_of(e: &Entry) -> Result<u32> {
    e.value.parse::<u32>().map_err(|_| {
        parse_err(
            e.line,
            format!("`{}.{}` expects a non-negative integer, got `{}`", e.section, e.key, e.value),
        )
    })
}

fn check(e: &Entry, ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(parse_err(
            e.line,
            format!("`{}.{}` {what}, got `{}`", e.section, e.key, e.value),
        ))
    }
}

/// Parses and fully validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw = Raw::parse(text)?;

    let params = read_params(&raw)?;
    let grid = read_grid(&raw)?;
    let controls = read_controls(&raw)?;
    let scenario = read_scenario(&raw, &grid)?;

    let out_dir = PathBuf::from(
        raw.get("output", "dir")
            .map(|e| e.value.clone())
            .unwrap_or_else(|| "out".to_string()),
    );

    let formulation = match raw.get("command", "formulation") {
        Some(e) => match e.value.as_str() {
            "u" => Formulation::U,
            "v" => Formulation::V,
            other => {
                return Err(parse_err(
                    e.line,
                    format!("`command.formulation` must be `u` or `v`, got `{other}`"),
                ))
            }
        },
        None => Formulation::U,
    };

    let epsilons = match raw.get("command", "epsilons") {
        Some(e) => {
            let mut eps = Vec::new();
            for part in e.value.split(',') {
                let x: f64 = part.trim().parse().map_err(|_| {
                    parse_err(
                        e.line,
                        format!("`command.epsilons` expects comma-separated numbers, got `{}`", e.value),
                    )
                })?;
                check(e, x >= 0.0, "entries must be >= 0")?;
                eps.push(x);
            }
            check(e, !eps.is_empty(), "must not be empty")?;
            eps
        }
        None => vec![1e-1, 1e-2, 1e-3],
    };

    let levels = raw
        .get("command", "levels")
        .map(|e| {
            let v = usize_of(e)?;
            check(e, v >= 1, "must be >= 1")?;
            Ok::<usize, Error>(v)
        })
        .transpose()?;

    let refinement = match raw.get("command", "refinement") {
        Some(e) => {
            let v = usize_of(e)?;
            check(e, matches!(v, 1 | 2 | 4 | 8), "must be one of 1, 2, 4, 8")?;
            v
        }
        None => 1,
    };

    let tolerance = raw
        .get("command", "tolerance")
        .map(|e| {
            let v = f64_of(e)?;
            check(e, v >= 0.0, "must be >= 0")?;
            Ok::<f64, Error>(v)
        })
        .transpose()?;

    let snapshots = match raw.get("command", "snapshots") {
        Some(e) => {
            let v = usize_of(e)?;
            check(e, v >= 1, "must be >= 1")?;
            v
        }
        None => 30,
    };

    if let Some(stray) = raw.first_unused() {
        return Err(parse_err(
            stray.line,
            format!("unknown key `{}.{}`", stray.section, stray.key),
        ));
    }

    Ok(RunConfig {
        scenario,
        params,
        grid,
        controls,
        formulation,
        out_dir,
        epsilons,
        levels,
        refinement,
        tolerance,
        snapshots,
    })
}

fn read_params(raw: &Raw) -> Result<FluidParams> {
    let gamma_e = raw.require("params", "gamma")?;
    let gamma = f64_of(gamma_e)?;
    check(gamma_e, gamma > 1.0, "must be > 1")?;
    let a_e = raw.require("params", "a")?;
    let a = f64_of(a_e)?;
    check(a_e, a > 0.0, "must be > 0")?;
    let mu_e = raw.require("params", "mu")?;
    let mu = f64_of(mu_e)?;
    check(mu_e, mu > 0.0, "must be > 0")?;
    let alpha_e = raw.require("params", "alpha")?;
    let alpha = f64_of(alpha_e)?;
    check(alpha_e, alpha >= 0.0, "must be >= 0")?;
    let delta = match raw.get("params", "delta") {
        Some(e) => {
            let v = f64_of(e)?;
            check(e, v > 0.0, "must be > 0")?;
            v
        }
        None => 0.1,
    };
    FluidParams::new(gamma, a, mu, alpha, delta)
}

fn read_grid(raw: &Raw) -> Result<Grid1D> {
    let length_e = raw.require("grid", "length")?;
    let length = f64_of(length_e)?;
    check(length_e, length > 0.0, "must be > 0")?;
    let cells_e = raw.require("grid", "cells")?;
    let cells = usize_of(cells_e)?;
    check(cells_e, cells >= 4, "must be >= 4")?;
    let boundary = match raw.get("grid", "boundary") {
        Some(e) => match e.value.as_str() {
            "periodic" => BoundaryKind::Periodic,
            "extrapolate" => BoundaryKind::Extrapolate,
            other => {
                return Err(parse_err(
                    e.line,
                    format!("`grid.boundary` must be `periodic` or `extrapolate`, got `{other}`"),
                ))
            }
        },
        None => BoundaryKind::Periodic,
    };
    Grid1D::new(length, cells, boundary)
}

fn read_controls(raw: &Raw) -> Result<TimeControls> {
    let t_end_e = raw.require("controls", "t_end")?;
    let t_end = f64_of(t_end_e)?;
    check(t_end_e, t_end >= 0.0, "must be >= 0")?;
    let cfl_advective = match raw.get("controls", "cfl_advective") {
        Some(e) => {
            let v = f64_of(e)?;
            check(e, v > 0.0 && v <= 1.0, "must lie in (0, 1]")?;
            v
        }
        None => TimeControls::DEFAULT_CFL_ADVECTIVE,
    };
    let cfl_diffusive = match raw.get("controls", "cfl_diffusive") {
        Some(e) => {
            let v = f64_of(e)?;
            check(e, v > 0.0 && v <= 0.5, "must lie in (0, 0.5]")?;
            v
        }
        None => TimeControls::DEFAULT_CFL_DIFFUSIVE,
    };
    let max_steps = match raw.get("controls", "max_steps") {
        Some(e) => {
            let v = u64_of(e)?;
            check(e, v >= 1, "must be >= 1")?;
            v
        }
        None => TimeControls::DEFAULT_MAX_STEPS,
    };
    let snapshot_stride = match raw.get("controls", "snapshot_stride") {
        Some(e) => {
            let v = u64_of(e)?;
            check(e, v >= 1, "must be >= 1")?;
            v
        }
        None => TimeControls::DEFAULT_SNAPSHOT_STRIDE,
    };
    let density_floor = match raw.get("controls", "density_floor") {
        Some(e) => {
            let v = f64_of(e)?;
            check(e, v >= 0.0, "must be >= 0")?;
            v
        }
        None => DEFAULT_DENSITY_FLOOR,
    };
    let face_average = match raw.get("controls", "face_average") {
        Some(e) => match e.value.as_str() {
            "arithmetic" => FaceAverage::Arithmetic,
            "harmonic" => FaceAverage::Harmonic,
            other => {
                return Err(parse_err(
                    e.line,
                    format!(
                        "`controls.face_average` must be `arithmetic` or `harmonic`, got `{other}`"
                    ),
                ))
            }
        },
        None => FaceAverage::Arithmetic,
    };
    TimeControls::checked(
        t_end,
        cfl_advective,
        cfl_diffusive,
        max_steps,
        snapshot_stride,
        density_floor,
        face_average,
    )
}

fn read_scenario(raw: &Raw, grid: &Grid1D) -> Result<ScenarioSpec> {
    let kind_e = raw.require("scenario", "kind")?;
    match kind_e.value.as_str() {
        "vacuum_bump" => read_bump(raw, grid),
        "smooth_periodic" => read_smooth(raw),
        "perturbed" => {
            let base_e = raw.require("scenario", "base_kind")?;
            let base = match base_e.value.as_str() {
                "vacuum_bump" => read_bump(raw, grid)?,
                "smooth_periodic" => read_smooth(raw)?,
                other => {
                    return Err(parse_err(
                        base_e.line,
                        format!(
                            "`scenario.base_kind` must be `vacuum_bump` or `smooth_periodic`, got `{other}`"
                        ),
                    ))
                }
            };
            let eps_e = raw.require("scenario", "epsilon")?;
            let epsilon = f64_of(eps_e)?;
            check(eps_e, epsilon >= 0.0, "must be >= 0")?;
            let target = match raw.get("scenario", "perturb_target") {
                Some(e) => match e.value.as_str() {
                    "velocity" => PerturbTarget::Velocity,
                    "density" => PerturbTarget::Density,
                    "both" => PerturbTarget::Both,
                    other => {
                        return Err(parse_err(
                            e.line,
                            format!(
                                "`scenario.perturb_target` must be `velocity`, `density` or `both`, got `{other}`"
                            ),
                        ))
                    }
                },
                None => PerturbTarget::Velocity,
            };
            let wavenumber = match raw.get("scenario", "perturb_wavenumber") {
                Some(e) => {
                    let v = u32_of(e)?;
                    check(e, v >= 1, "must be >= 1")?;
                    v
                }
                None => 1,
            };
            Ok(ScenarioSpec::Perturbed { base: Box::new(base), epsilon, target, wavenumber })
        }
        other => Err(parse_err(
            kind_e.line,
            format!(
                "`scenario.kind` must be `vacuum_bump`, `smooth_periodic` or `perturbed`, got `{other}`"
            ),
        )),
    }
}

fn read_bump(raw: &Raw, grid: &Grid1D) -> Result<ScenarioSpec> {
    let center_e = raw.require("scenario", "center")?;
    let center = f64_of(center_e)?;
    check(center_e, center >= 0.0 && center <= grid.length, "must lie inside the box")?;
    let width_e = raw.require("scenario", "width")?;
    let width = f64_of(width_e)?;
    check(width_e, width > 0.0, "must be > 0")?;
    let amp_e = raw.require("scenario", "amplitude")?;
    let amplitude = f64_of(amp_e)?;
    check(amp_e, amplitude > 0.0, "must be > 0")?;
    let u0_amplitude = raw.get("scenario", "u0_amplitude").map(f64_of).transpose()?.unwrap_or(0.0);
    Ok(ScenarioSpec::VacuumBump { center, width, amplitude, u0_amplitude })
}

fn read_smooth(raw: &Raw) -> Result<ScenarioSpec> {
    let rho_min_e = raw.require("scenario", "rho_min")?;
    let rho_min = f64_of(rho_min_e)?;
    check(rho_min_e, rho_min > 0.0, "must be > 0")?;
    let amp_e = raw.require("scenario", "amplitude")?;
    let amplitude = f64_of(amp_e)?;
    check(amp_e, amplitude >= 0.0, "must be >= 0")?;
    let wavenumber = match raw.get("scenario", "wavenumber") {
        Some(e) => {
            let v = u32_of(e)?;
            check(e, v >= 1, "must be >= 1")?;
            v
        }
        None => 1,
    };
    let u0_amplitude = raw.get("scenario", "u0_amplitude").map(f64_of).transpose()?.unwrap_or(0.0);
    Ok(ScenarioSpec::SmoothPeriodic { rho_min, amplitude, wavenumber, u0_amplitude })
}
