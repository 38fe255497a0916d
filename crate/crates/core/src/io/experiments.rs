//! The experiment catalog and its driver.
//!
//! Each experiment has a desk-scale default configuration (minutes on one
//! core) and a full-scale one; keys given explicitly in a configuration file
//! override either.  A run writes one CSV series and one final snapshot per
//! simulation plus `summary.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::diagnostics::contour::{isoperimetric_ratio, min_distance, zero_contour};
use crate::diagnostics::topology::{components, contact_edges, hole_count, phase_mask, threshold_mask};
use crate::diagnostics::{extract_contours, state_angles, theoretical_angles, ConvergenceReport, DiagnosticsRecord, Sign};
use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::model::{init_preset, spreading_coefficients, ModelParams, PhaseState, Preset, Spreading};
use crate::scheme::{check_stability_condition, RunOptions, SchemeParams, Stepper};

use super::config::ExperimentConfig;
use super::output::{write_json, write_series_csv};
use super::snapshot::save_snapshot;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    AccuracySpace,
    AccuracyTime,
    EnergyStability,
    AlgebraicConsistency,
    VolumeConservation,
    NeumannAngle,
    LiquidLens,
    TwoDroplets,
}

/// Order band for the convergence studies.
pub const ORDER_BAND: (f64, f64) = (1.8, 2.2);
pub const MEAN_DRIFT_TOL: f64 = 1e-10;
pub const VOLUME_DRIFT_TOL: f64 = 0.01;
pub const ANGLE_TOL_DEG: f64 = 3.0;
pub const JANUS_ANGLE_TOL_DEG: f64 = 4.0;
pub const PIN_TOL: f64 = 1e-6;
pub const CIRCLE_RATIO_TOL: f64 = 0.02;

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::AccuracySpace,
        Experiment::AccuracyTime,
        Experiment::EnergyStability,
        Experiment::AlgebraicConsistency,
        Experiment::VolumeConservation,
        Experiment::NeumannAngle,
        Experiment::LiquidLens,
        Experiment::TwoDroplets,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::AccuracySpace => "accuracy_space",
            Experiment::AccuracyTime => "accuracy_time",
            Experiment::EnergyStability => "energy_stability",
            Experiment::AlgebraicConsistency => "algebraic_consistency",
            Experiment::VolumeConservation => "volume_conservation",
            Experiment::NeumannAngle => "neumann_angle",
            Experiment::LiquidLens => "liquid_lens",
            Experiment::TwoDroplets => "two_droplets",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name).ok_or_else(|| Error::Config {
            key: "experiment".into(),
            reason: format!("unknown experiment `{name}`"),
        })
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::AccuracySpace => "spatial self-convergence of the square cross at a fixed time step",
            Experiment::AccuracyTime => "temporal self-convergence of the square cross on a fixed grid",
            Experiment::EnergyStability => "step-by-step energy decay of the square cross for four tension sets",
            Experiment::AlgebraicConsistency => "absent phase stays absent while an elliptic drop rounds up",
            Experiment::VolumeConservation => "phase volumes of the square cross under degenerate mobility",
            Experiment::NeumannAngle => "equilibrium junction angles of a lens against the force balance",
            Experiment::LiquidLens => "lens between two layers under partial and total spreading",
            Experiment::TwoDroplets => "two touching droplets: Janus, separated and core-shell outcomes",
        }
    }

    /// Default configuration at desk or full scale.
    pub fn config(self, paper_scale: bool) -> ExperimentConfig {
        let mut c = ExperimentConfig {
            experiment: Some(self),
            ..ExperimentConfig::default()
        };
        let full = paper_scale;
        let n = |desk: usize| if full { 401 } else { desk };
        let set = |c: &mut ExperimentConfig, sets: &[[f64; 3]]| {
            c.sigma = sets[0].to_vec();
            c.sigma_sets = Some(sets.to_vec());
        };
        match self {
            Experiment::AccuracyTime => {
                c.nx = 257;
                c.epsilon = 0.03;
                c.levels = Some(vec![1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0, 1.0 / 512.0]);
                c.scheme.tau = 1.0 / 64.0;
                c.t_end = 1.0;
                c.cadence = 1 << 20;
            }
            Experiment::AccuracySpace => {
                c.epsilon = 0.03;
                c.levels = Some(if full {
                    vec![1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0, 1.0 / 512.0, 1.0 / 1024.0]
                } else {
                    vec![1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0]
                });
                c.nx = 65;
                c.scheme.tau = 1e-3;
                c.t_end = 1.0;
                c.cadence = 1 << 20;
            }
            Experiment::EnergyStability => {
                c.nx = n(129);
                c.epsilon = if full { 0.01 } else { 0.02 };
                let s = if full { 100.0 } else { 1000.0 };
                c.scheme = c.scheme.clone().with_stabilizers(s).expect("valid stabilizer");
                c.t_end = if full { 50.0 } else { 20.0 };
                c.cadence = 10;
                set(&mut c, &[[1.0, 1.0, 1.0], [1.0, 2.0, 2.0], [0.6, 1.0, 0.6], [1.0, 0.8, 1.4]]);
            }
            Experiment::AlgebraicConsistency => {
                c.preset = Preset::AbsentPhase1;
                c.nx = n(129);
                c.epsilon = if full { 0.01 } else { 0.02 };
                c.t_end = 100.0;
                c.cadence = 100;
            }
            Experiment::VolumeConservation => {
                c.nx = n(129);
                c.epsilon = if full { 0.01 } else { 0.02 };
                c.t_end = 50.0;
                c.cadence = 50;
                set(&mut c, &[[1.0, 1.0, 1.0], [1.0, 2.0, 2.0], [1.0, 0.9, 1.1]]);
            }
            Experiment::NeumannAngle => {
                c.preset = Preset::LiquidLens;
                c.nx = n(129);
                c.epsilon = if full { 0.01 } else { 0.02 };
                c.m = vec![1e-3];
                c.t_end = if full { 50.0 } else { 10.0 };
                c.cadence = 50;
                set(&mut c, &[[1.0, 1.0, 1.0], [0.6, 1.0, 1.0], [1.0, 2.0, 2.0]]);
            }
            Experiment::LiquidLens => {
                c.preset = Preset::LiquidLens;
                c.nx = n(129);
                c.epsilon = 0.02;
                c.m = vec![1e-3];
                c.t_end = if full { 50.0 } else { 20.0 };
                c.cadence = 50;
                set(
                    &mut c,
                    &[[1.0, 1.0, 1.4], [1.0, 1.0, 1.0], [1.0, 1.0, 0.2], [3.0, 1.0, 1.0], [1.0, 3.0, 1.0]],
                );
            }
            Experiment::TwoDroplets => {
                c.preset = Preset::TwoDropletsSym;
                c.nx = n(129);
                c.epsilon = if full { 0.01 } else { 0.015 };
                c.m = vec![1e-3];
                c.t_end = if full { 50.0 } else { 20.0 };
                c.cadence = 50;
                set(&mut c, &[[3.0, 1.0, 1.0], [1.0, 1.0, 1.0], [1.0, 1.0, 3.0]]);
            }
        }
        c.ny = c.nx;
        c
    }
}

/// Applies the keys given explicitly in `user` on top of the experiment's
/// defaults.  Without an experiment the user configuration is returned.
pub fn resolve(user: &ExperimentConfig, paper_scale: bool) -> Result<ExperimentConfig> {
    let Some(e) = user.experiment else {
        return Ok(user.clone());
    };
    let mut c = e.config(paper_scale);
    for key in &user.explicit {
        match key.as_str() {
            "preset" => c.preset = user.preset,
            "seed" => c.seed = user.seed,
            "n" | "nx" | "ny" | "h" => {
                c.nx = user.nx;
                c.ny = user.ny;
            }
            "lx" => c.lx = user.lx,
            "ly" => c.ly = user.ly,
            "epsilon" => c.epsilon = user.epsilon,
            "phases" => c.phases = user.phases,
            "sigma" => {
                c.sigma = user.sigma.clone();
                c.sigma_set = true;
                if !user.is_explicit("sigma_sets") {
                    c.sigma_sets = None;
                }
            }
            "sigma_sets" => c.sigma_sets = user.sigma_sets.clone(),
            "levels" => c.levels = user.levels.clone(),
            "alpha" => c.alpha = user.alpha,
            "m" => c.m = user.m.clone(),
            "mobility_exponent" => c.mobility_exponent = user.mobility_exponent.clone(),
            "tau" => c.scheme.tau = user.scheme.tau,
            "A" | "A1" | "A2" => {
                c.scheme.a1 = user.scheme.a1;
                c.scheme.a2 = user.scheme.a2;
            }
            "B" | "B1" | "B2" => {
                c.scheme.b1 = user.scheme.b1;
                c.scheme.b2 = user.scheme.b2;
            }
            "solver_tol" => c.scheme.solver_tol = user.scheme.solver_tol,
            "solver_maxit" => c.scheme.solver_maxit = user.scheme.solver_maxit,
            "t_end" => c.t_end = user.t_end,
            "cadence" => c.cadence = user.cadence,
            "steady_slope" => c.steady_slope = user.steady_slope,
            "out" => c.out = user.out.clone(),
            _ => {}
        }
    }
    c.explicit = user.explicit.clone();
    c.validate()?;
    Ok(c)
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub desk: ExperimentConfig,
    pub full: ExperimentConfig,
}

pub fn list_presets() -> Vec<CatalogEntry> {
    Experiment::ALL
        .into_iter()
        .map(|e| CatalogEntry {
            name: e.name(),
            description: e.description(),
            desk: e.config(false),
            full: e.config(true),
        })
        .collect()
}

fn brief(c: &ExperimentConfig) -> String {
    let grid = match &c.levels {
        Some(l) if c.experiment == Some(Experiment::AccuracySpace) => {
            format!("h={}", l.iter().map(|h| format!("1/{}", (1.0 / h).round())).collect::<Vec<_>>().join(","))
        }
        _ => format!("{}x{}", c.nx, c.ny),
    };
    let tau = match &c.levels {
        Some(l) if c.experiment == Some(Experiment::AccuracyTime) => {
            format!("tau={}", l.iter().map(|t| format!("1/{}", (1.0 / t).round())).collect::<Vec<_>>().join(","))
        }
        _ => format!("tau={}", c.scheme.tau),
    };
    let sigma = match &c.sigma_sets {
        Some(s) => s.iter().map(|t| format!("({},{},{})", t[0], t[1], t[2])).collect::<Vec<_>>().join(" "),
        None => format!("({})", c.sigma.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")),
    };
    format!(
        "{} {grid} eps={} m={} {tau} A={} B={} t_end={} sigma={sigma}",
        c.preset.name(),
        c.epsilon,
        c.m[0],
        c.scheme.a1,
        c.scheme.b1,
        c.t_end
    )
}

/// Human-readable catalog, one block per experiment, in a fixed order.
pub fn catalog_text() -> String {
    let mut out = String::new();
    for e in list_presets() {
        out.push_str(&format!(
            "{}\n  {}\n  desk: {}\n  full: {}\n",
            e.name,
            e.description,
            brief(&e.desk),
            brief(&e.full)
        ));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        pass,
        detail: detail.into(),
    }
}

/// Final-state morphology of a ternary run.
#[derive(Clone, Debug, Serialize)]
pub struct Morphology {
    /// 4-connected components of each phase
    pub phase_components: Vec<usize>,
    pub phase_holes: Vec<i64>,
    pub junction: bool,
    pub angles: Option<[f64; 3]>,
    pub theoretical: Option<[f64; 3]>,
    pub angle_deviation: Option<f64>,
    /// lattice edges joining phase 2 and phase 3
    pub contact_23: usize,
    /// a phase-1 component spans the domain from left to right
    pub phase1_layer: bool,
    /// components of `psi > 0`
    pub droplet_components: usize,
    /// distance between the two largest `psi > 0` components' centroids
    pub droplet_distance: Option<f64>,
    /// shortest distance from the `psi` zero contour to the `phi = 0, psi > 0` interface
    pub lens_gap: Option<f64>,
}

pub fn morphology(state: &PhaseState, p: &ModelParams) -> Result<Morphology> {
    let g = state.grid();
    let masks: Vec<Vec<bool>> = (1..=3).map(|k| phase_mask(state, k)).collect();
    let phase_components = masks.iter().map(|m| components(&g, m).len()).collect();
    let phase_holes = masks.iter().map(|m| hole_count(&g, m)).collect();
    let angles = state_angles(state, p.epsilon).ok().map(|a| a.angles());
    let theoretical = theoretical_angles(&p.tensions).ok();
    let angle_deviation = match (angles, theoretical) {
        (Some(a), Some(t)) => Some((0..3).map(|k| (a[k] - t[k]).abs()).fold(0.0, f64::max)),
        _ => None,
    };
    let c = extract_contours(state)?;
    let junction = crate::diagnostics::locate_junction(&c).is_ok();
    let phase1_layer = components(&g, &masks[0]).iter().any(|k| k.touches[0] && k.touches[1]);
    let drops = components(&g, &threshold_mask(&state.fields[0], 0.0, Sign::Above));
    let droplet_distance = (drops.len() >= 2).then(|| {
        let (a, b) = (drops[0].centroid, drops[1].centroid);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
    });
    let psi0 = zero_contour(&state.fields[0]);
    let gap = min_distance(&psi0, &c.gamma1);
    Ok(Morphology {
        phase_components,
        phase_holes,
        junction,
        angles,
        theoretical,
        angle_deviation,
        contact_23: contact_edges(&g, &masks[1], &masks[2]),
        phase1_layer,
        droplet_components: drops.len(),
        droplet_distance,
        lens_gap: gap.is_finite().then_some(gap),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub label: String,
    pub preset: Preset,
    pub sigma: Vec<f64>,
    pub nx: usize,
    pub ny: usize,
    pub epsilon: f64,
    pub tau: f64,
    pub steps: usize,
    pub t_final: f64,
    pub energy_initial: f64,
    pub energy_final: f64,
    pub energy_monotone: bool,
    pub energy_violations: usize,
    pub max_energy_rise: f64,
    pub mean_drift: Vec<f64>,
    pub volume_drift: Vec<f64>,
    /// extremes of each field over every step
    pub field_min: Vec<f64>,
    pub field_max: Vec<f64>,
    pub stability_holds: bool,
    pub stability_margin: f64,
    pub total_iterations: usize,
    pub max_iterations: usize,
    pub max_residual: f64,
    pub spreading: Option<Spreading>,
    pub morphology: Option<Morphology>,
    /// `(t, distance)` of the two largest droplets, sampled with the series
    pub droplet_distances: Vec<(f64, Option<f64>)>,
    /// isoperimetric ratio of the `phi` zero contour at the end
    pub phi_circle_ratio: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceSummary {
    pub t: f64,
    pub report: ConvergenceReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentSummary {
    pub experiment: Option<Experiment>,
    pub description: String,
    pub config: ExperimentConfig,
    pub runs: Vec<RunSummary>,
    pub convergence: Vec<ConvergenceSummary>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub failure: Option<String>,
}

impl ExperimentSummary {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Simulation {
    summary: RunSummary,
    samples: Vec<PhaseState>,
    state: PhaseState,
    record: DiagnosticsRecord,
}

struct RunSpec<'a> {
    label: String,
    preset: Preset,
    grid: Grid2D,
    p: ModelParams,
    sp: SchemeParams,
    cfg: &'a ExperimentConfig,
    sample_times: &'a [f64],
    track_droplets: bool,
}

fn simulate(spec: RunSpec<'_>, out: Option<&Path>) -> Result<Simulation> {
    let RunSpec {
        label,
        preset,
        grid,
        p,
        sp,
        cfg,
        sample_times,
        track_droplets,
    } = spec;
    let state0 = init_preset(preset, &p, grid)?;
    let mut stepper = Stepper::new(p.clone(), sp.clone(), grid)?;
    let opts = RunOptions {
        t_end: cfg.t_end,
        cadence: cfg.cadence,
        steady_slope: cfg.steady_slope,
    };
    let nf = state0.n_fields();
    let mut lo: Vec<f64> = state0.fields.iter().map(|f| f.min()).collect();
    let mut hi: Vec<f64> = state0.fields.iter().map(|f| f.max()).collect();
    let mut samples = Vec::new();
    let mut distances = Vec::new();
    let drop_distance = |s: &PhaseState| {
        let d = components(&s.grid(), &threshold_mask(&s.fields[0], 0.0, Sign::Above));
        (d.len() >= 2).then(|| {
            let (a, b) = (d[0].centroid, d[1].centroid);
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
        })
    };
    if track_droplets {
        distances.push((0.0, drop_distance(&state0)));
    }
    let mut k = 0usize;
    let tol = 1e-9 * sp.tau;
    let outcome = stepper.run(state0, &opts, |s, _| {
        k += 1;
        for f in 0..nf {
            lo[f] = lo[f].min(s.fields[f].min());
            hi[f] = hi[f].max(s.fields[f].max());
        }
        if sample_times.iter().any(|&t| (s.time - t).abs() < tol) {
            samples.push(s.clone());
        }
        if track_droplets && k.is_multiple_of(cfg.cadence) {
            distances.push((s.time, drop_distance(s)));
        }
        true
    })?;
    let rec = &outcome.record;
    let state = outcome.state;
    if track_droplets && distances.last().map(|d| d.0) != Some(state.time) {
        distances.push((state.time, drop_distance(&state)));
    }
    if let Some(dir) = out {
        write_series_csv(&dir.join(format!("{label}.csv")), &rec.rows, nf)?;
        save_snapshot(&dir.join(format!("{label}.snap")), &state)?;
    }
    let ternary = nf == 2;
    let morphology = if ternary { morphology(&state, &p).ok() } else { None };
    let phi_circle_ratio = if ternary {
        let mut lines = zero_contour(&state.fields[1]);
        lines.retain(|l| l.closed);
        lines.sort_by(|a, b| b.length().total_cmp(&a.length()));
        lines.first().and_then(|l| isoperimetric_ratio(l).ok())
    } else {
        None
    };
    let stab = check_stability_condition(&p, &sp);
    let summary = RunSummary {
        label,
        preset,
        sigma: p.tensions.as_ternary().map(|s| s.to_vec()).unwrap_or_else(|| cfg.sigma.clone()),
        nx: grid.nx,
        ny: grid.ny,
        epsilon: p.epsilon,
        tau: sp.tau,
        steps: rec.steps,
        t_final: state.time,
        energy_initial: rec.rows[0].energy,
        energy_final: rec.last().energy,
        energy_monotone: rec.energy_monotone(),
        energy_violations: rec.energy_violations,
        max_energy_rise: rec.max_energy_rise,
        mean_drift: rec.mean_drift.clone(),
        volume_drift: rec.volume_drift.clone(),
        field_min: lo,
        field_max: hi,
        stability_holds: stab.holds,
        stability_margin: stab.margin,
        total_iterations: rec.total_iterations,
        max_iterations: rec.max_iterations,
        max_residual: rec.max_residual,
        spreading: spreading_coefficients(&p.tensions).ok(),
        morphology,
        droplet_distances: distances,
        phi_circle_ratio,
        failure: rec.failure.clone(),
    };
    Ok(Simulation {
        summary,
        samples,
        state,
        record: outcome.record,
    })
}

fn sigma_label(s: &[f64]) -> String {
    s.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join("_")
}

fn sigma_runs(cfg: &ExperimentConfig) -> Vec<Option<[f64; 3]>> {
    match &cfg.sigma_sets {
        Some(sets) => sets.iter().map(|s| Some(*s)).collect(),
        None => vec![None],
    }
}

/// Initial condition for a two-droplet run: the core-shell layout when the
/// droplet phase 2 spreads over phase 3, the symmetric one otherwise.
pub fn droplet_preset(p: &ModelParams) -> Preset {
    match spreading_coefficients(&p.tensions) {
        Ok(s) if s.s[1] < 0.0 => Preset::TwoDropletsRight,
        _ => Preset::TwoDropletsSym,
    }
}

/// Runs the configured experiment, writing artifacts under `cfg.out` (when
/// set).  Step failures end the affected simulation, are reported in the
/// summary and make it fail; configuration errors are returned.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    cfg.validate()?;
    let out = cfg.out.clone();
    if let Some(dir) = &out {
        fs::create_dir_all(dir)?;
    }
    let out = out.as_deref();
    let mut runs = Vec::new();
    let mut convergence = Vec::new();
    let mut checks = Vec::new();
    let exp = cfg.experiment;
    let sample_times = [cfg.t_end / 2.0, cfg.t_end];

    match exp {
        Some(Experiment::AccuracyTime) | Some(Experiment::AccuracySpace) => {
            let temporal = exp == Some(Experiment::AccuracyTime);
            let levels = cfg.levels.clone().unwrap_or_default();
            let p = cfg.model(None)?;
            let mut per_level = Vec::new();
            for &lvl in &levels {
                let (grid, tau) = if temporal {
                    (cfg.grid()?, lvl)
                } else {
                    let n = (cfg.lx / lvl).round() as usize + 1;
                    (Grid2D::new(n, n, cfg.lx, cfg.ly)?, cfg.scheme.tau)
                };
                let sp = SchemeParams { tau, ..cfg.scheme.clone() };
                sp.validate()?;
                let label = if temporal {
                    format!("tau_1_{}", (1.0 / tau).round())
                } else {
                    format!("h_1_{}", (1.0 / lvl).round())
                };
                let sim = simulate(
                    RunSpec {
                        label,
                        preset: cfg.preset,
                        grid,
                        p: p.clone(),
                        sp,
                        cfg,
                        sample_times: &sample_times,
                        track_droplets: false,
                    },
                    out,
                )?;
                per_level.push(sim.samples);
                runs.push(sim.summary);
            }
            let complete = per_level.iter().all(|s| s.len() == sample_times.len()) && runs.iter().all(|r| r.failure.is_none());
            if complete {
                for (i, &t) in sample_times.iter().enumerate() {
                    let sols: Vec<PhaseState> = per_level.iter().map(|s| s[i].clone()).collect();
                    let report = if temporal {
                        ConvergenceReport::temporal(&levels, &sols)?
                    } else {
                        ConvergenceReport::spatial(&levels, &sols)?
                    };
                    let (a, b) = report.order_range().unwrap_or((f64::NAN, f64::NAN));
                    checks.push(check(
                        format!("orders at t={t}"),
                        a >= ORDER_BAND.0 && b <= ORDER_BAND.1,
                        format!("orders in [{a:.3}, {b:.3}], band [{}, {}]", ORDER_BAND.0, ORDER_BAND.1),
                    ));
                    convergence.push(ConvergenceSummary { t, report });
                }
            } else {
                checks.push(check("orders", false, "a level did not reach the sample times"));
            }
        }
        _ => {
            let track = exp == Some(Experiment::TwoDroplets);
            for sigma in sigma_runs(cfg) {
                let p = cfg.model(sigma)?;
                let preset = if track && !cfg.is_explicit("preset") { droplet_preset(&p) } else { cfg.preset };
                let label = match sigma {
                    Some(s) => format!("sigma_{}", sigma_label(&s)),
                    None => "run".to_string(),
                };
                let sim = simulate(
                    RunSpec {
                        label,
                        preset,
                        grid: cfg.grid()?,
                        p: p.clone(),
                        sp: cfg.scheme.clone(),
                        cfg,
                        sample_times: &[],
                        track_droplets: track,
                    },
                    out,
                )?;
                checks.extend(run_checks(exp, &sim, &p));
                runs.push(sim.summary);
            }
        }
    }

    for r in &runs {
        let drift = r.mean_drift.iter().copied().fold(0.0, f64::max);
        checks.push(check(
            format!("{}: mean conservation", r.label),
            drift <= MEAN_DRIFT_TOL,
            format!("max relative mean drift {drift:.3e}"),
        ));
        if let Some(f) = &r.failure {
            checks.push(check(format!("{}: completed", r.label), false, f.clone()));
        }
    }
    let failure = runs.iter().find_map(|r| r.failure.clone());
    let summary = ExperimentSummary {
        experiment: exp,
        description: exp.map_or("single run", |e| e.description()).to_string(),
        config: cfg.clone(),
        pass: checks.iter().all(|c| c.pass),
        runs,
        convergence,
        checks,
        failure,
    };
    if let Some(dir) = out {
        write_json(&dir.join("summary.json"), &summary)?;
    }
    Ok(summary)
}

fn run_checks(exp: Option<Experiment>, sim: &Simulation, p: &ModelParams) -> Vec<Check> {
    let r = &sim.summary;
    let l = &r.label;
    let eps = p.epsilon;
    let mut out = Vec::new();
    let energy = || {
        check(
            format!("{l}: energy monotone"),
            r.energy_monotone,
            format!("{} violations over {} steps, largest relative rise {:.3e}", r.energy_violations, r.steps, r.max_energy_rise),
        )
    };
    let m = r.morphology.as_ref();
    let regime = r.spreading.as_ref().map(|s| s.s);
    match exp {
        None | Some(Experiment::EnergyStability) => out.push(energy()),
        Some(Experiment::AlgebraicConsistency) => {
            let pin = (1.0 - r.field_min[0]).abs().max((r.field_max[0] - 1.0).abs());
            out.push(check(format!("{l}: absent phase pinned"), pin <= PIN_TOL, format!("max |psi - 1| = {pin:.3e}")));
            let ratio = r.phi_circle_ratio.unwrap_or(0.0);
            out.push(check(
                format!("{l}: interface rounds up"),
                ratio >= 1.0 - CIRCLE_RATIO_TOL,
                format!("isoperimetric ratio {ratio:.4} (initial {:.4})", initial_circle_ratio(p, sim).unwrap_or(f64::NAN)),
            ));
        }
        Some(Experiment::VolumeConservation) => {
            let d = sim.record.max_volume_drift();
            out.push(check(format!("{l}: volumes"), d <= VOLUME_DRIFT_TOL, format!("max relative volume drift {d:.3e}")));
        }
        Some(Experiment::NeumannAngle) => out.push(angle_check(l, m, ANGLE_TOL_DEG)),
        Some(Experiment::LiquidLens) => {
            if let (Some(s), Some(m)) = (regime, m) {
                if s[0] < 0.0 {
                    out.push(check(
                        format!("{l}: lens spreads into a layer"),
                        !m.junction && m.contact_23 == 0 && m.phase1_layer,
                        format!("junction {}, phase 2/3 contact edges {}, spanning layer {}", m.junction, m.contact_23, m.phase1_layer),
                    ));
                } else if s[1] < 0.0 || s[2] < 0.0 {
                    let gap = m.lens_gap.unwrap_or(f64::INFINITY);
                    out.push(check(
                        format!("{l}: lens detaches"),
                        gap > 4.0 * eps,
                        format!("gap {gap:.4} vs 4 eps = {:.4}, junction {}", 4.0 * eps, m.junction),
                    ));
                }
            }
        }
        Some(Experiment::TwoDroplets) => {
            if let (Some(s), Some(m)) = (regime, m) {
                if s.iter().all(|&v| v > 0.0) {
                    out.push(angle_check(l, Some(m), JANUS_ANGLE_TOL_DEG));
                } else if s[0] < 0.0 {
                    let d = &r.droplet_distances;
                    let mid = d.iter().rfind(|x| x.0 <= r.t_final / 2.0 + 1e-9).and_then(|x| x.1);
                    let end = d.last().and_then(|x| x.1);
                    let growing = matches!((mid, end), (Some(a), Some(b)) if b > a);
                    out.push(check(
                        format!("{l}: droplets separate"),
                        m.droplet_components == 2 && !m.junction && growing,
                        format!("{} droplets, junction {}, distance {mid:?} -> {end:?}", m.droplet_components, m.junction),
                    ));
                } else if s[1] < 0.0 {
                    out.push(check(
                        format!("{l}: core-shell"),
                        m.phase_holes[1] == 1,
                        format!("phase 2 has {} components and {} holes", m.phase_components[1], m.phase_holes[1]),
                    ));
                }
            }
        }
        Some(Experiment::AccuracySpace) | Some(Experiment::AccuracyTime) => {}
    }
    out
}

fn initial_circle_ratio(p: &ModelParams, sim: &Simulation) -> Option<f64> {
    let s = init_preset(sim.summary.preset, p, sim.state.grid()).ok()?;
    let mut lines = zero_contour(&s.fields[1]);
    lines.retain(|l| l.closed);
    lines.sort_by(|a, b| b.length().total_cmp(&a.length()));
    lines.first().and_then(|l| isoperimetric_ratio(l).ok())
}

fn angle_check(label: &str, m: Option<&Morphology>, tol: f64) -> Check {
    match m.and_then(|m| Some((m.angles?, m.theoretical?, m.angle_deviation?))) {
        Some((a, t, dev)) => check(
            format!("{label}: junction angles"),
            dev <= tol,
            format!(
                "measured ({:.2}, {:.2}, {:.2}) vs ({:.2}, {:.2}, {:.2}), max deviation {dev:.2} deg",
                a[0], a[1], a[2], t[0], t[1], t[2]
            ),
        ),
        None => check(format!("{label}: junction angles"), false, "no junction found"),
    }
}

/// Default output directory of an experiment.
pub fn default_out_dir(cfg: &ExperimentConfig) -> PathBuf {
    PathBuf::from("out").join(cfg.experiment.map_or("run", |e| e.name()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::config::parse_config;

    #[test]
    fn catalog_is_complete_and_stable() {
        let cat = list_presets();
        assert_eq!(cat.len(), 8);
        for e in &cat {
            assert_eq!(Experiment::from_name(e.name).unwrap().name(), e.name);
            e.desk.validate().unwrap();
            e.full.validate().unwrap();
            init_preset(e.desk.preset, &e.desk.model(None).unwrap(), Grid2D::unit(9).unwrap()).unwrap();
        }
        assert_eq!(catalog_text(), catalog_text());
        assert!(!catalog_text().contains('\u{a7}'));
    }

    #[test]
    fn explicit_keys_override_defaults() {
        let user = parse_config("experiment = neumann_angle\nsigma = 1,2,2\nn = 65\nt_end = 0.5").unwrap();
        let c = resolve(&user, false).unwrap();
        assert_eq!(c.nx, 65);
        assert_eq!(c.sigma, vec![1.0, 2.0, 2.0]);
        assert!(c.sigma_sets.is_none());
        assert_eq!(c.m, vec![1e-3]);
        assert_eq!(c.preset, Preset::LiquidLens);
        let full = resolve(&parse_config("experiment = liquid_lens").unwrap(), true).unwrap();
        assert_eq!(full.nx, 401);
    }

    #[test]
    fn droplet_layout_follows_spreading() {
        let p = ModelParams::ternary(0.02, [1.0, 1.0, 3.0], 3.01, 1e-3).unwrap();
        assert_eq!(droplet_preset(&p), Preset::TwoDropletsRight);
        let p = ModelParams::ternary(0.02, [3.0, 1.0, 1.0], 3.01, 1e-3).unwrap();
        assert_eq!(droplet_preset(&p), Preset::TwoDropletsSym);
    }

    #[test]
    fn small_run_writes_artifacts() {
        let dir = std::env::temp_dir().join(format!("dbpf-exp-{}", std::process::id()));
        let text = format!(
            "experiment = energy_stability\nn = 33\nepsilon = 0.05\nt_end = 0.05\ncadence = 2\nsigma_sets = 1,1,1\nout = {}",
            dir.display()
        );
        let c = resolve(&parse_config(&text).unwrap(), false).unwrap();
        let s = run_experiment(&c).unwrap();
        assert!(s.pass, "{:?}", s.checks);
        assert_eq!(s.runs.len(), 1);
        assert_eq!(s.runs[0].steps, 5);
        let csv = fs::read_to_string(dir.join("sigma_1_1_1.csv")).unwrap();
        assert_eq!(csv.lines().count(), 1 + 1 + 3);
        assert!(dir.join("sigma_1_1_1.snap").exists());
        let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
        assert_eq!(json["pass"], serde_json::Value::Bool(true));
        // same configuration, same numbers
        let again = run_experiment(&c).unwrap();
        assert_eq!(
            serde_json::to_string(&again.runs).unwrap(),
            serde_json::to_string(&s.runs).unwrap()
        );
        fs::remove_dir_all(&dir).ok();
    }
}
