//! Post-processing: convergence orders, interfaces and junction angles,
//! topology, and the per-run time series.

pub mod angles;
pub mod contour;
pub mod topology;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::grid::{coarsen_compare, norm, Norm, ScalarField};
use crate::model::{free_energy, volumes, ModelParams, PhaseState};
use crate::scheme::StepReport;

pub use angles::{locate_junction, measure_angles, theoretical_angles, AngleReport};
pub use contour::{extract_contours, isoperimetric_ratio, Contours, Polyline};
pub use topology::{count_components, hole_count, Sign};

/// `log2(err_coarse / err_fine)`.
pub fn estimate_order(err_coarse: f64, err_fine: f64) -> Result<f64> {
    if !(err_coarse > 0.0 && err_fine > 0.0) {
        return Err(invalid("errors", format!("need positive errors, got {err_coarse} and {err_fine}")));
    }
    Ok((err_coarse / err_fine).log2())
}

#[derive(Clone, Debug, Serialize)]
pub struct NormSeries {
    /// e.g. `psi L2`
    pub label: String,
    /// differences of adjacent levels
    pub errors: Vec<f64>,
    /// orders of adjacent differences; empty with fewer than three levels
    pub orders: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    /// mesh size or time step per level, coarsest first
    pub levels: Vec<f64>,
    pub series: Vec<NormSeries>,
}

impl ConvergenceReport {
    fn build(levels: Vec<f64>, diffs: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let mut series = Vec::new();
        for (label, errors) in diffs {
            let orders = if levels.len() >= 3 {
                errors.windows(2).map(|w| estimate_order(w[0], w[1])).collect::<Result<_>>()?
            } else {
                Vec::new()
            };
            series.push(NormSeries { label, errors, orders });
        }
        Ok(Self { levels, series })
    }

    /// Orders from solutions on one grid at successively halved time steps.
    pub fn temporal(taus: &[f64], solutions: &[PhaseState]) -> Result<Self> {
        Self::from_differences(taus, solutions, |a, b| a.zip_map(b, |x, y| x - y))
    }

    /// Orders from solutions on nested grids, finest last, compared at the
    /// coarse nodes.
    pub fn spatial(hs: &[f64], solutions: &[PhaseState]) -> Result<Self> {
        Self::from_differences(hs, solutions, |coarse, fine| coarsen_compare(fine, coarse))
    }

    fn from_differences(
        levels: &[f64],
        solutions: &[PhaseState],
        diff: impl Fn(&ScalarField, &ScalarField) -> Result<ScalarField>,
    ) -> Result<Self> {
        if levels.len() != solutions.len() || solutions.len() < 2 {
            return Err(invalid("levels", "need matching levels and at least two solutions"));
        }
        let nf = solutions[0].n_fields();
        let names = field_names(nf);
        let mut diffs = Vec::new();
        for f in 0..nf {
            for (kind, tag) in [(Norm::L2, "L2"), (Norm::Linf, "Linf")] {
                let errs = solutions
                    .windows(2)
                    .map(|w| diff(&w[0].fields[f], &w[1].fields[f]).map(|d| norm(&d, kind)))
                    .collect::<Result<Vec<_>>>()?;
                diffs.push((format!("{} {tag}", names[f]), errs));
            }
        }
        Self::build(levels.to_vec(), diffs)
    }

    /// Smallest and largest order over all series.
    pub fn order_range(&self) -> Option<(f64, f64)> {
        let all: Vec<f64> = self.series.iter().flat_map(|s| s.orders.iter().copied()).collect();
        if all.is_empty() {
            return None;
        }
        Some((all.iter().copied().fold(f64::INFINITY, f64::min), all.iter().copied().fold(f64::NEG_INFINITY, f64::max)))
    }
}

/// `psi, phi` for three phases, `phi1 .. phiK` otherwise.
pub fn field_names(n_fields: usize) -> Vec<String> {
    if n_fields == 2 {
        vec!["psi".into(), "phi".into()]
    } else {
        (1..=n_fields).map(|k| format!("phi{k}")).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesRow {
    pub t: f64,
    pub energy: f64,
    pub volumes: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl SeriesRow {
    pub fn sample(state: &PhaseState, p: &ModelParams) -> Result<Self> {
        Ok(Self {
            t: state.time,
            energy: free_energy(state, p)?,
            volumes: volumes(state),
            min: state.fields.iter().map(ScalarField::min).collect(),
            max: state.fields.iter().map(ScalarField::max).collect(),
        })
    }
}

/// Tolerance of the per-step energy check, relative to `1 + |W|`.
pub const ENERGY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Default, Serialize)]
pub struct DiagnosticsRecord {
    pub rows: Vec<SeriesRow>,
    pub steps: usize,
    pub initial_means: Vec<f64>,
    /// largest `|mean - mean0| / max(1, |mean0|)` per field
    pub mean_drift: Vec<f64>,
    pub initial_volumes: Vec<f64>,
    /// largest `|V - V0| / V0` per phase over the recorded rows
    pub volume_drift: Vec<f64>,
    /// steps with `W_after > W_before + ENERGY_TOL (1 + |W_before|)`
    pub energy_violations: usize,
    /// largest `(W_after - W_before) / (1 + |W_before|)`
    pub max_energy_rise: f64,
    pub total_iterations: usize,
    pub max_iterations: usize,
    pub max_residual: f64,
    pub min_stability_margin: Option<f64>,
    pub angles: Option<AngleReport>,
    pub convergence: Option<ConvergenceReport>,
    pub failure: Option<String>,
}

impl DiagnosticsRecord {
    pub fn start(state: &PhaseState, p: &ModelParams) -> Result<Self> {
        let row = SeriesRow::sample(state, p)?;
        Ok(Self {
            initial_means: state.means(),
            mean_drift: vec![0.0; state.n_fields()],
            initial_volumes: row.volumes.clone(),
            volume_drift: vec![0.0; row.volumes.len()],
            max_energy_rise: f64::NEG_INFINITY,
            rows: vec![row],
            ..Default::default()
        })
    }

    pub fn push_step(&mut self, r: &StepReport) {
        self.steps += 1;
        let rise = (r.energy_after - r.energy_before) / (1.0 + r.energy_before.abs());
        self.max_energy_rise = self.max_energy_rise.max(rise);
        if rise > ENERGY_TOL {
            self.energy_violations += 1;
        }
        for (d, (m, m0)) in self.mean_drift.iter_mut().zip(r.means_after.iter().zip(&self.initial_means)) {
            *d = d.max((m - m0).abs() / m0.abs().max(1.0));
        }
        for s in &r.substeps {
            self.total_iterations += s.iterations;
            self.max_iterations = self.max_iterations.max(s.iterations);
            self.max_residual = self.max_residual.max(s.residual);
        }
    }

    pub fn push_row(&mut self, row: SeriesRow) {
        for (d, (v, v0)) in self.volume_drift.iter_mut().zip(row.volumes.iter().zip(&self.initial_volumes)) {
            if *v0 > 0.0 {
                *d = d.max((v - v0).abs() / v0);
            }
        }
        self.rows.push(row);
    }

    pub fn energy_monotone(&self) -> bool {
        self.energy_violations == 0
    }

    pub fn max_mean_drift(&self) -> f64 {
        self.mean_drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_volume_drift(&self) -> f64 {
        self.volume_drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn last(&self) -> &SeriesRow {
        self.rows.last().expect("record has the initial row")
    }
}

/// Junction and angles of a ternary state, fitting in `[4 eps, 12 eps]`.
pub fn state_angles(state: &PhaseState, eps: f64) -> Result<AngleReport> {
    let c = extract_contours(state)?;
    let j = locate_junction(&c)?;
    measure_angles(&c, j, 4.0 * eps, 12.0 * eps)
}
