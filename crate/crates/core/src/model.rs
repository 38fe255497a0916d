//! Model quantities evaluated on a discrete state: free energy, chemical
//! potentials, mobilities, phase volumes, and initial conditions.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::grid::{check_same, div_coeff_grad, grad_sq_into, integrate_slice, Grid2D, ScalarField};
use crate::jet::{regularized, Jet, Real, REG_BOUND};
use crate::tension::{build_gamma_n, GammaSet, SurfaceTensions};

/// `N-1` phase fields on one grid.  For three phases `fields[0]` is `psi`
/// and `fields[1]` is `phi`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseState {
    pub fields: Vec<ScalarField>,
    pub time: f64,
}

impl PhaseState {
    pub fn new(fields: Vec<ScalarField>) -> Result<Self> {
        let first = fields.first().ok_or_else(|| invalid("fields", "need at least one field"))?;
        for f in &fields[1..] {
            check_same(&first.grid, &f.grid)?;
        }
        Ok(Self { fields, time: 0.0 })
    }

    pub fn ternary(psi: ScalarField, phi: ScalarField) -> Result<Self> {
        Self::new(vec![psi, phi])
    }

    pub fn grid(&self) -> Grid2D {
        self.fields[0].grid
    }

    pub fn n_fields(&self) -> usize {
        self.fields.len()
    }

    pub fn means(&self) -> Vec<f64> {
        self.fields.iter().map(ScalarField::mean).collect()
    }

    /// Field values at node `k`, in field order.
    pub(crate) fn node(&self, k: usize, out: &mut [f64]) {
        for (o, f) in out.iter_mut().zip(&self.fields) {
            *o = f.values[k];
        }
    }

    pub fn check_finite(&self) -> Result<()> {
        for (i, f) in self.fields.iter().enumerate() {
            if !f.is_finite() {
                return Err(Error::NonFinite(format!("phi_{}", i + 1)));
            }
        }
        Ok(())
    }
}

pub const DEFAULT_MOBILITY_EXPONENT: u32 = 4;

#[derive(Clone, Debug)]
pub struct ModelParams {
    pub epsilon: f64,
    pub tensions: SurfaceTensions,
    pub gammas: GammaSet,
    /// `m_1 .. m_{N-1}`
    pub m: Vec<f64>,
    /// `a_1 .. a_{N-2}`; field `i` carries the factor `((1+phi_j)/2)^(2 a_j)` for each `j < i`.
    pub mob_exponents: Vec<u32>,
}

impl ModelParams {
    /// Three-phase systems use the closed-form `gamma`; larger ones use the
    /// recursive construction.
    pub fn new(epsilon: f64, tensions: SurfaceTensions, alpha: f64, m: Vec<f64>, mob_exponents: Vec<u32>) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(invalid("epsilon", format!("{epsilon} must be positive")));
        }
        let nf = tensions.n_phases() - 1;
        if m.len() != nf {
            return Err(invalid("m", format!("need {nf} mobility constants, got {}", m.len())));
        }
        if let Some(v) = m.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(invalid("m", format!("{v} must be positive")));
        }
        if mob_exponents.len() + 1 < nf || mob_exponents.iter().any(|&a| a < 1) {
            return Err(invalid("mob_exponents", "need N-2 integers >= 1"));
        }
        let gammas = if tensions.n_phases() == 3 {
            GammaSet::ternary(&tensions, alpha)?
        } else {
            build_gamma_n(&tensions, alpha)?
        };
        Ok(Self {
            epsilon,
            tensions,
            gammas,
            m,
            mob_exponents,
        })
    }

    /// Ternary parameters with mobility exponent 4, i.e. `M_2 = m_2 ((1+psi)/2)^8`.
    pub fn ternary(epsilon: f64, sigma: [f64; 3], alpha: f64, m: f64) -> Result<Self> {
        let s = SurfaceTensions::ternary(sigma[0], sigma[1], sigma[2])?;
        Self::new(epsilon, s, alpha, vec![m, m], vec![DEFAULT_MOBILITY_EXPONENT])
    }

    pub fn n_fields(&self) -> usize {
        self.m.len()
    }

    pub fn alpha(&self) -> f64 {
        self.gammas.alpha()
    }

    /// `max |F''|` over the regularised range.
    pub fn lipschitz_f(&self) -> f64 {
        lipschitz_f()
    }

    fn check_state(&self, state: &PhaseState) -> Result<()> {
        if state.n_fields() != self.n_fields() {
            return Err(invalid(
                "state",
                format!("{} fields for a {}-phase model", state.n_fields(), self.n_fields() + 1),
            ));
        }
        Ok(())
    }
}

fn well_raw<T: Real>(x: T) -> T {
    let w = x * x - T::cst(1.0);
    (w * w).scale(0.25)
}

fn well_taylor(b: f64) -> [f64; 3] {
    let w = b * b - 1.0;
    [0.25 * w * w, b * w, 3.0 * b * b - 1.0]
}

/// Regularised double well: `.v = F`, `.d = f = F'`, `.dd = F''`.
#[inline]
pub fn double_well(x: f64) -> Jet {
    regularized(Jet::var(x), well_raw, well_taylor)
}

pub fn lipschitz_f() -> f64 {
    let n = 2200;
    (0..=n)
        .map(|k| double_well(-REG_BOUND + 2.0 * REG_BOUND * k as f64 / n as f64).dd.abs())
        .fold(0.0, f64::max)
}

/// `gamma_i` at every node, for every `i`.
pub(crate) fn gamma_nodes(state: &PhaseState, g: &GammaSet) -> Vec<Vec<f64>> {
    let nf = state.n_fields();
    let len = state.grid().len();
    let mut out = vec![vec![0.0; len]; nf];
    if g.is_ternary_closed_form() {
        for k in 0..len {
            out[0][k] = g.ternary_jet(0, state.fields[1].values[k]).unwrap().v;
            out[1][k] = g.ternary_jet(1, state.fields[0].values[k]).unwrap().v;
        }
    } else {
        let mut x = vec![0.0; nf];
        for k in 0..len {
            state.node(k, &mut x);
            for (i, o) in out.iter_mut().enumerate() {
                o[k] = g.value(i, &x);
            }
        }
    }
    out
}

/// `g(u) = eps/2 |grad u|^2 + F(u)/eps` at every node.
pub(crate) fn g_nodes(u: &ScalarField, eps: f64) -> Vec<f64> {
    let mut out = vec![0.0; u.values.len()];
    grad_sq_into(&u.grid, &u.values, &mut out);
    for (o, &v) in out.iter_mut().zip(&u.values) {
        *o = 0.5 * eps * *o + double_well(v).v / eps;
    }
    out
}

pub fn free_energy(state: &PhaseState, p: &ModelParams) -> Result<f64> {
    p.check_state(state)?;
    let gam = gamma_nodes(state, &p.gammas);
    let grid = state.grid();
    let mut total = 0.0;
    for (f, gi) in state.fields.iter().zip(&gam) {
        let g = g_nodes(f, p.epsilon);
        let prod: Vec<f64> = g.iter().zip(gi).map(|(a, b)| a * b).collect();
        total += integrate_slice(&grid, &prod);
    }
    Ok(total)
}

/// `mu_i = -eps div(gamma_i grad phi_i) + gamma_i f(phi_i)/eps + sum_{j != i} d gamma_j/d phi_i g(phi_j)`.
pub fn chem_potentials(state: &PhaseState, p: &ModelParams) -> Result<Vec<ScalarField>> {
    p.check_state(state)?;
    let nf = state.n_fields();
    let grid = state.grid();
    let eps = p.epsilon;
    let gam = gamma_nodes(state, &p.gammas);
    let gs: Vec<Vec<f64>> = state.fields.iter().map(|f| g_nodes(f, eps)).collect();
    let mut x = vec![0.0; nf];
    let mut out = Vec::with_capacity(nf);
    for i in 0..nf {
        let gi = ScalarField::from_values(grid, gam[i].clone())?;
        let mut mu = div_coeff_grad(&gi, &state.fields[i])?;
        for k in 0..grid.len() {
            let u = state.fields[i].values[k];
            let mut v = -eps * mu.values[k] + gam[i][k] * double_well(u).d / eps;
            state.node(k, &mut x);
            for j in (0..nf).filter(|&j| j != i) {
                v += p.gammas.partial(j, i, &x) * gs[j][k];
            }
            mu.values[k] = v;
        }
        out.push(mu);
    }
    Ok(out)
}

/// Mobility of field `i` (0-based): `m_1` for the first field, and
/// `m_i prod_{j<i} max(0, (1+phi_j)/2)^(2 a_j)` for the others.
pub fn mobility(i: usize, state: &PhaseState, p: &ModelParams) -> Result<ScalarField> {
    p.check_state(state)?;
    if i >= p.n_fields() {
        return Err(invalid("i", format!("field index {i} out of range")));
    }
    let mut values = vec![p.m[i]; state.grid().len()];
    for j in 0..i {
        let e = 2 * p.mob_exponents[j] as i32;
        for (v, &u) in values.iter_mut().zip(&state.fields[j].values) {
            *v *= (0.5 * (1.0 + u)).max(0.0).powi(e);
        }
    }
    ScalarField::from_values(state.grid(), values)
}

/// Phase volumes from the nested indicators
/// `c_1 = (1-phi_1)/2`, `c_k = prod_{l<k} (1+phi_l)/2 * (1-phi_k)/2`, `c_N = prod (1+phi_l)/2`.
pub fn volumes(state: &PhaseState) -> Vec<f64> {
    let nf = state.n_fields();
    let grid = state.grid();
    let mut prefix = vec![1.0; grid.len()];
    let mut out = Vec::with_capacity(nf + 1);
    let mut buf = vec![0.0; grid.len()];
    for f in &state.fields {
        for ((b, p), &u) in buf.iter_mut().zip(&prefix).zip(&f.values) {
            *b = p * 0.5 * (1.0 - u);
        }
        out.push(integrate_slice(&grid, &buf));
        for (p, &u) in prefix.iter_mut().zip(&f.values) {
            *p *= 0.5 * (1.0 + u);
        }
    }
    out.push(integrate_slice(&grid, &prefix));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpreadingRegime {
    /// every `S_i > 0`
    Partial,
    /// some `S_i < 0`
    Total,
    /// no negative coefficient but at least one zero
    Borderline,
}

#[derive(Clone, Debug, Serialize)]
pub struct Spreading {
    /// `(S_1, S_2, S_3)` with `S_i = sigma_ij + sigma_ik - sigma_jk`
    pub s: [f64; 3],
    pub regime: SpreadingRegime,
}

pub fn spreading_coefficients(s: &SurfaceTensions) -> Result<Spreading> {
    let [s23, s12, s13] = s
        .as_ternary()
        .ok_or_else(|| invalid("sigma", "spreading coefficients need exactly 3 phases"))?;
    let coeffs = [s12 + s13 - s23, s12 + s23 - s13, s13 + s23 - s12];
    let regime = if coeffs.iter().any(|&v| v < 0.0) {
        SpreadingRegime::Total
    } else if coeffs.iter().all(|&v| v > 0.0) {
        SpreadingRegime::Partial
    } else {
        SpreadingRegime::Borderline
    };
    Ok(Spreading { s: coeffs, regime })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    SquareCross,
    AbsentPhase1,
    LiquidLens,
    TwoDropletsSym,
    TwoDropletsRight,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::SquareCross,
        Preset::AbsentPhase1,
        Preset::LiquidLens,
        Preset::TwoDropletsSym,
        Preset::TwoDropletsRight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::SquareCross => "square_cross",
            Preset::AbsentPhase1 => "absent_phase1",
            Preset::LiquidLens => "liquid_lens",
            Preset::TwoDropletsSym => "two_droplets_sym",
            Preset::TwoDropletsRight => "two_droplets_right",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| invalid("preset", format!("unknown initial condition `{name}`")))
    }
}

pub const LENS_RADIUS: f64 = 0.15;
pub const DROPLET_RADIUS: f64 = 0.15;

/// Ternary initial conditions on the unit square; only `p.epsilon` is used.
pub fn init_preset(preset: Preset, p: &ModelParams, grid: Grid2D) -> Result<PhaseState> {
    if p.n_fields() != 2 {
        return Err(invalid("preset", "initial-condition presets are three-phase"));
    }
    let eps = p.epsilon;
    let t = move |d: f64| (d / eps).tanh();
    let r = |x: f64, y: f64, cx: f64, cy: f64| ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
    let (psi, phi): (ScalarField, ScalarField) = match preset {
        Preset::SquareCross => (
            ScalarField::from_fn(grid, |_, y| t(y - 0.5)),
            ScalarField::from_fn(grid, |x, _| t(x - 0.5)),
        ),
        Preset::AbsentPhase1 => (
            ScalarField::constant(grid, 1.0),
            ScalarField::from_fn(grid, |x, y| t(((x - 0.5).powi(2) / 1.7 + (y - 0.5).powi(2)).sqrt() - 0.2)),
        ),
        Preset::LiquidLens => return liquid_lens(eps, grid, LENS_RADIUS),
        Preset::TwoDropletsSym | Preset::TwoDropletsRight => {
            let psi = ScalarField::from_fn(grid, |x, y| {
                1.0 - t(r(x, y, 0.35, 0.5) - DROPLET_RADIUS) - t(r(x, y, 0.65, 0.5) - DROPLET_RADIUS)
            });
            let phi = if preset == Preset::TwoDropletsSym {
                ScalarField::from_fn(grid, |x, _| t(x - 0.5))
            } else {
                ScalarField::from_fn(grid, |x, y| t(DROPLET_RADIUS - r(x, y, 0.65, 0.5)))
            };
            (psi, phi)
        }
    };
    PhaseState::ternary(psi, phi)
}

/// Lens of phase 1 (`psi = -1`) of the given radius centred between a lower
/// fluid (`phi = -1`) and an upper fluid (`phi = +1`).
pub fn liquid_lens(eps: f64, grid: Grid2D, radius: f64) -> Result<PhaseState> {
    let psi = ScalarField::from_fn(grid, |x, y| ((((x - 0.5).powi(2) + (y - 0.5).powi(2)).sqrt() - radius) / eps).tanh());
    let phi = ScalarField::from_fn(grid, |_, y| ((y - 0.5) / eps).tanh());
    PhaseState::ternary(psi, phi)
}
