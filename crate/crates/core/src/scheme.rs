//! Decoupled second-order time stepping.
//!
//! Each substep advances one phase field with all others frozen, by a
//! linearised Crank-Nicolson step whose nonlinear terms are replaced by the
//! stabilised midpoint form
//! `T[f](old, new; A, tau) = f(old) + f'(old)/2 (new - old) + A tau (new - old)`.
//! Eliminating the chemical potential gives one fourth-order linear system
//! per substep, solved by BiCGSTAB preconditioned with a constant-coefficient
//! version of the same operator inverted by cosine transforms.
//!
//! Substeps are composed symmetrically, `S_n(tau/2) .. S_2(tau/2) S_1(tau)
//! S_2(tau/2) .. S_n(tau/2)`; for three phases this is phi, psi, phi.

use serde::Serialize;

use crate::diagnostics::{DiagnosticsRecord, SeriesRow};
use crate::error::{invalid, Error, Result};
use crate::grid::{integrate_slice, FaceCoeffs, Grid2D, ScalarField};
use crate::jet::Jet;
use crate::krylov::{bicgstab, LinearOperator, Preconditioner};
use crate::model::{double_well, free_energy, g_nodes, gamma_nodes, mobility, ModelParams, PhaseState};
use crate::spectral::NeumannSpectral;
use crate::tension::GammaSet;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchemeParams {
    pub tau: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub solver_tol: f64,
    pub solver_maxit: usize,
}

pub const DEFAULT_STABILIZER: f64 = 100.0;
pub const DEFAULT_SOLVER_TOL: f64 = 1e-10;
pub const DEFAULT_SOLVER_MAXIT: usize = 400;

impl SchemeParams {
    pub fn new(tau: f64) -> Result<Self> {
        let sp = Self {
            tau,
            a1: DEFAULT_STABILIZER,
            a2: DEFAULT_STABILIZER,
            b1: DEFAULT_STABILIZER,
            b2: DEFAULT_STABILIZER,
            solver_tol: DEFAULT_SOLVER_TOL,
            solver_maxit: DEFAULT_SOLVER_MAXIT,
        };
        sp.validate()?;
        Ok(sp)
    }

    /// All four stabilisers set to `s`.
    pub fn with_stabilizers(mut self, s: f64) -> Result<Self> {
        self.a1 = s;
        self.a2 = s;
        self.b1 = s;
        self.b2 = s;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(invalid("tau", format!("{} must be positive", self.tau)));
        }
        for (name, v) in [("A1", self.a1), ("A2", self.a2), ("B1", self.b1), ("B2", self.b2)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("{v} must be nonnegative")));
            }
        }
        if !(self.solver_tol > 0.0 && self.solver_tol <= 1e-4) {
            return Err(invalid("solver_tol", format!("{} must lie in (0, 1e-4]", self.solver_tol)));
        }
        if self.solver_maxit == 0 {
            return Err(invalid("solver_maxit", "must be positive"));
        }
        Ok(())
    }

    /// `(A, B)` used when advancing `field`: the first field (`psi`) takes
    /// `(A2, B2)`, every other field `(A1, B1)`.
    pub fn stabilizers(&self, field: usize) -> (f64, f64) {
        if field == 0 {
            (self.a2, self.b2)
        } else {
            (self.a1, self.b1)
        }
    }
}

/// Which nonlinearity a stabilised term linearises.
#[derive(Clone, Copy)]
pub enum StabilizedFn<'a> {
    /// `f = F'` of the double well
    F,
    /// `d gamma_1 / d phi` of a three-phase set, as a function of `phi`
    Gamma1Prime(&'a GammaSet),
    /// `d gamma_2 / d psi` of a three-phase set, as a function of `psi`
    Gamma2Prime(&'a GammaSet),
}

impl StabilizedFn<'_> {
    /// value and derivative at `u`
    fn eval(&self, u: f64) -> (f64, f64) {
        let j: Jet = match self {
            StabilizedFn::F => {
                let w = double_well(u);
                return (w.d, w.dd);
            }
            StabilizedFn::Gamma1Prime(g) => g.jet(0, 1, &[0.0, u]),
            StabilizedFn::Gamma2Prime(g) => g.jet(1, 0, &[u, 0.0]),
        };
        (j.d, j.dd)
    }
}

/// `f(old) + (f'(old)/2 + A tau)(new - old)` nodewise.
pub fn stabilized_term(
    kind: StabilizedFn,
    u_old: &ScalarField,
    u_new: &ScalarField,
    a: f64,
    tau: f64,
) -> Result<ScalarField> {
    u_old.zip_map(u_new, |o, n| {
        let (f, df) = kind.eval(o);
        if n == o {
            f
        } else {
            f + (0.5 * df + a * tau) * (n - o)
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SubReport {
    pub field: usize,
    pub dt: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepReport {
    pub energy_before: f64,
    pub energy_after: f64,
    pub means_before: Vec<f64>,
    pub means_after: Vec<f64>,
    pub substeps: Vec<SubReport>,
}

impl StepReport {
    pub fn iterations(&self) -> Vec<usize> {
        self.substeps.iter().map(|s| s.iterations).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.substeps.iter().map(|s| s.residual).fold(0.0, f64::max)
    }
}

/// Reusable transforms and buffers for one grid.
pub struct Workspace {
    spectral: NeumannSpectral,
    t1: Vec<f64>,
    t2: Vec<f64>,
    hat: Vec<f64>,
    tmp: Vec<f64>,
    zs: Vec<Vec<f64>>,
}

impl Workspace {
    pub fn new(grid: Grid2D) -> Self {
        Self {
            spectral: NeumannSpectral::new(grid),
            t1: vec![0.0; grid.len()],
            t2: vec![0.0; grid.len()],
            hat: vec![0.0; grid.len()],
            tmp: vec![0.0; grid.len()],
            zs: Vec::new(),
        }
    }

    pub fn grid(&self) -> Grid2D {
        self.spectral.grid()
    }
}

/// The linear system of one substep,
/// `delta - dt L_M(-(eps/2) L_gamma delta + d delta) = dt L_M mu0`,
/// where `delta` is the increment of the advanced field.
pub struct SubstepSystem {
    pub field: usize,
    pub dt: f64,
    eps: f64,
    mob: FaceCoeffs,
    gam: FaceCoeffs,
    d: Vec<f64>,
    rhs: Vec<f64>,
    pc: Ladder,
    frozen: bool,
}

impl SubstepSystem {
    /// `tau` is the full step, which sets the stabiliser scale even in half steps.
    pub fn assemble(
        state: &PhaseState,
        field: usize,
        dt: f64,
        p: &ModelParams,
        sp: &SchemeParams,
        ws: &Workspace,
    ) -> Result<Self> {
        let grid = state.grid();
        let nf = state.n_fields();
        if field >= nf {
            return Err(invalid("field", format!("field index {field} out of range")));
        }
        let eps = p.epsilon;
        let (a, b) = sp.stabilizers(field);
        let tau = sp.tau;
        let m = mobility(field, state, p)?;
        let mob = FaceCoeffs::new(grid, &m.values);
        let len = grid.len();
        if mob.is_zero() {
            return Ok(Self {
                field,
                dt,
                eps,
                gam: FaceCoeffs::unit(grid),
                mob,
                d: vec![0.0; len],
                rhs: vec![0.0; len],
                pc: Ladder::default(),
                frozen: true,
            });
        }
        let u = &state.fields[field].values;
        let gammas = gamma_nodes(state, &p.gammas);
        let gk = &gammas[field];
        let gam = FaceCoeffs::new(grid, gk);

        let mut mu0 = vec![0.0; len];
        gam.apply(u, &mut mu0);
        let mut d = vec![0.0; len];
        for k in 0..len {
            let w = double_well(u[k]);
            mu0[k] = -eps * mu0[k] + gk[k] * w.d / eps;
            d[k] = gk[k] / eps * (0.5 * w.dd + a * tau);
        }
        let others: Vec<usize> = (0..nf).filter(|&j| j != field).collect();
        let mut x = vec![0.0; nf];
        for &j in &others {
            let gj = g_nodes(&state.fields[j], eps);
            let closed = p.gammas.is_ternary_closed_form();
            for k in 0..len {
                let jet = if closed {
                    p.gammas.ternary_jet(j, u[k]).unwrap()
                } else {
                    state.node(k, &mut x);
                    p.gammas.jet(j, field, &x)
                };
                mu0[k] += jet.d * gj[k];
                d[k] += gj[k] * (0.5 * jet.dd + b * tau);
            }
        }
        let mut rhs = vec![0.0; len];
        mob.apply(&mu0, &mut rhs);
        for r in rhs.iter_mut() {
            *r *= dt;
        }

        let stiff: Vec<f64> = m.values.iter().zip(gk).map(|(mv, gv)| mv * gv).collect();
        let d_mean = (d.iter().sum::<f64>() / len as f64).max(0.0);
        let g_mean = gk.iter().sum::<f64>() / len as f64;
        let pc = Ladder::build(&stiff, dt, eps, d_mean / g_mean.max(f64::MIN_POSITIVE), ws);

        Ok(Self {
            field,
            dt,
            eps,
            mob,
            gam,
            d,
            rhs,
            pc,
            frozen: false,
        })
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// True when the mobility vanishes identically and the field cannot move.
    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64], ws: &mut Workspace) {
        apply_op(self, x, y, &mut ws.t1, &mut ws.t2);
    }

    /// Solves for the increment with right-hand side `rhs`.
    pub fn solve(
        &self,
        rhs: &[f64],
        guess: Option<&[f64]>,
        tol: f64,
        maxit: usize,
        ws: &mut Workspace,
    ) -> Result<(Vec<f64>, usize, f64)> {
        let len = rhs.len();
        if self.frozen {
            return Ok((vec![0.0; len], 0, 0.0));
        }
        let Workspace { spectral, t1, t2, hat, tmp, zs } = ws;
        let mut op = Op { sys: self, t1, t2 };
        let mut pc = LadderApply {
            ladder: &self.pc,
            spectral,
            hat,
            tmp,
            zs,
        };
        let out = bicgstab(&mut op, &mut pc, rhs, guess, tol, maxit)?;
        let mut delta = out.solution;
        let grid = pc.spectral.grid();
        let mean = integrate_slice(&grid, &delta) / grid.area();
        if mean != 0.0 {
            for v in delta.iter_mut() {
                *v -= mean;
            }
        }
        Ok((delta, out.iterations, out.residual))
    }
}

fn apply_op(sys: &SubstepSystem, x: &[f64], y: &mut [f64], t1: &mut [f64], t2: &mut [f64]) {
    sys.gam.apply(x, t1);
    let h = -0.5 * sys.eps;
    for k in 0..x.len() {
        t1[k] = h * t1[k] + sys.d[k] * x[k];
    }
    sys.mob.apply(t1, t2);
    for k in 0..x.len() {
        y[k] = x[k] - sys.dt * t2[k];
    }
}

struct Op<'a> {
    sys: &'a SubstepSystem,
    t1: &'a mut Vec<f64>,
    t2: &'a mut Vec<f64>,
}

impl LinearOperator for Op<'_> {
    fn apply(&mut self, x: &[f64], y: &mut [f64]) {
        apply_op(self.sys, x, y, self.t1, self.t2);
    }
}

/// Preconditioner for variable stiffness `M gamma`: constant-coefficient
/// inverses at a geometric ladder of stiffness levels, blended nodewise.
/// Nodes softer than the lowest rung blend toward the identity.
#[derive(Default)]
struct Ladder {
    symbols: Vec<Vec<f64>>,
    /// rung below and weight toward the next softer rung, per node
    blend: Vec<(u16, f64)>,
}

const LADDER_RATIO: f64 = 8.0;
const LADDER_MAX: usize = 4;

impl Ladder {
    fn build(stiff: &[f64], dt: f64, eps: f64, d_over_g: f64, ws: &Workspace) -> Self {
        let top = stiff.iter().copied().fold(0.0, f64::max);
        let bottom = stiff.iter().copied().fold(f64::INFINITY, f64::min);
        let span = if bottom > 0.0 { (top / bottom).ln() / LADDER_RATIO.ln() } else { f64::INFINITY };
        let rungs = if span.is_finite() { (span.ceil() as usize + 1).min(LADDER_MAX) } else { LADDER_MAX };
        // identity below the last rung only when the ladder does not reach the softest node
        let reach = if span <= (rungs - 1) as f64 { (rungs - 1) as f64 } else { rungs as f64 };
        let symbols = (0..rungs)
            .map(|l| {
                let a = top * LADDER_RATIO.powi(-(l as i32));
                let c4 = dt * 0.5 * eps * a;
                let c2 = dt * a * d_over_g;
                ws.spectral.inverse_symbol(|lam| 1.0 + c4 * lam * lam - c2 * lam)
            })
            .collect();
        let blend = stiff
            .iter()
            .map(|&a| {
                let t = if a > 0.0 { ((top / a).ln() / LADDER_RATIO.ln()).min(reach) } else { reach };
                let i = (t.floor() as usize).min(rungs - 1);
                (i as u16, t - i as f64)
            })
            .collect();
        Self { symbols, blend }
    }
}

struct LadderApply<'a> {
    ladder: &'a Ladder,
    spectral: &'a mut NeumannSpectral,
    hat: &'a mut Vec<f64>,
    tmp: &'a mut Vec<f64>,
    zs: &'a mut Vec<Vec<f64>>,
}

impl Preconditioner for LadderApply<'_> {
    fn apply(&mut self, r: &[f64], z: &mut [f64]) {
        let n = self.ladder.symbols.len();
        self.zs.resize_with(n, || vec![0.0; r.len()]);
        self.spectral.forward(r, self.hat);
        for (sym, zl) in self.ladder.symbols.iter().zip(self.zs.iter_mut()) {
            for ((t, h), w) in self.tmp.iter_mut().zip(self.hat.iter()).zip(sym) {
                *t = h * w;
            }
            self.spectral.backward(self.tmp, zl);
        }
        for (k, &(i, w)) in self.ladder.blend.iter().enumerate() {
            let i = i as usize;
            let lo = self.zs[i][k];
            let hi = if i + 1 < n { self.zs[i + 1][k] } else { r[k] };
            z[k] = lo + w * (hi - lo);
        }
    }
}

/// One decoupled substep: advance `field` with all other fields frozen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldSubstep {
    pub field: usize,
}

/// The `psi` substep of a three-phase system.
pub fn psi_substep() -> FieldSubstep {
    FieldSubstep { field: 0 }
}

/// The `phi` substep of a three-phase system.
pub fn phi_substep() -> FieldSubstep {
    FieldSubstep { field: 1 }
}

impl FieldSubstep {
    fn advance(
        &self,
        state: &mut PhaseState,
        dt: f64,
        p: &ModelParams,
        sp: &SchemeParams,
        ws: &mut Workspace,
        guess: &mut Option<Vec<f64>>,
    ) -> Result<SubReport> {
        let sys = SubstepSystem::assemble(state, self.field, dt, p, sp, ws)?;
        let (delta, iterations, residual) = sys.solve(&sys.rhs, guess.as_deref(), sp.solver_tol, sp.solver_maxit, ws)?;
        for (u, dv) in state.fields[self.field].values.iter_mut().zip(&delta) {
            *u += dv;
        }
        *guess = Some(delta);
        Ok(SubReport {
            field: self.field,
            dt,
            iterations,
            residual,
        })
    }
}

/// A symmetric composition of substeps with its own workspace.
pub struct Stepper {
    pub params: ModelParams,
    pub scheme: SchemeParams,
    stages: Vec<(FieldSubstep, f64)>,
    ws: Workspace,
    guesses: Vec<Option<Vec<f64>>>,
}

/// `substeps[0]` is innermost and runs once with the full step; the others
/// run with half steps on either side, outermost last in the list.
pub fn compose_mos(substeps: &[FieldSubstep], p: ModelParams, sp: SchemeParams, grid: Grid2D) -> Result<Stepper> {
    if substeps.is_empty() {
        return Err(invalid("substeps", "need at least one substep"));
    }
    sp.validate()?;
    let mut stages = Vec::with_capacity(2 * substeps.len() - 1);
    for s in substeps[1..].iter().rev() {
        stages.push((*s, 0.5));
    }
    stages.push((substeps[0], 1.0));
    for s in &substeps[1..] {
        stages.push((*s, 0.5));
    }
    let n = stages.len();
    Ok(Stepper {
        params: p,
        scheme: sp,
        stages,
        ws: Workspace::new(grid),
        guesses: vec![None; n],
    })
}

impl Stepper {
    /// Default ordering: field 0 innermost, last field outermost.
    pub fn new(p: ModelParams, sp: SchemeParams, grid: Grid2D) -> Result<Self> {
        let subs: Vec<FieldSubstep> = (0..p.n_fields()).map(|field| FieldSubstep { field }).collect();
        compose_mos(&subs, p, sp, grid)
    }

    pub fn stage_order(&self) -> Vec<(usize, f64)> {
        self.stages.iter().map(|(s, f)| (s.field, *f)).collect()
    }

    pub fn step(&mut self, state: &mut PhaseState) -> Result<StepReport> {
        let energy_before = free_energy(state, &self.params)?;
        let means_before = state.means();
        let mut substeps = Vec::with_capacity(self.stages.len());
        for (k, (sub, frac)) in self.stages.iter().enumerate() {
            let dt = frac * self.scheme.tau;
            substeps.push(sub.advance(state, dt, &self.params, &self.scheme, &mut self.ws, &mut self.guesses[k])?);
        }
        state.check_finite()?;
        state.time += self.scheme.tau;
        Ok(StepReport {
            energy_before,
            energy_after: free_energy(state, &self.params)?,
            means_before,
            means_after: state.means(),
            substeps,
        })
    }
}

/// Advances `phi` by `half_tau` with `psi` replaced by `psi_frozen`.
pub fn substep_phi(
    state: &PhaseState,
    psi_frozen: &ScalarField,
    half_tau: f64,
    p: &ModelParams,
    sp: &SchemeParams,
) -> Result<(PhaseState, SubReport)> {
    let mut s = state.clone();
    s.fields[0] = psi_frozen.clone();
    let mut ws = Workspace::new(s.grid());
    let rep = phi_substep().advance(&mut s, half_tau, p, sp, &mut ws, &mut None)?;
    Ok((s, rep))
}

/// Advances `psi` by `tau` with `phi` replaced by `phi_half`.
pub fn substep_psi(
    state: &PhaseState,
    phi_half: &ScalarField,
    tau: f64,
    p: &ModelParams,
    sp: &SchemeParams,
) -> Result<(PhaseState, SubReport)> {
    let mut s = state.clone();
    s.fields[1] = phi_half.clone();
    let mut ws = Workspace::new(s.grid());
    let rep = psi_substep().advance(&mut s, tau, p, sp, &mut ws, &mut None)?;
    Ok((s, rep))
}

/// One full step `phi(tau/2), psi(tau), phi(tau/2)`.
pub fn strang_step(state: &PhaseState, p: &ModelParams, sp: &SchemeParams) -> Result<(PhaseState, StepReport)> {
    let mut stepper = compose_mos(&[psi_substep(), phi_substep()], p.clone(), sp.clone(), state.grid())?;
    let mut s = state.clone();
    let rep = stepper.step(&mut s)?;
    Ok((s, rep))
}

/// Settings of a time loop.
#[derive(Clone, Debug, Serialize)]
pub struct RunOptions {
    pub t_end: f64,
    /// record a series row every `cadence` steps (and at the end)
    pub cadence: usize,
    /// stop early once `|dW/dt|` over one cadence interval falls below this
    pub steady_slope: Option<f64>,
}

impl RunOptions {
    pub fn new(t_end: f64, cadence: usize) -> Self {
        Self {
            t_end,
            cadence,
            steady_slope: None,
        }
    }
}

pub struct RunOutcome {
    pub state: PhaseState,
    pub record: DiagnosticsRecord,
    /// the step error that ended the run early, if any
    pub failure: Option<Error>,
}

/// Number of steps of size `tau` to reach `t_end` (rounded, at least one).
pub fn step_count(t_end: f64, tau: f64) -> usize {
    ((t_end / tau) - 1e-9).ceil().max(1.0) as usize
}

impl Stepper {
    /// Steps `state` to `opts.t_end`.  `observe` sees every step and can stop
    /// the loop by returning false.  A failing step ends the run with the
    /// partial record.
    pub fn run(
        &mut self,
        mut state: PhaseState,
        opts: &RunOptions,
        mut observe: impl FnMut(&PhaseState, &StepReport) -> bool,
    ) -> Result<RunOutcome> {
        if !(opts.t_end > 0.0) {
            return Err(invalid("t_end", format!("{} must be positive", opts.t_end)));
        }
        if opts.cadence == 0 {
            return Err(invalid("cadence", "must be positive"));
        }
        let mut record = DiagnosticsRecord::start(&state, &self.params)?;
        record.min_stability_margin = Some(check_stability_condition(&self.params, &self.scheme).margin);
        let n = step_count(opts.t_end, self.scheme.tau);
        let mut failure = None;
        for k in 1..=n {
            let rep = match self.step(&mut state) {
                Ok(r) => r,
                Err(e) => {
                    record.failure = Some(e.to_string());
                    failure = Some(e);
                    break;
                }
            };
            record.push_step(&rep);
            let go_on = observe(&state, &rep);
            if k % opts.cadence == 0 || k == n || !go_on {
                let row = SeriesRow::sample(&state, &self.params)?;
                let prev = record.last();
                let steady = match opts.steady_slope {
                    Some(tol) if row.t > prev.t => ((row.energy - prev.energy) / (row.t - prev.t)).abs() < tol,
                    _ => false,
                };
                record.push_row(row);
                if steady {
                    break;
                }
            }
            if !go_on {
                break;
            }
        }
        Ok(RunOutcome { state, record, failure })
    }
}

/// Runs the default composition from `state0` to `t_end`, recording a
/// series row every `cadence` steps.
pub fn run(state0: &PhaseState, p: &ModelParams, sp: &SchemeParams, t_end: f64, cadence: usize) -> Result<RunOutcome> {
    let mut st = Stepper::new(p.clone(), sp.clone(), state0.grid())?;
    st.run(state0.clone(), &RunOptions::new(t_end, cadence), |_, _| true)
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityTerm {
    pub name: String,
    /// Lipschitz constant of the linearised derivative
    pub lipschitz: f64,
    /// stabiliser times `tau`
    pub available: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub holds: bool,
    /// smallest `available - lipschitz`
    pub margin: f64,
    pub terms: Vec<StabilityTerm>,
}

/// Checks `A tau >= L_F` and `B tau >= L_gamma` for every substep.
pub fn check_stability_condition(p: &ModelParams, sp: &SchemeParams) -> StabilityReport {
    let nf = p.n_fields();
    let lf = p.lipschitz_f();
    let mut terms = Vec::new();
    let names = |field: usize| if field == 0 { ("A2", "B2") } else { ("A1", "B1") };
    for field in (0..nf).rev() {
        let (a, b) = sp.stabilizers(field);
        let lg = (0..nf).filter(|&j| j != field).map(|j| p.gammas.lipschitz(j)).fold(0.0, f64::max);
        let (na, nb) = names(field);
        let suffix = if nf > 2 { format!("[field {field}]") } else { String::new() };
        terms.push(StabilityTerm {
            name: format!("{na}{suffix}"),
            lipschitz: lf,
            available: a * sp.tau,
        });
        terms.push(StabilityTerm {
            name: format!("{nb}{suffix}"),
            lipschitz: lg,
            available: b * sp.tau,
        });
    }
    let margin = terms.iter().map(|t| t.available - t.lipschitz).fold(f64::INFINITY, f64::min);
    StabilityReport {
        holds: margin >= 0.0,
        margin,
        terms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::integrate;
    use crate::model::{init_preset, Preset};

    fn small(sigma: [f64; 3]) -> (ModelParams, SchemeParams, Grid2D) {
        let p = ModelParams::ternary(0.05, sigma, 3.01, 1e-3).unwrap();
        let sp = SchemeParams::new(0.01).unwrap();
        (p, sp, Grid2D::unit(33).unwrap())
    }

    #[test]
    fn stabilized_term_cases() {
        let g = Grid2D::unit(5).unwrap();
        let u = ScalarField::constant(g, 0.3);
        let same = stabilized_term(StabilizedFn::F, &u, &u, 100.0, 0.01).unwrap();
        assert!(same.values.iter().all(|&v| v == 0.3f64.powi(3) - 0.3));
        let z = ScalarField::zeros(g);
        let n = ScalarField::constant(g, 0.1);
        let t = stabilized_term(StabilizedFn::F, &z, &n, 100.0, 0.01).unwrap();
        assert!(t.values.iter().all(|&v| (v - 0.05).abs() < 1e-15));
        let t = stabilized_term(StabilizedFn::F, &u, &n, 0.0, 0.01).unwrap();
        let expect = (0.027 - 0.3) + 0.5 * (3.0 * 0.09 - 1.0) * (0.1 - 0.3);
        assert!(t.values.iter().all(|&v| (v - expect).abs() < 1e-15));
    }

    #[test]
    fn scheme_params_validation() {
        assert!(SchemeParams::new(0.0).is_err());
        assert!(SchemeParams::new(-1.0).is_err());
        let mut sp = SchemeParams::new(0.01).unwrap();
        sp.solver_tol = 1e-3;
        assert!(sp.validate().is_err());
    }

    #[test]
    fn stability_condition_examples() {
        let p = ModelParams::ternary(0.01, [1.0, 1.0, 1.0], 3.01, 1e-4).unwrap();
        let r = check_stability_condition(&p, &SchemeParams::new(0.01).unwrap());
        assert!(!r.holds);
        assert!(r.margin <= 1.0 - 2.63 + 1e-9, "{r:?}");
        for sigma in [[3.0, 1.0, 1.0], [1.0, 3.0, 1.0], [1.0, 1.0, 3.0], [1.0, 2.0, 2.0]] {
            let p = ModelParams::ternary(0.01, sigma, 3.01, 1e-4).unwrap();
            let sp = SchemeParams::new(0.01).unwrap().with_stabilizers(1000.0).unwrap();
            let r = check_stability_condition(&p, &sp);
            let lg2 = p.gammas.lipschitz(1);
            assert_eq!(r.holds, lg2 <= 10.0, "{sigma:?} {r:?}");
        }
    }

    #[test]
    fn bulk_fixed_point_and_frozen_field() {
        let (p, sp, g) = small([1.0, 1.0, 1.0]);
        let one = ScalarField::constant(g, 1.0);
        let s = PhaseState::ternary(one.clone(), one.clone()).unwrap();
        let (s1, _) = substep_phi(&s, &one, 0.005, &p, &sp).unwrap();
        assert_eq!(s1.fields[1].values, one.values);
        let (s2, _) = substep_psi(&s, &one, 0.01, &p, &sp).unwrap();
        assert_eq!(s2.fields[0].values, one.values);

        let phi = ScalarField::from_fn(g, |x, y| (6.0 * x).sin() * y);
        let s = PhaseState::ternary(ScalarField::constant(g, -1.0), phi.clone()).unwrap();
        let (s3, rep) = substep_phi(&s, &ScalarField::constant(g, -1.0), 0.005, &p, &sp).unwrap();
        assert_eq!(s3.fields[1].values, phi.values);
        assert_eq!(rep.iterations, 0);
    }

    #[test]
    fn substeps_conserve_mass() {
        let (p, sp, g) = small([1.0, 2.0, 2.0]);
        let s = init_preset(Preset::SquareCross, &p, g).unwrap();
        let (s1, _) = substep_phi(&s, &s.fields[0], 0.005, &p, &sp).unwrap();
        let a = integrate(&s.fields[1]);
        assert!((integrate(&s1.fields[1]) - a).abs() <= 1e-11 * a.abs().max(1.0));
        let (s2, _) = substep_psi(&s1, &s1.fields[1], 0.01, &p, &sp).unwrap();
        let b = integrate(&s.fields[0]);
        assert!((integrate(&s2.fields[0]) - b).abs() <= 1e-11 * b.abs().max(1.0));
    }

    #[test]
    fn compose_matches_strang_step() {
        let (p, sp, g) = small([1.0, 0.8, 1.4]);
        let s = init_preset(Preset::SquareCross, &p, g).unwrap();
        let (a, _) = strang_step(&s, &p, &sp).unwrap();
        let mut st = compose_mos(&[psi_substep(), phi_substep()], p.clone(), sp.clone(), g).unwrap();
        assert_eq!(st.stage_order(), vec![(1, 0.5), (0, 1.0), (1, 0.5)]);
        let mut b = s.clone();
        st.step(&mut b).unwrap();
        assert_eq!(a, b);
        // the same three stages by hand
        let (h1, _) = substep_phi(&s, &s.fields[0], 0.005, &p, &sp).unwrap();
        let (h2, _) = substep_psi(&h1, &h1.fields[1], 0.01, &p, &sp).unwrap();
        let (h3, _) = substep_phi(&h2, &h2.fields[0], 0.005, &p, &sp).unwrap();
        assert_eq!(h3.fields, a.fields);
    }

    #[test]
    fn single_substep_runs_full_step() {
        let (p, sp, g) = small([1.0, 1.0, 1.0]);
        let st = compose_mos(&[phi_substep()], p, sp, g).unwrap();
        assert_eq!(st.stage_order(), vec![(1, 1.0)]);
        let (p, sp, g) = small([1.0, 1.0, 1.0]);
        assert!(compose_mos(&[], p, sp, g).is_err());
    }

    #[test]
    fn constant_coefficient_solution_matches_dense_solve() {
        // gamma and M constant: psi = 1 and phi substep with sigma_12 = sigma_13
        let g = Grid2D::unit(17).unwrap();
        let p = ModelParams::ternary(0.1, [1.0, 1.0, 1.0], 3.01, 1e-2).unwrap();
        let sp = SchemeParams::new(0.05).unwrap();
        let phi = ScalarField::from_fn(g, |x, y| 0.4 * (3.0 * x).cos() * (2.0 * y).sin());
        let s = PhaseState::ternary(ScalarField::constant(g, 1.0), phi).unwrap();
        let mut ws = Workspace::new(g);
        let sys = SubstepSystem::assemble(&s, 1, 0.025, &p, &sp, &ws).unwrap();
        let (x, _, _) = sys.solve(sys.rhs(), None, 1e-13, 500, &mut ws).unwrap();
        // dense oracle: assemble the matrix column by column, Gaussian elimination
        let n = g.len();
        let mut a = vec![vec![0.0; n]; n];
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for c in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[c] = 1.0;
            sys.apply(&e, &mut col, &mut ws);
            for r in 0..n {
                a[r][c] = col[r];
            }
        }
        let mut b = sys.rhs().to_vec();
        for k in 0..n {
            let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
            a.swap(k, piv);
            b.swap(k, piv);
            for i in k + 1..n {
                let f = a[i][k] / a[k][k];
                if f != 0.0 {
                    for j in k..n {
                        a[i][j] -= f * a[k][j];
                    }
                    b[i] -= f * b[k];
                }
            }
        }
        let mut y = vec![0.0; n];
        for k in (0..n).rev() {
            let s: f64 = (k + 1..n).map(|j| a[k][j] * y[j]).sum();
            y[k] = (b[k] - s) / a[k][k];
        }
        let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() <= 1e-10 * scale.max(1e-300), "{u} vs {v}");
        }
    }

    #[test]
    fn run_bookkeeping() {
        let (p, sp, g) = small([1.0, 1.0, 1.0]);
        let s = init_preset(Preset::SquareCross, &p, g).unwrap();
        let out = run(&s, &p, &sp, sp.tau, 10).unwrap();
        assert_eq!(out.record.steps, 1);
        assert_eq!(out.record.rows.len(), 2);
        assert!((out.state.time - 0.01).abs() < 1e-15);
        let out = run(&s, &p, &sp, 0.1, 3).unwrap();
        assert_eq!(out.record.steps, 10);
        assert_eq!(out.record.rows.len(), 5);
        assert!(out.record.max_mean_drift() < 1e-11);
        assert!(run(&s, &p, &sp, 0.0, 1).is_err());
        assert_eq!(step_count(1.0, 1.0 / 64.0), 64);
    }

    #[test]
    fn observer_can_stop() {
        let (p, sp, g) = small([1.0, 1.0, 1.0]);
        let s = init_preset(Preset::SquareCross, &p, g).unwrap();
        let mut st = Stepper::new(p, sp, g).unwrap();
        let mut seen = 0;
        let out = st
            .run(s, &RunOptions::new(1.0, 100), |_, _| {
                seen += 1;
                seen < 4
            })
            .unwrap();
        assert_eq!(out.record.steps, 4);
        assert!(out.failure.is_none());
    }

    #[test]
    fn energy_decreases_on_small_run() {
        let (p, _, g) = small([1.0, 2.0, 2.0]);
        let sp = SchemeParams::new(0.01).unwrap().with_stabilizers(1000.0).unwrap();
        assert!(check_stability_condition(&p, &sp).holds);
        let mut s = init_preset(Preset::SquareCross, &p, g).unwrap();
        let mut st = Stepper::new(p, sp, g).unwrap();
        for _ in 0..20 {
            let r = st.step(&mut s).unwrap();
            assert!(r.energy_after <= r.energy_before + 1e-9 * (1.0 + r.energy_before.abs()));
        }
    }
}
