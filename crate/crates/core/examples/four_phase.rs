//! Four phases, three order parameters: a disc of phase 4 sitting on the
//! junction of three layers.  Checks that the energy decreases every step
//! and the means stay put.
//!
//!     cargo run --release --example four_phase

use dbpf::model::{free_energy, volumes};
use dbpf::scheme::RunOptions;
use dbpf::{Grid2D, ModelParams, PhaseState, ScalarField, SchemeParams, Stepper, SurfaceTensions};

fn main() -> dbpf::Result<()> {
    let eps = 0.04;
    let grid = Grid2D::unit(65)?;
    let s = SurfaceTensions::from_upper(4, &[1.0, 1.3, 0.8, 1.1, 0.9, 1.6])?;
    let p = ModelParams::new(eps, s, 3.01, vec![1e-3; 3], vec![4, 4])?;
    let t = move |d: f64| (d / eps).tanh();
    let state = PhaseState::new(vec![
        ScalarField::from_fn(grid, |_, y| t(y - 0.35)),
        ScalarField::from_fn(grid, |x, _| t(x - 0.5)),
        ScalarField::from_fn(grid, |x, y| t(((x - 0.5).powi(2) + (y - 0.6).powi(2)).sqrt() - 0.15)),
    ])?;
    println!("W0 = {:.6}, volumes {:.4?}", free_energy(&state, &p)?, volumes(&state));

    let sp = SchemeParams::new(0.01)?.with_stabilizers(1000.0)?;
    let mut stepper = Stepper::new(p.clone(), sp, grid)?;
    println!("stage order (field, fraction of tau): {:?}", stepper.stage_order());
    let out = stepper.run(state, &RunOptions::new(1.0, 10), |s, r| {
        let k = (s.time / 0.01).round() as usize;
        if k.is_multiple_of(25) {
            println!("t={:.2} W={:.6} iterations {:?}", s.time, r.energy_after, r.iterations());
        }
        true
    })?;
    let rec = &out.record;
    println!(
        "{} steps: energy monotone {}, mean drift {:.1e}, volumes {:.4?}",
        rec.steps,
        rec.energy_monotone(),
        rec.max_mean_drift(),
        volumes(&out.state)
    );
    Ok(())
}
