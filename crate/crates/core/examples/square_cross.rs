//! Four quadrants relaxing under the decoupled scheme: energy per step,
//! phase volumes and solver work.
//!
//!     cargo run --release --example square_cross -- 65 0.04 2

use dbpf::model::{init_preset, volumes};
use dbpf::scheme::{check_stability_condition, RunOptions};
use dbpf::{Grid2D, ModelParams, Preset, SchemeParams, Stepper};

fn main() -> dbpf::Result<()> {
    let a: Vec<String> = std::env::args().collect();
    let n: usize = a.get(1).and_then(|v| v.parse().ok()).unwrap_or(65);
    let eps: f64 = a.get(2).and_then(|v| v.parse().ok()).unwrap_or(0.04);
    let t_end: f64 = a.get(3).and_then(|v| v.parse().ok()).unwrap_or(2.0);

    let grid = Grid2D::unit(n)?;
    let p = ModelParams::ternary(eps, [1.0, 0.8, 1.4], 3.01, 1e-3)?;
    let sp = SchemeParams::new(0.01)?.with_stabilizers(1000.0)?;
    println!("stability condition holds: {}", check_stability_condition(&p, &sp).holds);

    let s0 = init_preset(Preset::SquareCross, &p, grid)?;
    let v0 = volumes(&s0);
    let mut stepper = Stepper::new(p, sp, grid)?;
    let out = stepper.run(s0, &RunOptions::new(t_end, 20), |s, r| {
        let k = (s.time / 0.01).round() as usize;
        if k.is_multiple_of(20) {
            println!("t={:5.2} W={:.8} iterations {:?}", s.time, r.energy_after, r.iterations());
        }
        true
    })?;
    let rec = &out.record;
    println!(
        "{} steps, energy monotone {}, largest rise {:.2e}",
        rec.steps,
        rec.energy_monotone(),
        rec.max_energy_rise
    );
    println!("volumes {:?} -> {:?}", v0, volumes(&out.state));
    println!("mean drift {:?}", rec.mean_drift);
    Ok(())
}
