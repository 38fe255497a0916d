//! Self-convergence in time: the same run at halved steps, orders from
//! differences of successive solutions.
//!
//!     cargo run --release --example temporal_convergence

use dbpf::diagnostics::ConvergenceReport;
use dbpf::model::init_preset;
use dbpf::scheme::run;
use dbpf::{Grid2D, ModelParams, Preset, SchemeParams};

fn main() -> dbpf::Result<()> {
    let grid = Grid2D::unit(65)?;
    let p = ModelParams::ternary(0.05, [1.0, 1.0, 1.0], 3.01, 1e-3)?;
    let s0 = init_preset(Preset::SquareCross, &p, grid)?;
    let t_end = 0.25;
    let taus = [1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0, 1.0 / 512.0];

    let mut sols = Vec::new();
    for &tau in &taus {
        let out = run(&s0, &p, &SchemeParams::new(tau)?, t_end, 1000)?;
        println!("tau={tau:<10} steps={}", out.record.steps);
        sols.push(out.state);
    }
    let rep = ConvergenceReport::temporal(&taus, &sols)?;
    for s in &rep.series {
        let errs: Vec<String> = s.errors.iter().map(|e| format!("{e:.3e}")).collect();
        let ords: Vec<String> = s.orders.iter().map(|o| format!("{o:.2}")).collect();
        println!("{:<9} errors [{}] orders [{}]", s.label, errs.join(", "), ords.join(", "));
    }
    Ok(())
}
