//! Total spreading of a lens: with sigma23 large the lens phase wets both
//! layers and opens into a film; with sigma12 large it is wrapped by the
//! upper fluid and leaves the interface.
//!
//!     cargo run --release --example liquid_lens -- 3 1 1

use dbpf::io::experiments::morphology;
use dbpf::model::{init_preset, spreading_coefficients, Preset};
use dbpf::scheme::RunOptions;
use dbpf::{Grid2D, ModelParams, SchemeParams, Stepper};

fn main() -> dbpf::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let sigma = match args[..] {
        [a, b, c] => [a, b, c],
        _ => [3.0, 1.0, 1.0],
    };
    let t_end = 8.0;
    let p = ModelParams::ternary(0.02, sigma, 3.01, 1e-3)?;
    let sp = spreading_coefficients(&p.tensions)?;
    println!("sigma {sigma:?}: spreading coefficients {:?} ({:?})", sp.s, sp.regime);

    let grid = Grid2D::unit(129)?;
    let mut stepper = Stepper::new(p.clone(), SchemeParams::new(0.01)?, grid)?;
    let s0 = init_preset(Preset::LiquidLens, &p, grid)?;
    let out = stepper.run(s0, &RunOptions::new(t_end, 100), |s, _| {
        let k = (s.time / 0.01).round() as usize;
        if k.is_multiple_of(200) {
            if let Ok(m) = morphology(s, &p) {
                println!(
                    "t={:4.1} junction {:5} phase-1 layer {:5} phase 2/3 contact {:3} gap {:?}",
                    s.time, m.junction, m.phase1_layer, m.contact_23, m.lens_gap
                );
            }
        }
        true
    })?;
    let m = morphology(&out.state, &p)?;
    println!("final: {}", serde_json::to_string(&m).unwrap_or_default());
    Ok(())
}
