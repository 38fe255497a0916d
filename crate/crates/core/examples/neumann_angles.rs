//! A lens between two layers relaxes to the junction angles set by the
//! force balance.
//!
//!     cargo run --release --example neumann_angles -- 0.6 1 1

use dbpf::diagnostics::{state_angles, theoretical_angles};
use dbpf::model::{init_preset, Preset};
use dbpf::scheme::RunOptions;
use dbpf::{Grid2D, ModelParams, SchemeParams, Stepper};

fn main() -> dbpf::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let sigma = match args[..] {
        [a, b, c] => [a, b, c],
        _ => [0.6, 1.0, 1.0],
    };
    let eps = 0.02;
    let p = ModelParams::ternary(eps, sigma, 3.01, 1e-3)?;
    let grid = Grid2D::unit(129)?;
    let want = theoretical_angles(&p.tensions)?;
    println!("sigma {sigma:?}: expected (theta23, theta12, theta13) = {want:.2?}");

    let mut stepper = Stepper::new(p.clone(), SchemeParams::new(0.01)?, grid)?;
    let s0 = init_preset(Preset::LiquidLens, &p, grid)?;
    let out = stepper.run(s0, &RunOptions::new(10.0, 100), |s, _| {
        let k = (s.time / 0.01).round() as usize;
        if k.is_multiple_of(200) {
            if let Ok(a) = state_angles(s, eps) {
                println!("t={:5.1} angles {:.2?}", s.time, a.angles());
            }
        }
        true
    })?;
    let a = state_angles(&out.state, eps)?;
    println!(
        "final angles {:.2?} at junction ({:.3}, {:.3}), max deviation {:.2} deg",
        a.angles(),
        a.junction[0],
        a.junction[1],
        a.max_deviation(want)
    );
    Ok(())
}
