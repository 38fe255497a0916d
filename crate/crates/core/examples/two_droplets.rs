//! Two touching droplets in a matrix.  Depending on the tensions they form
//! a Janus pair, fall apart, or one engulfs the other.
//!
//!     cargo run --release --example two_droplets -- 1 1 3

use dbpf::io::experiments::{droplet_preset, morphology};
use dbpf::model::init_preset;
use dbpf::scheme::RunOptions;
use dbpf::{Grid2D, ModelParams, SchemeParams, Stepper};

fn main() -> dbpf::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let sigma = match args[..] {
        [a, b, c] => [a, b, c],
        _ => [1.0, 1.0, 1.0],
    };
    let p = ModelParams::ternary(0.015, sigma, 3.01, 1e-3)?;
    let preset = droplet_preset(&p);
    println!("sigma {sigma:?}, initial layout {}", preset.name());

    let grid = Grid2D::unit(129)?;
    let mut stepper = Stepper::new(p.clone(), SchemeParams::new(0.01)?, grid)?;
    let s0 = init_preset(preset, &p, grid)?;
    let out = stepper.run(s0, &RunOptions::new(10.0, 100), |_, _| true)?;
    let m = morphology(&out.state, &p)?;
    println!("phase components {:?}, holes {:?}", m.phase_components, m.phase_holes);
    println!("droplets {}, centroid distance {:?}", m.droplet_components, m.droplet_distance);
    match (m.angles, m.theoretical) {
        (Some(a), Some(t)) => println!("junction angles {a:.2?}, force balance {t:.2?}"),
        _ => println!("junction {}", m.junction),
    }
    Ok(())
}
