//! Writing and reading snapshots and the CSV series, then measuring
//! angles on the reloaded state.
//!
//!     cargo run --release --example snapshots

use dbpf::diagnostics::state_angles;
use dbpf::io::output::write_series_csv;
use dbpf::io::{load_snapshot, save_snapshot};
use dbpf::model::{init_preset, Preset};
use dbpf::scheme::run;
use dbpf::{Grid2D, ModelParams, SchemeParams};

fn main() -> dbpf::Result<()> {
    let dir = std::env::temp_dir().join("dbpf-snapshots");
    std::fs::create_dir_all(&dir)?;
    let eps = 0.03;
    let p = ModelParams::ternary(eps, [1.0, 1.0, 1.0], 3.01, 1e-3)?;
    let grid = Grid2D::unit(65)?;
    let s0 = init_preset(Preset::LiquidLens, &p, grid)?;
    let out = run(&s0, &p, &SchemeParams::new(0.01)?, 1.0, 10)?;

    let snap = dir.join("lens.snap");
    save_snapshot(&snap, &out.state)?;
    write_series_csv(&dir.join("lens.csv"), &out.record.rows, 2)?;
    let back = load_snapshot(&snap)?;
    assert_eq!(back, out.state);
    println!("{} bytes, t={}, bitwise identical after reload", std::fs::metadata(&snap)?.len(), back.time);
    let a = state_angles(&back, eps)?;
    println!("angles at t={}: {:.2?}", back.time, a.angles());
    println!("files in {}", dir.display());
    Ok(())
}
