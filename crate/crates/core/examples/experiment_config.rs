//! Driving a catalog experiment from configuration text, as the command
//! line does, with a few keys overridden.
//!
//!     cargo run --release --example experiment_config

use dbpf::io::experiments::{catalog_text, resolve, run_experiment};
use dbpf::io::parse_config;

const CONFIG: &str = "
[experiment]
experiment = energy_stability

[grid]
n = 49

[model]
epsilon = 0.05

[run]
t_end = 0.5
cadence = 10
sigma_sets = 1,1,1; 1,0.8,1.4
";

fn main() -> dbpf::Result<()> {
    print!("{}", catalog_text());
    let mut cfg = resolve(&parse_config(CONFIG)?, false)?;
    cfg.out = Some(std::env::temp_dir().join("dbpf-experiment-config"));
    let summary = run_experiment(&cfg)?;
    for c in &summary.checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("summary in {}", cfg.out.unwrap().join("summary.json").display());
    Ok(())
}
