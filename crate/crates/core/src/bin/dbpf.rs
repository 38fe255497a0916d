use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dbpf::diagnostics::{state_angles, theoretical_angles};
use dbpf::io::experiments::{catalog_text, default_out_dir};
use dbpf::io::{load_snapshot, parse_config, resolve, run_experiment, Experiment, ExperimentConfig};
use dbpf::model::Preset;
use dbpf::tension::{build_gamma_n, verify_consistency};
use dbpf::{Error, SurfaceTensions};

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_ASSERT: u8 = 4;

#[derive(Parser)]
#[command(name = "dbpf", version, about = "N-phase Cahn-Hilliard experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment or a single simulation
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        /// experiment name, or an initial condition for a single run
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// use the full-scale defaults
        #[arg(long)]
        paper_scale: bool,
        /// accepted for compatibility; kernels run on one thread
        #[arg(long)]
        threads: Option<usize>,
        /// exit with status 4 if a check fails
        #[arg(long)]
        assert: bool,
    },
    /// List the experiment catalog
    Presets,
    /// Check the consistency conditions of the surface-tension functions
    CheckGamma {
        /// tensions: `s23,s12,s13` or an upper triangle
        #[arg(long, default_value = "1,1,1")]
        sigma: String,
        #[arg(long, default_value_t = 3)]
        phases: usize,
        #[arg(long, default_value_t = dbpf::tension::DEFAULT_ALPHA)]
        alpha: f64,
    },
    /// Measure junction angles in a snapshot
    Angles {
        snapshot: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// tensions for the force-balance comparison
        #[arg(long)]
        sigma: Option<String>,
    },
}

fn config_error(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_CONFIG)
}

fn load_config(config: Option<PathBuf>, preset: Option<String>) -> Result<ExperimentConfig, Error> {
    let mut cfg = match config {
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Config {
                key: "config".into(),
                reason: format!("{}: {e}", path.display()),
            })?;
            parse_config(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(name) = preset {
        if let Ok(e) = Experiment::from_name(&name) {
            cfg.experiment = Some(e);
        } else if let Ok(p) = Preset::from_name(&name) {
            cfg.experiment = None;
            cfg.preset = p;
            cfg.explicit.push("preset".into());
        } else {
            return Err(Error::Config {
                key: "preset".into(),
                reason: format!("`{name}` is neither an experiment nor an initial condition"),
            });
        }
    }
    Ok(cfg)
}

fn parse_sigma(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|v| dbpf::io::config::parse_number("sigma", v))
        .collect()
}

fn run(config: Option<PathBuf>, preset: Option<String>, out: Option<PathBuf>, paper_scale: bool, assert: bool) -> ExitCode {
    let cfg = match load_config(config, preset).and_then(|c| resolve(&c, paper_scale)) {
        Ok(c) => c,
        Err(e) => return config_error(&e),
    };
    let mut cfg = cfg;
    cfg.out = Some(out.or(cfg.out.clone()).unwrap_or_else(|| default_out_dir(&cfg)));
    let summary = match run_experiment(&cfg) {
        Ok(s) => s,
        Err(e @ (Error::Config { .. } | Error::InvalidParameter { .. } | Error::InvalidGrid(_))) => return config_error(&e),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_SOLVER);
        }
    };
    for c in &summary.checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("artifacts in {}", cfg.out.as_ref().map(|p| p.display().to_string()).unwrap_or_default());
    if let Some(f) = &summary.failure {
        eprintln!("error: {f}");
        return ExitCode::from(EXIT_SOLVER);
    }
    if assert && !summary.pass {
        return ExitCode::from(EXIT_ASSERT);
    }
    ExitCode::SUCCESS
}

fn check_gamma(sigma: &str, phases: usize, alpha: f64) -> ExitCode {
    let built = parse_sigma(sigma)
        .and_then(|v| {
            if phases == 3 && v.len() == 3 {
                SurfaceTensions::ternary(v[0], v[1], v[2])
            } else {
                SurfaceTensions::from_upper(phases, &v)
            }
        })
        .and_then(|s| Ok((build_gamma_n(&s, alpha)?, s)));
    let (g, s) = match built {
        Ok(x) => x,
        Err(e) => return config_error(&e),
    };
    let report = verify_consistency(&g, &s, 1e-10);
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_ASSERT)
    }
}

fn angles(path: &std::path::Path, eps: f64, sigma: Option<String>) -> ExitCode {
    let state = match load_snapshot(path) {
        Ok(s) => s,
        Err(e) => return config_error(&e),
    };
    match state_angles(&state, eps) {
        Ok(a) => {
            let [t23, t12, t13] = a.angles();
            println!("junction ({:.4}, {:.4})", a.junction[0], a.junction[1]);
            println!("theta23 {t23:.2}  theta12 {t12:.2}  theta13 {t13:.2}");
            if let Some(text) = sigma {
                let s = parse_sigma(&text).and_then(|v| match v[..] {
                    [a, b, c] => SurfaceTensions::ternary(a, b, c),
                    _ => Err(Error::Config {
                        key: "sigma".into(),
                        reason: "need three tensions".into(),
                    }),
                });
                match s.and_then(|s| theoretical_angles(&s)) {
                    Ok(t) => println!(
                        "expected {:.2} {:.2} {:.2}, max deviation {:.2}",
                        t[0],
                        t[1],
                        t[2],
                        a.max_deviation(t)
                    ),
                    Err(e) => return config_error(&e),
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ASSERT)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            config,
            preset,
            out,
            paper_scale,
            threads: _,
            assert,
        } => run(config, preset, out, paper_scale, assert),
        Command::Presets => {
            print!("{}", catalog_text());
            ExitCode::SUCCESS
        }
        Command::CheckGamma { sigma, phases, alpha } => check_gamma(&sigma, phases, alpha),
        Command::Angles { snapshot, epsilon, sigma } => angles(&snapshot, epsilon, sigma),
    }
}
