//! Experiment configuration: `key = value` lines, optionally grouped under
//! `[section]` headers, `#` comments.
//!
//! ```text
//! [experiment]  experiment, preset, seed
//! [grid]        n | nx, ny | h ; lx, ly
//! [model]       epsilon, phases, sigma, alpha, m, mobility_exponent
//! [scheme]      tau, A, B, A1, A2, B1, B2, solver_tol, solver_maxit
//! [run]         t_end, cadence, steady_slope, out, sigma_sets, levels
//! ```
//!
//! Numbers accept fractions (`h = 1/400`).  For three phases `sigma` lists
//! `sigma23, sigma12, sigma13`; for more phases it lists the upper triangle
//! row by row.  `sigma_sets` is a `;`-separated list of ternary triples used
//! by experiments that sweep tensions; `levels` lists the time steps or mesh
//! sizes of a convergence study.

use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::model::{ModelParams, Preset, DEFAULT_MOBILITY_EXPONENT};
use crate::scheme::SchemeParams;
use crate::tension::{SurfaceTensions, DEFAULT_ALPHA};

use super::experiments::Experiment;

const SECTIONS: &[(&str, &[&str])] = &[
    ("experiment", &["experiment", "preset", "seed"]),
    ("grid", &["n", "nx", "ny", "h", "lx", "ly"]),
    ("model", &["epsilon", "phases", "sigma", "alpha", "m", "mobility_exponent"]),
    (
        "scheme",
        &["tau", "A", "B", "A1", "A2", "B1", "B2", "solver_tol", "solver_maxit"],
    ),
    ("run", &["t_end", "cadence", "steady_slope", "out", "sigma_sets", "levels"]),
];

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub preset: Preset,
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub epsilon: f64,
    pub phases: usize,
    /// tensions as written: a ternary triple or an upper triangle
    pub sigma: Vec<f64>,
    /// whether `sigma` was given explicitly
    pub sigma_set: bool,
    pub sigma_sets: Option<Vec<[f64; 3]>>,
    /// time steps or mesh sizes of a convergence study, coarsest first
    pub levels: Option<Vec<f64>>,
    pub alpha: f64,
    pub m: Vec<f64>,
    pub mobility_exponent: Vec<u32>,
    pub scheme: SchemeParams,
    pub t_end: f64,
    pub cadence: usize,
    pub steady_slope: Option<f64>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    /// keys explicitly present in the source text
    pub explicit: Vec<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            preset: Preset::SquareCross,
            nx: 401,
            ny: 401,
            lx: 1.0,
            ly: 1.0,
            epsilon: 0.01,
            phases: 3,
            sigma: vec![1.0, 1.0, 1.0],
            sigma_set: false,
            sigma_sets: None,
            levels: None,
            alpha: DEFAULT_ALPHA,
            m: vec![1e-4],
            mobility_exponent: vec![DEFAULT_MOBILITY_EXPONENT],
            scheme: SchemeParams::new(0.01).expect("default tau is valid"),
            t_end: 1.0,
            cadence: 10,
            steady_slope: None,
            out: None,
            seed: 0,
            explicit: Vec::new(),
        }
    }
}

fn cfg_err(key: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        reason: reason.into(),
    }
}

pub fn parse_number(key: &str, v: &str) -> Result<f64> {
    let v = v.trim();
    let x = match v.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| cfg_err(key, format!("`{v}` is not a number")))?;
            let b: f64 = b.trim().parse().map_err(|_| cfg_err(key, format!("`{v}` is not a number")))?;
            a / b
        }
        None => v.parse().map_err(|_| cfg_err(key, format!("`{v}` is not a number")))?,
    };
    if !x.is_finite() {
        return Err(cfg_err(key, format!("`{v}` is not finite")));
    }
    Ok(x)
}

fn parse_int(key: &str, v: &str) -> Result<usize> {
    v.trim().parse().map_err(|_| cfg_err(key, format!("`{}` is not a nonnegative integer", v.trim())))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| parse_number(key, s)).collect()
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::default();
    let mut section: Option<&str> = None;
    let mut grid_n: Option<(usize, usize)> = None;
    let (mut a_all, mut b_all) = (None, None);
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim();
            section = Some(
                SECTIONS
                    .iter()
                    .find(|(s, _)| *s == name)
                    .map(|(s, _)| *s)
                    .ok_or_else(|| cfg_err(name, "unknown section"))?,
            );
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| cfg_err(line, format!("line {} is not `key = value`", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        let home = SECTIONS.iter().find(|(_, keys)| keys.contains(&key)).map(|(s, _)| *s);
        match (home, section) {
            (None, _) => return Err(cfg_err(key, "unknown key")),
            (Some(h), Some(s)) if h != s => return Err(cfg_err(key, format!("belongs to [{h}], not [{s}]"))),
            _ => {}
        }
        if c.explicit.iter().any(|k| k == key) {
            return Err(cfg_err(key, "given twice"));
        }
        c.explicit.push(key.to_string());
        match key {
            "experiment" => c.experiment = Some(Experiment::from_name(value).map_err(|_| cfg_err(key, format!("unknown experiment `{value}`")))?),
            "preset" => c.preset = Preset::from_name(value).map_err(|_| cfg_err(key, format!("unknown preset `{value}`")))?,
            "seed" => c.seed = parse_int(key, value)? as u64,
            "n" => {
                let n = parse_int(key, value)?;
                grid_n = Some((n, n));
            }
            "nx" => grid_n = Some((parse_int(key, value)?, grid_n.map_or(c.ny, |g| g.1))),
            "ny" => grid_n = Some((grid_n.map_or(c.nx, |g| g.0), parse_int(key, value)?)),
            "h" => {
                let h = parse_number(key, value)?;
                if !(h > 0.0) {
                    return Err(cfg_err(key, "must be positive"));
                }
                let n = (1.0 / h).round() as usize + 1;
                grid_n = Some((n, n));
            }
            "lx" => c.lx = parse_number(key, value)?,
            "ly" => c.ly = parse_number(key, value)?,
            "epsilon" => c.epsilon = parse_number(key, value)?,
            "phases" => c.phases = parse_int(key, value)?,
            "sigma" => {
                c.sigma = parse_list(key, value)?;
                c.sigma_set = true;
            }
            "sigma_sets" => {
                let sets = value
                    .split(';')
                    .map(|t| {
                        let v = parse_list(key, t)?;
                        <[f64; 3]>::try_from(v).map_err(|_| cfg_err(key, "each set needs three tensions"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                c.sigma_sets = Some(sets);
            }
            "levels" => {
                let v = parse_list(key, value)?;
                if v.len() < 2 || v.iter().any(|x| !(*x > 0.0)) {
                    return Err(cfg_err(key, "need at least two positive levels"));
                }
                c.levels = Some(v);
            }
            "alpha" => c.alpha = parse_number(key, value)?,
            "m" => c.m = parse_list(key, value)?,
            "mobility_exponent" => {
                c.mobility_exponent = value.split(',').map(|s| parse_int(key, s).map(|v| v as u32)).collect::<Result<_>>()?
            }
            "tau" => c.scheme.tau = parse_number(key, value)?,
            "A" => a_all = Some(parse_number(key, value)?),
            "B" => b_all = Some(parse_number(key, value)?),
            "A1" => c.scheme.a1 = parse_number(key, value)?,
            "A2" => c.scheme.a2 = parse_number(key, value)?,
            "B1" => c.scheme.b1 = parse_number(key, value)?,
            "B2" => c.scheme.b2 = parse_number(key, value)?,
            "solver_tol" => c.scheme.solver_tol = parse_number(key, value)?,
            "solver_maxit" => c.scheme.solver_maxit = parse_int(key, value)?,
            "t_end" => c.t_end = parse_number(key, value)?,
            "cadence" => c.cadence = parse_int(key, value)?,
            "steady_slope" => c.steady_slope = Some(parse_number(key, value)?),
            "out" => c.out = Some(PathBuf::from(value)),
            _ => unreachable!("key table and match agree"),
        }
    }
    let explicit = |k: &str| c.explicit.iter().any(|e| e == k);
    if let Some(a) = a_all {
        if !explicit("A1") {
            c.scheme.a1 = a;
        }
        if !explicit("A2") {
            c.scheme.a2 = a;
        }
    }
    if let Some(b) = b_all {
        if !explicit("B1") {
            c.scheme.b1 = b;
        }
        if !explicit("B2") {
            c.scheme.b2 = b;
        }
    }
    if let Some((nx, ny)) = grid_n {
        c.nx = nx;
        c.ny = ny;
    }
    c.validate()?;
    Ok(c)
}

impl ExperimentConfig {
    pub fn is_explicit(&self, key: &str) -> bool {
        self.explicit.iter().any(|k| k == key)
    }

    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::new(self.nx, self.ny, self.lx, self.ly).map_err(|e| cfg_err("n", e.to_string()))
    }

    pub fn tensions(&self) -> Result<SurfaceTensions> {
        let s = if self.phases == 3 {
            match self.sigma[..] {
                [a, b, c] => SurfaceTensions::ternary(a, b, c),
                _ => return Err(cfg_err("sigma", "three phases need three tensions")),
            }
        } else {
            SurfaceTensions::from_upper(self.phases, &self.sigma)
        };
        s.map_err(|e| cfg_err("sigma", e.to_string()))
    }

    /// Model parameters with tensions replaced by `sigma` when given.
    pub fn model(&self, sigma: Option<[f64; 3]>) -> Result<ModelParams> {
        let s = match sigma {
            Some([a, b, c]) => SurfaceTensions::ternary(a, b, c).map_err(|e| cfg_err("sigma", e.to_string()))?,
            None => self.tensions()?,
        };
        let nf = self.phases - 1;
        let m = if self.m.len() == 1 { vec![self.m[0]; nf] } else { self.m.clone() };
        let exps = if self.mobility_exponent.len() == 1 {
            vec![self.mobility_exponent[0]; nf.saturating_sub(1).max(1)]
        } else {
            self.mobility_exponent.clone()
        };
        ModelParams::new(self.epsilon, s, self.alpha, m, exps).map_err(to_config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.phases < 3 {
            return Err(cfg_err("phases", "need at least three phases"));
        }
        self.grid()?;
        self.scheme.validate().map_err(to_config)?;
        self.model(None)?;
        if !(self.t_end > 0.0) {
            return Err(cfg_err("t_end", "must be positive"));
        }
        if self.cadence == 0 {
            return Err(cfg_err("cadence", "must be positive"));
        }
        if let Some(s) = self.steady_slope {
            if !(s > 0.0) {
                return Err(cfg_err("steady_slope", "must be positive"));
            }
        }
        if let Some(sets) = &self.sigma_sets {
            for s in sets {
                self.model(Some(*s))?;
            }
        }
        Ok(())
    }
}

/// Maps a parameter error to a configuration error naming the key.
fn to_config(e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => {
            let key = if name == "mob_exponents" { "mobility_exponent".to_string() } else { name };
            Error::Config { key, reason }
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c.nx, 401);
        assert_eq!(c.epsilon, 0.01);
        assert_eq!(c.scheme.tau, 0.01);
        assert_eq!(c.m, vec![1e-4]);
        assert_eq!((c.scheme.a1, c.scheme.b2), (100.0, 100.0));
        assert_eq!(c.alpha, 3.01);
        assert_eq!(c.preset, Preset::SquareCross);
    }

    #[test]
    fn sigma_order_follows_triple_convention() {
        let c = parse_config("sigma = 1,2,2").unwrap();
        let s = c.tensions().unwrap();
        assert_eq!((s.get(2, 3).unwrap(), s.get(1, 2).unwrap(), s.get(1, 3).unwrap()), (1.0, 2.0, 2.0));
    }

    #[test]
    fn errors_name_the_key() {
        for (text, key) in [
            ("tau = -1", "tau"),
            ("epsilon = 0", "epsilon"),
            ("bogus = 3", "bogus"),
            ("[grid]\ntau = 0.1", "tau"),
            ("n = two", "n"),
            ("sigma = 1,2", "sigma"),
            ("[nowhere]", "nowhere"),
            ("solver_tol = 0.1", "solver_tol"),
            ("t_end = 0", "t_end"),
            ("tau = 0.1\ntau = 0.2", "tau"),
            ("sigma_sets = 1,1,1; 1,2", "sigma_sets"),
        ] {
            match parse_config(text) {
                Err(Error::Config { key: k, .. }) => assert_eq!(k, key, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn sections_fractions_and_broadcast() {
        let text = "# desk run\n[grid]\nh = 1/128\n[model]\nepsilon = 0.02\nsigma = 1, 0.8, 1.4\n[scheme]\nA = 1000\nB2 = 5\n[run]\nt_end = 20 # steps\nsigma_sets = 1,1,1; 1,2,2\nout = /tmp/x\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.nx, 129);
        assert_eq!((c.scheme.a1, c.scheme.a2, c.scheme.b1, c.scheme.b2), (1000.0, 1000.0, 100.0, 5.0));
        assert_eq!(c.sigma_sets.as_ref().unwrap().len(), 2);
        assert_eq!(c.out, Some(PathBuf::from("/tmp/x")));
        assert!(c.is_explicit("sigma") && !c.is_explicit("tau"));
        let p = c.model(None).unwrap();
        assert_eq!(p.n_fields(), 2);
    }

    #[test]
    fn four_phases_from_upper_triangle() {
        let c = parse_config("phases = 4\nsigma = 1,1,1,1,1,1\nn = 33").unwrap();
        assert_eq!(c.model(None).unwrap().n_fields(), 3);
        assert!(parse_config("phases = 4\nsigma = 1,1,1").is_err());
    }
}
