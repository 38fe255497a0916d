//! Binary snapshots of a phase state.
//!
//! A short text header terminated by an empty line, then every field as
//! little-endian `f64` in row-major order (`x` fastest):
//!
//! ```text
//! DBPF-SNAPSHOT
//! version 1
//! nx 129
//! ny 129
//! lx 1
//! ly 1
//! time 0.5
//! fields 2 psi phi
//!
//! <nx*ny*2 doubles>
//! ```

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::diagnostics::field_names;
use crate::error::{Error, Result};
use crate::grid::{Grid2D, ScalarField};
use crate::model::PhaseState;

pub const MAGIC: &str = "DBPF-SNAPSHOT";
pub const VERSION: u32 = 1;

pub fn write_snapshot<W: Write>(mut w: W, state: &PhaseState) -> Result<()> {
    let g = state.grid();
    let names = field_names(state.n_fields()).join(" ");
    write!(
        w,
        "{MAGIC}\nversion {VERSION}\nnx {}\nny {}\nlx {:e}\nly {:e}\ntime {:e}\nfields {} {names}\n\n",
        g.nx,
        g.ny,
        g.lx,
        g.ly,
        state.time,
        state.n_fields()
    )?;
    let mut buf = Vec::with_capacity(8 * g.len() * state.n_fields());
    for f in &state.fields {
        for v in &f.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn header_value<'a>(line: &'a str, key: &str) -> Result<&'a str> {
    line.strip_prefix(key)
        .and_then(|r| r.strip_prefix(' '))
        .map(str::trim)
        .ok_or_else(|| bad(format!("expected `{key}`, found `{line}`")))
}

fn header_num<T: std::str::FromStr>(line: &str, key: &str) -> Result<T> {
    let v = header_value(line, key)?;
    v.parse().map_err(|_| bad(format!("bad value `{v}` for `{key}`")))
}

pub fn read_snapshot<R: BufRead>(mut r: R) -> Result<PhaseState> {
    let mut lines = Vec::new();
    loop {
        let mut line = String::new();
        if r.read_line(&mut line)? == 0 {
            return Err(bad("truncated header"));
        }
        let line = line.trim_end_matches(['\n', '\r']).to_string();
        if lines.is_empty() && line != MAGIC {
            return Err(bad(format!("not a snapshot (magic `{line}`)")));
        }
        if line.is_empty() {
            break;
        }
        lines.push(line);
        if lines.len() > 8 {
            return Err(bad("header too long"));
        }
    }
    if lines.len() != 8 {
        return Err(bad("incomplete header"));
    }
    let version: u32 = header_num(&lines[1], "version")?;
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let nx: usize = header_num(&lines[2], "nx")?;
    let ny: usize = header_num(&lines[3], "ny")?;
    let lx: f64 = header_num(&lines[4], "lx")?;
    let ly: f64 = header_num(&lines[5], "ly")?;
    let time: f64 = header_num(&lines[6], "time")?;
    let fields = header_value(&lines[7], "fields")?;
    let nf: usize = fields
        .split_whitespace()
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| bad("bad field count"))?;
    let grid = Grid2D::new(nx, ny, lx, ly).map_err(|e| bad(e.to_string()))?;
    let mut bytes = vec![0u8; 8 * grid.len()];
    let mut out = Vec::with_capacity(nf);
    for k in 0..nf {
        r.read_exact(&mut bytes).map_err(|_| bad(format!("truncated data in field {k}")))?;
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        out.push(ScalarField::from_values(grid, values)?);
    }
    let mut state = PhaseState::new(out)?;
    state.time = time;
    Ok(state)
}

pub fn save_snapshot(path: &Path, state: &PhaseState) -> Result<()> {
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    write_snapshot(&mut w, state)?;
    w.flush()?;
    Ok(())
}

pub fn load_snapshot(path: &Path) -> Result<PhaseState> {
    read_snapshot(std::io::BufReader::new(fs::File::open(path)?))
}
