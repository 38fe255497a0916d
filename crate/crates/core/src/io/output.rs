//! Time-series CSV and JSON summaries.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::diagnostics::{field_names, SeriesRow};
use crate::error::Result;

/// Locale-independent, 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_header(n_fields: usize) -> String {
    let mut cols = vec!["t".to_string(), "W".to_string()];
    cols.extend((1..=n_fields + 1).map(|k| format!("V{k}")));
    for name in field_names(n_fields) {
        cols.push(format!("min_{name}"));
        cols.push(format!("max_{name}"));
    }
    cols.join(",")
}

pub fn series_csv(rows: &[SeriesRow], n_fields: usize) -> String {
    let mut out = csv_header(n_fields);
    out.push('\n');
    for r in rows {
        let mut vals = vec![fmt17(r.t), fmt17(r.energy)];
        vals.extend(r.volumes.iter().map(|&v| fmt17(v)));
        for (lo, hi) in r.min.iter().zip(&r.max) {
            vals.push(fmt17(*lo));
            vals.push(fmt17(*hi));
        }
        let _ = writeln!(out, "{}", vals.join(","));
    }
    out
}

pub fn write_series_csv(path: &Path, rows: &[SeriesRow], n_fields: usize) -> Result<()> {
    fs::write(path, series_csv(rows, n_fields))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("summary types serialize");
    fs::write(path, text + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_rows() {
        assert_eq!(csv_header(2), "t,W,V1,V2,V3,min_psi,max_psi,min_phi,max_phi");
        let row = SeriesRow {
            t: 0.1,
            energy: 1.0 / 3.0,
            volumes: vec![0.25, 0.5, 0.25],
            min: vec![-1.0, -0.5],
            max: vec![1.0, 0.5],
        };
        let csv = series_csv(&[row], 2);
        let line = csv.lines().nth(1).unwrap();
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 9);
        assert_eq!(cells[1], "3.3333333333333331e-1");
        // 17 significant digits round-trip
        assert_eq!(cells[1].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(cells[0].parse::<f64>().unwrap(), 0.1);
    }
}
