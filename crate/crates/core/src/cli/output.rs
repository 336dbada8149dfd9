//! CSV, gnuplot and JSON artifacts.
//!
//! Floats are written with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use crate::eigen_iteration::IterationRecord;
use crate::error::{Error, Result};
use crate::geometry::{Domain, Field};

pub const HISTORY_HEADER: &str = "k,R,lambda_est,sup_norm,norm_mu,m,residual,wall_time_s";

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        message: message.into(),
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| io_error(path, e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| parse_error(path, e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn history_cells(r: &IterationRecord) -> [String; 8] {
    [
        r.k.to_string(),
        num(r.rayleigh),
        num(r.lambda_est),
        num(r.sup_norm),
        num(r.norm_mu),
        num(r.monotone_product),
        num(r.residual),
        num(r.wall_time),
    ]
}

fn csv_string(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn history_csv(history: &[IterationRecord]) -> String {
    let header: Vec<&str> = HISTORY_HEADER.split(',').collect();
    csv_string(&header, history.iter().map(|r| history_cells(r).to_vec()))
}

pub fn history_dat(history: &[IterationRecord]) -> String {
    let mut out = format!("# {}\n", HISTORY_HEADER.replace(',', " "));
    for r in history {
        out.push_str(&history_cells(r).join(" "));
        out.push('\n');
    }
    out
}

/// Column names and coordinate values for node `i`.
fn coords(domain: &Domain, i: usize) -> Vec<f64> {
    match domain {
        Domain::Grid(g) => {
            let p = g.nodes[i];
            vec![p.x, p.y]
        }
        Domain::Radial(r) => vec![r.s[i]],
    }
}

fn coord_names(domain: &Domain) -> &'static [&'static str] {
    match domain {
        Domain::Grid(_) => &["x", "y"],
        Domain::Radial(_) => &["s"],
    }
}

fn table_cells(columns: &[(&str, &[f64])], domain: &Domain, i: usize) -> Vec<String> {
    let mut cells: Vec<String> = coords(domain, i).into_iter().map(num).collect();
    cells.extend(columns.iter().map(|c| num(c.1[i])));
    cells
}

/// CSV of node coordinates followed by one column per field.
pub fn fields_csv(columns: &[(&str, &[f64])], domain: &Domain) -> String {
    let mut names: Vec<&str> = coord_names(domain).to_vec();
    names.extend(columns.iter().map(|c| c.0));
    csv_string(
        &names,
        (0..domain.len()).map(|i| table_cells(columns, domain, i)),
    )
}

/// Whitespace-separated variant of [`fields_csv`] with a blank line between
/// grid rows, as gnuplot's `splot` expects.
pub fn fields_dat(columns: &[(&str, &[f64])], domain: &Domain) -> String {
    let mut names: Vec<&str> = coord_names(domain).to_vec();
    names.extend(columns.iter().map(|c| c.0));
    let mut out = format!("# {}\n", names.join(" "));
    let mut last_row = None;
    for i in 0..domain.len() {
        if let Domain::Grid(g) = domain {
            let row = g.nodes[i].j;
            if last_row.is_some_and(|r| r != row) {
                out.push('\n');
            }
            last_row = Some(row);
        }
        let _ = writeln!(out, "{}", table_cells(columns, domain, i).join(" "));
    }
    out
}

pub fn field_csv(field: &Field) -> String {
    fields_csv(&[("value", field.values())], field.domain())
}

pub fn field_dat(field: &Field) -> String {
    fields_dat(&[("value", field.values())], field.domain())
}

/// Parsed CSV: header names and numeric rows.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

pub fn read_csv(path: &Path) -> Result<Table> {
    let fail = |e: csv::Error| parse_error(path, e.to_string());
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(fail)?;
    let header = reader
        .headers()
        .map_err(fail)?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(fail)?;
        let row = record
            .iter()
            .map(str::parse::<f64>)
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| parse_error(path, format!("row {}: {e}", k + 1)))?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}

/// Reads an `eigenfunction.csv` back onto `domain`, checking the node coordinates.
pub fn read_field_csv(path: &Path, domain: &Arc<Domain>) -> Result<Field> {
    let table = read_csv(path)?;
    let names = coord_names(domain);
    let expected: Vec<&str> = names.iter().copied().chain(["value"]).collect();
    if table.header != expected {
        return Err(parse_error(
            path,
            format!("header {:?} does not match {:?}", table.header, expected),
        ));
    }
    if table.rows.len() != domain.len() {
        return Err(Error::LengthMismatch {
            what: "eigenfunction rows",
            expected: domain.len(),
            got: table.rows.len(),
        });
    }
    let scale = domain.radius().max(1.0) * 1e-12;
    let mut values = Vec::with_capacity(domain.len());
    for (i, row) in table.rows.iter().enumerate() {
        let c = coords(domain, i);
        if c.iter().zip(row).any(|(a, b)| (a - b).abs() > scale) {
            return Err(parse_error(
                path,
                format!("row {} is not at node {i}", i + 1),
            ));
        }
        values.push(row[names.len()]);
    }
    Field::new(domain.clone(), values)
}

/// `s = |z|^2` and values from an `eigenfunction.csv` in either layout.
pub fn read_profile_samples(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let table = read_csv(path)?;
    let values = table
        .column("value")
        .ok_or_else(|| parse_error(path, "missing `value` column"))?;
    let s = match (table.column("s"), table.column("x"), table.column("y")) {
        (Some(s), _, _) => s,
        (None, Some(x), Some(y)) => x.iter().zip(&y).map(|(x, y)| x * x + y * y).collect(),
        _ => return Err(parse_error(path, "expected `s` or `x,y` columns")),
    };
    Ok((s, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, DomainSpec};

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1.7976931348623157e308, 5e-324] {
            assert_eq!(num(x).parse::<f64>().unwrap().to_bits(), f64::to_bits(x));
        }
    }

    #[test]
    fn history_header_and_rows() {
        let r = IterationRecord {
            k: 3,
            rayleigh: 1.5,
            lambda_est: 1.5,
            sup_norm: 1.0,
            norm_mu: 2.0,
            monotone_product: 3.0,
            residual: 0.0,
            wall_time: 0.25,
        };
        let csv = history_csv(&[r]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(HISTORY_HEADER));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 8);
        assert_eq!(row[0], "3");
        assert!(history_dat(&[]).starts_with("# k R lambda_est"));
    }

    #[test]
    fn gnuplot_grid_rows_are_separated() {
        let d = build_domain(&DomainSpec::full_grid(1.0, 17)).unwrap();
        let f = Field::from_radial_fn(d, |s| s - 1.0).unwrap();
        let dat = field_dat(&f);
        assert!(dat.starts_with("# x y value\n"));
        assert!(dat.contains("\n\n"));
        assert!(!field_csv(&f).contains("\n\n"));
    }
}
