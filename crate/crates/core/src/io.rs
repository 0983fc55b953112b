//! CSV point clouds and JSON/CSV reports.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::PointCloud;

/// Reads one point per row. `header` skips the first line.
pub fn read_cloud_csv(path: impl AsRef<Path>, header: bool) -> Result<PointCloud> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_cloud_csv(file, header).map_err(|e| match e {
        Error::EmptyFile { .. } => Error::EmptyFile { path: path.to_path_buf() },
        other => other,
    })
}

/// Parses a cloud from any reader. Row numbers in errors are 1-based line numbers.
pub fn parse_cloud_csv(reader: impl Read, header: bool) -> Result<PointCloud> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(header).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let mut data = Vec::new();
    let mut d = None;
    for record in rdr.records() {
        let record = record?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match d {
            None => d = Some(record.len()),
            Some(expected) if expected != record.len() => {
                return Err(Error::RaggedRow { row, expected, found: record.len() });
            }
            _ => {}
        }
        for (col, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::NonNumeric { row, col: col + 1, cell: cell.to_string() })?;
            if !v.is_finite() {
                return Err(Error::NonNumeric { row, col: col + 1, cell: cell.to_string() });
            }
            data.push(v);
        }
    }
    match d {
        None => Err(Error::EmptyFile { path: "<input>".into() }),
        Some(d) => PointCloud::from_flat(data, d),
    }
}

/// Writes one point per row using shortest round-trip formatting.
pub fn write_cloud_csv(path: impl AsRef<Path>, cloud: &PointCloud, header: bool) -> Result<()> {
    let columns: Vec<String> = (1..=cloud.dim()).map(|j| format!("x{j}")).collect();
    let rows = cloud.points().map(|p| p.to_vec());
    write_table_csv(path, header.then_some(columns.as_slice()), rows)
}

/// Writes a numeric table. Values are formatted with Rust's shortest
/// round-trip representation, which is lossless.
pub fn write_table_csv<I>(path: impl AsRef<Path>, header: Option<&[String]>, rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut emit = |line: String| writeln!(w, "{line}").map_err(|e| Error::io(path, e));
    if let Some(h) = header {
        emit(h.join(","))?;
    }
    for row in rows {
        emit(row.iter().map(|v| format_f64(*v)).collect::<Vec<_>>().join(","))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Pretty JSON with a trailing newline.
pub fn write_report<T: Serialize + ?Sized>(path: impl AsRef<Path>, report: &T) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
