//! CSV and JSON file formats.

use num_complex::Complex64;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

use crate::direct::ScatteringSamples;
use crate::error::{Error, Result};
use crate::numerics::SymmetricKGrid;
use crate::phase::ReconstructionResult;

pub const SCATTERING_HEADER: [&str; 3] = ["k", "re_S", "im_S"];
pub const RECONSTRUCTION_HEADER: [&str; 6] = ["x", "u", "p", "re_v", "im_v", "phi"];

/// The JSON file written next to a CSV: same stem, `.json` extension.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}

pub fn parse_scattering_csv(text: &str) -> Result<ScatteringSamples> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_error)?.clone();
    if header.iter().ne(SCATTERING_HEADER) {
        return Err(Error::Parse(format!(
            "expected header {:?}, found {:?}",
            SCATTERING_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut ks = Vec::new();
    let mut values = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let field = |i: usize| -> Result<f64> {
            let s = record.get(i).unwrap_or_default();
            let v: f64 = s.parse().map_err(|_| Error::Parse(format!("row {}: cannot parse {s:?}", line + 1)))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse(format!("row {}: non-finite value {s:?}", line + 1)))
            }
        };
        ks.push(field(0)?);
        values.push(Complex64::new(field(1)?, field(2)?));
    }
    if ks.is_empty() {
        return Err(Error::Parse("scattering file has no data rows".into()));
    }
    let grid = SymmetricKGrid::from_nodes(ks).map_err(|e| Error::Parse(e.to_string()))?;
    ScatteringSamples::new(grid, values).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_scattering_csv(path: &Path) -> Result<ScatteringSamples> {
    parse_scattering_csv(&fs::read_to_string(path)?)
}

pub fn write_scattering_csv(path: &Path, s: &ScatteringSamples) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(SCATTERING_HEADER).map_err(csv_error)?;
    for (&k, z) in s.k_grid().nodes().iter().zip(s.values()) {
        w.write_record([k.to_string(), z.re.to_string(), z.im.to_string()]).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_reconstruction_csv(path: &Path, r: &ReconstructionResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(RECONSTRUCTION_HEADER).map_err(csv_error)?;
    let rows = r.v.grid().nodes().zip(r.u.values()).zip(r.p.values()).zip(r.v.values()).zip(r.phase.phi.values());
    for ((((x, u), p), v), phi) in rows {
        w.write_record([x, *u, *p, v.re, v.im, *phi].map(|f| f.to_string())).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}
