//! Text persistence. Floats are written with 17 significant digits so that
//! a curve survives a write/read round trip bit for bit and repeated runs
//! produce identical files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geodesic::DiscreteCurve;
use crate::metric::HalfPlanePoint;
use crate::{Error, Result};

/// Fixed 17-significant-digit scientific notation.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Serialize, Deserialize)]
struct CurveRow {
    m: usize,
    r: f64,
    z: f64,
}

/// CSV with header `m,r,z`, one row per point in curve order.
pub fn curve_to_csv(curve: &DiscreteCurve) -> String {
    let mut out = String::from("m,r,z\n");
    for (m, q) in curve.points().iter().enumerate() {
        out.push_str(&format!("{m},{},{}\n", fmt17(q.r), fmt17(q.z)));
    }
    out
}

/// Parses [`curve_to_csv`] output. Rows must be numbered `0, 1, ...` in order.
pub fn curve_from_csv(text: &str) -> Result<DiscreteCurve> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if headers.iter().collect::<Vec<_>>() != ["m", "r", "z"] {
        return Err(Error::Parse(format!(
            "expected header m,r,z, found {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut points = Vec::new();
    for (i, row) in reader.deserialize::<CurveRow>().enumerate() {
        let row = row.map_err(|e| Error::Parse(e.to_string()))?;
        if row.m != i {
            return Err(Error::Parse(format!("row {i} is numbered {}", row.m)));
        }
        points.push(HalfPlanePoint::new(row.r, row.z));
    }
    DiscreteCurve::new(points).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_curve(curve: &DiscreteCurve, path: &Path) -> Result<()> {
    fs::write(path, curve_to_csv(curve))?;
    Ok(())
}

pub fn read_curve(path: &Path) -> Result<DiscreteCurve> {
    curve_from_csv(&fs::read_to_string(path)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}
