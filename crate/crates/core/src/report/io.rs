//! Grid functions as JSON or CSV of `(point, re, im)`; coefficients as JSON
//! of `{j, m, re, im}`.

use std::path::Path;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use super::json::{format_f64, to_canonical_string};
use super::PipelineError;
use crate::{CoefficientArray, GridFunction, Transform};

/// Sample points read back must match the grid this closely.
const POINT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSample {
    pub point: Vec<f64>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub j: usize,
    pub m: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridFormat {
    Json,
    Csv,
}

impl GridFormat {
    /// CSV for `.csv` files, JSON otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => GridFormat::Csv,
            _ => GridFormat::Json,
        }
    }
}

/// Samples of `f` in original coordinates of the normalized problem, one per
/// point of `Ω`, in transform order.
pub fn grid_samples(t: &Transform, f: &GridFunction) -> Vec<GridSample> {
    f.values
        .iter()
        .enumerate()
        .map(|(i, v)| GridSample { point: t.omega_point(i), re: v.re, im: v.im })
        .collect()
}

pub fn grid_function_to_string(t: &Transform, f: &GridFunction, format: GridFormat) -> String {
    let samples = grid_samples(t, f);
    match format {
        GridFormat::Json => to_canonical_string(&samples).expect("samples serialize"),
        GridFormat::Csv => {
            let dim = samples.first().map_or(0, |s| s.point.len());
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header: Vec<String> = (0..dim).map(|a| format!("x{a}")).collect();
            header.extend(["re".to_string(), "im".to_string()]);
            w.write_record(&header).expect("in-memory write");
            for s in &samples {
                let mut row: Vec<String> = s.point.iter().map(|&x| format_f64(x)).collect();
                row.push(format_f64(s.re));
                row.push(format_f64(s.im));
                w.write_record(&row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8")
        }
    }
}

pub fn grid_function_from_str(t: &Transform, text: &str, format: GridFormat) -> Result<GridFunction, String> {
    let samples: Vec<GridSample> = match format {
        GridFormat::Json => serde_json::from_str(text).map_err(|e| e.to_string())?,
        GridFormat::Csv => {
            let mut r = csv::Reader::from_reader(text.as_bytes());
            let mut out = Vec::new();
            for (line, rec) in r.records().enumerate() {
                let rec = rec.map_err(|e| e.to_string())?;
                let nums = rec
                    .iter()
                    .map(|s| s.trim().parse::<f64>().map_err(|e| format!("row {line}: {e}")))
                    .collect::<Result<Vec<f64>, String>>()?;
                if nums.len() < 3 {
                    return Err(format!("row {line}: expected point coordinates, re and im"));
                }
                let (point, tail) = nums.split_at(nums.len() - 2);
                out.push(GridSample { point: point.to_vec(), re: tail[0], im: tail[1] });
            }
            out
        }
    };
    if samples.len() != t.omega_len() {
        return Err(format!("expected {} samples, found {}", t.omega_len(), samples.len()));
    }
    let mut values = Vec::with_capacity(samples.len());
    for (i, s) in samples.iter().enumerate() {
        let expected = t.omega_point(i);
        let off = expected.len() != s.point.len()
            || expected.iter().zip(&s.point).any(|(a, b)| (a - b).abs() > POINT_TOLERANCE);
        if off {
            return Err(format!("sample {i} is at {:?}, expected {:?}", s.point, expected));
        }
        if !(s.re.is_finite() && s.im.is_finite()) {
            return Err(format!("sample {i} is not finite"));
        }
        values.push(Complex::new(s.re, s.im));
    }
    Ok(GridFunction::new(values))
}

pub fn write_grid_function(t: &Transform, f: &GridFunction, path: &Path) -> Result<(), PipelineError> {
    let text = grid_function_to_string(t, f, GridFormat::from_path(path));
    std::fs::write(path, text).map_err(|e| PipelineError::io(path, e))
}

pub fn read_grid_function(t: &Transform, path: &Path) -> Result<GridFunction, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
    grid_function_from_str(t, &text, GridFormat::from_path(path)).map_err(|e| PipelineError::io(path, e))
}

pub fn coefficient_records(c: &CoefficientArray) -> Vec<CoefficientRecord> {
    c.values
        .iter()
        .enumerate()
        .map(|(i, v)| CoefficientRecord { j: i / c.per_piece(), m: c.frequency(i), re: v.re, im: v.im })
        .collect()
}

pub fn coefficients_to_json(c: &CoefficientArray) -> String {
    to_canonical_string(&coefficient_records(c)).expect("records serialize")
}
