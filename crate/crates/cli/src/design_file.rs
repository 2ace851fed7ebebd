use std::path::Path;

use nalgebra::DMatrix;
use serde_json::{json, Value};
use spamqpt::sim::ExperimentDesign;
use spamqpt::tomo::Frame;

use crate::error::{CliError, CliResult};
use crate::meta::{json_with_meta, read_file, Provenance};

/// Basis order of every transfer matrix and frame written by the tool.
pub const BASIS_ORDER: [&str; 4] = ["I/sqrt(2)", "X/sqrt(2)", "Y/sqrt(2)", "Z/sqrt(2)"];

const FRAME_TOL: f64 = 1e-12;

pub fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn from_rows(rows: &[Vec<f64>]) -> Option<DMatrix<f64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return None;
    }
    Some(DMatrix::from_row_iterator(
        rows.len(),
        ncols,
        rows.iter().flatten().copied(),
    ))
}

pub fn basis_json() -> Value {
    json!({
        "name": "normalized Pauli",
        "order": BASIS_ORDER,
        "convention": "states are columns, effects are rows, transfer matrices act on columns",
    })
}

pub fn frame_json(frame: &Frame) -> Value {
    json!({
        "basis": basis_json(),
        "dim": frame.dim(),
        "effect_labels": frame.effect_labels(),
        "state_labels": frame.state_labels(),
        "m0": rows(frame.m0()),
        "s0": rows(frame.s0()),
    })
}

/// Design file text: the design plus the frame it implies.
pub fn design_json(prov: &Provenance, design: &ExperimentDesign) -> CliResult<String> {
    let frame = design
        .frame()
        .map_err(|e| CliError::core("design frame", e))?;
    Ok(json_with_meta(
        prov,
        json!({ "design": design, "frame": frame_json(&frame) }),
    ))
}

/// Reads a design file. A bare design object is accepted too. A stored
/// frame must agree with the one the design implies.
pub fn read_design(path: &Path) -> CliResult<(ExperimentDesign, Frame)> {
    let bad = |msg: String| CliError::Usage(format!("{}: {msg}", path.display()));
    let value: Value =
        serde_json::from_str(&read_file(path)?).map_err(|e| bad(format!("invalid JSON: {e}")))?;
    let design_value = value
        .get("design")
        .cloned()
        .unwrap_or_else(|| value.clone());
    let design: ExperimentDesign =
        serde_json::from_value(design_value).map_err(|e| bad(format!("invalid design: {e}")))?;
    design
        .validate()
        .map_err(|e| CliError::core(path.display().to_string(), e))?;
    let frame = design
        .frame()
        .map_err(|e| CliError::core(format!("{}: design frame", path.display()), e))?;

    if let Some(stored) = value.get("frame") {
        let matrix = |key: &str| -> CliResult<DMatrix<f64>> {
            let r: Vec<Vec<f64>> =
                serde_json::from_value(stored.get(key).cloned().unwrap_or(Value::Null))
                    .map_err(|e| bad(format!("frame.{key}: {e}")))?;
            from_rows(&r).ok_or_else(|| bad(format!("frame.{key} is ragged")))
        };
        for (key, expected) in [("m0", frame.m0()), ("s0", frame.s0())] {
            let m = matrix(key)?;
            if m.shape() != expected.shape() || (&m - expected).amax() > FRAME_TOL {
                return Err(bad(format!(
                    "frame.{key} does not match the frame implied by the design"
                )));
            }
        }
    }
    Ok((design, frame))
}
