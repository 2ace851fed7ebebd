use std::path::{Path, PathBuf};

use clap::ValueEnum;
use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use spamqpt::hs::{fidelity_against, Superoperator};
use spamqpt::sim::{target_gate, EstimatorSpec};
use spamqpt::tomo::{spam_consistency_check, DataSet, Estimate};

use crate::config::default_estimators;
use crate::counts::{prob_matrix, read_counts};
use crate::design_file::{basis_json, read_design, rows};
use crate::error::{CliError, CliResult};
use crate::meta::{json_with_meta, read_file, Provenance};

/// Ideal gate used for the fidelity diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// `exp(-i pi X / 4)`.
    X90,
    Identity,
}

impl Target {
    pub fn superoperator(self) -> Superoperator {
        match self {
            Target::X90 => target_gate(),
            Target::Identity => Superoperator::identity(2),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateOptions {
    pub design: PathBuf,
    pub gate_counts: PathBuf,
    pub calibration_counts: Option<PathBuf>,
    pub gauge_p: Vec<f64>,
    pub truncate_p: bool,
    pub target: Option<Target>,
}

pub struct EstimateOutput {
    pub json: String,
    pub warnings: Vec<String>,
}

fn file_hash(path: &Path) -> CliResult<String> {
    let digest = Sha256::digest(read_file(path)?.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

fn opt_rows(m: Option<&DMatrix<f64>>) -> Value {
    m.map_or(Value::Null, |m| json!(rows(m)))
}

pub fn estimate_json(
    spec: &EstimatorSpec,
    est: &Estimate,
    target: Option<&Superoperator>,
) -> Value {
    let d = &est.diagnostics;
    json!({
        "estimator": spec.label(),
        "kind": est.kind,
        "gauge_p": est.gauge_p,
        "g_hat": rows(est.g_hat.matrix()),
        "g0_hat": rows(est.g0_hat.matrix()),
        "e_hat": opt_rows(est.e_hat.as_ref().map(|e| e.matrix())),
        "m_hat": opt_rows(est.m_hat.as_ref()),
        "s_hat": opt_rows(est.s_hat.as_ref()),
        "diagnostics": {
            "cp_slack": d.cptp.cp_slack,
            "tp_slack": d.cptp.tp_slack,
            "is_cp": d.cptp.is_cp,
            "is_tp": d.cptp.is_tp,
            "spectrum": d.spectrum.values.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "frame_deviation": d.frame_deviation,
        },
        "fidelity": target.map(|t| fidelity_against(&est.g_hat, t)),
    })
}

pub fn run(opts: &EstimateOptions) -> CliResult<EstimateOutput> {
    for &p in &opts.gauge_p {
        if !(0.0..=1.0).contains(&p) {
            return Err(CliError::Usage(format!("gauge p = {p} is outside [0, 1]")));
        }
    }
    let (design, frame) = read_design(&opts.design)?;
    let p_hat = prob_matrix(&design, &read_counts(&opts.gate_counts)?)?;
    let i_hat = opts
        .calibration_counts
        .as_deref()
        .map(|path| read_counts(path).and_then(|r| prob_matrix(&design, &r)))
        .transpose()?;

    let mut warnings = Vec::new();
    let mut specs = default_estimators(&design, &opts.gauge_p, opts.truncate_p);
    if i_hat.is_none() {
        warnings.push(
            "no calibration counts given: SPAM correction skipped, only the uncorrected estimate is reported"
                .to_string(),
        );
        specs.retain(|s| !s.needs_calibration());
    }
    let consistency = i_hat
        .as_ref()
        .map(|i| spam_consistency_check(&frame, i))
        .transpose()
        .map_err(|e| CliError::core("consistency check", e))?;
    if consistency.as_ref().is_some_and(|c| !c.passed) {
        warnings.push(
            "calibration data are inconsistent with the nominal frame: the uncorrected estimate is biased by SPAM"
                .to_string(),
        );
    }

    let data = DataSet::new(i_hat, p_hat).map_err(|e| CliError::core("data", e))?;
    let target = opts.target.map(Target::superoperator);
    let mut estimates = Vec::new();
    for spec in &specs {
        let est = spec
            .run(&frame, &data)
            .map_err(|e| CliError::core(format!("estimator {}", spec.label()), e))?;
        estimates.push(estimate_json(spec, &est, target.as_ref()));
    }

    let mut inputs = json!({
        "design": file_hash(&opts.design)?,
        "gate_counts": file_hash(&opts.gate_counts)?,
    });
    if let Some(c) = &opts.calibration_counts {
        inputs["calibration_counts"] = json!(file_hash(c)?);
    }
    let resolved = json!({ "options": opts, "inputs": inputs });
    let prov = Provenance::of(&resolved, None)?;
    let json = json_with_meta(
        &prov,
        json!({
            "options": resolved,
            "basis": basis_json(),
            "consistency": consistency,
            "warnings": warnings,
            "estimates": estimates,
        }),
    );
    Ok(EstimateOutput { json, warnings })
}
