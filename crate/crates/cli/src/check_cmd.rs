use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use spamqpt::tomo::{
    spam_consistency_check, ConsistencyReport, OUTLIER_FRACTION, Z_FAIL, Z_OUTLIER,
};

use crate::counts::{prob_matrix, read_counts};
use crate::design_file::read_design;
use crate::error::{CliError, CliResult};
use crate::meta::{json_with_meta, Provenance};

#[derive(Debug, Clone, Serialize)]
pub struct CheckOptions {
    pub design: PathBuf,
    pub calibration_counts: PathBuf,
}

pub fn run(opts: &CheckOptions) -> CliResult<(ConsistencyReport, String)> {
    let (design, frame) = read_design(&opts.design)?;
    let i_hat = prob_matrix(&design, &read_counts(&opts.calibration_counts)?)?;
    let report = spam_consistency_check(&frame, &i_hat)
        .map_err(|e| CliError::core("consistency check", e))?;
    let prov = Provenance::of(opts, None)?;
    let json = json_with_meta(
        &prov,
        json!({
            "options": opts,
            "thresholds": { "z_fail": Z_FAIL, "z_outlier": Z_OUTLIER, "outlier_fraction": OUTLIER_FRACTION },
            "report": report,
        }),
    );
    Ok((report, json))
}

pub fn summary(report: &ConsistencyReport, calibration: &Path) -> String {
    format!(
        "{}: max |z| = {:.3}, {} of {} entries with |z| > {Z_OUTLIER}: {}",
        calibration.display(),
        report.max_abs_z,
        report.n_over_3,
        report.n_entries,
        if report.passed { "PASS" } else { "FAIL" }
    )
}
