use std::fmt::Write as _;
use std::path::Path;

use serde_json::json;
use spamqpt::sim::{simulate, Aggregate, Summary, SweepResult};

use crate::config::{Format, RunConfig};
use crate::counts::{counts_csv, table_rows};
use crate::design_file::design_json;
use crate::error::{CliError, CliResult};
use crate::meta::{create_dir, csv_with_header, json_with_meta, write_file, Provenance};

/// Columns of `aggregates.csv`.
pub const AGGREGATE_COLUMNS: [&str; 22] = [
    "grid_index",
    "noise_param",
    "total_spam",
    "estimator",
    "n_failed",
    "fidelity_error_entanglement_mean",
    "fidelity_error_entanglement_sd",
    "fidelity_error_entanglement_n",
    "fidelity_error_average_mean",
    "fidelity_error_average_sd",
    "fidelity_error_average_n",
    "abs_fidelity_error_entanglement_mean",
    "abs_fidelity_error_entanglement_sd",
    "abs_fidelity_error_entanglement_n",
    "abs_fidelity_error_average_mean",
    "abs_fidelity_error_average_sd",
    "abs_fidelity_error_average_n",
    "eigen_delta_mean",
    "eigen_delta_sd",
    "eigen_delta_n",
    "consistency_pass_rate",
    "cp_violation_rate",
];

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        x.to_string()
    }
}

fn opt_f64(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn summary_cells(s: &Summary) -> [String; 3] {
    [fmt_f64(s.mean), fmt_f64(s.sd), s.n.to_string()]
}

fn aggregates_csv(prov: &Provenance, result: &SweepResult) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(prov.header().into_bytes());
    let err = |e: csv::Error| CliError::Usage(format!("cannot write CSV: {e}"));
    w.write_record(AGGREGATE_COLUMNS).map_err(err)?;
    for a in &result.aggregates {
        let cp = cp_violation_rate(result, a);
        let mut row = vec![
            a.grid_index.to_string(),
            fmt_f64(a.noise_param),
            opt_f64(a.total_spam),
            a.estimator.clone(),
            a.n_failed.to_string(),
        ];
        for s in [
            &a.fidelity_error_entanglement,
            &a.fidelity_error_average,
            &a.abs_fidelity_error_entanglement,
            &a.abs_fidelity_error_average,
            &a.eigen_delta,
        ] {
            row.extend(summary_cells(s));
        }
        row.push(opt_f64(a.consistency_pass_rate));
        row.push(opt_f64(cp));
        w.write_record(&row).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Fraction of successful estimates with a negative Choi eigenvalue.
fn cp_violation_rate(result: &SweepResult, a: &Aggregate) -> Option<f64> {
    let slacks: Vec<f64> = result
        .records
        .iter()
        .filter(|r| r.grid_index == a.grid_index && r.estimator == a.estimator)
        .map(|r| r.cp_slack)
        .filter(|s| s.is_finite())
        .collect();
    (!slacks.is_empty()).then(|| {
        slacks
            .iter()
            .filter(|&&s| s < -spamqpt::tomo::DIAGNOSTIC_TOL)
            .count() as f64
            / slacks.len() as f64
    })
}

/// Whitespace columns: noise_param, then mean and sigma per estimator.
fn plot_file(
    prov: &Provenance,
    result: &SweepResult,
    labels: &[String],
    metric: &str,
    pick: impl Fn(&Aggregate) -> Summary,
) -> String {
    let mut out = prov.header();
    writeln!(out, "# metric: {metric}").unwrap();
    let mut cols = vec!["noise_param".to_string()];
    for l in labels {
        cols.push(format!("{l}_mean"));
        cols.push(format!("{l}_sigma"));
    }
    writeln!(out, "# {}", cols.join(" ")).unwrap();
    let n_grid = result
        .aggregates
        .iter()
        .map(|a| a.grid_index + 1)
        .max()
        .unwrap_or(0);
    for g in 0..n_grid {
        let at_g: Vec<&Aggregate> = result
            .aggregates
            .iter()
            .filter(|a| a.grid_index == g)
            .collect();
        let mut line = vec![fmt_f64(at_g[0].noise_param)];
        for l in labels {
            let a = at_g
                .iter()
                .find(|a| &a.estimator == l)
                .expect("every estimator at every grid point");
            let s = pick(a);
            line.push(fmt_f64(s.mean));
            line.push(fmt_f64(s.sd));
        }
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}

fn warnings(prov: &Provenance, result: &SweepResult) -> String {
    let mut out = prov.header();
    for r in &result.records {
        if let Some(e) = &r.error {
            writeln!(
                out,
                "grid {} (noise {}) run {} seed {} estimator {}: {e}",
                r.grid_index, r.noise_param, r.run_index, r.seed, r.estimator
            )
            .unwrap();
        }
    }
    out
}

/// Runs the sweep and writes every output file into `out`.
pub fn run(config: &RunConfig, out: &Path, dump_counts: bool) -> CliResult<SweepResult> {
    config.validate()?;
    if dump_counts && config.sweep.design.shots == spamqpt::sim::Shots::Exact {
        return Err(CliError::Usage(
            "--dump-counts needs a finite number of shots".into(),
        ));
    }
    let prov = Provenance::of(config, Some(config.sweep.base_seed))?;
    let result = spamqpt::sim::sweep(&config.sweep).map_err(|e| CliError::core("sweep", e))?;
    create_dir(out)?;

    let labels: Vec<String> = config.sweep.estimators.iter().map(|e| e.label()).collect();
    write_file(
        &out.join("config.resolved.json"),
        &json_with_meta(&prov, json!({ "config": config })),
    )?;
    if config.formats.contains(&Format::Csv) {
        write_file(
            &out.join("records.csv"),
            &csv_with_header(&prov, &result.records)?,
        )?;
        write_file(
            &out.join("aggregates.csv"),
            &aggregates_csv(&prov, &result)?,
        )?;
    }
    if config.formats.contains(&Format::Json) {
        write_file(
            &out.join("records.json"),
            &json_with_meta(&prov, json!({ "records": result.records })),
        )?;
        write_file(
            &out.join("aggregates.json"),
            &json_with_meta(&prov, json!({ "aggregates": result.aggregates })),
        )?;
    }
    write_file(
        &out.join("plot_fig1.dat"),
        &plot_file(
            &prov,
            &result,
            &labels,
            "fidelity_error_average = F_avg(G_hat) - F_avg(G_true)",
            |a| a.fidelity_error_average,
        ),
    )?;
    write_file(
        &out.join("plot_fig2.dat"),
        &plot_file(
            &prov,
            &result,
            &labels,
            "eigen_delta = mean distance between matched eigenvalues of G_hat and G_true",
            |a| a.eigen_delta,
        ),
    )?;
    write_file(&out.join("warnings.txt"), &warnings(&prov, &result))?;

    if dump_counts {
        dump(config, &prov, out)?;
    }
    Ok(result)
}

/// Writes the design and the counts of every replication, re-simulated from
/// the same seeds as the sweep.
fn dump(config: &RunConfig, prov: &Provenance, out: &Path) -> CliResult<()> {
    let s = &config.sweep;
    write_file(&out.join("design.json"), &design_json(prov, &s.design)?)?;
    let dir = out.join("counts");
    create_dir(&dir)?;
    let header = prov.header();
    for (g, &x) in s.grid.iter().enumerate() {
        let noise = s.kind.noise_at(x, s.gate_gamma);
        for r in 0..s.n_runs {
            let seed = s.base_seed.wrapping_add(r as u64);
            let data =
                simulate(&s.design, &noise, seed).map_err(|e| CliError::core("simulate", e))?;
            let stem = format!("g{g:02}_r{r:03}");
            if let Some(cal) = &data.calibration {
                let rows = table_rows(&s.design, cal)?;
                write_file(
                    &dir.join(format!("{stem}_calibration.csv")),
                    &counts_csv(&header, &rows)?,
                )?;
            }
            let rows = table_rows(&s.design, &data.gate)?;
            write_file(
                &dir.join(format!("{stem}_gate.csv")),
                &counts_csv(&header, &rows)?,
            )?;
        }
    }
    Ok(())
}
