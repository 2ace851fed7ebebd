use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use spamqpt::hs::{Outcome, PauliAxis, PauliState};
use spamqpt::sim::{ExperimentDesign, OutcomeTable, Shots};
use spamqpt::tomo::ProbMatrix;

use crate::error::{CliError, CliResult};
use crate::meta::read_file;

/// One row of a counts file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRow {
    pub prep_label: String,
    pub basis_label: String,
    pub outcome_label: String,
    pub counts: u64,
    pub shots: u64,
}

type Key = (PauliState, PauliAxis, Outcome);

/// Both outcomes of every `(prep, basis)` circuit of a sampled table.
pub fn table_rows(design: &ExperimentDesign, table: &OutcomeTable) -> CliResult<Vec<CountRow>> {
    let (Some(counts), Shots::Finite(n)) = (&table.counts, table.shots) else {
        return Err(CliError::Usage(
            "counts can only be written for a finite number of shots".into(),
        ));
    };
    let mut rows = Vec::new();
    for (j, prep) in design.preps.iter().enumerate() {
        for (b, axis) in design.bases.iter().enumerate() {
            let plus = counts[(b, j)];
            for (outcome, k) in [(Outcome::Plus, plus), (Outcome::Minus, n - plus)] {
                rows.push(CountRow {
                    prep_label: prep.label().into(),
                    basis_label: axis.label().into(),
                    outcome_label: outcome.label().into(),
                    counts: k,
                    shots: n,
                });
            }
        }
    }
    Ok(rows)
}

/// Reads a counts CSV; lines starting with `#` are comments.
pub fn read_counts(path: &Path) -> CliResult<Vec<CountRow>> {
    let text = read_file(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let bad =
        |e: csv::Error| CliError::Usage(format!("{}: malformed counts file: {e}", path.display()));
    let headers = reader.headers().map_err(bad)?.clone();
    for col in [
        "prep_label",
        "basis_label",
        "outcome_label",
        "counts",
        "shots",
    ] {
        if !headers.iter().any(|h| h == col) {
            return Err(CliError::Usage(format!(
                "{}: malformed counts file: missing column {col}",
                path.display()
            )));
        }
    }
    reader.deserialize().map(|r| r.map_err(bad)).collect()
}

fn parse_key(row: &CountRow) -> CliResult<Key> {
    let bad = |what: &str, v: &str| CliError::Usage(format!("unknown {what} label {v:?}"));
    Ok((
        row.prep_label
            .parse()
            .map_err(|_| bad("preparation", &row.prep_label))?,
        row.basis_label
            .parse()
            .map_err(|_| bad("basis", &row.basis_label))?,
        row.outcome_label
            .parse()
            .map_err(|_| bad("outcome", &row.outcome_label))?,
    ))
}

/// Tracked-effect by preparation count matrix of `design`. A missing outcome
/// is filled from its complement in the same circuit.
pub fn prob_matrix(design: &ExperimentDesign, rows: &[CountRow]) -> CliResult<ProbMatrix> {
    let mut cells: BTreeMap<Key, (u64, u64)> = BTreeMap::new();
    for row in rows {
        let key = parse_key(row)?;
        if row.counts > row.shots {
            return Err(CliError::Usage(format!(
                "counts {} exceed shots {} for {} / {} / {}",
                row.counts, row.shots, row.prep_label, row.basis_label, row.outcome_label
            )));
        }
        if !design.preps.contains(&key.0) || !design.bases.contains(&key.1) {
            return Err(CliError::ShapeMismatch(format!(
                "counts for preparation {} in basis {} are not part of the design",
                row.prep_label, row.basis_label
            )));
        }
        if cells.insert(key, (row.counts, row.shots)).is_some() {
            return Err(CliError::Usage(format!(
                "duplicate counts row for {} / {} / {}",
                row.prep_label, row.basis_label, row.outcome_label
            )));
        }
    }
    for (&(prep, axis, outcome), &(k, n)) in &cells {
        let other = outcome.flipped();
        if let Some(&(k2, n2)) = cells.get(&(prep, axis, other)) {
            if n2 != n || k + k2 != n {
                return Err(CliError::Usage(format!(
                    "outcomes of preparation {prep} in basis {axis} do not add up to the shot count"
                )));
            }
        }
    }

    let shape = (design.tracked_effects.len(), design.preps.len());
    let mut counts = DMatrix::zeros(shape.0, shape.1);
    let mut shots = DMatrix::zeros(shape.0, shape.1);
    for (i, effect) in design.tracked_effects.iter().enumerate() {
        let (axis, outcome) = (effect.axis(), effect.outcome());
        for (j, &prep) in design.preps.iter().enumerate() {
            let (k, n) = match (
                cells.get(&(prep, axis, outcome)),
                cells.get(&(prep, axis, outcome.flipped())),
            ) {
                (Some(&c), _) => c,
                (None, Some(&(k, n))) => (n - k, n),
                (None, None) => {
                    return Err(CliError::ShapeMismatch(format!(
                        "no counts for preparation {prep} in basis {axis}: the design has {} \
                         preparations and {} bases",
                        design.preps.len(),
                        design.bases.len()
                    )))
                }
            };
            counts[(i, j)] = k;
            shots[(i, j)] = n;
        }
    }
    ProbMatrix::from_counts(&counts, shots).map_err(|e| CliError::core("counts", e))
}

/// CSV text of `rows`, after `header`.
pub fn counts_csv(header: &str, rows: &[CountRow]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(header.as_bytes().to_vec());
    for r in rows {
        w.serialize(r)
            .map_err(|e| CliError::Usage(format!("cannot write counts: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Usage(format!("cannot write counts: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use spamqpt::sim::{simulate, NoiseModel};

    fn sampled() -> (ExperimentDesign, OutcomeTable) {
        let design = ExperimentDesign::square(Shots::Finite(1000));
        let data = simulate(&design, &NoiseModel::depolarizing(0.98, 0.99), 5).unwrap();
        (design, data.gate)
    }

    #[test]
    fn rows_round_trip_to_the_in_memory_matrix() {
        let (design, table) = sampled();
        let rows = table_rows(&design, &table).unwrap();
        assert_eq!(rows.len(), 2 * 3 * 4);
        let direct = table.prob_matrix(&design).unwrap();
        assert_eq!(prob_matrix(&design, &rows).unwrap(), direct);
    }

    #[test]
    fn missing_outcome_is_taken_from_its_complement() {
        let (design, table) = sampled();
        let rows = table_rows(&design, &table).unwrap();
        let plus_only: Vec<CountRow> = rows
            .iter()
            .filter(|r| r.outcome_label == "+")
            .cloned()
            .collect();
        assert_eq!(
            prob_matrix(&design, &plus_only).unwrap(),
            prob_matrix(&design, &rows).unwrap()
        );
    }

    #[test]
    fn inconsistent_outcomes_are_rejected() {
        let (design, table) = sampled();
        let mut rows = table_rows(&design, &table).unwrap();
        rows[0].counts = rows[0].counts.saturating_sub(1).max(1) - 1;
        if rows[0].counts + rows[1].counts == rows[0].shots {
            rows[0].counts += 2;
        }
        assert!(matches!(
            prob_matrix(&design, &rows),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn missing_preparation_is_a_shape_mismatch() {
        let (_, table) = sampled();
        let square = ExperimentDesign::square(Shots::Finite(1000));
        let rows = table_rows(&square, &table).unwrap();
        let six = ExperimentDesign::overcomplete(Shots::Finite(1000));
        assert!(matches!(
            prob_matrix(&six, &rows),
            Err(CliError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn foreign_preparation_is_a_shape_mismatch() {
        let (design, table) = sampled();
        let mut rows = table_rows(&design, &table).unwrap();
        rows[0].prep_label = "-z".into();
        rows[1].prep_label = "-z".into();
        assert!(matches!(
            prob_matrix(&design, &rows),
            Err(CliError::ShapeMismatch(_))
        ));
    }
}
