use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::design::ExperimentDesign;
use super::noise::{target_gate, true_frames, NoiseModel, DEFAULT_GATE_GAMMA};
use super::sampling::{exact_prob_matrices, sample_dataset, SampledData};
use crate::hs::fidelity_against;
use crate::linalg::{eigen_delta, eigenvalues};
use crate::tomo::{
    ols_qpt, overcomplete_spam_corrected_qpt, spam_consistency_check, spam_corrected_qpt,
    standard_qpt, DataSet, Estimate, Frame, OvercompleteOptions,
};
use crate::{Error, Result};

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimatorSpec {
    Standard,
    Corrected {
        p: f64,
    },
    Ols,
    Overcomplete {
        p: f64,
        #[serde(default = "yes")]
        truncate_p: bool,
    },
}

impl EstimatorSpec {
    /// Stable name used in tables and plot headers.
    pub fn label(&self) -> String {
        match self {
            EstimatorSpec::Standard => "standard".into(),
            EstimatorSpec::Corrected { p } => format!("corrected_p={p}"),
            EstimatorSpec::Ols => "ols".into(),
            EstimatorSpec::Overcomplete {
                p,
                truncate_p: true,
            } => format!("overcomplete_p={p}"),
            EstimatorSpec::Overcomplete {
                p,
                truncate_p: false,
            } => {
                format!("overcomplete_p={p}_untruncated")
            }
        }
    }

    pub fn needs_calibration(&self) -> bool {
        matches!(
            self,
            EstimatorSpec::Corrected { .. } | EstimatorSpec::Overcomplete { .. }
        )
    }

    pub fn run(&self, frame: &Frame, data: &DataSet) -> Result<Estimate> {
        let calibration = || {
            data.i_hat
                .as_ref()
                .ok_or_else(|| Error::InvalidData("estimator needs calibration data".into()))
        };
        match *self {
            EstimatorSpec::Standard => standard_qpt(frame, &data.p_hat),
            EstimatorSpec::Corrected { p } => {
                spam_corrected_qpt(frame, calibration()?, &data.p_hat, p)
            }
            EstimatorSpec::Ols => ols_qpt(frame, &data.p_hat),
            EstimatorSpec::Overcomplete { p, truncate_p } => overcomplete_spam_corrected_qpt(
                frame,
                calibration()?,
                &data.p_hat,
                OvercompleteOptions {
                    truncate_p,
                    gauge_p: p,
                },
            ),
        }
    }
}

/// Accuracy of one estimator on one simulated dataset. Failed estimators
/// carry NaN metrics and the error message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorOutcome {
    pub estimator: String,
    /// `F_e(G_hat) - F_e(G_true)` against the ideal gate.
    pub fidelity_error_entanglement: f64,
    /// `F_avg(G_hat) - F_avg(G_true)`.
    pub fidelity_error_average: f64,
    pub eigen_delta: f64,
    pub cp_slack: f64,
    pub tp_slack: f64,
    pub error: Option<String>,
}

impl EstimatorOutcome {
    fn failed(estimator: String, err: &Error) -> Self {
        Self {
            estimator,
            fidelity_error_entanglement: f64::NAN,
            fidelity_error_average: f64::NAN,
            eigen_delta: f64::NAN,
            cp_slack: f64::NAN,
            tp_slack: f64::NAN,
            error: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub seed: u64,
    /// Calibration consistency verdict, when calibration data were taken.
    pub consistency_passed: Option<bool>,
    pub outcomes: Vec<EstimatorOutcome>,
}

/// Samples one experiment under `noise` with the given seed.
pub fn simulate(design: &ExperimentDesign, noise: &NoiseModel, seed: u64) -> Result<SampledData> {
    let truth = true_frames(noise, design)?;
    let (cal, gate) = exact_prob_matrices(&truth, &noise.true_gate()?)?;
    let cal = design.include_calibration.then_some(&cal);
    sample_dataset(cal, &gate, design.shots, seed)
}

/// Runs every estimator on the same sampled dataset.
pub fn run_replication(
    design: &ExperimentDesign,
    noise: &NoiseModel,
    estimators: &[EstimatorSpec],
    seed: u64,
) -> Result<Replication> {
    let frame = design.frame()?;
    let data = simulate(design, noise, seed)?.dataset(design)?;
    let g_true = noise.true_gate()?;
    let target = target_gate();
    let f_true = fidelity_against(&g_true, &target);
    let spec_true = eigenvalues(g_true.matrix())?;

    let consistency_passed = data
        .i_hat
        .as_ref()
        .map(|i| spam_consistency_check(&frame, i).map(|r| r.passed))
        .transpose()?;

    let outcomes = estimators
        .iter()
        .map(|spec| {
            let label = spec.label();
            match spec.run(&frame, &data).and_then(|est| {
                let f = fidelity_against(&est.g_hat, &target);
                Ok(EstimatorOutcome {
                    estimator: label.clone(),
                    fidelity_error_entanglement: f.entanglement - f_true.entanglement,
                    fidelity_error_average: f.average - f_true.average,
                    eigen_delta: eigen_delta(&spec_true, &est.diagnostics.spectrum)?,
                    cp_slack: est.diagnostics.cptp.cp_slack,
                    tp_slack: est.diagnostics.cptp.tp_slack,
                    error: None,
                })
            }) {
                Ok(o) => o,
                Err(e) => EstimatorOutcome::failed(label, &e),
            }
        })
        .collect();
    Ok(Replication {
        seed,
        consistency_passed,
        outcomes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// Grid value is the per-side depolarizing strength `1 - gamma`.
    Depolarizing,
    /// Grid value is the preparation rotation angle `phi`.
    Coherent,
}

impl SweepKind {
    pub fn noise_at(self, x: f64, gate_gamma: f64) -> NoiseModel {
        let mut noise = match self {
            SweepKind::Depolarizing => NoiseModel::depolarizing(1.0 - x, 1.0 - x),
            SweepKind::Coherent => NoiseModel::coherent(x),
        };
        noise.gate_gamma = gate_gamma;
        noise
    }

    /// Depolarizing `0, 0.005, ..., 0.04`; coherent `0, 0.0125, ..., 0.1`.
    pub fn default_grid(self) -> Vec<f64> {
        let step = match self {
            SweepKind::Depolarizing => 0.005,
            SweepKind::Coherent => 0.0125,
        };
        (0..=8).map(|k| k as f64 * step).collect()
    }

    /// Combined preparation plus measurement depolarizing strength.
    pub fn total_spam(self, x: f64) -> Option<f64> {
        match self {
            SweepKind::Depolarizing => Some(2.0 * x),
            SweepKind::Coherent => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub grid: Vec<f64>,
    pub n_runs: usize,
    pub design: ExperimentDesign,
    pub estimators: Vec<EstimatorSpec>,
    pub base_seed: u64,
    #[serde(default = "default_gate_gamma")]
    pub gate_gamma: f64,
}

fn default_gate_gamma() -> f64 {
    DEFAULT_GATE_GAMMA
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::InvalidData("sweep grid is empty".into()));
        }
        if self.n_runs == 0 {
            return Err(Error::InvalidData("n_runs must be at least 1".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidData("no estimators requested".into()));
        }
        self.design.validate()?;
        for &x in &self.grid {
            self.kind.noise_at(x, self.gate_gamma).validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub grid_index: usize,
    pub noise_param: f64,
    pub run_index: usize,
    pub seed: u64,
    pub estimator: String,
    pub fidelity_error_entanglement: f64,
    pub fidelity_error_average: f64,
    pub eigen_delta: f64,
    pub cp_slack: f64,
    pub tp_slack: f64,
    pub consistency_passed: Option<bool>,
    pub error: Option<String>,
}

/// Mean, sample standard deviation and count of the finite values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
        let n = v.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                sd: f64::NAN,
                n,
            };
        }
        let mean = v.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, sd, n }
    }

    /// Standard error of the mean.
    pub fn se(&self) -> f64 {
        self.sd / (self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub grid_index: usize,
    pub noise_param: f64,
    pub total_spam: Option<f64>,
    pub estimator: String,
    pub n_failed: usize,
    pub fidelity_error_entanglement: Summary,
    pub fidelity_error_average: Summary,
    pub abs_fidelity_error_entanglement: Summary,
    pub abs_fidelity_error_average: Summary,
    pub eigen_delta: Summary,
    pub consistency_pass_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
    pub aggregates: Vec<Aggregate>,
}

/// Runs `n_runs` replications at every grid point. Run `r` uses seed
/// `base_seed + r` at every grid point, so neighbouring points share their
/// sampling noise. Records are ordered by grid point, run, then estimator.
pub fn sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = (0..config.grid.len())
        .flat_map(|g| (0..config.n_runs).map(move |r| (g, r)))
        .collect();
    let reps = jobs
        .par_iter()
        .map(|&(g, r)| {
            let noise = config.kind.noise_at(config.grid[g], config.gate_gamma);
            let seed = config.base_seed.wrapping_add(r as u64);
            run_replication(&config.design, &noise, &config.estimators, seed)
        })
        .collect::<Result<Vec<_>>>()?;

    let records: Vec<SweepRecord> = jobs
        .iter()
        .zip(&reps)
        .flat_map(|(&(g, r), rep)| {
            rep.outcomes.iter().map(move |o| SweepRecord {
                grid_index: g,
                noise_param: config.grid[g],
                run_index: r,
                seed: rep.seed,
                estimator: o.estimator.clone(),
                fidelity_error_entanglement: o.fidelity_error_entanglement,
                fidelity_error_average: o.fidelity_error_average,
                eigen_delta: o.eigen_delta,
                cp_slack: o.cp_slack,
                tp_slack: o.tp_slack,
                consistency_passed: rep.consistency_passed,
                error: o.error.clone(),
            })
        })
        .collect();

    let mut aggregates = Vec::new();
    for (g, &x) in config.grid.iter().enumerate() {
        for spec in &config.estimators {
            let label = spec.label();
            let rows: Vec<&SweepRecord> = records
                .iter()
                .filter(|r| r.grid_index == g && r.estimator == label)
                .collect();
            let col = |f: fn(&SweepRecord) -> f64| Summary::of(rows.iter().map(|r| f(r)));
            let verdicts: Vec<bool> = rows.iter().filter_map(|r| r.consistency_passed).collect();
            aggregates.push(Aggregate {
                grid_index: g,
                noise_param: x,
                total_spam: config.kind.total_spam(x),
                estimator: label,
                n_failed: rows.iter().filter(|r| r.error.is_some()).count(),
                fidelity_error_entanglement: col(|r| r.fidelity_error_entanglement),
                fidelity_error_average: col(|r| r.fidelity_error_average),
                abs_fidelity_error_entanglement: col(|r| r.fidelity_error_entanglement.abs()),
                abs_fidelity_error_average: col(|r| r.fidelity_error_average.abs()),
                eigen_delta: col(|r| r.eigen_delta),
                consistency_pass_rate: (!verdicts.is_empty()).then(|| {
                    verdicts.iter().filter(|&&p| p).count() as f64 / verdicts.len() as f64
                }),
            });
        }
    }
    Ok(SweepResult {
        records,
        aggregates,
    })
}
