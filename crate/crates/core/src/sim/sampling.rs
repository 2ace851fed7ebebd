use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::design::{ExperimentDesign, Shots};
use super::noise::TrueFrames;
use crate::hs::{Outcome, PauliState, Superoperator};
use crate::tomo::{DataSet, ProbMatrix};
use crate::{Error, Result};

/// Probabilities within this distance outside `[0, 1]` are clamped; further
/// out they signal a non-physical model.
pub const PROB_TOL: f64 = 1e-12;

const CALIBRATION_STREAM: u64 = 0;
const GATE_STREAM: u64 = 1;

/// "+" outcome statistics of every circuit, `bases x preps`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeTable {
    /// Probability (exact) or frequency (sampled) of the "+" outcome.
    pub plus: DMatrix<f64>,
    /// "+" counts when sampled.
    pub counts: Option<DMatrix<u64>>,
    pub shots: Shots,
}

impl OutcomeTable {
    /// Frequency of `outcome` for circuit `(basis, prep)`. The "-" frequency
    /// of a sampled circuit is `(N - k) / N` from the same draw.
    pub fn frequency(&self, basis: usize, prep: usize, outcome: Outcome) -> f64 {
        match (outcome, &self.counts, self.shots) {
            (Outcome::Plus, _, _) => self.plus[(basis, prep)],
            (Outcome::Minus, Some(c), Shots::Finite(n)) => (n - c[(basis, prep)]) as f64 / n as f64,
            (Outcome::Minus, _, _) => 1.0 - self.plus[(basis, prep)],
        }
    }

    /// Rows of the tracked effects, columns of the preparations.
    pub fn prob_matrix(&self, design: &ExperimentDesign) -> Result<ProbMatrix> {
        let k_e = design.tracked_effects.len();
        let k_s = design.preps.len();
        let shape = (design.bases.len(), k_s);
        if self.plus.shape() != shape {
            return Err(Error::ShapeMismatch {
                context: "outcome table vs design",
                lhs: self.plus.shape(),
                rhs: shape,
            });
        }
        let mut values = DMatrix::zeros(k_e, k_s);
        for (i, e) in design.tracked_effects.iter().enumerate() {
            let b = design.basis_of(*e).ok_or_else(|| {
                Error::InvalidData(format!("tracked effect {e} has no measured basis"))
            })?;
            for j in 0..k_s {
                values[(i, j)] = self.frequency(b, j, e.outcome());
            }
        }
        match self.shots {
            Shots::Exact => Ok(ProbMatrix::exact(values)),
            Shots::Finite(n) => {
                ProbMatrix::from_frequencies(values, DMatrix::from_element(k_e, k_s, n))
            }
        }
    }
}

fn checked_probabilities(raw: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let rows = raw.nrows();
    for (k, &v) in raw.iter().enumerate() {
        if !(-PROB_TOL..=1.0 + PROB_TOL).contains(&v) {
            return Err(Error::ProbabilityOutOfRange {
                row: k % rows,
                col: k / rows,
                value: v,
            });
        }
    }
    Ok(raw.map(|v| v.clamp(0.0, 1.0)))
}

/// Exact "+" probabilities of the calibration circuits (`M S`) and the gate
/// circuits (`M G S`).
pub fn exact_prob_matrices(
    truth: &TrueFrames,
    gate: &Superoperator,
) -> Result<(OutcomeTable, OutcomeTable)> {
    let exact = |m: DMatrix<f64>| -> Result<OutcomeTable> {
        Ok(OutcomeTable {
            plus: checked_probabilities(m)?,
            counts: None,
            shots: Shots::Exact,
        })
    };
    if truth.plus_effects.ncols() != gate.matrix().nrows()
        || gate.matrix().ncols() != truth.s.nrows()
    {
        return Err(Error::ShapeMismatch {
            context: "gate vs frames",
            lhs: gate.matrix().shape(),
            rhs: (truth.plus_effects.ncols(), truth.s.nrows()),
        });
    }
    let cal = exact(&truth.plus_effects * &truth.s)?;
    let gate = exact(&truth.plus_effects * gate.matrix() * &truth.s)?;
    Ok((cal, gate))
}

fn binomial_draw(q: f64, n: u64, rng: &mut impl Rng) -> u64 {
    if q <= 0.0 {
        return 0;
    }
    if q >= 1.0 {
        return n;
    }
    Binomial::new(n, q).expect("q in (0, 1)").sample(rng)
}

/// One binomial sample of `n` shots per circuit.
pub fn sample_outcomes(exact: &OutcomeTable, n: u64, rng: &mut impl Rng) -> Result<OutcomeTable> {
    if n == 0 {
        return Err(Error::InvalidData("shots must be at least 1".into()));
    }
    let (rows, cols) = exact.plus.shape();
    let mut counts = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        for b in 0..rows {
            counts[(b, j)] = binomial_draw(exact.plus[(b, j)], n, rng);
        }
    }
    Ok(OutcomeTable {
        plus: counts.map(|k| k as f64 / n as f64),
        counts: Some(counts),
        shots: Shots::Finite(n),
    })
}

/// Calibration and gate statistics of one simulated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledData {
    pub calibration: Option<OutcomeTable>,
    pub gate: OutcomeTable,
}

impl SampledData {
    pub fn dataset(&self, design: &ExperimentDesign) -> Result<DataSet> {
        let i_hat = self
            .calibration
            .as_ref()
            .map(|c| c.prob_matrix(design))
            .transpose()?;
        DataSet::new(i_hat, self.gate.prob_matrix(design)?)
    }
}

/// Samples both tables from independent ChaCha8 streams of `seed`.
/// `Shots::Exact` returns the exact tables.
pub fn sample_dataset(
    calibration: Option<&OutcomeTable>,
    gate: &OutcomeTable,
    shots: Shots,
    seed: u64,
) -> Result<SampledData> {
    let n = match shots {
        Shots::Exact => {
            return Ok(SampledData {
                calibration: calibration.cloned(),
                gate: gate.clone(),
            })
        }
        Shots::Finite(n) => n,
    };
    let stream = |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s);
        rng
    };
    let calibration = calibration
        .map(|c| sample_outcomes(c, n, &mut stream(CALIBRATION_STREAM)))
        .transpose()?;
    let gate = sample_outcomes(gate, n, &mut stream(GATE_STREAM))?;
    Ok(SampledData { calibration, gate })
}

/// Label of the effect measured by `(basis, outcome)`.
pub fn effect_label(design: &ExperimentDesign, basis: usize, outcome: Outcome) -> &'static str {
    PauliState::from_axis(design.bases[basis], outcome).label()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::noise::{target_gate, true_frames, NoiseModel};

    fn tables(noise: NoiseModel) -> (OutcomeTable, OutcomeTable) {
        let design = ExperimentDesign::square(Shots::Exact);
        let truth = true_frames(&noise, &design).unwrap();
        exact_prob_matrices(&truth, &noise.true_gate().unwrap()).unwrap()
    }

    #[test]
    fn identity_gate_matches_calibration() {
        let design = ExperimentDesign::square(Shots::Exact);
        let truth = true_frames(&NoiseModel::noiseless(), &design).unwrap();
        let (cal, gate) = exact_prob_matrices(&truth, &Superoperator::identity(2)).unwrap();
        assert_eq!(cal, gate);
        let p = cal.prob_matrix(&design).unwrap();
        for k in 0..4 {
            assert!((p.values[(k, k)] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn x90_takes_plus_y_to_plus_z() {
        // Oracle: exp(-i pi X / 4) |+y> = |0> up to phase.
        let u = crate::hs::x_half_pi();
        let out = &u * PauliState::PlusY.ket();
        assert!((out[0].norm_sqr() - 1.0).abs() < 1e-14);

        let design = ExperimentDesign::square(Shots::Exact);
        let truth = true_frames(&NoiseModel::noiseless(), &design).unwrap();
        let (_, gate) = exact_prob_matrices(&truth, &target_gate()).unwrap();
        // Basis z is index 2, +y is prep index 2.
        assert!((gate.plus[(2, 2)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn depolarized_calibration_entry() {
        let (cal, _) = tables(NoiseModel::depolarizing(0.98, 0.98));
        assert!((cal.plus[(0, 0)] - (1.0 + 0.98f64.powi(2)) / 2.0).abs() < 1e-12);
        assert!((cal.plus[(0, 0)] - 0.98020).abs() < 1e-6);
    }

    #[test]
    fn non_physical_probabilities_are_rejected() {
        let design = ExperimentDesign::square(Shots::Exact);
        let mut truth = true_frames(&NoiseModel::noiseless(), &design).unwrap();
        truth.s *= 1.5;
        assert!(matches!(
            exact_prob_matrices(&truth, &Superoperator::identity(2)),
            Err(Error::ProbabilityOutOfRange { .. })
        ));
    }

    #[test]
    fn sampling_is_deterministic_and_streams_differ() {
        let (cal, gate) = tables(NoiseModel::depolarizing(0.99, 0.99));
        let a = sample_dataset(Some(&cal), &gate, Shots::Finite(5000), 42).unwrap();
        let b = sample_dataset(Some(&cal), &gate, Shots::Finite(5000), 42).unwrap();
        assert_eq!(a, b);
        let c = sample_dataset(Some(&cal), &gate, Shots::Finite(5000), 43).unwrap();
        assert_ne!(a, c);
        // Independent streams: identical tables still get different counts.
        let e = sample_dataset(Some(&cal), &cal, Shots::Finite(5000), 42).unwrap();
        assert_ne!(e.calibration.unwrap().counts, e.gate.counts);
    }

    #[test]
    fn huge_shot_counts_converge() {
        let (cal, gate) = tables(NoiseModel::coherent(0.05));
        let s = sample_dataset(Some(&cal), &gate, Shots::Finite(1_000_000_000), 3).unwrap();
        assert!((s.gate.plus.clone() - &gate.plus).amax() < 1e-3);
        assert!((s.calibration.unwrap().plus - &cal.plus).amax() < 1e-3);
    }

    #[test]
    fn exact_mode_returns_probabilities() {
        let (cal, gate) = tables(NoiseModel::noiseless());
        let s = sample_dataset(Some(&cal), &gate, Shots::Exact, 0).unwrap();
        assert_eq!(s.gate, gate);
        let design = ExperimentDesign::square(Shots::Exact);
        let ds = s.dataset(&design).unwrap();
        assert!(matches!(ds.p_hat.sampling, crate::tomo::Sampling::Exact));
    }

    #[test]
    fn paired_frequencies_sum_to_one_exactly() {
        for n in [1u64, 3, 7, 500, 4999, 5000, 50000] {
            for k in 0..=n {
                let plus = k as f64 / n as f64;
                let minus = (n - k) as f64 / n as f64;
                assert_eq!(plus + minus, 1.0, "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn minus_rows_complement_plus_rows() {
        let (cal, gate) = tables(NoiseModel::depolarizing(0.97, 0.99));
        let s = sample_dataset(Some(&cal), &gate, Shots::Finite(5000), 9).unwrap();
        let design = ExperimentDesign::square(Shots::Finite(5000));
        let p = s.gate.prob_matrix(&design).unwrap();
        // Rows 0 and 1 are +x and -x.
        for j in 0..4 {
            assert_eq!(p.values[(0, j)] + p.values[(1, j)], 1.0);
        }
        assert_eq!(effect_label(&design, 1, Outcome::Minus), "-y");
    }
}
