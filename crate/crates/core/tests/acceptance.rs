//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spamqpt::hs::fidelity_against;
use spamqpt::linalg::{eigen_delta, eigenvalues, frac_power, pinv, pinv_rank, truncate_to_rank};
use spamqpt::linalg::{EigenSet, PinvOptions};
use spamqpt::sim::{
    simulate, sweep, target_gate, true_frames, Aggregate, EstimatorSpec, ExperimentDesign,
    NoiseModel, Shots, SweepConfig, SweepKind, SweepResult, DEFAULT_GATE_GAMMA,
};
use spamqpt::tomo::{
    ols_qpt, overcomplete_approx_diagnostic, overcomplete_spam_corrected_qpt, spam_corrected_qpt,
    standard_qpt, OvercompleteOptions, ProbMatrix,
};

const GAUGES: [f64; 3] = [0.0, 0.5, 1.0];
const RUNS: usize = 50;
const BASE_SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn uniform(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.random::<f64>() * 2.0 - 1.0)
}

fn exact(m: &DMatrix<f64>, g: &DMatrix<f64>, s: &DMatrix<f64>) -> ProbMatrix {
    ProbMatrix::exact(m * g * s)
}

fn square_estimators() -> Vec<EstimatorSpec> {
    let mut v = vec![EstimatorSpec::Standard];
    v.extend(GAUGES.iter().map(|&p| EstimatorSpec::Corrected { p }));
    v
}

fn by_label<'a>(aggs: &'a [Aggregate], label: &str) -> Vec<&'a Aggregate> {
    aggs.iter().filter(|a| a.estimator == label).collect()
}

fn corrected_label(p: f64) -> String {
    EstimatorSpec::Corrected { p }.label()
}

/// Criterion 1: Every estimator recovers the gate from exact, SPAM-free data.
fn exact_recovery() -> Outcome {
    let start = Instant::now();
    let g = NoiseModel::noiseless().true_gate().unwrap();
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();

    let sq = ExperimentDesign::square(Shots::Exact).frame().unwrap();
    let p = exact(sq.m0(), g.matrix(), sq.s0());
    let i = ProbMatrix::exact(sq.predicted_calibration());
    let mut estimates = vec![standard_qpt(&sq, &p), ols_qpt(&sq, &p)];
    estimates.extend(GAUGES.iter().map(|&gp| spam_corrected_qpt(&sq, &i, &p, gp)));

    let oc = ExperimentDesign::overcomplete(Shots::Exact)
        .frame()
        .unwrap();
    let p6 = exact(oc.m0(), g.matrix(), oc.s0());
    let i6 = ProbMatrix::exact(oc.predicted_calibration());
    estimates.push(ols_qpt(&oc, &p6));
    for gp in GAUGES {
        let opts = OvercompleteOptions {
            truncate_p: true,
            gauge_p: gp,
        };
        estimates.push(overcomplete_spam_corrected_qpt(&oc, &i6, &p6, opts));
    }
    for est in estimates {
        match est {
            Ok(e) => worst = worst.max((e.g_hat.matrix() - g.matrix()).norm()),
            Err(e) => errors.push(e.to_string()),
        }
    }
    let elapsed = start.elapsed();
    check(
        errors.is_empty() && worst < 1e-9 && elapsed < Duration::from_secs(1),
        format!(
            "max ||G_hat - G||_F = {worst:.2e} over 10 estimates, {elapsed:.2?}, errors {errors:?}"
        ),
    )
}

/// Criterion 2: Standard-QPT entanglement-fidelity bias under 0.98 depolarizing SPAM.
fn spam_bias_witness() -> Outcome {
    let design = ExperimentDesign::square(Shots::Exact);
    let frame = design.frame().unwrap();
    let noise = NoiseModel::depolarizing(0.98, 0.98);
    let truth = true_frames(&noise, &design).unwrap();
    let g = noise.true_gate().unwrap();
    let target = target_gate();
    let f_true = fidelity_against(&g, &target).entanglement;
    let i = ProbMatrix::exact(&truth.m * &truth.s);
    let p = exact(&truth.m, g.matrix(), &truth.s);

    let oracle = 3.0 * 0.99 * (0.98f64.powi(2) - 1.0) / 4.0;
    let std_err =
        fidelity_against(&standard_qpt(&frame, &p).unwrap().g_hat, &target).entanglement - f_true;
    let mut worst_corrected: f64 = 0.0;
    for gp in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let est = spam_corrected_qpt(&frame, &i, &p, gp).unwrap();
        let e = fidelity_against(&est.g_hat, &target).entanglement - f_true;
        worst_corrected = worst_corrected.max(e.abs());
    }
    check(
        (std_err - oracle).abs() < 1e-10 && worst_corrected < 1e-10,
        format!(
            "standard error {std_err:.10} vs oracle {oracle:.10}; corrected max |error| {worst_corrected:.2e}"
        ),
    )
}

/// Criterion 3: The corrected spectrum does not depend on the gauge split.
fn gauge_spectrum_invariance() -> Outcome {
    let start = Instant::now();
    let design = ExperimentDesign::square(Shots::Finite(5000));
    let frame = design.frame().unwrap();
    let noise = NoiseModel::coherent(0.1);
    let gauges = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for seed in 0..100 {
        let data = simulate(&design, &noise, BASE_SEED + seed)
            .unwrap()
            .dataset(&design)
            .unwrap();
        let i = data.i_hat.as_ref().unwrap();
        let spectra: Vec<EigenSet> = gauges
            .iter()
            .filter_map(|&gp| spam_corrected_qpt(&frame, i, &data.p_hat, gp).ok())
            .map(|e| e.diagnostics.spectrum)
            .collect();
        if spectra.len() != gauges.len() {
            failures += 1;
            continue;
        }
        for a in 0..spectra.len() {
            for b in a + 1..spectra.len() {
                worst = worst.max(eigen_delta(&spectra[a], &spectra[b]).unwrap());
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        failures == 0 && worst < 1e-9 && elapsed < Duration::from_secs(10),
        format!("max pairwise delta {worst:.2e} over 100 datasets, {failures} estimator failures, {elapsed:.2?}"),
    )
}

fn depolarizing_sweep() -> (SweepResult, Duration) {
    let start = Instant::now();
    let config = SweepConfig {
        kind: SweepKind::Depolarizing,
        grid: SweepKind::Depolarizing.default_grid(),
        n_runs: RUNS,
        design: ExperimentDesign::square(Shots::Finite(5000)),
        estimators: square_estimators(),
        base_seed: BASE_SEED,
        gate_gamma: DEFAULT_GATE_GAMMA,
    };
    let result = sweep(&config).unwrap();
    (result, start.elapsed())
}

/// Criterion 4: Eigenvalue error: standard grows with SPAM noise, corrected stays flat.
fn eigenvalue_sweep(result: &SweepResult, elapsed: Duration) -> Outcome {
    let std = by_label(&result.aggregates, "standard");
    let means: Vec<f64> = std.iter().map(|a| a.eigen_delta.mean).collect();
    let monotone = means.windows(2).all(|w| w[1] > w[0]);
    let ratio = means[means.len() - 1] / means[0];

    let mut flat = true;
    let mut spreads = Vec::new();
    for gp in GAUGES {
        let cor = by_label(&result.aggregates, &corrected_label(gp));
        let m: Vec<f64> = cor.iter().map(|a| a.eigen_delta.mean).collect();
        let spread =
            m.iter().cloned().fold(f64::MIN, f64::max) - m.iter().cloned().fold(f64::MAX, f64::min);
        let pooled_var =
            cor.iter().map(|a| a.eigen_delta.sd.powi(2)).sum::<f64>() / cor.len() as f64;
        let pooled_se = pooled_var.sqrt() / (RUNS as f64).sqrt();
        flat &= spread < 4.0 * pooled_se;
        spreads.push(format!("p={gp}: {:.2}", spread / pooled_se));
    }
    check(
        monotone && ratio > 5.0 && flat && elapsed < Duration::from_secs(60),
        format!(
            "standard mean delta monotone={monotone}, top/zero={ratio:.1}; corrected spread in pooled SE [{}]; sweep {elapsed:.2?}",
            spreads.join(", ")
        ),
    )
}

/// Criterion 5: Fidelity error: corrected is unbiased, standard is not; coherent SPAM
/// favours every corrected split.
fn fidelity_sweep(result: &SweepResult, depol_elapsed: Duration) -> Outcome {
    let start = Instant::now();
    let mut unbiased = true;
    let mut worst_z: f64 = 0.0;
    for gp in GAUGES {
        for a in by_label(&result.aggregates, &corrected_label(gp)) {
            for s in [a.fidelity_error_entanglement, a.fidelity_error_average] {
                let z = s.mean.abs() / s.se();
                worst_z = worst_z.max(z);
                unbiased &= z < 3.0;
            }
        }
    }
    let top = result
        .aggregates
        .iter()
        .map(|a| a.grid_index)
        .max()
        .unwrap();
    let at_top = |label: &str| {
        by_label(&result.aggregates, label)
            .into_iter()
            .find(|a| a.grid_index == top)
            .unwrap()
            .abs_fidelity_error_average
            .mean
    };
    let std_top = at_top("standard");
    let ratio_ok = GAUGES
        .iter()
        .all(|&gp| std_top > 10.0 * at_top(&corrected_label(gp)));
    let min_ratio = GAUGES
        .iter()
        .map(|&gp| std_top / at_top(&corrected_label(gp)))
        .fold(f64::INFINITY, f64::min);

    let config = SweepConfig {
        kind: SweepKind::Coherent,
        grid: SweepKind::Coherent.default_grid(),
        n_runs: RUNS,
        design: ExperimentDesign::square(Shots::Finite(5000)),
        estimators: square_estimators(),
        base_seed: BASE_SEED,
        gate_gamma: DEFAULT_GATE_GAMMA,
    };
    let coherent = sweep(&config).unwrap();
    let top_c = coherent
        .aggregates
        .iter()
        .map(|a| a.grid_index)
        .max()
        .unwrap();
    let at = |label: &str| {
        by_label(&coherent.aggregates, label)
            .into_iter()
            .find(|a| a.grid_index == top_c)
            .unwrap()
            .clone()
    };
    let std_c = at("standard");
    let mut coherent_ok = true;
    let mut coherent_detail = Vec::new();
    for gp in GAUGES {
        let c = at(&corrected_label(gp));
        for (s, k) in [
            (
                std_c.abs_fidelity_error_average.mean,
                c.abs_fidelity_error_average.mean,
            ),
            (
                std_c.abs_fidelity_error_entanglement.mean,
                c.abs_fidelity_error_entanglement.mean,
            ),
        ] {
            coherent_ok &= k < s;
        }
        coherent_detail.push(format!("p={gp}: {:.2e}", c.abs_fidelity_error_average.mean));
    }
    let elapsed = depol_elapsed + start.elapsed();
    check(
        unbiased && ratio_ok && coherent_ok && elapsed < Duration::from_secs(120),
        format!(
            "corrected max |mean|/SE = {worst_z:.2}; standard/corrected |error| at top = {min_ratio:.1}x; \
             coherent phi=0.1 mean |F_avg error| standard {:.2e} vs [{}]; {elapsed:.2?}",
            std_c.abs_fidelity_error_average.mean,
            coherent_detail.join(", ")
        ),
    )
}

/// Criterion 6: Corrected eigenvalue error shrinks with more shots.
fn shot_scaling() -> Outcome {
    let mut means = Vec::new();
    for shots in [500, 5000, 50_000] {
        let config = SweepConfig {
            kind: SweepKind::Depolarizing,
            grid: vec![0.0],
            n_runs: RUNS,
            design: ExperimentDesign::square(Shots::Finite(shots)),
            estimators: GAUGES
                .iter()
                .map(|&p| EstimatorSpec::Corrected { p })
                .collect(),
            base_seed: BASE_SEED,
            gate_gamma: DEFAULT_GATE_GAMMA,
        };
        let r = sweep(&config).unwrap();
        means.push(
            r.aggregates
                .iter()
                .map(|a| a.eigen_delta.mean)
                .collect::<Vec<_>>(),
        );
    }
    let decreasing =
        (0..GAUGES.len()).all(|k| means[0][k] > means[1][k] && means[1][k] > means[2][k]);
    check(
        decreasing,
        format!(
            "mean delta (p=0.5) at 500/5000/50000 shots: {:.2e} / {:.2e} / {:.2e}",
            means[0][1], means[1][1], means[2][1]
        ),
    )
}

/// Criterion 7: Overcomplete pipeline agrees with the truth, the square estimator and
/// its closed-form approximation on exact data.
fn overcomplete_consistency() -> Outcome {
    let g = NoiseModel::noiseless().true_gate().unwrap();
    let oc_design = ExperimentDesign::overcomplete(Shots::Exact);
    let oc = oc_design.frame().unwrap();
    let p6 = exact(oc.m0(), g.matrix(), oc.s0());
    let i6 = ProbMatrix::exact(oc.predicted_calibration());
    let recover = overcomplete_spam_corrected_qpt(&oc, &i6, &p6, Default::default())
        .map(|e| (e.g_hat.matrix() - g.matrix()).norm())
        .unwrap_or(f64::INFINITY);

    let sq_design = ExperimentDesign::square(Shots::Exact);
    let sq = sq_design.frame().unwrap();
    let mut vs_square: f64 = 0.0;
    let mut vs_approx: f64 = 0.0;
    for noise in [
        NoiseModel::depolarizing(0.98, 0.97),
        NoiseModel::coherent(0.1),
    ] {
        let gate = noise.true_gate().unwrap();
        let t = true_frames(&noise, &sq_design).unwrap();
        let i = ProbMatrix::exact(&t.m * &t.s);
        let p = exact(&t.m, gate.matrix(), &t.s);
        let t6 = true_frames(&noise, &oc_design).unwrap();
        let i6 = ProbMatrix::exact(&t6.m * &t6.s);
        let p6 = exact(&t6.m, gate.matrix(), &t6.s);
        for gp in GAUGES {
            let opts = OvercompleteOptions {
                truncate_p: true,
                gauge_p: gp,
            };
            let a = overcomplete_spam_corrected_qpt(&sq, &i, &p, opts).unwrap();
            let b = spam_corrected_qpt(&sq, &i, &p, gp).unwrap();
            vs_square = vs_square.max((a.g_hat.matrix() - b.g_hat.matrix()).norm());
            let full = overcomplete_spam_corrected_qpt(&oc, &i6, &p6, opts).unwrap();
            let approx = overcomplete_approx_diagnostic(&oc, &i6, &p6, gp).unwrap();
            vs_approx = vs_approx.max((full.g_hat.matrix() - approx.matrix()).norm());
        }
    }
    check(
        recover < 1e-9 && vs_square < 1e-9 && vs_approx < 1e-8,
        format!(
            "6-element recovery {recover:.2e}; square pipeline vs square estimator {vs_square:.2e}; \
             approximation vs pipeline {vs_approx:.2e}"
        ),
    )
}

fn brute_force_delta(a: &[Complex64], b: &[Complex64]) -> f64 {
    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }
    permutations(a.len())
        .iter()
        .map(|p| {
            p.iter()
                .enumerate()
                .map(|(i, &j)| (a[i] - b[j]).norm())
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
        / a.len() as f64
}

/// Criterion 8: Linear-algebra oracles.
fn linalg_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED);
    let mut notes = Vec::new();

    let mut mp: f64 = 0.0;
    for _ in 0..50 {
        let a = uniform(&mut rng, 6, 4);
        let p = pinv(&a, PinvOptions::default()).unwrap();
        let (ap, pa) = (&a * &p, &p * &a);
        for r in [
            (&ap * &a - &a).amax(),
            (&pa * &p - &p).amax(),
            (&ap - ap.transpose()).amax(),
            (&pa - pa.transpose()).amax(),
        ] {
            mp = mp.max(r);
        }
    }
    notes.push(format!("Moore-Penrose {mp:.1e}"));

    let mut eckart_young = true;
    for _ in 0..5 {
        let a = uniform(&mut rng, 6, 6);
        let best = (&a - truncate_to_rank(&a, 4).unwrap()).norm();
        for _ in 0..200 {
            let b = uniform(&mut rng, 6, 4) * uniform(&mut rng, 4, 6);
            eckart_young &= best <= (&a - b).norm();
        }
    }
    notes.push(format!("Eckart-Young {eckart_young}"));

    let mut root: f64 = 0.0;
    for _ in 0..50 {
        let a = DMatrix::identity(4, 4) + uniform(&mut rng, 4, 4) * 0.05;
        let h = frac_power(&a, 0.5).unwrap();
        root = root.max((&h * &h - &a).norm() / a.norm());
    }
    let spam = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.9604, 0.9604, 0.9604]));
    let h = frac_power(&spam, 0.5).unwrap();
    root = root.max((&h * &h - &spam).norm() / spam.norm());
    notes.push(format!("sqrt round trip {root:.1e}"));

    let mut matching: f64 = 0.0;
    for n in 1..=6 {
        for _ in 0..20 {
            let v: Vec<Complex64> = (0..2 * n)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let d = eigen_delta(
                &EigenSet::new(v[..n].to_vec()),
                &EigenSet::new(v[n..].to_vec()),
            )
            .unwrap();
            matching = matching.max((d - brute_force_delta(&v[..n], &v[n..])).abs());
        }
    }
    let g = NoiseModel::noiseless().true_gate().unwrap();
    let swapped = eigen_delta(
        &eigenvalues(g.matrix()).unwrap(),
        &EigenSet::new(vec![
            Complex64::new(0.0, -0.99),
            Complex64::new(0.0, 0.99),
            Complex64::new(0.99, 0.0),
            Complex64::new(1.0, 0.0),
        ]),
    )
    .unwrap();
    notes.push(format!("eigen_delta vs brute force {matching:.1e}"));

    let a = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
    let b = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
    let lhs = pinv_rank(&(&a * &b), 1).unwrap();
    let rhs = pinv_rank(&b, 1).unwrap() * pinv_rank(&a, 1).unwrap();
    let witness = (lhs - &rhs).amax();
    notes.push(format!("(AB)^+ - B^+A^+ = {witness:.2}"));

    check(
        mp < 1e-9
            && eckart_young
            && root < 1e-10
            && matching < 1e-12
            && swapped < 1e-12
            && witness > 0.1,
        notes.join("; "),
    )
}

fn main() -> ExitCode {
    let mut outcomes: Vec<(&str, Outcome)> = vec![
        ("1 exact recovery", exact_recovery()),
        ("2 SPAM bias witness", spam_bias_witness()),
        ("3 gauge-spectrum invariance", gauge_spectrum_invariance()),
    ];
    let (depol, elapsed) = depolarizing_sweep();
    outcomes.push((
        "4 eigenvalue error sweep",
        eigenvalue_sweep(&depol, elapsed),
    ));
    outcomes.push(("5 fidelity error sweeps", fidelity_sweep(&depol, elapsed)));
    outcomes.push(("6 shot scaling", shot_scaling()));
    outcomes.push(("7 overcomplete consistency", overcomplete_consistency()));
    outcomes.push(("8 linear-algebra oracles", linalg_oracles()));

    let mut failed = 0;
    for (name, o) in &outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {name}: {tag} ({})", o.detail);
        failed += usize::from(!o.passed);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        outcomes.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
