use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest set size for which [`eigen_delta`] matches exactly over all
/// permutations.
pub const EXACT_MATCHING_MAX: usize = 6;

/// Eigenvalues with multiplicity, ordered by decreasing modulus then phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSet {
    pub values: Vec<Complex64>,
}

impl EigenSet {
    pub fn new(mut values: Vec<Complex64>) -> Self {
        sort_spectrum(&mut values);
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn sort_spectrum(values: &mut [Complex64]) {
    values.sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then_with(|| a.arg().total_cmp(&b.arg()))
    });
}

/// All eigenvalues of a real square matrix.
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<EigenSet> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            what: "eigenvalue input",
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidData("matrix has non-finite entries".into()));
    }
    let values = a.complex_eigenvalues().iter().copied().collect();
    Ok(EigenSet::new(values))
}

/// Mean matched eigenvalue error `(1/n) min_pi sum_i |lambda_i - mu_pi(i)|`.
///
/// Exact over all pairings for `n <= 6`. Larger sets use greedy nearest
/// neighbour matching in spectrum order, which can overestimate the minimum.
pub fn eigen_delta(true_vals: &EigenSet, est_vals: &EigenSet) -> Result<f64> {
    let n = true_vals.len();
    if est_vals.len() != n {
        return Err(Error::DimensionMismatch {
            context: "eigen_delta",
            expected: n,
            found: est_vals.len(),
        });
    }
    if n == 0 {
        return Ok(0.0);
    }
    let cost: Vec<Vec<f64>> = true_vals
        .values
        .iter()
        .map(|a| est_vals.values.iter().map(|b| (a - b).norm()).collect())
        .collect();
    let total = if n <= EXACT_MATCHING_MAX {
        exact_matching(&cost)
    } else {
        greedy_matching(&cost)
    };
    Ok(total / n as f64)
}

fn exact_matching(cost: &[Vec<f64>]) -> f64 {
    fn search(row: usize, used: &mut [bool], acc: f64, best: &mut f64, cost: &[Vec<f64>]) {
        if acc >= *best {
            return;
        }
        if row == cost.len() {
            *best = acc;
            return;
        }
        for col in 0..cost.len() {
            if !used[col] {
                used[col] = true;
                search(row + 1, used, acc + cost[row][col], best, cost);
                used[col] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    search(0, &mut vec![false; cost.len()], 0.0, &mut best, cost);
    best
}

fn greedy_matching(cost: &[Vec<f64>]) -> f64 {
    let mut used = vec![false; cost.len()];
    let mut total = 0.0;
    for row in cost {
        let (col, c) = row
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(j, c)| (j, *c))
            .expect("one free column per row");
        used[col] = true;
        total += c;
    }
    total
}
