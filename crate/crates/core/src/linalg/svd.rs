use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Default relative cutoff for pseudoinverses without a forced rank.
pub const DEFAULT_RTOL: f64 = 1e-12;

/// Thin singular value decomposition `A = U diag(sigma) V^T` with `sigma`
/// sorted non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactors {
    pub u: DMatrix<f64>,
    pub sigma: DVector<f64>,
    pub v: DMatrix<f64>,
}

impl SvdFactors {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidData("SVD of an empty matrix".into()));
        }
        let svd = a.clone().svd(true, true);
        let u = svd.u.expect("requested U");
        let v = svd.v_t.expect("requested V^T").transpose();
        let s = svd.singular_values;

        let mut order: Vec<usize> = (0..s.len()).collect();
        order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
        let sigma = DVector::from_iterator(s.len(), order.iter().map(|&i| s[i]));
        let u = DMatrix::from_columns(&order.iter().map(|&i| u.column(i)).collect::<Vec<_>>());
        let v = DMatrix::from_columns(&order.iter().map(|&i| v.column(i)).collect::<Vec<_>>());
        Ok(Self { u, sigma, v })
    }

    /// `U_r diag(sigma_r) V_r^T` using the leading `r` triplets.
    pub fn reconstruct(&self, r: usize) -> DMatrix<f64> {
        let r = r.min(self.sigma.len());
        let u = self.u.columns(0, r);
        let v = self.v.columns(0, r);
        let s = DMatrix::from_diagonal(&self.sigma.rows(0, r).into_owned());
        u * s * v.transpose()
    }

    /// Number of singular values above `rtol * sigma_max`.
    pub fn rank(&self, rtol: f64) -> usize {
        let cutoff = rtol * self.sigma.max();
        self.sigma.iter().filter(|&&s| s > cutoff).count()
    }

    pub fn condition_number(&self) -> f64 {
        let min = self.sigma.min();
        if min == 0.0 {
            f64::INFINITY
        } else {
            self.sigma.max() / min
        }
    }
}

/// How many singular values a pseudoinverse keeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinvOptions {
    /// Keep exactly the leading `rank` singular values.
    pub rank: Option<usize>,
    /// Otherwise drop singular values below `rtol * sigma_max`.
    pub rtol: f64,
}

impl Default for PinvOptions {
    fn default() -> Self {
        Self {
            rank: None,
            rtol: DEFAULT_RTOL,
        }
    }
}

impl PinvOptions {
    pub fn with_rank(rank: usize) -> Self {
        Self {
            rank: Some(rank),
            ..Self::default()
        }
    }
}

/// Moore-Penrose pseudoinverse via SVD.
///
/// With a forced rank, exact zero singular values among the kept ones still
/// contribute nothing.
pub fn pinv(a: &DMatrix<f64>, opts: PinvOptions) -> Result<DMatrix<f64>> {
    let f = SvdFactors::new(a)?;
    let max_rank = f.sigma.len();
    let keep = match opts.rank {
        Some(r) if r > max_rank => {
            return Err(Error::InvalidRank {
                rank: r,
                rows: a.nrows(),
                cols: a.ncols(),
            })
        }
        Some(r) => r,
        None => f.rank(opts.rtol),
    };
    let mut out = DMatrix::zeros(a.ncols(), a.nrows());
    for k in 0..keep {
        let s = f.sigma[k];
        if s > 0.0 {
            out += f.v.column(k) * f.u.column(k).transpose() / s;
        }
    }
    Ok(out)
}

/// Pseudoinverse keeping exactly `rank` singular values.
pub fn pinv_rank(a: &DMatrix<f64>, rank: usize) -> Result<DMatrix<f64>> {
    pinv(a, PinvOptions::with_rank(rank))
}

/// Best rank-`r` approximation (Eckart-Young) by zeroing trailing singular
/// values.
pub fn truncate_to_rank(a: &DMatrix<f64>, r: usize) -> Result<DMatrix<f64>> {
    let max_rank = a.nrows().min(a.ncols());
    if r == 0 || r > max_rank {
        return Err(Error::InvalidRank {
            rank: r,
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if r == max_rank {
        return Ok(a.clone());
    }
    Ok(SvdFactors::new(a)?.reconstruct(r))
}

pub fn condition_number(a: &DMatrix<f64>) -> Result<f64> {
    Ok(SvdFactors::new(a)?.condition_number())
}

pub fn numerical_rank(a: &DMatrix<f64>, rtol: f64) -> Result<usize> {
    Ok(SvdFactors::new(a)?.rank(rtol))
}

/// Inverse of a square matrix, refusing condition numbers at or above `limit`.
pub fn checked_inverse(a: &DMatrix<f64>, what: &'static str, limit: f64) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            what,
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let condition = condition_number(a)?;
    if condition.is_nan() || condition >= limit {
        return Err(Error::IllConditioned {
            what,
            condition,
            limit,
        });
    }
    a.clone().try_inverse().ok_or(Error::IllConditioned {
        what,
        condition: f64::INFINITY,
        limit,
    })
}
