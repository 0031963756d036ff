use alloc::vec;
use alloc::vec::Vec;

use crate::error::{PricingError, Result};
use crate::math::{abs, sqrt};
use crate::model::SignIndicator;

/// Correlation matrix of an n-variate standard normal together with its
/// inverse. Both matrices already carry the sign decorations: entry `(i, j)`
/// is multiplied by `s_i s_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationStructure {
    dim: usize,
    rho: Vec<f64>,
    a_matrix: Vec<f64>,
    signs: Vec<SignIndicator>,
    // Time-to-observation of each coordinate when the matrix comes from a
    // Brownian path; enables the exact integration path in `mvn_cdf`.
    markov_times: Option<Vec<f64>>,
}

impl CorrelationStructure {
    /// General symmetric positive-definite correlation matrix (all signs Up).
    pub fn from_matrix(rho: &[Vec<f64>]) -> Result<Self> {
        let n = rho.len();
        if n == 0 {
            return Err(PricingError::invalid("rho", "empty matrix"));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in rho.iter().enumerate() {
            if row.len() != n {
                return Err(PricingError::invalid("rho", "matrix is not square"));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(PricingError::invalid("rho", "non-finite entry"));
                }
                if i == j && abs(v - 1.0) > 1e-12 {
                    return Err(PricingError::invalid("rho", "diagonal must be 1"));
                }
                if abs(v - rho[j][i]) > 1e-12 {
                    return Err(PricingError::invalid("rho", "matrix is not symmetric"));
                }
            }
            flat.extend_from_slice(row);
        }
        let l = cholesky(&flat, n)?;
        let a_matrix = inverse_from_cholesky(&l, n);
        Ok(CorrelationStructure {
            dim: n,
            rho: flat,
            a_matrix,
            signs: vec![SignIndicator::Up; n],
            markov_times: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rho(&self, i: usize, j: usize) -> f64 {
        self.rho[i * self.dim + j]
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a_matrix[i * self.dim + j]
    }

    pub fn rho_matrix(&self) -> Vec<Vec<f64>> {
        self.rho.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn a_matrix(&self) -> Vec<Vec<f64>> {
        self.a_matrix.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn signs(&self) -> &[SignIndicator] {
        &self.signs
    }

    pub(crate) fn markov_times(&self) -> Option<&[f64]> {
        self.markov_times.as_deref()
    }

    /// Restriction to a subset of coordinates (kept in order).
    pub(crate) fn select(&self, idx: &[usize]) -> CorrelationStructure {
        let m = idx.len();
        let mut rho = Vec::with_capacity(m * m);
        for &i in idx {
            for &j in idx {
                rho.push(self.rho(i, j));
            }
        }
        let a_matrix = match cholesky(&rho, m) {
            Ok(l) => inverse_from_cholesky(&l, m),
            Err(_) => vec![f64::NAN; m * m],
        };
        CorrelationStructure {
            dim: m,
            rho,
            a_matrix,
            signs: idx.iter().map(|&i| self.signs[i]).collect(),
            markov_times: self
                .markov_times
                .as_ref()
                .map(|t| idx.iter().map(|&i| t[i]).collect()),
        }
    }
}

/// Correlation of `s_i W(T_i)` for a Brownian path started at `t`:
/// `rho_ij = s_i s_j sqrt((T_i - t)/(T_j - t))` for `i <= j`, and its
/// tridiagonal inverse.
pub fn markov_correlation(
    t: f64,
    expiries: &[f64],
    signs: &[SignIndicator],
) -> Result<CorrelationStructure> {
    let n = expiries.len();
    if n == 0 {
        return Err(PricingError::invalid("expiries", "empty"));
    }
    if signs.len() != n {
        return Err(PricingError::invalid("signs", "length differs from expiries"));
    }
    if !t.is_finite() || expiries.iter().any(|e| !e.is_finite()) {
        return Err(PricingError::invalid("expiries", "non-finite time"));
    }
    if expiries[0] <= t {
        return Err(PricingError::invalid("expiries", "first expiry must be after t"));
    }
    if expiries.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PricingError::invalid("expiries", "must be strictly increasing"));
    }
    let tau: Vec<f64> = expiries.iter().map(|e| e - t).collect();
    let s: Vec<f64> = signs.iter().map(|s| s.value()).collect();

    let mut rho = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
            rho[i * n + j] = s[i] * s[j] * sqrt(tau[lo] / tau[hi]);
        }
    }

    let mut a = vec![0.0; n * n];
    if n == 1 {
        a[0] = 1.0;
    } else {
        a[0] = tau[1] / (tau[1] - tau[0]);
        a[(n - 1) * n + (n - 1)] = tau[n - 1] / (tau[n - 1] - tau[n - 2]);
        for i in 1..n - 1 {
            a[i * n + i] = tau[i] / (tau[i] - tau[i - 1]) + tau[i] / (tau[i + 1] - tau[i]);
        }
        for i in 0..n - 1 {
            let off = -sqrt(tau[i] * tau[i + 1]) / (tau[i + 1] - tau[i]);
            a[i * n + i + 1] = s[i] * s[i + 1] * off;
            a[(i + 1) * n + i] = s[i] * s[i + 1] * off;
        }
    }

    Ok(CorrelationStructure {
        dim: n,
        rho,
        a_matrix: a,
        signs: signs.to_vec(),
        markov_times: Some(tau),
    })
}

/// Lower Cholesky factor of a row-major `n x n` matrix.
pub(crate) fn cholesky(m: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = m[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 1e-14) {
                    return Err(PricingError::NotPositiveDefinite);
                }
                l[i * n + i] = sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

fn inverse_from_cholesky(l: &[f64], n: usize) -> Vec<f64> {
    // Solve L L^T X = I column by column.
    let mut inv = vec![0.0; n * n];
    let mut y = vec![0.0; n];
    for c in 0..n {
        for i in 0..n {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for k in 0..i {
                s -= l[i * n + k] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= l[k * n + i] * inv[k * n + c];
            }
            inv[i * n + c] = s / l[i * n + i];
        }
    }
    inv
}
