use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PricingError, Result};
use crate::math::{abs, floor, sqrt};
use crate::quad::adaptive_gk21;

use super::correlation::{cholesky, CorrelationStructure};
use super::{bvn_lower, cdf, inv_cdf, norm_pdf};

/// Estimate of an n-variate rectangle probability with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvnEstimate {
    pub value: f64,
    pub error: f64,
}

const QMC_SEED: u64 = 0x5eed_0f_9a55;
const QMC_SHIFTS: usize = 12;
const QMC_MAX_POINTS: usize = 1 << 17;
const EXACT_MAX_DIM: usize = 8;

/// `P(Y_i <= limits[i], i = 0..n)` for `Y ~ N(0, corr.rho)`.
///
/// Markov structures of dimension up to 8 are integrated deterministically
/// (bridge decomposition plus adaptive quadrature); everything else uses a
/// randomly shifted lattice rule with a fixed seed.
pub fn mvn_cdf(limits: &[f64], corr: &CorrelationStructure, tol: f64) -> Result<MvnEstimate> {
    if limits.len() != corr.dim() {
        return Err(PricingError::invalid("limits", "length differs from dimension"));
    }
    if !(tol > 0.0) {
        return Err(PricingError::invalid("tol", "must be > 0"));
    }
    if limits.iter().any(|l| l.is_nan()) {
        return Err(PricingError::invalid("limits", "NaN"));
    }
    if corr.markov_times().is_none() {
        // surface a non-PD matrix even if infinite limits would hide it
        cholesky(&corr.rho_matrix().concat(), corr.dim())?;
    }
    if limits.iter().any(|&l| l == f64::NEG_INFINITY) {
        return Ok(MvnEstimate { value: 0.0, error: 0.0 });
    }
    let active: Vec<usize> = (0..limits.len())
        .filter(|&i| limits[i] != f64::INFINITY)
        .collect();
    let b: Vec<f64> = active.iter().map(|&i| limits[i]).collect();
    let sub = corr.select(&active);
    let exact = |value| Ok(MvnEstimate { value, error: 0.0 });

    match b.len() {
        0 => exact(1.0),
        1 => exact(cdf(b[0])),
        2 => exact(bvn_lower(b[0], b[1], sub.rho(0, 1))),
        n => match sub.markov_times() {
            Some(tau) if n <= EXACT_MAX_DIM => {
                let s: Vec<f64> = sub.signs().iter().map(|s| s.value()).collect();
                Ok(markov_exact(&b, tau, &s))
            }
            _ => genz_lattice(&b, &sub, tol),
        },
    }
}

// Brownian path W observed at times tau[i]; the event is s_i W_i <= c_i with
// c_i = l_i sqrt(tau_i). Conditioning on every third point splits the path
// into independent bridge blocks of at most two points.
struct Bridge<'a> {
    c: Vec<f64>,
    tau: &'a [f64],
    s: &'a [f64],
    pivots: Vec<usize>,
}

const Z_CLIP: f64 = 9.0;

fn markov_exact(limits: &[f64], tau: &[f64], s: &[f64]) -> MvnEstimate {
    let n = limits.len();
    let c = limits.iter().zip(tau).map(|(l, t)| l * sqrt(*t)).collect();
    let pivots = (2..n).step_by(3).collect();
    let bridge = Bridge { c, tau, s, pivots };
    let mut err = 0.0;
    let value = bridge.level(0, None, 0.0, 0.0, &mut err);
    MvnEstimate {
        value: value.clamp(0.0, 1.0),
        error: err,
    }
}

impl Bridge<'_> {
    // Probability that the free points in (left, right) satisfy their
    // constraints given the path values at both anchors.
    fn block(&self, first: usize, last_excl: usize, ta: f64, wa: f64, right: Option<(f64, f64)>) -> f64 {
        let idx: Vec<usize> = (first..last_excl).collect();
        let moments = |i: usize| -> (f64, f64) {
            match right {
                Some((tb, wb)) => {
                    let f = (self.tau[i] - ta) / (tb - ta);
                    (wa + f * (wb - wa), (self.tau[i] - ta) * (tb - self.tau[i]) / (tb - ta))
                }
                None => (wa, self.tau[i] - ta),
            }
        };
        let std_limit = |i: usize, m: f64, v: f64| (self.c[i] - self.s[i] * m) / sqrt(v);
        match idx.len() {
            0 => 1.0,
            1 => {
                let i = idx[0];
                let (m, v) = moments(i);
                cdf(std_limit(i, m, v))
            }
            _ => {
                let (i, j) = (idx[0], idx[1]);
                let (mi, vi) = moments(i);
                let (mj, vj) = moments(j);
                let cov = match right {
                    Some((tb, _)) => (self.tau[i] - ta) * (tb - self.tau[j]) / (tb - ta),
                    None => self.tau[i] - ta,
                };
                let r = self.s[i] * self.s[j] * cov / sqrt(vi * vj);
                bvn_lower(std_limit(i, mi, vi), std_limit(j, mj, vj), r)
            }
        }
    }

    fn level(&self, k: usize, prev: Option<usize>, ta: f64, wa: f64, err: &mut f64) -> f64 {
        let first = prev.map_or(0, |p| p + 1);
        let n = self.c.len();
        if k == self.pivots.len() {
            return self.block(first, n, ta, wa, None);
        }
        let p = self.pivots[k];
        let sd = sqrt(self.tau[p] - ta);
        // s_p (wa + sd z) <= c_p
        let edge = (self.s[p] * self.c[p] - wa) / sd;
        let (lo, hi) = if self.s[p] > 0.0 {
            (-Z_CLIP, edge.min(Z_CLIP))
        } else {
            (edge.max(-Z_CLIP), Z_CLIP)
        };
        if !(hi > lo) {
            return 0.0;
        }
        let tol = if k == 0 { 1e-14 } else { 1e-15 };
        let mut inner_err = 0.0f64;
        let r = adaptive_gk21(
            |z| {
                let w = wa + sd * z;
                let left = self.block(first, p, ta, wa, Some((self.tau[p], w)));
                if left == 0.0 {
                    return 0.0;
                }
                let mut e = 0.0;
                let v = norm_pdf(z) * left * self.level(k + 1, Some(p), self.tau[p], w, &mut e);
                inner_err = inner_err.max(e);
                v
            },
            lo,
            hi,
            tol,
            40,
        );
        *err += r.error + inner_err;
        r.value
    }
}

const PRIMES: [f64; 16] = [
    2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0, 23.0, 29.0, 31.0, 37.0, 41.0, 43.0, 47.0, 53.0,
];

// Genz's separation-of-variables transform with variable prioritisation,
// integrated by a Richtmyer lattice under the baker's transformation.
fn genz_lattice(limits: &[f64], corr: &CorrelationStructure, tol: f64) -> Result<MvnEstimate> {
    let n = limits.len();
    if n > PRIMES.len() + 1 {
        return Err(PricingError::OrderTooLarge {
            order: n,
            max: PRIMES.len() + 1,
        });
    }
    let mut r = corr.rho_matrix().concat();
    let mut b = limits.to_vec();
    let l = prioritised_cholesky(&mut r, &mut b, n)?;

    let gen: Vec<f64> = PRIMES[..n - 1].iter().map(|p| frac(sqrt(*p))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(QMC_SEED);
    let shifts: Vec<Vec<f64>> = (0..QMC_SHIFTS)
        .map(|_| (0..n - 1).map(|_| unit(rng.next_u64())).collect())
        .collect();

    let mut sums = vec![0.0; QMC_SHIFTS];
    let mut done = 0usize;
    let mut target = 1usize << 10;
    let mut y = vec![0.0; n];
    let mut w = vec![0.0; n - 1];
    loop {
        for (sum, shift) in sums.iter_mut().zip(&shifts) {
            for k in done + 1..=target {
                for j in 0..n - 1 {
                    let x = frac(k as f64 * gen[j] + shift[j]);
                    w[j] = 1.0 - abs(2.0 * x - 1.0);
                }
                *sum += separated_integrand(&l, &b, &w, &mut y);
            }
        }
        done = target;
        let means: Vec<f64> = sums.iter().map(|s| s / done as f64).collect();
        let mean = means.iter().sum::<f64>() / QMC_SHIFTS as f64;
        let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>()
            / (QMC_SHIFTS * (QMC_SHIFTS - 1)) as f64;
        let error = 3.0 * sqrt(var);
        if error <= tol || done >= QMC_MAX_POINTS {
            return Ok(MvnEstimate {
                value: mean.clamp(0.0, 1.0),
                error,
            });
        }
        target *= 2;
    }
}

fn separated_integrand(l: &[f64], b: &[f64], w: &[f64], y: &mut [f64]) -> f64 {
    let n = b.len();
    let mut f = 1.0;
    for i in 0..n {
        let shift: f64 = (0..i).map(|j| l[i * n + j] * y[j]).sum();
        let e = cdf((b[i] - shift) / l[i * n + i]);
        f *= e;
        if f == 0.0 {
            return 0.0;
        }
        if i + 1 < n {
            let u = (w[i] * e).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
            y[i] = inv_cdf(u);
        }
    }
    f
}

// Cholesky factorisation that, at each step, moves forward the remaining
// variable with the smallest conditional probability.
fn prioritised_cholesky(r: &mut [f64], b: &mut [f64], n: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut best = i;
        let mut best_p = f64::INFINITY;
        for j in i..n {
            let v = r[j * n + j] - (0..i).map(|k| l[j * n + k] * l[j * n + k]).sum::<f64>();
            if !(v > 1e-14) {
                return Err(PricingError::NotPositiveDefinite);
            }
            let m: f64 = (0..i).map(|k| l[j * n + k] * y[k]).sum();
            let p = cdf((b[j] - m) / sqrt(v));
            if p < best_p {
                best_p = p;
                best = j;
            }
        }
        if best != i {
            swap_var(r, b, &mut l, n, i, best);
        }
        let v = r[i * n + i] - (0..i).map(|k| l[i * n + k] * l[i * n + k]).sum::<f64>();
        let d = sqrt(v);
        l[i * n + i] = d;
        for j in i + 1..n {
            let s = r[j * n + i] - (0..i).map(|k| l[j * n + k] * l[i * n + k]).sum::<f64>();
            l[j * n + i] = s / d;
        }
        // expected value of the truncated coordinate
        let m: f64 = (0..i).map(|k| l[i * n + k] * y[k]).sum();
        let u = (b[i] - m) / d;
        let p = cdf(u);
        y[i] = if p > 1e-300 { -norm_pdf(u) / p } else { u };
    }
    Ok(l)
}

fn swap_var(r: &mut [f64], b: &mut [f64], l: &mut [f64], n: usize, i: usize, j: usize) {
    b.swap(i, j);
    for k in 0..n {
        r.swap(i * n + k, j * n + k);
    }
    for k in 0..n {
        r.swap(k * n + i, k * n + j);
    }
    for k in 0..i {
        l.swap(i * n + k, j * n + k);
    }
}

fn frac(x: f64) -> f64 {
    x - floor(x)
}

fn unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
