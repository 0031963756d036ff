//! `V(x, t) = e^{-r tau} int phi(u) payoff(x e^{(r - q - sigma^2/2) tau + sigma sqrt(tau) u}) du`,
//! evaluated with composite Gauss-Legendre panels split at the payoff's
//! kinks and jumps, doubling the panel count until two successive estimates
//! agree. Path-dependent payoffs are handled by nesting the same integral
//! backward through the observation dates.

use alloc::vec;
use alloc::vec::Vec;

use crate::binaries::PowerBinarySpec;
use crate::contract::ContractSpec;
use crate::error::{PricingError, Result};
use crate::gaussian::norm_pdf;
use crate::math::{abs, exp, ln, powf, sqrt};
use crate::model::{FixedObservations, MarketParams, PriceResult};
use crate::normdist::normdist_payoff;
use crate::quad::gauss_legendre;

pub const MAX_NESTING: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub max_refinements: u32,
    /// Truncation of the standardised log-price, in standard deviations.
    pub half_width: f64,
}

impl QuadratureConfig {
    pub fn new(rel_tol: f64, max_refinements: u32, half_width: f64) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(PricingError::invalid("rel_tol", "must be > 0"));
        }
        if !(half_width >= 8.0 && half_width.is_finite()) {
            return Err(PricingError::invalid("half_width", "must be >= 8"));
        }
        Ok(QuadratureConfig {
            rel_tol,
            max_refinements,
            half_width,
        })
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-10,
            max_refinements: 14,
            half_width: 10.0,
        }
    }
}

const NODES: usize = 16;

struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
}

impl Rule {
    fn new() -> Self {
        let (x, w) = gauss_legendre(NODES);
        Rule { x, w }
    }
}

struct Kernel {
    ln_x: f64,
    drift: f64,
    sd: f64,
    discount: f64,
}

impl Kernel {
    fn new(x: f64, tau: f64, params: &MarketParams) -> Result<Self> {
        if !(x.is_finite() && x > 0.0) {
            return Err(PricingError::invalid("x", "spot must be finite and > 0"));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(PricingError::invalid("tau", "must be finite and > 0"));
        }
        Ok(Kernel {
            ln_x: ln(x),
            drift: params.log_drift() * tau,
            sd: params.sigma() * sqrt(tau),
            discount: exp(-params.r() * tau),
        })
    }

    fn terminal(&self, u: f64) -> f64 {
        exp(self.ln_x + self.drift + self.sd * u)
    }

    fn standardise(&self, z: f64) -> f64 {
        (ln(z) - self.ln_x - self.drift) / self.sd
    }
}

// One adaptive integral over u in [-h, h]. `f` receives the terminal price.
fn integrate(
    kernel: &Kernel,
    breakpoints: &[f64],
    rule: &Rule,
    rel_tol: f64,
    cfg: &QuadratureConfig,
    f: &mut dyn FnMut(f64) -> Result<f64>,
    nodes: &mut usize,
) -> Result<f64> {
    let h = cfg.half_width;
    let mut edges = vec![-h];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .filter(|z| z.is_finite() && **z > 0.0)
        .map(|z| kernel.standardise(*z))
        .filter(|u| *u > -h && *u < h)
        .collect();
    inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.extend(inner);
    edges.push(h);

    let mut estimate = |panels: usize, nodes: &mut usize| -> Result<(f64, f64)> {
        let (mut sum, mut l1) = (0.0, 0.0);
        for seg in edges.windows(2) {
            let width = (seg[1] - seg[0]) / panels as f64;
            if width <= 0.0 {
                continue;
            }
            for p in 0..panels {
                let a = seg[0] + p as f64 * width;
                let half = 0.5 * width;
                let mid = a + half;
                for (xi, wi) in rule.x.iter().zip(&rule.w) {
                    let u = mid + half * xi;
                    let v = norm_pdf(u) * f(kernel.terminal(u))?;
                    sum += half * wi * v;
                    l1 += half * wi * abs(v);
                }
                *nodes += NODES;
            }
        }
        Ok((sum, l1))
    };

    let mut panels = 2;
    let (mut last, _) = estimate(panels, nodes)?;
    let mut previous = f64::NAN;
    for _ in 0..cfg.max_refinements {
        panels *= 2;
        let (next, l1) = estimate(panels, nodes)?;
        if abs(next - last) <= rel_tol * l1 || next == last {
            return Ok(kernel.discount * next);
        }
        previous = last;
        last = next;
    }
    Err(PricingError::NotConverged {
        last: kernel.discount * last,
        previous: kernel.discount * previous,
    })
}

/// Price of a European payoff on the terminal price. `breakpoints` lists the
/// terminal prices where the payoff jumps or kinks.
pub fn greens_price<F: Fn(f64) -> f64>(
    payoff: F,
    breakpoints: &[f64],
    x: f64,
    tau: f64,
    params: &MarketParams,
    cfg: &QuadratureConfig,
) -> Result<PriceResult> {
    let kernel = Kernel::new(x, tau, params)?;
    let rule = Rule::new();
    let mut nodes = 0usize;
    let value = integrate(&kernel, breakpoints, &rule, cfg.rel_tol, cfg, &mut |z| Ok(payoff(z)), &mut nodes)?;
    Ok(PriceResult::new(value).with("nodes", nodes as f64))
}

/// A payoff observed on a finite set of dates after the valuation time.
pub trait PathPayoff {
    /// Observation dates, strictly increasing and after the valuation time.
    fn dates(&self) -> &[f64];
    /// Multiplicative factor contributed at `level` given the observed
    /// `path[0..=level]`. Intermediate levels act as gates; the last level
    /// is the payoff.
    fn factor(&self, level: usize, path: &[f64]) -> f64;
    /// Terminal prices at `level` where the factor (or the value of what
    /// follows) is not smooth, given `prefix = path[0..level]`.
    fn breakpoints(&self, level: usize, prefix: &[f64]) -> Vec<f64>;
}

struct Nest<'a> {
    payoff: &'a dyn PathPayoff,
    params: &'a MarketParams,
    cfg: &'a QuadratureConfig,
    rule: Rule,
}

impl Nest<'_> {
    fn value(&self, level: usize, t: f64, x: f64, path: &mut Vec<f64>, nodes: &mut usize) -> Result<f64> {
        let dates = self.payoff.dates();
        let kernel = Kernel::new(x, dates[level] - t, self.params)?;
        let breaks = self.payoff.breakpoints(level, path);
        let last = level + 1 == dates.len();
        // inner integrals are resolved more tightly than the outer one
        let tol = self.cfg.rel_tol * powf(0.1, level as f64);
        let mut inner_nodes = 0usize;
        let mut f = |z: f64| -> Result<f64> {
            path.push(z);
            let g = self.payoff.factor(level, path);
            let out = if g == 0.0 || last {
                Ok(g)
            } else {
                self.value(level + 1, dates[level], z, path, &mut inner_nodes)
                    .map(|v| g * v)
            };
            path.pop();
            out
        };
        let v = integrate(&kernel, &breaks, &self.rule, tol, self.cfg, &mut f, nodes)?;
        *nodes += inner_nodes;
        Ok(v)
    }
}

/// Backward composition of [`greens_price`] through the payoff's dates.
pub fn nested_greens_price(
    payoff: &dyn PathPayoff,
    x: f64,
    t: f64,
    params: &MarketParams,
    cfg: &QuadratureConfig,
) -> Result<PriceResult> {
    let dates = payoff.dates();
    if dates.is_empty() {
        return Err(PricingError::invalid("dates", "no observation dates"));
    }
    if dates.len() > MAX_NESTING {
        return Err(PricingError::NestingTooDeep {
            depth: dates.len(),
            max: MAX_NESTING,
        });
    }
    if !(dates[0] > t) || dates.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PricingError::invalid("dates", "must be increasing and after t"));
    }
    let nest = Nest {
        payoff,
        params,
        cfg,
        rule: Rule::new(),
    };
    let mut nodes = 0usize;
    let mut path = Vec::with_capacity(dates.len());
    let value = nest.value(0, t, x, &mut path, &mut nodes)?;
    Ok(PriceResult::new(value).with("nodes", nodes as f64))
}

/// Chain of binary gates with `x^alpha` at the end.
pub struct BinaryChain<'a> {
    pub spec: &'a PowerBinarySpec,
}

impl PathPayoff for BinaryChain<'_> {
    fn dates(&self) -> &[f64] {
        self.spec.expiries()
    }

    fn factor(&self, level: usize, path: &[f64]) -> f64 {
        let z = path[level];
        let gate = self.spec.signs()[level].indicator(z, self.spec.thresholds()[level]);
        if level + 1 == self.spec.order() {
            gate * powf(z, self.spec.alpha())
        } else {
            gate
        }
    }

    fn breakpoints(&self, level: usize, _prefix: &[f64]) -> Vec<f64> {
        vec![self.spec.thresholds()[level]]
    }
}

/// Geometric average of the known fixings and the observations at `dates`.
pub struct GeometricAverage<'a> {
    pub dates: &'a [f64],
    pub fixings: &'a FixedObservations,
    /// `Some(K)` for `(G - K)^+`, `None` for `(X_T - G)^+`.
    pub strike: Option<f64>,
}

impl GeometricAverage<'_> {
    fn n(&self) -> f64 {
        (self.dates.len() + self.fixings.len()) as f64
    }
}

impl PathPayoff for GeometricAverage<'_> {
    fn dates(&self) -> &[f64] {
        self.dates
    }

    fn factor(&self, level: usize, path: &[f64]) -> f64 {
        if level + 1 < self.dates.len() {
            return 1.0;
        }
        let log_sum = self.fixings.log_sum() + path.iter().map(|z| ln(*z)).sum::<f64>();
        let g = exp(log_sum / self.n());
        match self.strike {
            Some(k) => (g - k).max(0.0),
            None => (path[level] - g).max(0.0),
        }
    }

    fn breakpoints(&self, level: usize, prefix: &[f64]) -> Vec<f64> {
        if level + 1 < self.dates.len() {
            return Vec::new();
        }
        let known = self.fixings.log_sum() + prefix.iter().map(|z| ln(*z)).sum::<f64>();
        let n = self.n();
        match self.strike {
            Some(k) => vec![exp(n * ln(k) - known)],
            None => vec![exp(known / (n - 1.0))],
        }
    }
}

/// Quadrature price of any contract whose payoff is observed on at most
/// [`MAX_NESTING`] dates.
pub fn quad_price(contract: &ContractSpec, x: f64, t: f64, cfg: &QuadratureConfig) -> Result<PriceResult> {
    let params = contract.dynamics();
    let expiry = contract.expiry();
    if t > expiry {
        return Err(PricingError::PastExpiry);
    }
    match contract {
        ContractSpec::PowerStandard { alpha, .. } => {
            let a = *alpha;
            greens_price(|z| powf(z, a), &[], x, expiry - t, &params, cfg)
        }
        ContractSpec::PowerBinary { spec, .. } | ContractSpec::NthBinary { spec, .. } => {
            if spec.expiries().iter().any(|e| *e <= t) {
                return Err(PricingError::Unsupported("quadrature needs every expiry after t"));
            }
            nested_greens_price(&BinaryChain { spec }, x, t, &params, cfg)
        }
        ContractSpec::NormDist { spec, .. } => {
            let s = *spec;
            let p = params;
            greens_price(
                |z| normdist_payoff(z, &s, &p).unwrap_or(f64::NAN),
                &[],
                x,
                expiry - t,
                &params,
                cfg,
            )
        }
        ContractSpec::SavingsPlan { spec } => {
            let s = *spec;
            greens_price(|z| s.payoff(z), &[s.strike()], x, expiry - t, &params, cfg)
        }
        ContractSpec::GeoAsianFixed { spec, .. } => {
            let m = spec.schedule.observed_by(t);
            if m != spec.fixings.len() {
                return Err(PricingError::FixingCount {
                    expected: m,
                    found: spec.fixings.len(),
                });
            }
            let payoff = GeometricAverage {
                dates: &spec.schedule.times()[m..],
                fixings: &spec.fixings,
                strike: Some(spec.strike),
            };
            nested_greens_price(&payoff, x, t, &params, cfg)
        }
        ContractSpec::GeoAsianFloating { spec, .. } => {
            let m = spec.schedule.observed_by(t);
            if m != spec.fixings.len() {
                return Err(PricingError::FixingCount {
                    expected: m,
                    found: spec.fixings.len(),
                });
            }
            let payoff = GeometricAverage {
                dates: &spec.schedule.times()[m..],
                fixings: &spec.fixings,
                strike: None,
            };
            nested_greens_price(&payoff, x, t, &params, cfg)
        }
        ContractSpec::ContAsianFixed { .. } | ContractSpec::ContAsianFloating { .. } => Err(
            PricingError::Unsupported("continuously averaged payoffs have no finite-date quadrature"),
        ),
    }
}
