//! Domain types shared by every pricer, plus the growth exponent `mu` and the
//! normal-argument builders used by all of the closed forms.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{PricingError, Result};
use crate::math::{ln, sqrt};

/// Constant Black-Scholes coefficients: risk-free rate, dividend yield and
/// volatility (all per year, volatility per square-root year).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    r: f64,
    q: f64,
    sigma: f64,
}

impl MarketParams {
    /// Negative rates are allowed; zero volatility is not.
    pub fn new(r: f64, q: f64, sigma: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(PricingError::invalid("r", "must be finite"));
        }
        if !q.is_finite() {
            return Err(PricingError::invalid("q", "must be finite"));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(PricingError::invalid("sigma", "must be finite and > 0"));
        }
        Ok(MarketParams { r, q, sigma })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn variance_rate(&self) -> f64 {
        self.sigma * self.sigma
    }

    /// Drift of `ln X` under the pricing measure, `r - q - sigma^2 / 2`.
    pub fn log_drift(&self) -> f64 {
        self.r - self.q - 0.5 * self.sigma * self.sigma
    }
}

/// Valuation time and expiry, in year fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horizon {
    t: f64,
    expiry: f64,
}

impl Horizon {
    pub fn new(t: f64, expiry: f64) -> Result<Self> {
        if !(t.is_finite() && expiry.is_finite()) {
            return Err(PricingError::invalid("t", "times must be finite"));
        }
        if t < 0.0 {
            return Err(PricingError::invalid("t", "must be >= 0"));
        }
        if t > expiry {
            return Err(PricingError::PastExpiry);
        }
        Ok(Horizon { t, expiry })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn expiry(&self) -> f64 {
        self.expiry
    }

    pub fn tau(&self) -> f64 {
        self.expiry - self.t
    }

    pub fn at_expiry(&self) -> bool {
        self.t == self.expiry
    }
}

/// Strictly increasing monitoring dates `T_1 < ... < T_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitoringSchedule {
    times: Vec<f64>,
}

impl MonitoringSchedule {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(PricingError::invalid("schedule", "must not be empty"));
        }
        if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(PricingError::invalid("schedule", "times must be finite and >= 0"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PricingError::invalid("schedule", "times must be strictly increasing"));
        }
        Ok(MonitoringSchedule { times })
    }

    /// `n` dates equally spaced on `[0, maturity]`, both ends included.
    pub fn equally_spaced(n: usize, maturity: f64) -> Result<Self> {
        if n < 2 {
            return Err(PricingError::invalid("schedule", "need at least two dates"));
        }
        if !(maturity.is_finite() && maturity > 0.0) {
            return Err(PricingError::invalid("maturity", "must be > 0"));
        }
        let step = maturity / (n - 1) as f64;
        let mut times: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
        times[n - 1] = maturity;
        Self::new(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Number of dates at or before `t` (right-continuous fixing convention).
    pub fn observed_by(&self, t: f64) -> usize {
        self.times.iter().take_while(|&&ti| ti <= t).count()
    }
}

/// Asset prices already fixed on the first `m` monitoring dates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FixedObservations {
    fixings: Vec<f64>,
}

impl FixedObservations {
    pub fn new(fixings: Vec<f64>) -> Result<Self> {
        if fixings.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(PricingError::invalid("fixings", "all fixings must be > 0"));
        }
        Ok(FixedObservations { fixings })
    }

    pub fn none() -> Self {
        FixedObservations::default()
    }

    pub fn values(&self) -> &[f64] {
        &self.fixings
    }

    pub fn len(&self) -> usize {
        self.fixings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fixings.is_empty()
    }

    pub fn log_sum(&self) -> f64 {
        self.fixings.iter().map(|x| ln(*x)).sum()
    }
}

/// Selects the upper (`x > xi`) or lower (`x < xi`) branch of a binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignIndicator {
    Up,
    Down,
}

impl SignIndicator {
    pub fn value(self) -> f64 {
        match self {
            SignIndicator::Up => 1.0,
            SignIndicator::Down => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            SignIndicator::Up => SignIndicator::Down,
            SignIndicator::Down => SignIndicator::Up,
        }
    }

    /// `1(s x > s xi)`. The boundary `x = xi` pays zero.
    pub fn indicator(self, x: f64, xi: f64) -> f64 {
        let s = self.value();
        if s * x > s * xi {
            1.0
        } else {
            0.0
        }
    }
}

impl core::ops::Mul for SignIndicator {
    type Output = SignIndicator;

    fn mul(self, rhs: SignIndicator) -> SignIndicator {
        if self == rhs {
            SignIndicator::Up
        } else {
            SignIndicator::Down
        }
    }
}

/// A price together with the intermediate quantities that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceResult {
    pub value: f64,
    pub diagnostics: Vec<(String, f64)>,
    /// Standard error, reported by the Monte Carlo oracle only.
    pub stderr: Option<f64>,
}

impl PriceResult {
    pub fn new(value: f64) -> Self {
        PriceResult {
            value,
            diagnostics: Vec::new(),
            stderr: None,
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.diagnostics.push((String::from(name), value));
        self
    }

    pub fn push(&mut self, name: &str, value: f64) {
        self.diagnostics.push((String::from(name), value));
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.diagnostics
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| *v)
    }
}

/// Growth exponent of the standard `alpha`-power option:
/// `(alpha - 1) r - alpha q + sigma^2 / 2 (alpha^2 - alpha)`.
pub fn mu(params: &MarketParams, alpha: f64) -> f64 {
    (alpha - 1.0) * params.r - alpha * params.q
        + 0.5 * params.sigma * params.sigma * (alpha * alpha - alpha)
}

/// `[ln(x/xi) + (r - q - sigma^2/2 + alpha sigma^2) tau] / (sigma sqrt(tau))`.
pub fn d_arg(x_over_xi: f64, params: &MarketParams, alpha: f64, tau: f64) -> Result<f64> {
    if !(x_over_xi > 0.0) {
        return Err(PricingError::invalid("x/xi", "must be > 0"));
    }
    if tau == 0.0 {
        return Err(PricingError::DegenerateHorizon);
    }
    if !(tau > 0.0) {
        return Err(PricingError::invalid("tau", "must be > 0"));
    }
    let drift = params.log_drift() + alpha * params.variance_rate();
    Ok((ln(x_over_xi) + drift * tau) / (params.sigma * sqrt(tau)))
}

/// Two-time variant of [`d_arg`]: `tau1` multiplies the drift, `tau1p` sets the
/// scale `sigma sqrt(tau1p)`.
pub fn delta_arg(
    y: f64,
    tau1: f64,
    tau1p: f64,
    alpha: f64,
    params: &MarketParams,
) -> Result<f64> {
    if !(y > 0.0) {
        return Err(PricingError::invalid("y", "must be > 0"));
    }
    if tau1p == 0.0 {
        return Err(PricingError::DegenerateVariance);
    }
    if !(tau1p > 0.0) {
        return Err(PricingError::invalid("tau1p", "must be > 0"));
    }
    let drift = params.log_drift() + alpha * params.variance_rate();
    Ok((ln(y) + drift * tau1) / (params.sigma * sqrt(tau1p)))
}
