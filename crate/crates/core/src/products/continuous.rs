//! Continuously averaged geometric Asians. `J` is the running geometric
//! average `exp((1/t) int_0^t ln X ds)`.

use crate::error::{PricingError, Result};
use crate::gaussian::cdf;
use crate::math::{exp, ln, sqrt};
use crate::model::{MarketParams, PriceResult};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsianState {
    pub j: f64,
    pub t: f64,
}

impl AsianState {
    pub fn new(j: f64, t: f64) -> Result<Self> {
        if !(j.is_finite() && j > 0.0) {
            return Err(PricingError::invalid("j", "running average must be finite and > 0"));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(PricingError::invalid("t", "must be finite and >= 0"));
        }
        Ok(AsianState { j, t })
    }

    /// State at the start of the averaging window, where `J` carries no weight.
    pub fn start() -> Self {
        AsianState { j: 1.0, t: 0.0 }
    }
}

fn check(x: f64, state: &AsianState, maturity: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(PricingError::invalid("x", "spot must be finite and > 0"));
    }
    if !(maturity.is_finite() && maturity > 0.0) {
        return Err(PricingError::invalid("maturity", "must be finite and > 0"));
    }
    if state.t > maturity {
        return Err(PricingError::PastExpiry);
    }
    Ok(())
}

/// Fixed-strike call `(J_T - K)^+`.
pub fn continuous_geo_asian_fixed_price(
    x: f64,
    state: &AsianState,
    strike: f64,
    maturity: f64,
    params: &MarketParams,
) -> Result<PriceResult> {
    check(x, state, maturity)?;
    if !(strike.is_finite() && strike > 0.0) {
        return Err(PricingError::invalid("strike", "must be finite and > 0"));
    }
    let (t, big_t) = (state.t, maturity);
    if t == big_t {
        return Ok(PriceResult::new((state.j - strike).max(0.0)));
    }
    let tau = big_t - t;
    let r_star = params.log_drift() * tau / (2.0 * big_t);
    let s_star = params.sigma() * tau / (SQRT_3 * big_t);
    let log_avg = (t * ln(state.j) + tau * ln(x)) / big_t;
    let d1 = (log_avg - ln(strike) + (r_star + s_star * s_star) * tau) / (s_star * sqrt(tau));
    let d2 = d1 - s_star * sqrt(tau);
    let disc = exp(-params.r() * tau);
    let growth = log_avg + (r_star + 0.5 * s_star * s_star) * tau;
    let average_leg = disc * exp(growth) * cdf(d1);
    let value = average_leg - disc * strike * cdf(d2);
    Ok(PriceResult::new(value)
        .with("r_star", r_star)
        .with("sigma_star", s_star)
        .with("d1", d1)
        .with("d2", d2)
        .with("theta", -params.r() * tau + (r_star + 0.5 * s_star * s_star) * tau)
        .with("theta_leg", average_leg))
}

/// Readings of the printed continuous floating-strike formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContinuousFloatingReading {
    pub sigma_power: SigmaPower,
    pub drift: DriftSign,
}

/// Power of sigma in the variance correction of the averaging-leg argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaPower {
    Two,
    Three,
}

/// Sign of `sigma^2/2` in the drift `r - q +- sigma^2/2` of the arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftSign {
    Plus,
    Minus,
}

impl Default for ContinuousFloatingReading {
    fn default() -> Self {
        ContinuousFloatingReading {
            sigma_power: SigmaPower::Two,
            drift: DriftSign::Plus,
        }
    }
}

/// Floating-strike call `(X_T - J_T)^+`.
pub fn continuous_geo_asian_floating_price(
    x: f64,
    state: &AsianState,
    maturity: f64,
    params: &MarketParams,
) -> Result<PriceResult> {
    continuous_geo_asian_floating_price_with(x, state, maturity, params, ContinuousFloatingReading::default())
}

pub fn continuous_geo_asian_floating_price_with(
    x: f64,
    state: &AsianState,
    maturity: f64,
    params: &MarketParams,
    reading: ContinuousFloatingReading,
) -> Result<PriceResult> {
    check(x, state, maturity)?;
    let (t, big_t) = (state.t, maturity);
    if t == big_t {
        return Ok(PriceResult::new((x - state.j).max(0.0)));
    }
    let (r, q, sigma) = (params.r(), params.q(), params.sigma());
    let s2 = sigma * sigma;
    let drift = match reading.drift {
        DriftSign::Plus => r - q + 0.5 * s2,
        DriftSign::Minus => r - q - 0.5 * s2,
    };
    let cube = big_t * big_t * big_t - t * t * t;
    let square = big_t * big_t - t * t;
    let scale = SQRT_3 / (sigma * sqrt(cube));
    let core = t * ln(x / state.j) + drift * square / 2.0;
    let correction = match reading.sigma_power {
        SigmaPower::Two => s2,
        SigmaPower::Three => s2 * sigma,
    } * cube
        / (3.0 * big_t);
    let d2 = scale * core;
    let d1 = scale * (core - correction);
    let theta = -q * (big_t - t) - (r - q + 0.5 * s2) * square / (2.0 * big_t) + s2 * cube / (6.0 * big_t * big_t);
    let spot_leg = exp(-q * (big_t - t)) * x * cdf(d2);
    let average_leg = exp((t * ln(state.j) + (big_t - t) * ln(x)) / big_t + theta) * cdf(d1);
    Ok(PriceResult::new(spot_leg - average_leg)
        .with("d1", d1)
        .with("d2", d2)
        .with("theta", theta)
        .with("theta_leg", -average_leg))
}
