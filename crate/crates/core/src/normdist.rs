//! Power normal-distribution options: payoff `X^beta Phi(delta(X^i/K, tau1,
//! tau1p, alpha))`. Pricing one of these over an interval gives another one,
//! which is what makes the discrete Asian recursion closed-form.

use crate::error::{PricingError, Result};
use crate::gaussian::cdf;
use crate::math::{exp, ln, powf, sqrt};
use crate::model::{delta_arg, mu, MarketParams, PriceResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormDistPayoffSpec {
    pub beta: f64,
    pub i: f64,
    pub strike: f64,
    pub alpha: f64,
    pub tau1: f64,
    pub tau1p: f64,
}

impl NormDistPayoffSpec {
    pub fn new(beta: f64, i: f64, strike: f64, alpha: f64, tau1: f64, tau1p: f64) -> Result<Self> {
        for (name, v) in [("beta", beta), ("i", i), ("alpha", alpha), ("tau1", tau1)] {
            if !v.is_finite() {
                return Err(PricingError::invalid(name, "must be finite"));
            }
        }
        if !(strike.is_finite() && strike > 0.0) {
            return Err(PricingError::invalid("strike", "must be finite and > 0"));
        }
        if !(tau1p.is_finite() && tau1p >= 0.0) {
            return Err(PricingError::invalid("tau1p", "must be finite and >= 0"));
        }
        Ok(NormDistPayoffSpec {
            beta,
            i,
            strike,
            alpha,
            tau1,
            tau1p,
        })
    }
}

/// Payoff at expiry. Needs `tau1p > 0`.
pub fn normdist_payoff(x: f64, spec: &NormDistPayoffSpec, params: &MarketParams) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(PricingError::invalid("x", "spot must be finite and > 0"));
    }
    let y = powf(x, spec.i) / spec.strike;
    let y = if y > 0.0 && y.is_finite() {
        y
    } else {
        // X^i over/underflowed; go through logs
        return payoff_via_log(x, spec, params);
    };
    let d = delta_arg(y, spec.tau1, spec.tau1p, spec.alpha, params)?;
    Ok(powf(x, spec.beta) * cdf(d))
}

fn payoff_via_log(x: f64, spec: &NormDistPayoffSpec, params: &MarketParams) -> Result<f64> {
    if spec.tau1p == 0.0 {
        return Err(PricingError::DegenerateVariance);
    }
    let drift = params.log_drift() + spec.alpha * params.variance_rate();
    let d = (spec.i * ln(x) - ln(spec.strike) + drift * spec.tau1) / (params.sigma() * sqrt(spec.tau1p));
    Ok(powf(x, spec.beta) * cdf(d))
}

/// `V = X^beta e^{mu(beta) tau} Phi(d1)` with
/// `d1 = [ln(X^i/K) + (r - q - sigma^2/2)(i tau + tau1) + sigma^2 (i beta tau + alpha tau1)]
///       / (sigma sqrt(i^2 tau + tau1p))`.
pub fn normdist_price(
    x: f64,
    tau: f64,
    spec: &NormDistPayoffSpec,
    params: &MarketParams,
) -> Result<PriceResult> {
    if !(x.is_finite() && x > 0.0) {
        return Err(PricingError::invalid("x", "spot must be finite and > 0"));
    }
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(PricingError::invalid("tau", "must be finite and >= 0"));
    }
    if tau == 0.0 {
        return Ok(PriceResult::new(normdist_payoff(x, spec, params)?));
    }
    let i = spec.i;
    let var_time = i * i * tau + spec.tau1p;
    if var_time <= 0.0 {
        return Err(PricingError::DegenerateVariance);
    }
    let sigma = params.sigma();
    let num = i * ln(x) - ln(spec.strike)
        + params.log_drift() * (i * tau + spec.tau1)
        + params.variance_rate() * (i * spec.beta * tau + spec.alpha * spec.tau1);
    let d1 = num / (sigma * sqrt(var_time));
    let m = mu(params, spec.beta);
    let value = powf(x, spec.beta) * exp(m * tau) * cdf(d1);
    Ok(PriceResult::new(value)
        .with("mu", m)
        .with("d1", d1)
        .with("theta", m * tau)
        .with("theta_leg", value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binaries::{power_binary_price, PowerBinarySpec};
    use crate::model::SignIndicator;

    #[test]
    fn zero_inner_horizon_is_a_power_binary() {
        let p = MarketParams::new(0.04, 0.01, 0.3).unwrap();
        // i = 1, K = xi, beta = alpha: Phi(d) with d at exponent beta
        let spec = NormDistPayoffSpec::new(1.5, 1.0, 95.0, 0.7, 0.0, 0.0).unwrap();
        let v = normdist_price(100.0, 0.8, &spec, &p).unwrap().value;
        let b = PowerBinarySpec::first_order(1.5, 95.0, SignIndicator::Up, 0.8).unwrap();
        let w = power_binary_price(100.0, 0.0, &b, &p).unwrap().value;
        assert!((v - w).abs() < 1e-12 * w);
    }

    #[test]
    fn expiry_returns_the_payoff() {
        let p = MarketParams::new(0.05, 0.01, 0.2).unwrap();
        let spec = NormDistPayoffSpec::new(0.5, 2.0, 1e4, 0.25, 0.5, 0.3).unwrap();
        let v = normdist_price(100.0, 0.0, &spec, &p).unwrap().value;
        let d = delta_arg(1.0, 0.5, 0.3, 0.25, &p).unwrap();
        assert_eq!(v, 10.0 * cdf(d));
        let flat = NormDistPayoffSpec::new(0.5, 2.0, 1e4, 0.25, 0.5, 0.0).unwrap();
        assert_eq!(normdist_price(100.0, 0.0, &flat, &p), Err(PricingError::DegenerateVariance));
        // tau1p = 0 is fine once the asset itself diffuses
        assert!(normdist_price(100.0, 0.1, &flat, &p).is_ok());
        let none = NormDistPayoffSpec::new(0.5, 0.0, 1.0, 0.25, 0.5, 0.0).unwrap();
        assert_eq!(normdist_price(100.0, 0.1, &none, &p), Err(PricingError::DegenerateVariance));
    }

    #[test]
    fn numerator_is_affine_in_tau() {
        let p = MarketParams::new(0.05, 0.01, 0.2).unwrap();
        let spec = NormDistPayoffSpec::new(0.5, 2.0, 1e4, 0.25, 0.5, 0.3).unwrap();
        let num = |tau: f64| {
            let d = normdist_price(100.0, tau, &spec, &p).unwrap().get("d1").unwrap();
            d * p.sigma() * (spec.i * spec.i * tau + spec.tau1p).sqrt()
        };
        let slope = spec.i * (p.log_drift() + spec.beta * p.variance_rate());
        for (a, b) in [(0.1, 0.4), (0.4, 1.3)] {
            assert!(((num(b) - num(a)) / (b - a) - slope).abs() < 1e-12);
        }
    }
}
