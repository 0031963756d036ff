//! Power standard options, first-order power binaries, the generalised
//! binary condition and higher-order (compound) power binaries.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{PricingError, Result};
use crate::gaussian::{bvn_lower, cdf, markov_correlation, mvn_cdf};
use crate::math::{exp, powf, sign_of, sqrt};
use crate::model::{d_arg, mu, MarketParams, PriceResult, SignIndicator};

pub const MAX_ORDER: usize = 16;

/// Chain of binary conditions `1(s_i x(T_i) > s_i xi_i)` on a payoff `x^alpha`
/// paid at the last expiry.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerBinarySpec {
    alpha: f64,
    thresholds: Vec<f64>,
    signs: Vec<SignIndicator>,
    expiries: Vec<f64>,
}

impl PowerBinarySpec {
    pub fn new(
        alpha: f64,
        thresholds: Vec<f64>,
        signs: Vec<SignIndicator>,
        expiries: Vec<f64>,
    ) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(PricingError::invalid("alpha", "must be finite"));
        }
        let n = thresholds.len();
        if n == 0 {
            return Err(PricingError::invalid("thresholds", "order must be >= 1"));
        }
        if n > MAX_ORDER {
            return Err(PricingError::OrderTooLarge { order: n, max: MAX_ORDER });
        }
        if signs.len() != n || expiries.len() != n {
            return Err(PricingError::invalid("signs", "thresholds, signs and expiries differ in length"));
        }
        if thresholds.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(PricingError::invalid("thresholds", "must be finite and > 0"));
        }
        if expiries.iter().any(|x| !x.is_finite()) {
            return Err(PricingError::invalid("expiries", "must be finite"));
        }
        if expiries.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PricingError::invalid("expiries", "must be strictly increasing"));
        }
        Ok(PowerBinarySpec {
            alpha,
            thresholds,
            signs,
            expiries,
        })
    }

    pub fn first_order(alpha: f64, xi: f64, sign: SignIndicator, expiry: f64) -> Result<Self> {
        Self::new(alpha, alloc::vec![xi], alloc::vec![sign], alloc::vec![expiry])
    }

    pub fn order(&self) -> usize {
        self.thresholds.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn signs(&self) -> &[SignIndicator] {
        &self.signs
    }

    pub fn expiries(&self) -> &[f64] {
        &self.expiries
    }

    /// Final payment date.
    pub fn expiry(&self) -> f64 {
        self.expiries[self.expiries.len() - 1]
    }

    /// The spec with the first condition removed, or `None` at order 1.
    pub fn tail(&self) -> Option<PowerBinarySpec> {
        if self.order() == 1 {
            return None;
        }
        Some(PowerBinarySpec {
            alpha: self.alpha,
            thresholds: self.thresholds[1..].to_vec(),
            signs: self.signs[1..].to_vec(),
            expiries: self.expiries[1..].to_vec(),
        })
    }

    pub fn with_sign(&self, i: usize, s: SignIndicator) -> PowerBinarySpec {
        let mut out = self.clone();
        out.signs[i] = s;
        out
    }

    /// Payoff along a path observed at the expiries.
    pub fn payoff(&self, path: &[f64]) -> f64 {
        let mut gate = 1.0;
        for ((x, xi), s) in path.iter().zip(&self.thresholds).zip(&self.signs) {
            gate *= s.indicator(*x, *xi);
        }
        if gate == 0.0 {
            0.0
        } else {
            powf(path[path.len() - 1], self.alpha)
        }
    }
}

/// Condition `1(s x^beta > s xi)` on the payoff `x^alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralBinaryCondition {
    beta: f64,
    xi: f64,
    s: SignIndicator,
}

impl GeneralBinaryCondition {
    pub fn new(beta: f64, xi: f64, s: SignIndicator) -> Result<Self> {
        if !beta.is_finite() {
            return Err(PricingError::invalid("beta", "must be finite"));
        }
        if !(xi.is_finite() && xi > 0.0) {
            return Err(PricingError::invalid("xi", "must be finite and > 0"));
        }
        Ok(GeneralBinaryCondition { beta, xi, s })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn sign(&self) -> SignIndicator {
        self.s
    }

    pub fn holds(&self, x: f64) -> bool {
        self.s.indicator(powf(x, self.beta), self.xi) > 0.0
    }
}

fn check_spot(x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(PricingError::invalid("x", "spot must be finite and > 0"));
    }
    Ok(())
}

/// `e^{mu(alpha)(T - t)} x^alpha`.
pub fn power_standard_price(
    x: f64,
    t: f64,
    expiry: f64,
    alpha: f64,
    params: &MarketParams,
) -> Result<PriceResult> {
    check_spot(x)?;
    if !(t.is_finite() && expiry.is_finite()) {
        return Err(PricingError::invalid("t", "must be finite"));
    }
    if t > expiry {
        return Err(PricingError::PastExpiry);
    }
    let m = mu(params, alpha);
    let tau = expiry - t;
    let value = if tau == 0.0 {
        powf(x, alpha)
    } else {
        exp(m * tau) * powf(x, alpha)
    };
    Ok(PriceResult::new(value)
        .with("mu", m)
        .with("theta", m * tau)
        .with("theta_leg", value))
}

/// First-order binary `e^{mu(T - t)} x^alpha Phi(s d)`.
pub fn power_binary_price(
    x: f64,
    t: f64,
    spec: &PowerBinarySpec,
    params: &MarketParams,
) -> Result<PriceResult> {
    if spec.order() != 1 {
        return Err(PricingError::invalid("spec", "first-order binary expected"));
    }
    check_spot(x)?;
    let expiry = spec.expiry();
    if t > expiry {
        return Err(PricingError::PastExpiry);
    }
    let alpha = spec.alpha;
    let m = mu(params, alpha);
    if t == expiry {
        let v = spec.signs[0].indicator(x, spec.thresholds[0]) * powf(x, alpha);
        return Ok(PriceResult::new(v).with("mu", m));
    }
    let tau = expiry - t;
    let d = d_arg(x / spec.thresholds[0], params, alpha, tau)?;
    let s = spec.signs[0].value();
    let value = exp(m * tau) * powf(x, alpha) * cdf(s * d);
    Ok(PriceResult::new(value)
        .with("mu", m)
        .with("d", d)
        .with("theta", m * tau)
        .with("theta_leg", value))
}

/// Rewrites `1(s x^beta > s xi)` as `1(s' x > s' zeta)` with
/// `s' = s sgn(beta)` and `zeta = xi^{1/beta}`.
pub fn reduce_general_condition(
    alpha: f64,
    cond: &GeneralBinaryCondition,
    expiry: f64,
) -> Result<PowerBinarySpec> {
    if cond.beta == 0.0 {
        return Err(PricingError::ConstantCondition);
    }
    let s = if sign_of(cond.beta) > 0.0 {
        cond.s
    } else {
        cond.s.flipped()
    };
    let zeta = powf(cond.xi, 1.0 / cond.beta);
    PowerBinarySpec::first_order(alpha, zeta, s, expiry)
}

// Resolves conditions whose date coincides with the valuation time. Returns
// the remaining spec, or the already-determined value.
fn settle_at(x: f64, t: f64, spec: &PowerBinarySpec) -> Result<core::result::Result<PowerBinarySpec, f64>> {
    let mut cur = spec.clone();
    loop {
        if t < cur.expiries[0] {
            return Ok(Ok(cur));
        }
        if t > cur.expiries[0] {
            return Err(PricingError::PastExpiry);
        }
        if cur.signs[0].indicator(x, cur.thresholds[0]) == 0.0 {
            return Ok(Err(0.0));
        }
        match cur.tail() {
            Some(next) => cur = next,
            None => return Ok(Err(powf(x, cur.alpha))),
        }
    }
}

/// Order-2 binary `e^{mu(T1 - t)} x^alpha N2(s0 d0, s1 d1; s0 s1 rho)`.
pub fn second_order_binary_price(
    x: f64,
    t: f64,
    spec: &PowerBinarySpec,
    params: &MarketParams,
) -> Result<PriceResult> {
    if spec.order() != 2 {
        return Err(PricingError::invalid("spec", "second-order binary expected"));
    }
    check_spot(x)?;
    let spec = match settle_at(x, t, spec)? {
        Ok(s) => s,
        Err(v) => return Ok(PriceResult::new(v)),
    };
    if spec.order() == 1 {
        return power_binary_price(x, t, &spec, params);
    }
    let alpha = spec.alpha;
    let m = mu(params, alpha);
    let tau0 = spec.expiries[0] - t;
    let tau1 = spec.expiries[1] - t;
    let d0 = d_arg(x / spec.thresholds[0], params, alpha, tau0)?;
    let d1 = d_arg(x / spec.thresholds[1], params, alpha, tau1)?;
    let rho = sqrt(tau0 / tau1);
    let s0 = spec.signs[0].value();
    let s1 = spec.signs[1].value();
    let n2 = bvn_lower(s0 * d0, s1 * d1, s0 * s1 * rho);
    let value = exp(m * tau1) * powf(x, alpha) * n2;
    Ok(PriceResult::new(value)
        .with("mu", m)
        .with("d0", d0)
        .with("d1", d1)
        .with("rho", rho)
        .with("theta", m * tau1)
        .with("theta_leg", value))
}

/// Order-n binary `e^{mu(T_{n-1} - t)} x^alpha N_n(s_i d_i; A(s))`.
pub fn nth_order_binary_price(
    x: f64,
    t: f64,
    spec: &PowerBinarySpec,
    params: &MarketParams,
) -> Result<PriceResult> {
    check_spot(x)?;
    let spec = match settle_at(x, t, spec)? {
        Ok(s) => s,
        Err(v) => return Ok(PriceResult::new(v)),
    };
    match spec.order() {
        1 => return power_binary_price(x, t, &spec, params),
        2 => return second_order_binary_price(x, t, &spec, params),
        _ => {}
    }
    let alpha = spec.alpha;
    let m = mu(params, alpha);
    let mut limits = Vec::with_capacity(spec.order());
    let mut result = PriceResult::new(0.0).with("mu", m);
    for (i, (xi, (s, e))) in spec
        .thresholds
        .iter()
        .zip(spec.signs.iter().zip(&spec.expiries))
        .enumerate()
    {
        let d = d_arg(x / xi, params, alpha, e - t)?;
        result.push(&format!("d{i}"), d);
        limits.push(s.value() * d);
    }
    let corr = markov_correlation(t, &spec.expiries, &spec.signs)?;
    let est = mvn_cdf(&limits, &corr, 1e-10)?;
    let tau = spec.expiry() - t;
    result.value = exp(m * tau) * powf(x, alpha) * est.value;
    result.push("mvn_error", est.error);
    result.push("theta", m * tau);
    result.push("theta_leg", result.value);
    Ok(result)
}
