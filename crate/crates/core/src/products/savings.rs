use crate::binaries::{power_binary_price, PowerBinarySpec};
use crate::error::{PricingError, Result};
use crate::gaussian::cdf;
use crate::math::{exp, ln, sqrt};
use crate::model::{MarketParams, PriceResult, SignIndicator};

/// Savings plan paying, in foreign currency at `T`, the better of domestic
/// accrual `e^{r_d T} / X(T)` and foreign accrual `e^{r_f T} / x0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SavingsPlanSpec {
    pub r_d: f64,
    pub r_f: f64,
    pub x0: f64,
    pub maturity: f64,
    pub sigma: f64,
}

impl SavingsPlanSpec {
    pub fn new(r_d: f64, r_f: f64, x0: f64, maturity: f64, sigma: f64) -> Result<Self> {
        if !(r_d.is_finite() && r_f.is_finite()) {
            return Err(PricingError::invalid("r_d", "rates must be finite"));
        }
        if !(x0.is_finite() && x0 > 0.0) {
            return Err(PricingError::invalid("x0", "must be finite and > 0"));
        }
        if !(maturity.is_finite() && maturity >= 0.0) {
            return Err(PricingError::invalid("maturity", "must be finite and >= 0"));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(PricingError::invalid("sigma", "must be finite and > 0"));
        }
        Ok(SavingsPlanSpec {
            r_d,
            r_f,
            x0,
            maturity,
            sigma,
        })
    }

    /// Coefficients of the foreign-currency pricing equation written as a
    /// Black-Scholes equation: rate `r_f`, dividend `2 r_f - r_d - sigma^2`.
    pub fn pde_params(&self) -> MarketParams {
        MarketParams::new(
            self.r_f,
            2.0 * self.r_f - self.r_d - self.sigma * self.sigma,
            self.sigma,
        )
        .expect("validated at construction")
    }

    /// Exchange rate at which both accruals pay the same, `x0 e^{(r_d - r_f) T}`.
    pub fn strike(&self) -> f64 {
        self.x0 * exp((self.r_d - self.r_f) * self.maturity)
    }

    pub fn payoff(&self, x: f64) -> f64 {
        let dom = exp(self.r_d * self.maturity) / x;
        let fgn = exp(self.r_f * self.maturity) / self.x0;
        dom.max(fgn)
    }
}

fn check(x: f64, t: f64, spec: &SavingsPlanSpec) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(PricingError::invalid("x", "exchange rate must be finite and > 0"));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(PricingError::invalid("t", "must be finite and >= 0"));
    }
    if t > spec.maturity {
        return Err(PricingError::PastExpiry);
    }
    Ok(())
}

/// Foreign value `e^{r_d t} X^{-1} Phi(-d1) + x0^{-1} e^{r_f t} Phi(d2)`.
pub fn savings_plan_price(x: f64, t: f64, spec: &SavingsPlanSpec) -> Result<PriceResult> {
    check(x, t, spec)?;
    let tau = spec.maturity - t;
    if tau == 0.0 {
        return Ok(PriceResult::new(spec.payoff(x)));
    }
    let sd = spec.sigma * sqrt(tau);
    let d1 = (ln(x / spec.x0) + (spec.r_f - spec.r_d) * t - 0.5 * spec.sigma * spec.sigma * tau) / sd;
    let d2 = d1 + sd;
    let dom = exp(spec.r_d * t) / x * cdf(-d1);
    let fgn = exp(spec.r_f * t) / spec.x0 * cdf(d2);
    Ok(PriceResult::new(dom + fgn)
        .with("d1", d1)
        .with("d2", d2)
        .with("domestic_leg", dom)
        .with("foreign_leg", fgn))
}

/// Same value assembled from power binaries under [`SavingsPlanSpec::pde_params`]:
/// `e^{r_d T} (M^{-1})^-_K + x0^{-1} e^{r_f T} (M^0)^+_K`.
pub fn savings_plan_price_via_binaries(x: f64, t: f64, spec: &SavingsPlanSpec) -> Result<PriceResult> {
    check(x, t, spec)?;
    let params = spec.pde_params();
    let k = spec.strike();
    let inv = PowerBinarySpec::first_order(-1.0, k, SignIndicator::Down, spec.maturity)?;
    let cash = PowerBinarySpec::first_order(0.0, k, SignIndicator::Up, spec.maturity)?;
    let a = power_binary_price(x, t, &inv, &params)?.value;
    let b = power_binary_price(x, t, &cash, &params)?.value;
    let dom = exp(spec.r_d * spec.maturity) * a;
    let fgn = exp(spec.r_f * spec.maturity) / spec.x0 * b;
    Ok(PriceResult::new(dom + fgn)
        .with("strike", k)
        .with("domestic_leg", dom)
        .with("foreign_leg", fgn))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routes_agree() {
        for &(rd, rf, s, x, t) in &[
            (0.05, 0.03, 0.1, 1.0, 0.0),
            (0.01, 0.04, 0.25, 1.3, 0.4),
            (-0.005, 0.02, 0.15, 0.8, 0.9),
        ] {
            let spec = SavingsPlanSpec::new(rd, rf, 1.0, 1.0, s).unwrap();
            let a = savings_plan_price(x, t, &spec).unwrap().value;
            let b = savings_plan_price_via_binaries(x, t, &spec).unwrap().value;
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn expiry_and_symmetric_case() {
        let spec = SavingsPlanSpec::new(0.05, 0.03, 1.1, 2.0, 0.1).unwrap();
        let v = savings_plan_price(1.2, 2.0, &spec).unwrap().value;
        assert_eq!(v, (0.1f64.exp() / 1.2).max(0.06f64.exp() / 1.1));
        assert_eq!(savings_plan_price(1.2, 2.1, &spec), Err(PricingError::PastExpiry));

        let sym = SavingsPlanSpec::new(0.03, 0.03, 1.0, 1.0, 0.2).unwrap();
        let r = savings_plan_price(1.0, 0.0, &sym).unwrap();
        assert!((r.get("d1").unwrap() + 0.1).abs() < 1e-15);
        assert!((r.get("d2").unwrap() - 0.1).abs() < 1e-15);
        assert!((r.value - 2.0 * cdf(0.1)).abs() < 1e-15);
    }
}
