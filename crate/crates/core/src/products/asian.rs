//! Discretely monitored geometric-average Asian options.

use alloc::vec::Vec;

use crate::error::{PricingError, Result};
use crate::gaussian::cdf;
use crate::math::{exp, ln, sqrt};
use crate::model::{mu, FixedObservations, MarketParams, MonitoringSchedule, PriceResult};

/// Call on the geometric mean of the fixings: `(G - K)^+`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeoAsianFixedSpec {
    pub schedule: MonitoringSchedule,
    pub strike: f64,
    pub fixings: FixedObservations,
}

impl GeoAsianFixedSpec {
    pub fn new(schedule: MonitoringSchedule, strike: f64, fixings: FixedObservations) -> Result<Self> {
        if !(strike.is_finite() && strike > 0.0) {
            return Err(PricingError::invalid("strike", "must be finite and > 0"));
        }
        check_schedule(&schedule, &fixings)?;
        Ok(GeoAsianFixedSpec {
            schedule,
            strike,
            fixings,
        })
    }
}

/// Floating-strike call `(X(T_n) - G)^+`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeoAsianFloatingSpec {
    pub schedule: MonitoringSchedule,
    pub fixings: FixedObservations,
}

impl GeoAsianFloatingSpec {
    pub fn new(schedule: MonitoringSchedule, fixings: FixedObservations) -> Result<Self> {
        check_schedule(&schedule, &fixings)?;
        Ok(GeoAsianFloatingSpec { schedule, fixings })
    }
}

fn check_schedule(schedule: &MonitoringSchedule, fixings: &FixedObservations) -> Result<()> {
    if schedule.len() < 2 {
        return Err(PricingError::invalid("schedule", "needs at least two monitoring dates"));
    }
    if fixings.len() > schedule.len() {
        return Err(PricingError::invalid("fixings", "more fixings than monitoring dates"));
    }
    Ok(())
}

/// Variance and drift bookkeeping for the `k` outstanding fixings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsianCoefficients {
    /// Remaining fixings.
    pub k: usize,
    /// `sigma sqrt(sum w^2 l)` over the remaining intervals.
    pub delta: f64,
    /// `sum mu(w/n) l`.
    pub theta: f64,
    pub d1: f64,
    pub d2: f64,
}

// Remaining intervals as (length, fixings still ahead). The first runs from t
// to the next monitoring date.
fn intervals(times: &[f64], m: usize, t: f64) -> Vec<(f64, f64)> {
    let n = times.len();
    let mut out = Vec::with_capacity(n - m);
    out.push((times[m] - t, (n - m) as f64));
    for j in m + 1..n {
        out.push((times[j] - times[j - 1], (n - j) as f64));
    }
    out
}

fn check_state(x: f64, t: f64, schedule: &MonitoringSchedule, fixings: &FixedObservations) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(PricingError::invalid("x", "spot must be finite and > 0"));
    }
    if !t.is_finite() {
        return Err(PricingError::invalid("t", "must be finite"));
    }
    if t > schedule.last() {
        return Err(PricingError::PastExpiry);
    }
    let expected = schedule.observed_by(t);
    if fixings.len() != expected {
        return Err(PricingError::FixingCount {
            expected,
            found: fixings.len(),
        });
    }
    Ok(())
}

/// Coefficients of the fixed-strike closed form at `(x, t)`. Requires at least
/// one outstanding fixing.
pub fn asian_coefficients(
    x: f64,
    t: f64,
    spec: &GeoAsianFixedSpec,
    params: &MarketParams,
) -> Result<AsianCoefficients> {
    check_state(x, t, &spec.schedule, &spec.fixings)?;
    let times = spec.schedule.times();
    let n = times.len();
    let m = spec.fixings.len();
    if m == n {
        return Err(PricingError::DegenerateHorizon);
    }
    let k = n - m;
    let nf = n as f64;
    let (mut a, mut b, mut theta) = (0.0, 0.0, 0.0);
    for (l, w) in intervals(times, m, t) {
        a += w * l;
        b += w * w * l;
        theta += mu(params, w / nf) * l;
    }
    let delta = params.sigma() * sqrt(b);
    let log_ratio = spec.fixings.log_sum() + k as f64 * ln(x) - nf * ln(spec.strike);
    let d2 = (log_ratio + params.log_drift() * a) / delta;
    Ok(AsianCoefficients {
        k,
        delta,
        theta,
        d1: d2 + delta / nf,
        d2,
    })
}

/// `(X_1..X_m)^{1/n} X^{k/n} e^theta Phi(d1) - K e^{-r(T_n - t)} Phi(d2)`.
pub fn discrete_geo_asian_fixed_price(
    x: f64,
    t: f64,
    spec: &GeoAsianFixedSpec,
    params: &MarketParams,
) -> Result<PriceResult> {
    check_state(x, t, &spec.schedule, &spec.fixings)?;
    let n = spec.schedule.len();
    let nf = n as f64;
    if spec.fixings.len() == n {
        let g = exp(spec.fixings.log_sum() / nf);
        return Ok(PriceResult::new((g - spec.strike).max(0.0)));
    }
    let c = asian_coefficients(x, t, spec, params)?;
    let lead = exp(spec.fixings.log_sum() / nf + c.k as f64 / nf * ln(x) + c.theta);
    let average_leg = lead * cdf(c.d1);
    let strike_leg = spec.strike * exp(-params.r() * (spec.schedule.last() - t)) * cdf(c.d2);
    Ok(PriceResult::new(average_leg - strike_leg)
        .with("d1", c.d1)
        .with("d2", c.d2)
        .with("delta", c.delta)
        .with("theta", c.theta)
        .with("theta_leg", average_leg))
}

/// Readings of the printed floating-strike formula kept for comparison
/// against the Monte Carlo oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FloatingReading {
    pub denominator: Denominator,
    pub spot_leg_drift: SpotLegDrift,
}

/// Normalisation of the weights in the floating-strike arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Denominator {
    N,
    NMinusOne,
}

/// Drift used in the argument of the `X e^{-q tau}` leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpotLegDrift {
    /// `r - q - sigma^2/2`, as printed.
    AsPrinted,
    /// `r - q + sigma^2/2`: the spot-measure shift.
    Corrected,
}

impl Default for FloatingReading {
    fn default() -> Self {
        FloatingReading {
            denominator: Denominator::NMinusOne,
            spot_leg_drift: SpotLegDrift::Corrected,
        }
    }
}

/// `X e^{-q(T_n - t)} Phi(d_X) - (X_1..X_m)^{1/n} X^{k/n} e^theta Phi(d_G)`.
pub fn discrete_geo_asian_floating_price(
    x: f64,
    t: f64,
    spec: &GeoAsianFloatingSpec,
    params: &MarketParams,
) -> Result<PriceResult> {
    discrete_geo_asian_floating_price_with(x, t, spec, params, FloatingReading::default())
}

pub fn discrete_geo_asian_floating_price_with(
    x: f64,
    t: f64,
    spec: &GeoAsianFloatingSpec,
    params: &MarketParams,
    reading: FloatingReading,
) -> Result<PriceResult> {
    check_state(x, t, &spec.schedule, &spec.fixings)?;
    let times = spec.schedule.times();
    let n = times.len();
    let nf = n as f64;
    let m = spec.fixings.len();
    let log_p = spec.fixings.log_sum();
    if m == n {
        // the spot at T_n is the last fixing
        let g = exp(log_p / nf);
        return Ok(PriceResult::new((x - g).max(0.0)));
    }
    let k = n - m;
    let scale = match reading.denominator {
        Denominator::N => nf,
        Denominator::NMinusOne => nf - 1.0,
    };
    let sigma = params.sigma();
    let (mut drift_w, mut var_w, mut cross_w, mut theta) = (0.0, 0.0, 0.0, 0.0);
    for (l, w) in intervals(times, m, t) {
        let u = (nf - w) / scale;
        drift_w += u * l;
        var_w += u * u * l;
        cross_w += w * (nf - w) / (nf * scale) * l;
        theta += mu(params, w / nf) * l;
    }
    let log_term = ((nf - k as f64) * ln(x) - log_p) / scale;
    let sd = sigma * sqrt(var_w);
    let base = log_term + params.log_drift() * drift_w;
    let spot_shift = match reading.spot_leg_drift {
        SpotLegDrift::AsPrinted => 0.0,
        SpotLegDrift::Corrected => sigma * sigma * drift_w,
    };
    let d_spot = (base + spot_shift) / sd;
    let d_avg = (base + sigma * sigma * cross_w) / sd;
    let tau = times[n - 1] - t;
    let spot_leg = x * exp(-params.q() * tau) * cdf(d_spot);
    let average_leg = exp(log_p / nf + k as f64 / nf * ln(x) + theta) * cdf(d_avg);
    Ok(PriceResult::new(spot_leg - average_leg)
        .with("d_spot", d_spot)
        .with("d_average", d_avg)
        .with("theta", theta)
        .with("theta_leg", -average_leg))
}
