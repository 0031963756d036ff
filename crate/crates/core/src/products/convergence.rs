//! Discrete-to-continuous convergence of geometric Asians on equally spaced
//! schedules `T_i = (i - 1) T / (n - 1)`, valued at `t = 0` with `X_1 = X`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{PricingError, Result};
use crate::math::abs;
use crate::model::{FixedObservations, MarketParams, MonitoringSchedule};

use super::asian::{
    discrete_geo_asian_fixed_price, discrete_geo_asian_floating_price, GeoAsianFixedSpec,
    GeoAsianFloatingSpec,
};
use super::continuous::{
    continuous_geo_asian_fixed_price, continuous_geo_asian_floating_price, AsianState,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StudyProduct {
    Fixed { strike: f64 },
    Floating,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub v_n: f64,
    pub v_continuous: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    /// `abs_error / previous abs_error`; `None` on the first row.
    pub error_ratio_vs_prev: Option<f64>,
}

pub fn convergence_study(
    product: StudyProduct,
    ladder: &[usize],
    x: f64,
    maturity: f64,
    params: &MarketParams,
) -> Result<Vec<ConvergenceRow>> {
    if ladder.is_empty() {
        return Err(PricingError::invalid("ladder", "empty"));
    }
    if ladder.iter().any(|&n| n < 2) {
        return Err(PricingError::invalid("ladder", "entries must be >= 2"));
    }
    if ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PricingError::invalid("ladder", "must be strictly ascending"));
    }
    let start = AsianState::start();
    let v_inf = match product {
        StudyProduct::Fixed { strike } => {
            continuous_geo_asian_fixed_price(x, &start, strike, maturity, params)?.value
        }
        StudyProduct::Floating => continuous_geo_asian_floating_price(x, &start, maturity, params)?.value,
    };
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(ladder.len());
    for &n in ladder {
        let schedule = MonitoringSchedule::equally_spaced(n, maturity)?;
        let fixings = FixedObservations::new(vec![x])?;
        let v_n = match product {
            StudyProduct::Fixed { strike } => {
                let spec = GeoAsianFixedSpec::new(schedule, strike, fixings)?;
                discrete_geo_asian_fixed_price(x, 0.0, &spec, params)?.value
            }
            StudyProduct::Floating => {
                let spec = GeoAsianFloatingSpec::new(schedule, fixings)?;
                discrete_geo_asian_floating_price(x, 0.0, &spec, params)?.value
            }
        };
        let abs_error = abs(v_n - v_inf);
        let error_ratio_vs_prev = rows.last().map(|p| abs_error / p.abs_error);
        rows.push(ConvergenceRow {
            n,
            v_n,
            v_continuous: v_inf,
            abs_error,
            rel_error: abs_error / abs(v_inf),
            error_ratio_vs_prev,
        });
    }
    Ok(rows)
}
