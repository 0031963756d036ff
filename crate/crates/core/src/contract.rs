//! One tagged type over every priced product, so callers (the oracles, the
//! command line) can dispatch without knowing the pricer signatures.

use crate::binaries::{
    nth_order_binary_price, power_binary_price, power_standard_price, PowerBinarySpec,
};
use crate::error::Result;
use crate::model::{MarketParams, PriceResult};
use crate::normdist::{normdist_price, NormDistPayoffSpec};
use crate::products::{
    continuous_geo_asian_fixed_price, continuous_geo_asian_floating_price,
    discrete_geo_asian_fixed_price, discrete_geo_asian_floating_price, savings_plan_price,
    AsianState, GeoAsianFixedSpec, GeoAsianFloatingSpec, SavingsPlanSpec,
};

#[derive(Debug, Clone, PartialEq)]
pub enum ContractSpec {
    PowerStandard {
        market: MarketParams,
        alpha: f64,
        expiry: f64,
    },
    /// First-order binary.
    PowerBinary {
        market: MarketParams,
        spec: PowerBinarySpec,
    },
    NthBinary {
        market: MarketParams,
        spec: PowerBinarySpec,
    },
    NormDist {
        market: MarketParams,
        spec: NormDistPayoffSpec,
        expiry: f64,
    },
    SavingsPlan {
        spec: SavingsPlanSpec,
    },
    GeoAsianFixed {
        market: MarketParams,
        spec: GeoAsianFixedSpec,
    },
    GeoAsianFloating {
        market: MarketParams,
        spec: GeoAsianFloatingSpec,
    },
    /// `j` is the running average at the valuation time.
    ContAsianFixed {
        market: MarketParams,
        strike: f64,
        expiry: f64,
        j: f64,
    },
    ContAsianFloating {
        market: MarketParams,
        expiry: f64,
        j: f64,
    },
}

impl ContractSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ContractSpec::PowerStandard { .. } => "power_standard",
            ContractSpec::PowerBinary { .. } => "power_binary",
            ContractSpec::NthBinary { .. } => "nth_binary",
            ContractSpec::NormDist { .. } => "normdist",
            ContractSpec::SavingsPlan { .. } => "savings_plan",
            ContractSpec::GeoAsianFixed { .. } => "geo_asian_fixed",
            ContractSpec::GeoAsianFloating { .. } => "geo_asian_floating",
            ContractSpec::ContAsianFixed { .. } => "cont_asian_fixed",
            ContractSpec::ContAsianFloating { .. } => "cont_asian_floating",
        }
    }

    /// Black-Scholes coefficients the underlying follows under the pricing
    /// measure (for the savings plan, those of its foreign-currency equation).
    pub fn dynamics(&self) -> MarketParams {
        match self {
            ContractSpec::SavingsPlan { spec } => spec.pde_params(),
            ContractSpec::PowerStandard { market, .. }
            | ContractSpec::PowerBinary { market, .. }
            | ContractSpec::NthBinary { market, .. }
            | ContractSpec::NormDist { market, .. }
            | ContractSpec::GeoAsianFixed { market, .. }
            | ContractSpec::GeoAsianFloating { market, .. }
            | ContractSpec::ContAsianFixed { market, .. }
            | ContractSpec::ContAsianFloating { market, .. } => *market,
        }
    }

    pub fn expiry(&self) -> f64 {
        match self {
            ContractSpec::PowerStandard { expiry, .. }
            | ContractSpec::NormDist { expiry, .. }
            | ContractSpec::ContAsianFixed { expiry, .. }
            | ContractSpec::ContAsianFloating { expiry, .. } => *expiry,
            ContractSpec::PowerBinary { spec, .. } | ContractSpec::NthBinary { spec, .. } => spec.expiry(),
            ContractSpec::SavingsPlan { spec } => spec.maturity,
            ContractSpec::GeoAsianFixed { spec, .. } => spec.schedule.last(),
            ContractSpec::GeoAsianFloating { spec, .. } => spec.schedule.last(),
        }
    }

    /// Closed-form value at spot `x` and time `t`.
    pub fn price(&self, x: f64, t: f64) -> Result<PriceResult> {
        match self {
            ContractSpec::PowerStandard { market, alpha, expiry } => {
                power_standard_price(x, t, *expiry, *alpha, market)
            }
            ContractSpec::PowerBinary { market, spec } => power_binary_price(x, t, spec, market),
            ContractSpec::NthBinary { market, spec } => nth_order_binary_price(x, t, spec, market),
            ContractSpec::NormDist { market, spec, expiry } => {
                if t > *expiry {
                    return Err(crate::PricingError::PastExpiry);
                }
                normdist_price(x, expiry - t, spec, market)
            }
            ContractSpec::SavingsPlan { spec } => savings_plan_price(x, t, spec),
            ContractSpec::GeoAsianFixed { market, spec } => {
                discrete_geo_asian_fixed_price(x, t, spec, market)
            }
            ContractSpec::GeoAsianFloating { market, spec } => {
                discrete_geo_asian_floating_price(x, t, spec, market)
            }
            ContractSpec::ContAsianFixed {
                market,
                strike,
                expiry,
                j,
            } => continuous_geo_asian_fixed_price(x, &AsianState::new(*j, t)?, *strike, *expiry, market),
            ContractSpec::ContAsianFloating { market, expiry, j } => {
                continuous_geo_asian_floating_price(x, &AsianState::new(*j, t)?, *expiry, market)
            }
        }
    }
}
