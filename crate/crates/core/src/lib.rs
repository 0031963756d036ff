//! Closed-form pricing of power binaries, higher-order binaries, power
//! normal-distribution options, FX savings plans with a choice of indexing and
//! geometric-average Asian options under Black-Scholes dynamics.
//!
//! Every closed form has two independent numerical counterparts in
//! [`oracles`]: a lognormal Green's-function quadrature (composable across
//! monitoring dates) and an exact-stepping Monte Carlo engine.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod math;

pub mod binaries;
pub mod contract;
pub mod error;
pub mod gaussian;
pub mod model;
pub mod normdist;
pub mod oracles;
pub mod products;
pub mod quad;

pub use contract::ContractSpec;
pub use error::{PricingError, Result};
pub use model::{
    d_arg, delta_arg, mu, FixedObservations, Horizon, MarketParams, MonitoringSchedule,
    PriceResult, SignIndicator,
};
