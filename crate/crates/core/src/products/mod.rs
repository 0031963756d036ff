//! End products built from the power and normal-distribution options: the FX
//! savings plan with a choice of indexing and geometric-average Asians.

pub mod asian;
pub mod continuous;
pub mod convergence;
pub mod savings;

pub use asian::{
    asian_coefficients, discrete_geo_asian_fixed_price, discrete_geo_asian_floating_price,
    discrete_geo_asian_floating_price_with, AsianCoefficients, Denominator, FloatingReading,
    GeoAsianFixedSpec, GeoAsianFloatingSpec, SpotLegDrift,
};
pub use continuous::{
    continuous_geo_asian_fixed_price, continuous_geo_asian_floating_price,
    continuous_geo_asian_floating_price_with, AsianState, ContinuousFloatingReading, DriftSign, SigmaPower,
};
pub use convergence::{convergence_study, ConvergenceRow, StudyProduct};
pub use savings::{savings_plan_price, savings_plan_price_via_binaries, SavingsPlanSpec};
