//! Independent numerical counterparts of the closed forms: lognormal
//! Green's-function quadrature and exact-stepping Monte Carlo.

pub mod greens;
pub mod monte_carlo;

pub use greens::{greens_price, nested_greens_price, quad_price, PathPayoff, QuadratureConfig};
pub use monte_carlo::{mc_price, McConfig};
