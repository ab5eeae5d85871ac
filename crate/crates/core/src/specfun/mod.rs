//! Complex special functions: principal-branch log-gamma, the modified Bessel
//! function `K_nu(z)` for complex order and argument, and the adaptive
//! quadrature used by its integral representation.

mod bessel;
mod gamma;
mod quadrature;

pub use bessel::{
    bessel_k, bessel_k_integral, bessel_k_scaled, bessel_k_series, small_z_coefficients,
    SERIES_CROSSOVER,
};
pub use gamma::{gamma, ln_gamma};
pub use quadrature::{integrate_adaptive, QuadratureSpec};
