//! Direct solution of the hyperradial problem
//! `F'' + F'/R - (s^2/R^2) F + 2 E F = 0` with the lossy short-distance
//! condition `F ~ (R/r_t)^(-s) - exp(-2 eta*) (R/r_t)^s` and a decaying tail.
//!
//! Two independent routes recover the complex spectrum without using the
//! rotation formula:
//!
//! * [`find_state`] roots the closed-form matching residual
//!   [`quantization_residual`] (shares the gamma function with the analytic
//!   side);
//! * [`find_state_shooting`] roots the ODE mismatch [`shoot_match`], built from
//!   Frobenius data at small `R`, the asymptotic expansion at large `R` and an
//!   embedded Runge-Kutta integrator. It never evaluates a special function.

mod ode;
mod profile;
mod quantization;
mod shooting;

use num_complex::Complex64;

use crate::{Error, Result};

pub use profile::{
    bc_amplitudes, boundary_radii, log_spaced, norm_integral, ode_residual, radial_wavefunction,
    radial_wavefunction_with, residual_grid, uniform,
};
pub(crate) use quantization::{complex_newton, residual_with_reflection};
pub use quantization::{
    detuned_seed, find_state, quantization_residual, scan_states, scan_states_with,
};
pub use shooting::{
    find_state_shooting, integrate_ode, outward_log_derivative, shoot_match, ShootingSolution,
};

/// Sampled hyperradial wavefunction.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<Complex64>,
    pub energy: Complex64,
}

impl RadialProfile {
    pub fn new(radii: Vec<f64>, values: Vec<Complex64>, energy: Complex64) -> Result<Self> {
        check_radii(&radii)?;
        if radii.len() != values.len() {
            return Err(Error::precondition(format!(
                "{} radii but {} values",
                radii.len(),
                values.len()
            )));
        }
        Ok(Self {
            radii,
            values,
            energy,
        })
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

pub(crate) fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.len() < 2 {
        return Err(Error::precondition("a profile needs at least two radii"));
    }
    if !radii.iter().all(|r| *r > 0.0 && r.is_finite()) {
        return Err(Error::precondition("radii must be finite and positive"));
    }
    if !radii.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::precondition("radii must be strictly increasing"));
    }
    Ok(())
}

/// Numerical settings for the root finders and the shooting integrator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Starting radius of the outward integration, in the length unit of `r_t`.
    pub r_min: f64,
    /// Outer end of the integration, as `|kappa| R_max`.
    pub r_max_kappa: f64,
    /// Matching point of the outward and inward integrations, as `|kappa| R`.
    pub match_kappa: f64,
    pub ode_tolerance: f64,
    pub root_tolerance: f64,
    pub max_newton_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            r_min: 1e-3,
            r_max_kappa: 30.0,
            match_kappa: 2.0,
            ode_tolerance: 1e-10,
            root_tolerance: 1e-12,
            max_newton_iterations: 60,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.r_min,
            self.r_max_kappa,
            self.match_kappa,
            self.ode_tolerance,
            self.root_tolerance,
        ];
        if !positive.iter().all(|v| *v > 0.0 && v.is_finite()) {
            return Err(Error::precondition("solver settings must be positive"));
        }
        if self.max_newton_iterations == 0 {
            return Err(Error::precondition(
                "max_newton_iterations must be at least 1",
            ));
        }
        if self.r_max_kappa < 15.0 {
            return Err(Error::precondition(
                "r_max_kappa below 15 leaves the asymptotic tail expansion inaccurate",
            ));
        }
        if self.match_kappa >= self.r_max_kappa {
            return Err(Error::precondition("match point must lie inside r_max"));
        }
        Ok(())
    }
}

/// Coefficients of `(R/r_t)^(-s)` (ingoing) and `(R/r_t)^s` (outgoing) at short distance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryAmplitudes {
    pub ingoing: Complex64,
    pub outgoing: Complex64,
}

impl BoundaryAmplitudes {
    /// `outgoing / ingoing`; equals `-exp(-2 eta*)` for an eigenstate.
    pub fn ratio(&self) -> Complex64 {
        self.outgoing / self.ingoing
    }
}
