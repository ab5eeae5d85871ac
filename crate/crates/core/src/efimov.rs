//! Closed-form Efimov physics with three-body losses.
//!
//! Units: `hbar = m = 1`, lengths in the unit of `r_t`, so energies come out
//! in `hbar^2 / (m L^2)` and `kappa` in `1 / L`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use crate::specfun::ln_gamma;
use crate::{Error, Result};

const INV_SQRT3: f64 = 0.577_350_269_189_625_8;
const BRACKET: (f64, f64) = (0.5, 2.0);

/// Real form of `s cos(s pi/2) - 8/sqrt(3) sin(s pi/6) = 0` on the imaginary
/// axis.
///
/// Substituting `s = i x` gives `cos(i x pi/2) = cosh(pi x/2)` and
/// `sin(i x pi/6) = i sinh(pi x/6)`, so the left-hand side equals `i f(x)` with
/// `f(x) = x cosh(pi x/2) - (8/sqrt 3) sinh(pi x/6)`. `f(0) = 0` trivially,
/// `f < 0` just above zero and the physical root is the unique positive one.
pub fn transcendental_residual(x: f64) -> f64 {
    x * (FRAC_PI_2 * x).cosh() - 8.0 * INV_SQRT3 * (PI * x / 6.0).sinh()
}

fn transcendental_slope(x: f64) -> f64 {
    (FRAC_PI_2 * x).cosh() + FRAC_PI_2 * x * (FRAC_PI_2 * x).sinh()
        - 8.0 * INV_SQRT3 * (PI / 6.0) * (PI * x / 6.0).cosh()
}

/// The bosonic Efimov exponent `s = i |s|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelExponent {
    magnitude: f64,
    residual: f64,
}

impl ChannelExponent {
    /// Solve for `|s|` with `|f(|s|)| < tol`.
    pub fn solve(tol: f64) -> Result<Self> {
        solve_channel_exponent(tol)
    }

    /// An exponent with an arbitrary magnitude, e.g. a deliberately detuned one.
    pub fn with_magnitude(magnitude: f64) -> Result<Self> {
        if !(magnitude > 0.0 && magnitude.is_finite()) {
            return Err(Error::domain(format!(
                "channel exponent magnitude must be positive, got {magnitude}"
            )));
        }
        Ok(Self {
            magnitude,
            residual: transcendental_residual(magnitude).abs(),
        })
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    /// `|f(|s|)|` at the stored magnitude.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `s` itself, purely imaginary.
    pub fn s(&self) -> Complex64 {
        Complex64::new(0.0, self.magnitude)
    }

    /// `exp(2 pi / |s|)`, the energy ratio between neighbouring states.
    pub fn scaling_factor(&self) -> f64 {
        (TAU / self.magnitude).exp()
    }
}

/// Safeguarded Newton iteration on [`transcendental_residual`] inside `[0.5, 2]`.
pub fn solve_channel_exponent(tol: f64) -> Result<ChannelExponent> {
    if !(tol > 0.0) {
        return Err(Error::precondition("tolerance must be positive"));
    }
    let (mut lo, mut hi) = BRACKET;
    let (f_lo, f_hi) = (transcendental_residual(lo), transcendental_residual(hi));
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Solver {
            message: format!("bracket [{lo}, {hi}] does not straddle a root ({f_lo}, {f_hi})"),
            trace: Vec::new(),
        });
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = transcendental_residual(x);
        if f.abs() < tol {
            return Ok(ChannelExponent {
                magnitude: x,
                residual: f.abs(),
            });
        }
        if f.signum() == f_lo.signum() {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - f / transcendental_slope(x);
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next == x {
            break;
        }
        x = next;
    }
    Err(Error::Solver {
        message: format!(
            "channel exponent stalled at {x} with residual {:e} above tolerance {tol:e}",
            transcendental_residual(x).abs()
        ),
        trace: Vec::new(),
    })
}

/// Inelasticity `eta*` and three-body parameter `r_t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub eta_star: f64,
    pub r_t: f64,
}

impl ModelParams {
    pub fn new(eta_star: f64, r_t: f64) -> Result<Self> {
        if !(eta_star >= 0.0 && eta_star.is_finite()) {
            return Err(Error::domain(format!(
                "eta* must be finite and non-negative, got {eta_star}"
            )));
        }
        if !(r_t > 0.0 && r_t.is_finite()) {
            return Err(Error::domain(format!("r_t must be positive, got {r_t}")));
        }
        Ok(Self { eta_star, r_t })
    }

    pub fn lossless(r_t: f64) -> Result<Self> {
        Self::new(0.0, r_t)
    }
}

/// A single trimer: complex energy, `kappa` with `Re kappa > 0`, decay rate
/// `hbar Gamma = -2 Im E` and size `1 / Re kappa`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrimerState {
    pub n: i64,
    pub energy: Complex64,
    pub kappa: Complex64,
    pub gamma: f64,
    pub size: f64,
}

impl TrimerState {
    pub fn from_energy(n: i64, energy: Complex64) -> Result<Self> {
        let kappa = kappa_of_energy(energy)?;
        let gamma = decay_rate(energy)?;
        Ok(Self {
            n,
            energy,
            kappa,
            gamma,
            size: 1.0 / kappa.re,
        })
    }

    /// Counterclockwise angle of the energy in `[0, 2 pi)`.
    pub fn energy_arg(&self) -> f64 {
        energy_arg(self.energy)
    }
}

/// `E_n^0 = -(2 / r_t^2) exp[(2/|s|) arg Gamma(1+s)] exp(2 pi n / |s|)`.
pub fn lossless_energy(n: i64, s: &ChannelExponent, r_t: f64) -> f64 {
    let arg_gamma = ln_gamma(Complex64::new(1.0, s.magnitude()))
        .expect("1 + s is never a pole")
        .im;
    -2.0 / (r_t * r_t)
        * (2.0 * arg_gamma / s.magnitude()).exp()
        * (TAU * n as f64 / s.magnitude()).exp()
}

/// `pi |s| / 2`; no normalisable state exists at or above it.
pub fn critical_eta(s: &ChannelExponent) -> f64 {
    FRAC_PI_2 * s.magnitude()
}

pub(crate) fn check_below_critical(params: &ModelParams, s: &ChannelExponent) -> Result<()> {
    let critical = critical_eta(s);
    if params.eta_star >= critical {
        return Err(Error::AboveCritical {
            eta: params.eta_star,
            critical,
        });
    }
    Ok(())
}

/// The lossless energy rotated counterclockwise by `2 eta* / |s|`.
pub fn lossy_energy(n: i64, params: &ModelParams, s: &ChannelExponent) -> Result<Complex64> {
    check_below_critical(params, s)?;
    let e0 = lossless_energy(n, s, params.r_t);
    if params.eta_star == 0.0 {
        return Ok(Complex64::new(e0, 0.0));
    }
    Ok(Complex64::from_polar(1.0, 2.0 * params.eta_star / s.magnitude()) * e0)
}

/// The closed-form state `n`.
pub fn analytic_state(n: i64, params: &ModelParams, s: &ChannelExponent) -> Result<TrimerState> {
    TrimerState::from_energy(n, lossy_energy(n, params, s)?)
}

/// `kappa = sqrt(-2E)` on the branch `Re kappa > 0`.
pub fn kappa_of_energy(energy: Complex64) -> Result<Complex64> {
    if energy == Complex64::new(0.0, 0.0) {
        return Err(Error::domain("kappa is undefined at E = 0"));
    }
    if !(energy.re.is_finite() && energy.im.is_finite()) {
        return Err(Error::domain(format!("energy {energy} is not finite")));
    }
    // The principal root has Re >= 0; it is zero only for E on the positive real axis.
    let kappa = (-2.0 * energy).sqrt();
    if kappa.re <= 0.0 {
        return Err(Error::Branch(format!(
            "E = {energy} lies on the positive real axis: no root with Re kappa > 0"
        )));
    }
    Ok(kappa)
}

/// `hbar Gamma = -2 Im E`.
///
/// A positive imaginary part at the level of rounding (relative 1e-13) is
/// treated as zero; anything larger is a growing state and rejected.
pub fn decay_rate(energy: Complex64) -> Result<f64> {
    if energy.im > 1e-13 * energy.norm() {
        return Err(Error::domain(format!(
            "Im E = {} > 0 describes a growing state",
            energy.im
        )));
    }
    Ok((-2.0 * energy.im).max(0.0))
}

pub fn trimer_size(state: &TrimerState) -> f64 {
    1.0 / state.kappa.re
}

/// Probability `1 - exp(-4 eta*)` that three atoms reaching short distance recombine.
pub fn loss_probability(eta_star: f64) -> f64 {
    -(-4.0 * eta_star).exp_m1()
}

/// `arg E` in `[0, 2 pi)`, so the lossless spectrum sits at exactly `pi`.
pub fn energy_arg(energy: Complex64) -> f64 {
    let a = energy.im.atan2(energy.re);
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

/// Reduced Planck constant in J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Atomic mass unit in kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Conversion to SI. `length_meters` is the size of the natural length unit,
/// i.e. `R_t` in meters when states were computed with `r_t = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitSystem {
    pub length_meters: f64,
    pub mass_kg: f64,
}

impl UnitSystem {
    pub fn new(length_meters: f64, mass_kg: f64) -> Result<Self> {
        if !(length_meters > 0.0 && length_meters.is_finite()) {
            return Err(Error::domain("length unit must be positive"));
        }
        if !(mass_kg > 0.0 && mass_kg.is_finite()) {
            return Err(Error::domain("mass must be positive"));
        }
        Ok(Self {
            length_meters,
            mass_kg,
        })
    }

    /// Caesium-133 with `R_t = 30 nm`.
    pub fn caesium() -> Self {
        Self {
            length_meters: 30e-9,
            mass_kg: 133.0 * ATOMIC_MASS_UNIT,
        }
    }

    /// `hbar^2 / (m L^2)` in joules.
    pub fn energy_unit(&self) -> f64 {
        HBAR * HBAR / (self.mass_kg * self.length_meters * self.length_meters)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalState {
    pub energy_joules: Complex64,
    pub gamma_per_second: f64,
    pub size_meters: f64,
}

pub fn to_physical_units(state: &TrimerState, units: &UnitSystem) -> PhysicalState {
    let e_unit = units.energy_unit();
    PhysicalState {
        energy_joules: state.energy * e_unit,
        gamma_per_second: state.gamma * e_unit / HBAR,
        size_meters: state.size * units.length_meters,
    }
}

/// Inverse of [`to_physical_units`] for the three converted quantities.
pub fn from_physical_units(physical: &PhysicalState, units: &UnitSystem) -> (Complex64, f64, f64) {
    let e_unit = units.energy_unit();
    (
        physical.energy_joules / e_unit,
        physical.gamma_per_second * HBAR / e_unit,
        physical.size_meters / units.length_meters,
    )
}
