use std::f64::consts::FRAC_PI_2;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{gamma, ln_gamma};
use super::quadrature::{integrate_adaptive, QuadratureSpec};
use crate::{Error, Result};

/// `|z|` below which [`bessel_k`] uses the ascending series.
pub const SERIES_CROSSOVER: f64 = 2.0;

/// Orders with `|sin(pi nu)|` below this are too close to an integer for the
/// `(I_{-nu} - I_nu) / sin(pi nu)` form and always go through the integral.
const SINE_FLOOR: f64 = 0.05;

const MAX_SERIES_TERMS: usize = 500;

fn check_argument(z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain(format!(
            "bessel_k argument {z} is not finite"
        )));
    }
    if z.re <= 0.0 {
        return Err(Error::domain(format!(
            "bessel_k requires Re z > 0, got z = {z}"
        )));
    }
    Ok(())
}

/// K is even in its order; fold onto the half plane `Re nu >= 0`.
fn canonical_order(order: Complex64) -> Complex64 {
    if order.re < 0.0 || (order.re == 0.0 && order.im < 0.0) {
        -order
    } else {
        order
    }
}

fn prefers_series(order: Complex64, z: Complex64) -> bool {
    z.norm() <= SERIES_CROSSOVER && (PI * order).sin().norm() >= SINE_FLOOR
}

/// Modified Bessel function of the second kind `K_nu(z)` for complex order
/// and `Re z > 0`.
///
/// Inside `|z| <= 2` the ascending series is used, otherwise a
/// contour-deformed form of `int_0^inf exp(-z cosh t) cosh(nu t) dt`.
pub fn bessel_k(order: Complex64, z: Complex64) -> Result<Complex64> {
    check_argument(z)?;
    let order = canonical_order(order);
    if prefers_series(order, z) {
        series(order, z)
    } else {
        Ok(scaled_integral(order, z, &QuadratureSpec::default())? * (-z).exp())
    }
}

/// `exp(z) K_nu(z)`, which stays representable far into the exponential tail.
pub fn bessel_k_scaled(order: Complex64, z: Complex64) -> Result<Complex64> {
    check_argument(z)?;
    let order = canonical_order(order);
    if prefers_series(order, z) {
        Ok(series(order, z)? * z.exp())
    } else {
        scaled_integral(order, z, &QuadratureSpec::default())
    }
}

/// Ascending-series evaluation regardless of `|z|`.
///
/// `K_nu = (pi/2) (I_{-nu} - I_nu) / sin(pi nu)`; integer orders are rejected.
pub fn bessel_k_series(order: Complex64, z: Complex64) -> Result<Complex64> {
    check_argument(z)?;
    series(canonical_order(order), z)
}

/// Integral-representation evaluation regardless of `|z|`.
pub fn bessel_k_integral(
    order: Complex64,
    z: Complex64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    check_argument(z)?;
    Ok(scaled_integral(canonical_order(order), z, spec)? * (-z).exp())
}

fn series(order: Complex64, z: Complex64) -> Result<Complex64> {
    let sine = (PI * order).sin();
    if sine.norm() < 1e-12 {
        return Err(Error::domain(format!(
            "ascending series for K is singular at integer order {order}"
        )));
    }
    let minus = ascending_i(-order, z)?;
    let plus = ascending_i(order, z)?;
    Ok(FRAC_PI_2 * (minus - plus) / sine)
}

/// `I_nu(z) = (z/2)^nu sum_k (z^2/4)^k / (k! Gamma(k + nu + 1))`.
fn ascending_i(order: Complex64, z: Complex64) -> Result<Complex64> {
    let half = z * 0.5;
    let mut term = (order * half.ln() - ln_gamma(order + 1.0)?).exp();
    let step = half * half;
    let mut sum = term;
    for k in 1..MAX_SERIES_TERMS {
        let k = k as f64;
        term *= step / (k * (order + k));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            return Ok(sum);
        }
    }
    Err(Error::Accuracy {
        estimate: sum,
        error: term.norm(),
    })
}

/// `exp(z) K_nu(z)` from the integral representation.
///
/// With `phi = arg z` the path `w(t) = t - i phi tanh(t)` turns the phase of
/// `z cosh w` to zero for large `t`, so the integrand decays double
/// exponentially without oscillating however close `z` sits to the imaginary
/// axis. The deformation is legitimate because the integrand is entire and
/// decays throughout the swept region for `|phi| < pi/2`.
fn scaled_integral(order: Complex64, z: Complex64, spec: &QuadratureSpec) -> Result<Complex64> {
    let phi = z.arg();
    let path = |t: f64| Complex64::new(t, -phi * t.tanh());
    // exp(-z (cosh w - 1)), with cosh w - 1 = 2 sinh^2(w/2) to avoid cancellation
    let decay = |w: Complex64| {
        let sh = (w * 0.5).sinh();
        z * (2.0 * sh * sh)
    };
    let integrand = |t: f64| {
        let w = path(t);
        let jacobian = Complex64::new(1.0, -phi / t.cosh().powi(2));
        (-decay(w)).exp() * (order * w).cosh() * jacobian
    };

    let target = 40.0 + (1.0 / spec.relative_tolerance).ln();
    let mut cutoff = 0.5;
    loop {
        let w = path(cutoff);
        if decay(w).re - (order * w).re.abs() > target {
            break;
        }
        cutoff += 0.25;
        if cutoff > 60.0 {
            return Err(Error::Accuracy {
                estimate: Complex64::new(f64::NAN, f64::NAN),
                error: f64::INFINITY,
            });
        }
    }
    integrate_adaptive(integrand, 0.0, cutoff, spec)
}

/// Coefficients of the small-argument form
/// `K_s(kappa R) = c_minus (R/r_t)^(-s) + c_plus (R/r_t)^s + O(R^2)`,
/// namely `c_minus = Gamma(s)/2 (kappa r_t / 2)^(-s)` and
/// `c_plus = Gamma(-s)/2 (kappa r_t / 2)^s`.
pub fn small_z_coefficients(
    order: Complex64,
    kappa: Complex64,
    r_t: f64,
) -> Result<(Complex64, Complex64)> {
    if order.im == 0.0 && order.re.fract() == 0.0 {
        return Err(Error::domain(format!(
            "small-argument coefficients degenerate at integer order {}",
            order.re
        )));
    }
    if kappa.re <= 0.0 {
        return Err(Error::domain(format!("requires Re kappa > 0, got {kappa}")));
    }
    if !(r_t > 0.0) {
        return Err(Error::domain(format!("r_t must be positive, got {r_t}")));
    }
    let log_scale = (kappa * (0.5 * r_t)).ln();
    let c_minus = 0.5 * gamma(order)? * (-order * log_scale).exp();
    let c_plus = 0.5 * gamma(-order)? * (order * log_scale).exp();
    Ok((c_minus, c_plus))
}
