use std::cell::RefCell;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{check_radii, BoundaryAmplitudes, RadialProfile};
use crate::efimov::{kappa_of_energy, ChannelExponent, ModelParams};
use crate::exec::Execution;
use crate::specfun::{bessel_k, bessel_k_scaled, integrate_adaptive, QuadratureSpec};
use crate::{Error, Result};

/// `n` points evenly spaced on `[lo, hi]`.
pub fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n.max(2) - 1) as f64;
    (0..n).map(|i| lo + step * i as f64).collect()
}

/// `n` points evenly spaced in `ln R` on `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (n.max(2) - 1) as f64;
    (0..n).map(|i| (a + step * i as f64).exp()).collect()
}

/// Grid used to certify a profile against the radial equation:
/// `|kappa| R` in `[0.75, 7.5]` with step `1.5e-3 / |kappa|`.
pub fn residual_grid(kappa: Complex64) -> Vec<f64> {
    let scale = 1.0 / kappa.norm();
    uniform(0.75 * scale, 7.5 * scale, 4501)
}

/// Short-distance radii for [`bc_amplitudes`]: twelve points log-spaced over
/// `|kappa| R` in `[1e-6, 1e-4]`, where the `O((kappa R)^2)` corrections to the
/// two power laws are below 1e-8, and never above `R/r_t = 1e-2`.
pub fn boundary_radii(kappa: Complex64, r_t: f64) -> Vec<f64> {
    let hi = (1e-4 / kappa.norm()).min(1e-2 * r_t);
    log_spaced(hi * 1e-2, hi, 12)
}

/// `F(R_i) = K_s(kappa R_i)` with `kappa = sqrt(-2E)`, `Re kappa > 0`. Unnormalized.
pub fn radial_wavefunction(
    energy: Complex64,
    radii: &[f64],
    s: &ChannelExponent,
) -> Result<RadialProfile> {
    radial_wavefunction_with(Execution::default(), energy, radii, s)
}

pub fn radial_wavefunction_with(
    exec: Execution,
    energy: Complex64,
    radii: &[f64],
    s: &ChannelExponent,
) -> Result<RadialProfile> {
    check_radii(radii)?;
    let kappa = kappa_of_energy(energy)?;
    let order = s.s();
    let values = exec.try_map(radii, |&r| bessel_k(order, kappa * r))?;
    RadialProfile::new(radii.to_vec(), values, energy)
}

/// Largest pointwise residual of `F'' + F'/R - (s^2/R^2) F + 2 E F` over the
/// interior of a uniform grid, using five-point central differences,
/// divided by `max |2 E F|`.
pub fn ode_residual(profile: &RadialProfile, s: &ChannelExponent) -> Result<f64> {
    let n = profile.len();
    if n < 5 {
        return Err(Error::precondition(format!(
            "residual needs at least 5 grid points, got {n}"
        )));
    }
    let radii = &profile.radii;
    let h = (radii[n - 1] - radii[0]) / (n - 1) as f64;
    let uniform = radii
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-6 * h);
    if !uniform {
        return Err(Error::precondition("residual grid must be uniform"));
    }
    let kappa = kappa_of_energy(profile.energy)?;
    if h * kappa.norm() > 0.5 {
        return Err(Error::precondition(format!(
            "grid too coarse: h |kappa| = {} > 0.5",
            h * kappa.norm()
        )));
    }

    let s2 = s.s() * s.s();
    let two_e = 2.0 * profile.energy;
    let f = &profile.values;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 2..n - 2 {
        let r = radii[i];
        let d1 = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
        let d2 = (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2])
            / (12.0 * h * h);
        let residual = d2 + d1 / r - s2 / (r * r) * f[i] + two_e * f[i];
        worst = worst.max(residual.norm());
        scale = scale.max((two_e * f[i]).norm());
    }
    if scale == 0.0 {
        return Err(Error::precondition("profile vanishes identically"));
    }
    Ok(worst / scale)
}

/// Least-squares fit of `F(R) = c_- (R/r_t)^(-s) + c_+ (R/r_t)^s` over the
/// profile points with `R/r_t <= 1e-2`.
pub fn bc_amplitudes(
    profile: &RadialProfile,
    params: &ModelParams,
    s: &ChannelExponent,
) -> Result<BoundaryAmplitudes> {
    let points: Vec<(f64, Complex64)> = profile
        .radii
        .iter()
        .zip(&profile.values)
        .filter(|(r, _)| **r / params.r_t <= 1e-2)
        .map(|(r, v)| (*r, *v))
        .collect();
    if points.len() < 4 {
        return Err(Error::precondition(format!(
            "boundary fit needs at least 4 radii with R/r_t <= 1e-2, got {}",
            points.len()
        )));
    }

    let order = s.s();
    let mut design = DMatrix::<Complex64>::zeros(points.len(), 2);
    let mut rhs = DVector::<Complex64>::zeros(points.len());
    for (row, (r, v)) in points.iter().enumerate() {
        let log_x = (r / params.r_t).ln();
        design[(row, 0)] = (-order * log_x).exp();
        design[(row, 1)] = (order * log_x).exp();
        rhs[row] = *v;
    }
    let norms = [design.column(0).norm(), design.column(1).norm()];
    for (j, norm) in norms.iter().enumerate() {
        design.column_mut(j).unscale_mut(*norm);
    }

    let svd = design.svd(true, true);
    let sv = &svd.singular_values;
    let condition = sv.max() / sv.min();
    if !(condition <= 1e8) {
        return Err(Error::Fit(format!(
            "boundary fit ill-conditioned (condition number {condition:e})"
        )));
    }
    let coeffs = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::Fit(e.to_string()))?;
    Ok(BoundaryAmplitudes {
        ingoing: coeffs[0] / norms[0],
        outgoing: coeffs[1] / norms[1],
    })
}

/// Evaluates `f`, parking the first error so it can be reported after quadrature.
struct Guarded<'a> {
    error: RefCell<Option<Error>>,
    f: Box<dyn Fn(f64) -> Result<Complex64> + 'a>,
}

impl<'a> Guarded<'a> {
    fn new(f: impl Fn(f64) -> Result<Complex64> + 'a) -> Self {
        Self {
            error: RefCell::new(None),
            f: Box::new(f),
        }
    }

    fn call(&self, x: f64) -> Complex64 {
        match (self.f)(x) {
            Ok(v) => v,
            Err(e) => {
                self.error.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    }

    fn integrate(&self, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
        let value = integrate_adaptive(|x| self.call(x), a, b, spec);
        if let Some(e) = self.error.borrow_mut().take() {
            return Err(e);
        }
        Ok(value?.re)
    }
}

/// `int_0^inf R |K_s(kappa R)|^2 dR`.
///
/// With `x = |kappa| R` the integral splits at `x = 1`: the inner part is
/// taken in `u = -ln x` (the wavefunction oscillates in `ln R` there), the
/// tail in `x` on doubling panels until `exp(-2 x cos(arg kappa))` has
/// dropped below the tolerance.
pub fn norm_integral(energy: Complex64, s: &ChannelExponent) -> Result<f64> {
    let kappa = kappa_of_energy(energy)?;
    let modulus = kappa.norm();
    let direction = kappa / modulus;
    let order = s.s();
    let spec = QuadratureSpec::new(1e-10, 1e-300, 4000)?;

    let inner = Guarded::new(|u: f64| {
        let k = bessel_k(order, direction * (-u).exp())?;
        Ok(Complex64::new((-2.0 * u).exp() * k.norm_sqr(), 0.0))
    });
    let mut total = inner.integrate(0.0, 40.0, &spec)?;

    let decay = 2.0 * direction.re;
    let target = 40.0 + 1e10f64.ln();
    let tail = Guarded::new(|x: f64| {
        let k = bessel_k_scaled(order, direction * x)?;
        Ok(Complex64::new(x * (-decay * x).exp() * k.norm_sqr(), 0.0))
    });
    let mut lo = 1.0;
    loop {
        let hi = 2.0 * lo;
        total += tail.integrate(lo, hi, &spec)?;
        if decay * hi - hi.ln() > target {
            break;
        }
        lo = hi;
    }
    Ok(total / (modulus * modulus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efimov::{lossy_energy, solve_channel_exponent};

    #[test]
    fn grids() {
        let u = uniform(0.5, 5.0, 4501);
        assert_eq!(u.len(), 4501);
        assert!((u[1] - u[0] - 1e-3).abs() < 1e-12);
        assert_eq!(*u.last().unwrap(), 5.0);
        let l = log_spaced(1e-3, 10.0, 5);
        assert!((l[1] / l[0] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn residual_rejects_bad_grids() {
        let s = solve_channel_exponent(1e-13).unwrap();
        let e = lossy_energy(0, &ModelParams::new(0.5, 1.0).unwrap(), &s).unwrap();
        let short = radial_wavefunction(e, &[1.0, 1.1, 1.2, 1.3], &s).unwrap();
        assert!(matches!(
            ode_residual(&short, &s),
            Err(Error::Precondition(_))
        ));
        let uneven = radial_wavefunction(e, &[1.0, 1.1, 1.25, 1.3, 1.4, 1.5], &s).unwrap();
        assert!(matches!(
            ode_residual(&uneven, &s),
            Err(Error::Precondition(_))
        ));
        let coarse = radial_wavefunction(e, &uniform(1.0, 9.0, 6), &s).unwrap();
        assert!(matches!(
            ode_residual(&coarse, &s),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn boundary_fit_needs_small_radii() {
        let s = solve_channel_exponent(1e-13).unwrap();
        let params = ModelParams::new(0.5, 1.0).unwrap();
        let e = lossy_energy(0, &params, &s).unwrap();
        let profile = radial_wavefunction(e, &uniform(0.5, 1.0, 10), &s).unwrap();
        assert!(matches!(
            bc_amplitudes(&profile, &params, &s),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn boundary_fit_is_exact_on_two_power_laws() {
        let s = solve_channel_exponent(1e-13).unwrap();
        let params = ModelParams::new(0.0, 2.0).unwrap();
        let (cm, cp) = (Complex64::new(0.3, -1.2), Complex64::new(-0.7, 0.1));
        let radii = log_spaced(1e-5, 1e-2, 8);
        let values = radii
            .iter()
            .map(|r| {
                let lx = (r / 2.0).ln();
                cm * (-s.s() * lx).exp() + cp * (s.s() * lx).exp()
            })
            .collect();
        let profile = RadialProfile::new(radii, values, Complex64::new(-1.0, 0.0)).unwrap();
        let amps = bc_amplitudes(&profile, &params, &s).unwrap();
        assert!((amps.ingoing - cm).norm() < 1e-13);
        assert!((amps.outgoing - cp).norm() < 1e-13);
    }
}
