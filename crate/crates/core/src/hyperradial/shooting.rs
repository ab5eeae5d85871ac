use num_complex::Complex64;

use super::ode::{integrate, State};
use super::quantization::{complex_newton, index_of};
use super::{RadialProfile, SolverConfig};
use crate::efimov::{
    check_below_critical, kappa_of_energy, ChannelExponent, ModelParams, TrimerState,
};
use crate::{Error, Result};

const MAX_SERIES_TERMS: usize = 400;

fn hyperradial_rhs(energy: Complex64, s: Complex64) -> impl Fn(f64, &State) -> State {
    let s2 = s * s;
    move |r: f64, y: &State| [y[1], -y[1] / r + (s2 / (r * r) - 2.0 * energy) * y[0]]
}

/// Frobenius solution `(R/r_t)^nu sum_k a_k R^(2k)` of the hyperradial
/// equation with `a_0 = 1` and `a_k = a_{k-1} (kappa^2/4) / (k (k + nu))`,
/// together with its derivative.
fn frobenius(nu: Complex64, kappa_sq: Complex64, r: f64, r_t: f64) -> (Complex64, Complex64) {
    let step = kappa_sq * (0.25 * r * r);
    let mut coeff = Complex64::new(1.0, 0.0);
    let mut value = coeff;
    let mut slope = nu;
    for k in 1..MAX_SERIES_TERMS {
        let kf = k as f64;
        coeff *= step / (kf * (kf + nu));
        value += coeff;
        slope += coeff * (nu + 2.0 * kf);
        if coeff.norm() < 1e-18 * value.norm() {
            break;
        }
    }
    let power = (nu * (r / r_t).ln()).exp();
    (power * value, power * slope / r)
}

/// `(F, F')` at `r` for `F = (R/r_t)^(-s) - exp(-2 eta*) (R/r_t)^s`, each power
/// completed with its series corrections in `(kappa R)^2`.
fn short_distance_data(energy: Complex64, params: &ModelParams, s: Complex64, r: f64) -> State {
    let kappa_sq = -2.0 * energy;
    let (in_val, in_der) = frobenius(-s, kappa_sq, r, params.r_t);
    let (out_val, out_der) = frobenius(s, kappa_sq, r, params.r_t);
    let reflection = (-2.0 * params.eta_star).exp();
    [in_val - reflection * out_val, in_der - reflection * out_der]
}

/// `(F, F')` at `r` for the decaying solution
/// `F = exp(-kappa R) (kappa R)^(-1/2) sum_k b_k (kappa R)^(-k)`,
/// `b_k = b_{k-1} (4 s^2 - (2k-1)^2) / (8k)`, summed to its smallest term.
/// Up to the constant `sqrt(pi/2)` this is `K_s(kappa R)`.
fn decaying_tail(kappa: Complex64, s: Complex64, r: f64) -> State {
    let z = kappa * r;
    let mu = 4.0 * s * s;
    let mut coeff = Complex64::new(1.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(1.0, 0.0);
    let mut slope = Complex64::new(0.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..MAX_SERIES_TERMS {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        coeff *= (mu - odd * odd) / (8.0 * kf);
        power /= z;
        let term = coeff * power;
        if term.norm() > last {
            break;
        }
        last = term.norm();
        sum += term;
        slope -= kf * term / z;
        if last < 1e-18 * sum.norm() {
            break;
        }
    }
    let value = (-z).exp() / z.sqrt() * sum;
    [value, value * kappa * (-1.0 - 0.5 / z + slope / sum)]
}

#[cfg(test)]
fn decaying_log_derivative(kappa: Complex64, s: Complex64, r: f64) -> Complex64 {
    let [f, df] = decaying_tail(kappa, s, r);
    df / f
}

/// Result of two-sided shooting at a trial energy.
#[derive(Clone, Debug, PartialEq)]
pub struct ShootingSolution {
    pub match_radius: f64,
    pub r_max: f64,
    /// `F'/F` at the match radius, integrating out from the short-distance data.
    pub outward_log_derivative: Complex64,
    /// `F'/F` at the match radius, integrating in from the decaying tail.
    pub inward_log_derivative: Complex64,
    /// Both branches scaled to `F = 1` at the match radius and joined there.
    pub profile: RadialProfile,
}

impl ShootingSolution {
    /// Outward minus inward log-derivative; zero at an eigenvalue.
    pub fn mismatch(&self) -> Complex64 {
        self.outward_log_derivative - self.inward_log_derivative
    }
}

struct Geometry {
    kappa: Complex64,
    match_radius: f64,
    r_max: f64,
}

fn geometry(energy: Complex64, cfg: &SolverConfig) -> Result<Geometry> {
    cfg.validate()?;
    let kappa = kappa_of_energy(energy)?;
    let match_radius = cfg.match_kappa / kappa.norm();
    let r_max = cfg.r_max_kappa / kappa.norm();
    if match_radius <= cfg.r_min {
        return Err(Error::precondition(format!(
            "match radius {match_radius:e} lies inside r_min = {:e}; lower r_min for |kappa| = {}",
            cfg.r_min,
            kappa.norm()
        )));
    }
    Ok(Geometry {
        kappa,
        match_radius,
        r_max,
    })
}

/// Solve the hyperradial equation at a trial energy by shooting from both ends.
///
/// The outward leg starts at `cfg.r_min` from the lossy short-distance form
/// (Frobenius series, no special functions) and runs to
/// `R_match = match_kappa / |kappa|`. The inward leg starts at
/// `R_max = r_max_kappa / |kappa|` on the decaying asymptotic solution and runs
/// back to `R_match`. Integrating the decaying solution outward is hopeless in
/// double precision: over `|kappa| R` from 2 to 30 any admixture of the growing
/// solution is amplified by about `e^56`.
pub fn integrate_ode(
    energy: Complex64,
    params: &ModelParams,
    s: &ChannelExponent,
    cfg: &SolverConfig,
) -> Result<ShootingSolution> {
    let Geometry {
        kappa,
        match_radius,
        r_max,
    } = geometry(energy, cfg)?;
    let s = s.s();
    let rhs = hyperradial_rhs(energy, s);

    let mut outward = Vec::new();
    let start = short_distance_data(energy, params, s, cfg.r_min);
    let out = integrate(
        &rhs,
        cfg.r_min,
        start,
        match_radius,
        cfg.ode_tolerance,
        Some(&mut outward),
    )?;

    let mut inward = Vec::new();
    let tail = decaying_tail(kappa, s, r_max);
    let inn = integrate(
        &rhs,
        r_max,
        tail,
        match_radius,
        cfg.ode_tolerance,
        Some(&mut inward),
    )?;

    let (out_scale, in_scale) = (out[0], inn[0]);
    let mut radii = Vec::with_capacity(outward.len() + inward.len());
    let mut values = Vec::with_capacity(outward.len() + inward.len());
    for (r, f) in outward {
        radii.push(r);
        values.push(f / out_scale);
    }
    // The inward leg runs from r_max down; skip its final point, which duplicates R_match.
    for &(r, f) in inward.iter().rev().skip(1) {
        radii.push(r);
        values.push(f / in_scale);
    }

    Ok(ShootingSolution {
        match_radius,
        r_max,
        outward_log_derivative: out[1] / out[0],
        inward_log_derivative: inn[1] / inn[0],
        profile: RadialProfile::new(radii, values, energy)?,
    })
}

/// Shooting mismatch `M(E)`, outward minus inward `F'/F` at the match radius.
pub fn shoot_match(
    energy: Complex64,
    params: &ModelParams,
    s: &ChannelExponent,
    cfg: &SolverConfig,
) -> Result<Complex64> {
    let geo = geometry(energy, cfg)?;
    let s = s.s();
    let rhs = hyperradial_rhs(energy, s);
    let start = short_distance_data(energy, params, s, cfg.r_min);
    let out = integrate(
        &rhs,
        cfg.r_min,
        start,
        geo.match_radius,
        cfg.ode_tolerance,
        None,
    )?;
    let tail = decaying_tail(geo.kappa, s, geo.r_max);
    let inn = integrate(
        &rhs,
        geo.r_max,
        tail,
        geo.match_radius,
        cfg.ode_tolerance,
        None,
    )?;
    Ok(out[1] / out[0] - inn[1] / inn[0])
}

/// `R W[F_out, F_in]` at the match radius, with the inward leg carrying the
/// asymptotic normalisation of [`decaying_tail`]. The scaled Wronskian does
/// not depend on where the legs meet, so unlike the log-derivative mismatch
/// it is analytic in `E` and free of poles.
fn scaled_wronskian(
    energy: Complex64,
    params: &ModelParams,
    s: &ChannelExponent,
    cfg: &SolverConfig,
) -> Result<Complex64> {
    let geo = geometry(energy, cfg)?;
    let s = s.s();
    let rhs = hyperradial_rhs(energy, s);
    let start = short_distance_data(energy, params, s, cfg.r_min);
    let out = integrate(
        &rhs,
        cfg.r_min,
        start,
        geo.match_radius,
        cfg.ode_tolerance,
        None,
    )?;
    let tail = decaying_tail(geo.kappa, s, geo.r_max);
    let inn = integrate(
        &rhs,
        geo.r_max,
        tail,
        geo.match_radius,
        cfg.ode_tolerance,
        None,
    )?;
    Ok(geo.match_radius * (out[1] * inn[0] - out[0] * inn[1]))
}

/// `F'/F` at `R_max = r_max_kappa / |kappa|` integrating outward only.
///
/// Away from an eigenvalue the growing solution dominates and this tends to
/// `+kappa`.
pub fn outward_log_derivative(
    energy: Complex64,
    params: &ModelParams,
    s: &ChannelExponent,
    cfg: &SolverConfig,
) -> Result<Complex64> {
    let geo = geometry(energy, cfg)?;
    let s = s.s();
    let start = short_distance_data(energy, params, s, cfg.r_min);
    let end = integrate(
        hyperradial_rhs(energy, s),
        cfg.r_min,
        start,
        geo.r_max,
        cfg.ode_tolerance,
        None,
    )?;
    Ok(end[1] / end[0])
}

/// Shooting eigenvalue search; independent of the special-function code.
///
/// Newton runs on the scaled Wronskian of the two legs (the log-derivative
/// mismatch has poles wherever the outward leg vanishes at the match point);
/// the result is accepted when `|M| / |kappa| <= 1e-6` for [`shoot_match`].
pub fn find_state_shooting(
    seed: Complex64,
    params: &ModelParams,
    s: &ChannelExponent,
    cfg: &SolverConfig,
) -> Result<TrimerState> {
    check_below_critical(params, s)?;
    let step_tol = (10.0 * cfg.ode_tolerance).max(1e-13);
    let energy = complex_newton(
        |e| scaled_wronskian(e, params, s, cfg),
        seed,
        0.0,
        Some(step_tol),
        cfg.max_newton_iterations,
    )?;
    let residual = shoot_match(energy, params, s, cfg)?.norm() / kappa_of_energy(energy)?.norm();
    if residual > 1e-6 {
        return Err(Error::Solver {
            message: format!("shooting stalled at E = {energy} with |M|/|kappa| = {residual:e}"),
            trace: vec![seed, energy],
        });
    }
    TrimerState::from_energy(index_of(energy, s, params.r_t), energy)
}
