use num_complex::Complex64;

use super::SolverConfig;
use crate::efimov::{
    check_below_critical, kappa_of_energy, lossless_energy, ChannelExponent, ModelParams,
    TrimerState,
};
use crate::exec::Execution;
use crate::specfun::ln_gamma;
use crate::{Error, Result};

/// Matching residual `Q(E) = exp(-2 eta*) + (Gamma(-s)/Gamma(s)) (kappa r_t / 2)^(2s)`.
///
/// Near `R = 0`, `K_s(kappa R) = c_minus (R/r_t)^(-s) + c_plus (R/r_t)^s` with
/// `c_minus = Gamma(s)/2 (kappa r_t/2)^(-s)` and `c_plus = Gamma(-s)/2 (kappa r_t/2)^s`.
/// The lossy boundary condition demands `c_plus / c_minus = -exp(-2 eta*)`,
/// which is `Q = 0`.
pub fn quantization_residual(
    energy: Complex64,
    params: &ModelParams,
    s: &ChannelExponent,
) -> Result<Complex64> {
    residual_with_reflection(energy, params, s, (-2.0 * params.eta_star).exp())
}

/// `Q` with an arbitrary reflection amplitude in place of `exp(-2 eta*)`.
pub(crate) fn residual_with_reflection(
    energy: Complex64,
    params: &ModelParams,
    s: &ChannelExponent,
    reflection: f64,
) -> Result<Complex64> {
    let kappa = kappa_of_energy(energy)?;
    let s = s.s();
    let gamma_ratio = (ln_gamma(-s)? - ln_gamma(s)?).exp();
    let power = (2.0 * s * (kappa * (0.5 * params.r_t)).ln()).exp();
    Ok(reflection + gamma_ratio * power)
}

/// Damped complex Newton iteration with a central-difference derivative
/// (step `1e-7 |E|`). Converged when `|f| < residual_tol` or, if
/// `step_tol` is set, when the relative step falls below it.
pub(crate) fn complex_newton<F>(
    f: F,
    seed: Complex64,
    residual_tol: f64,
    step_tol: Option<f64>,
    max_iterations: usize,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if seed.norm() == 0.0 {
        return Err(Error::domain("Newton seed must be non-zero"));
    }
    let mut energy = seed;
    let mut trace = Vec::with_capacity(max_iterations);
    for _ in 0..max_iterations {
        let value = f(energy)?;
        trace.push(energy);
        if value.norm() < residual_tol {
            return Ok(energy);
        }
        let h = 1e-7 * energy.norm();
        let slope = (f(energy + h)? - f(energy - h)?) / (2.0 * h);
        if slope.norm() == 0.0 || !slope.re.is_finite() || !slope.im.is_finite() {
            return Err(Error::Solver {
                message: format!("vanishing derivative at E = {energy}"),
                trace,
            });
        }
        let mut step = value / slope;
        // Keep each update within half the current modulus; the residuals are
        // periodic in ln E and a long jump lands in a different state's basin.
        let limit = 0.5 * energy.norm();
        if step.norm() > limit {
            step *= limit / step.norm();
        }
        // Never cross the cut of kappa = sqrt(-2E) on the positive real axis:
        // beyond it the iteration continues on the unphysical sheet.
        let mut halvings = 0;
        while crosses_cut(energy, energy - step) && halvings < 60 {
            step *= 0.5;
            halvings += 1;
        }
        energy -= step;
        if let Some(tol) = step_tol {
            if step.norm() < tol * energy.norm() {
                trace.push(energy);
                return Ok(energy);
            }
        }
    }
    Err(Error::Solver {
        message: format!("no convergence in {max_iterations} Newton iterations from seed {seed}"),
        trace,
    })
}

fn crosses_cut(from: Complex64, to: Complex64) -> bool {
    ((-to).arg() - (-from).arg()).abs() > std::f64::consts::PI
}

/// Efimov index of an energy, from its modulus relative to the `n = 0` lossless state.
pub(crate) fn index_of(energy: Complex64, s: &ChannelExponent, r_t: f64) -> i64 {
    let reference = lossless_energy(0, s, r_t).abs();
    ((energy.norm() / reference).ln() / std::f64::consts::TAU * s.magnitude()).round() as i64
}

/// Locate a root of [`quantization_residual`] by Newton iteration from `seed`.
pub fn find_state(
    seed: Complex64,
    params: &ModelParams,
    s: &ChannelExponent,
    cfg: &SolverConfig,
) -> Result<TrimerState> {
    cfg.validate()?;
    check_below_critical(params, s)?;
    let energy = complex_newton(
        |e| quantization_residual(e, params, s),
        seed,
        cfg.root_tolerance,
        None,
        cfg.max_newton_iterations,
    )?;
    TrimerState::from_energy(index_of(energy, s, params.r_t), energy)
}

/// Starting guess for state `n` that is deliberately off the analytic answer:
/// modulus scaled by 1.3 and rotation angle `1.9 eta*/|s|` instead of `2 eta*/|s|`.
pub fn detuned_seed(n: i64, params: &ModelParams, s: &ChannelExponent) -> Complex64 {
    let angle = 1.9 * params.eta_star / s.magnitude();
    Complex64::from_polar(1.3, angle) * lossless_energy(n, s, params.r_t)
}

/// [`find_state`] for every `n` in `n_min..=n_max`, in order of `n`.
pub fn scan_states(
    n_min: i64,
    n_max: i64,
    params: &ModelParams,
    s: &ChannelExponent,
    cfg: &SolverConfig,
) -> Result<Vec<TrimerState>> {
    scan_states_with(Execution::default(), n_min, n_max, params, s, cfg)
}

pub fn scan_states_with(
    exec: Execution,
    n_min: i64,
    n_max: i64,
    params: &ModelParams,
    s: &ChannelExponent,
    cfg: &SolverConfig,
) -> Result<Vec<TrimerState>> {
    if n_min > n_max {
        return Err(Error::precondition(format!(
            "empty index range {n_min}..={n_max}"
        )));
    }
    check_below_critical(params, s)?;
    let indices: Vec<i64> = (n_min..=n_max).collect();
    let states = exec.try_map(&indices, |&n| {
        let state =
            find_state(detuned_seed(n, params, s), params, s, cfg).map_err(|e| Error::State {
                n,
                source: Box::new(e),
            })?;
        if state.n != n {
            return Err(Error::State {
                n,
                source: Box::new(Error::Solver {
                    message: format!("converged to state {} instead", state.n),
                    trace: vec![state.energy],
                }),
            });
        }
        Ok(state)
    })?;

    let factor = s.scaling_factor();
    for pair in states.windows(2) {
        let ratio = pair[1].energy / pair[0].energy;
        if (ratio - factor).norm() > 1e-8 * factor {
            return Err(Error::State {
                n: pair[1].n,
                source: Box::new(Error::Solver {
                    message: format!(
                        "energy ratio {ratio} to the previous state deviates from {factor}"
                    ),
                    trace: vec![pair[0].energy, pair[1].energy],
                }),
            });
        }
    }
    Ok(states)
}
