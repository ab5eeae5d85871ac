//! The cross-check suite behind `efimov verify`.
//!
//! Every check compares two independently computed quantities and records the
//! measured discrepancy next to its threshold. Failures of the underlying
//! solvers are recorded as failed checks rather than aborting the run.

use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::ansatz::bethe_peierls_check;
use crate::efimov::{
    critical_eta, decay_rate, lossless_energy, solve_channel_exponent, ChannelExponent,
    ModelParams, TrimerState,
};
use crate::exec::Execution;
use crate::hyperradial::{
    bc_amplitudes, boundary_radii, complex_newton, detuned_seed, find_state_shooting,
    norm_integral, ode_residual, radial_wavefunction, residual_grid, residual_with_reflection,
    SolverConfig,
};
use crate::Result;

pub const GRID_N: [i64; 3] = [-1, 0, 1];
pub const GRID_ETA: [f64; 5] = [0.0, 0.06, 0.5, 1.0, 1.5];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    /// Closed-form and matching-condition checks only.
    Fast,
    /// Adds ODE shooting, finite-difference residuals and the contact condition.
    Full,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn below(name: impl Into<String>, measured: f64, threshold: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            measured,
            threshold,
            passed: measured < threshold,
            detail,
        }
    }

    fn above(name: impl Into<String>, measured: f64, threshold: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            measured,
            threshold,
            passed: measured > threshold,
            detail,
        }
    }

    fn failed(name: impl Into<String>, threshold: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            measured: f64::NAN,
            threshold,
            passed: false,
            detail,
        }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: measured {:.3e}, threshold {:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.threshold
        )?;
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub level: Level,
    pub checks: Vec<CheckOutcome>,
    pub elapsed: Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            writeln!(f, "{check}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(
            f,
            "{} checks, {} failed, {:.2} s",
            self.checks.len(),
            failed,
            self.elapsed.as_secs_f64()
        )
    }
}

pub fn run(level: Level) -> Result<Report> {
    run_with(Execution::default(), level)
}

pub fn run_with(exec: Execution, level: Level) -> Result<Report> {
    run_inner(exec, level, 1.0)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn label(n: i64, eta: f64) -> String {
    format!("n={n} eta*={eta}")
}

/// `reflection_sign = -1` flips the sign of `exp(-2 eta*)` in the matching
/// condition, which any correct report must catch.
fn run_inner(exec: Execution, level: Level, reflection_sign: f64) -> Result<Report> {
    let start = Instant::now();
    let s = solve_channel_exponent(1e-13)?;
    let cfg = SolverConfig::default();
    let mut checks = vec![
        CheckOutcome::below(
            "channel exponent",
            (s.magnitude() - 1.00624).abs(),
            1e-5,
            format!("|s| = {:.12}", s.magnitude()),
        ),
        CheckOutcome::below(
            "critical inelasticity",
            (critical_eta(&s) - 1.5806).abs(),
            2e-4,
            format!("eta*c = {:.12}", critical_eta(&s)),
        ),
    ];

    let grid: Vec<(i64, f64)> = GRID_ETA
        .iter()
        .flat_map(|&eta| GRID_N.iter().map(move |&n| (n, eta)))
        .collect();
    let per_state = exec.map(&grid, |&(n, eta)| {
        grid_checks(n, eta, &s, &cfg, level, reflection_sign)
    });
    checks.extend(per_state.into_iter().flatten());

    checks.push(geometric_check(&s, &cfg, reflection_sign));
    checks.push(norm_check(&s));
    if level == Level::Full {
        checks.extend(contact_checks(&s));
    }

    Ok(Report {
        level,
        checks,
        elapsed: start.elapsed(),
    })
}

fn solve_q(
    n: i64,
    params: &ModelParams,
    s: &ChannelExponent,
    cfg: &SolverConfig,
    reflection_sign: f64,
) -> Result<TrimerState> {
    let reflection = reflection_sign * (-2.0 * params.eta_star).exp();
    let energy = complex_newton(
        |e| residual_with_reflection(e, params, s, reflection),
        detuned_seed(n, params, s),
        cfg.root_tolerance,
        None,
        cfg.max_newton_iterations,
    )?;
    TrimerState::from_energy(n, energy)
}

fn grid_checks(
    n: i64,
    eta: f64,
    s: &ChannelExponent,
    cfg: &SolverConfig,
    level: Level,
    reflection_sign: f64,
) -> Vec<CheckOutcome> {
    let at = label(n, eta);
    let params = ModelParams::new(eta, 1.0).expect("grid parameters are valid");
    let e0 = lossless_energy(n, s, 1.0);
    let rotated = Complex64::from_polar(1.0, 2.0 * eta / s.magnitude()) * e0;

    let state = match solve_q(n, &params, s, cfg, reflection_sign) {
        Ok(st) => st,
        Err(e) => {
            return vec![CheckOutcome::failed(
                format!("rotation law {at}"),
                1e-8,
                format!("root finding failed: {e}"),
            )]
        }
    };
    let mut out = vec![CheckOutcome::below(
        format!("rotation law {at}"),
        rel(state.energy, rotated),
        1e-8,
        format!("E = {}", state.energy),
    )];

    let closed = 2.0 * (2.0 * eta / s.magnitude()).sin() * e0.abs();
    out.push(match decay_rate(state.energy) {
        Ok(gamma) => CheckOutcome::below(
            format!("decay rate {at}"),
            (gamma - closed).abs() / e0.abs(),
            1e-7,
            format!("hbar Gamma = {gamma:e}"),
        ),
        Err(e) => CheckOutcome::failed(format!("decay rate {at}"), 1e-7, e.to_string()),
    });

    let target = Complex64::new(-(-2.0 * eta).exp(), 0.0);
    let fit = radial_wavefunction(state.energy, &boundary_radii(state.kappa, 1.0), s)
        .and_then(|p| bc_amplitudes(&p, &params, s));
    out.push(match fit {
        Ok(amps) => CheckOutcome::below(
            format!("boundary amplitudes {at}"),
            (amps.ratio() - target).norm(),
            1e-6,
            format!("c+/c- = {}", amps.ratio()),
        ),
        Err(e) => CheckOutcome::failed(format!("boundary amplitudes {at}"), 1e-6, e.to_string()),
    });

    if level == Level::Full {
        out.push(
            match find_state_shooting(detuned_seed(n, &params, s), &params, s, cfg) {
                Ok(shot) => CheckOutcome::below(
                    format!("shooting root {at}"),
                    rel(shot.energy, state.energy),
                    1e-7,
                    format!("E = {}", shot.energy),
                ),
                Err(e) => CheckOutcome::failed(format!("shooting root {at}"), 1e-7, e.to_string()),
            },
        );
        let residual = radial_wavefunction(state.energy, &residual_grid(state.kappa), s)
            .and_then(|p| ode_residual(&p, s));
        out.push(match residual {
            Ok(r) => CheckOutcome::below(format!("ODE residual {at}"), r, 1e-5, String::new()),
            Err(e) => CheckOutcome::failed(format!("ODE residual {at}"), 1e-5, e.to_string()),
        });
    }
    out
}

fn geometric_check(s: &ChannelExponent, cfg: &SolverConfig, reflection_sign: f64) -> CheckOutcome {
    let params = ModelParams::new(0.5, 1.0).expect("valid parameters");
    let states: Result<Vec<TrimerState>> = GRID_N
        .iter()
        .map(|&n| solve_q(n, &params, s, cfg, reflection_sign))
        .collect();
    match states {
        Ok(states) => {
            let factor = s.scaling_factor();
            let worst = states
                .windows(2)
                .map(|w| (w[1].energy.norm() / w[0].energy.norm() / factor - 1.0).abs())
                .fold(0.0, f64::max);
            CheckOutcome::below(
                "geometric spectrum",
                worst,
                1e-10,
                format!("exp(2 pi/|s|) = {factor:.9}"),
            )
        }
        Err(e) => CheckOutcome::failed("geometric spectrum", 1e-10, e.to_string()),
    }
}

/// Finite and strictly increasing towards `eta*c` at `n = 0`.
fn norm_check(s: &ChannelExponent) -> CheckOutcome {
    let values: Result<Vec<f64>> = GRID_ETA
        .iter()
        .map(|&eta| {
            let params = ModelParams::new(eta, 1.0)?;
            norm_integral(crate::efimov::lossy_energy(0, &params, s)?, s)
        })
        .collect();
    match values {
        Ok(values) => {
            let finite = values.iter().all(|v| v.is_finite() && *v > 0.0);
            // smallest relative increase along the grid; must be positive
            let growth = values
                .windows(2)
                .map(|w| w[1] / w[0] - 1.0)
                .fold(f64::INFINITY, f64::min);
            let measured = if finite { growth } else { f64::NAN };
            CheckOutcome::above(
                "norm growth",
                measured,
                0.0,
                format!(
                    "first {:.6e}, last {:.6e}",
                    values[0],
                    values[values.len() - 1]
                ),
            )
        }
        Err(e) => CheckOutcome::failed("norm growth", 0.0, e.to_string()),
    }
}

fn contact_checks(s: &ChannelExponent) -> Vec<CheckOutcome> {
    let energy = Complex64::new(lossless_energy(0, s, 1.0), 0.0);
    let center = [0.0; 3];
    let spectator = [1.0, 0.0, 0.0];
    let mut out = Vec::new();
    out.push(match bethe_peierls_check(center, spectator, energy, s) {
        Ok(c) => CheckOutcome::below(
            "contact condition",
            c.constant_term_ratio,
            1e-4,
            format!("A = {}", c.divergent_coeff),
        ),
        Err(e) => CheckOutcome::failed("contact condition", 1e-4, e.to_string()),
    });
    let detuned = ChannelExponent::with_magnitude(1.01 * s.magnitude())
        .and_then(|d| bethe_peierls_check(center, spectator, energy, &d));
    out.push(match detuned {
        Ok(c) => CheckOutcome::above(
            "contact condition detects 1% detuning",
            c.constant_term_ratio,
            1e-2,
            String::new(),
        ),
        Err(e) => {
            CheckOutcome::failed("contact condition detects 1% detuning", 1e-2, e.to_string())
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_is_a_subset_of_full() {
        let fast = run_with(Execution::Parallel, Level::Fast).unwrap();
        let full = run_with(Execution::Parallel, Level::Full).unwrap();
        assert!(fast.checks.len() < full.checks.len());
        for c in &fast.checks {
            assert!(full.checks.iter().any(|d| d.name == c.name));
        }
        assert!(fast.passed(), "{fast}");
        assert!(full.passed(), "{full}");
        assert!(full.elapsed.as_secs() < 60);
    }

    #[test]
    fn flipped_reflection_sign_fails_boundary_check() {
        let report = run_inner(Execution::Parallel, Level::Fast, -1.0).unwrap();
        assert!(!report.passed());
        let boundary_failed = report
            .checks
            .iter()
            .any(|c| c.name.starts_with("boundary amplitudes") && !c.passed);
        assert!(boundary_failed, "{report}");
    }

    #[test]
    fn sequential_matches_parallel() {
        let a = run_with(Execution::Sequential, Level::Fast).unwrap();
        let b = run_with(Execution::Parallel, Level::Fast).unwrap();
        let names = |r: &Report| r.checks.iter().map(|c| c.name.clone()).collect::<Vec<_>>();
        assert_eq!(names(&a), names(&b));
        for (x, y) in a.checks.iter().zip(&b.checks) {
            assert!(x.measured == y.measured || (x.measured.is_nan() && y.measured.is_nan()));
        }
    }
}
