use efimov_core::efimov::{
    analytic_state, critical_eta, to_physical_units, ModelParams, TrimerState,
};
use efimov_core::hyperradial::{log_spaced, radial_wavefunction_with};
use efimov_core::verify::{self, Level};
use efimov_core::Execution;

use crate::table::{Cell, Table};
use crate::{parameter, CliError, Context};

const WAVEFUNCTION_R_MIN: f64 = 1e-3;

/// `(E, hbar Gamma or Gamma, kappa, size)` in the requested units.
fn converted(
    ctx: &Context,
    st: &TrimerState,
) -> (efimov_core::Complex64, f64, efimov_core::Complex64, f64) {
    match &ctx.units {
        None => (st.energy, st.gamma, st.kappa, st.size),
        Some(units) => {
            let phys = to_physical_units(st, units);
            (
                phys.energy_joules,
                phys.gamma_per_second,
                st.kappa / units.length_meters,
                phys.size_meters,
            )
        }
    }
}

pub fn spectrum(ctx: &Context, n_min: i64, n_max: i64) -> Result<Table, CliError> {
    if n_min > n_max {
        return Err(parameter(format!(
            "--n-min {n_min} exceeds --n-max {n_max}"
        )));
    }
    let params = ModelParams::new(ctx.eta, ctx.rt)?;
    let mut rows = Vec::new();
    for n in n_min..=n_max {
        let st = analytic_state(n, &params, &ctx.s)?;
        let (e, gamma, kappa, size) = converted(ctx, &st);
        rows.push(vec![
            Cell::Int(n),
            Cell::Float(e.re),
            Cell::Float(e.im),
            Cell::Float(e.norm()),
            Cell::Float(st.energy_arg()),
            Cell::Float(gamma),
            Cell::Float(kappa.re),
            Cell::Float(kappa.im),
            Cell::Float(size),
        ]);
    }
    Ok(Table {
        columns: vec![
            "n", "re_e", "im_e", "abs_e", "arg_e", "gamma", "re_kappa", "im_kappa", "size",
        ],
        rows,
    })
}

pub fn rotate(ctx: &Context, n: i64, eta_steps: usize) -> Result<Table, CliError> {
    if eta_steps < 2 {
        return Err(parameter(format!(
            "--eta-steps must be at least 2, got {eta_steps}"
        )));
    }
    let critical = critical_eta(&ctx.s);
    let mut rows = Vec::with_capacity(eta_steps);
    for k in 0..eta_steps {
        let eta = critical * k as f64 / eta_steps as f64;
        let st = analytic_state(n, &ModelParams::new(eta, ctx.rt)?, &ctx.s)?;
        let (e, gamma, _, _) = converted(ctx, &st);
        rows.push(vec![
            Cell::Float(eta),
            Cell::Float(e.re),
            Cell::Float(e.im),
            Cell::Float(st.energy_arg()),
            Cell::Float(gamma),
        ]);
    }
    Ok(Table {
        columns: vec!["eta", "re_e", "im_e", "arg_e", "gamma"],
        rows,
    })
}

pub fn wavefunction(ctx: &Context, n: i64, r_max: f64, points: usize) -> Result<Table, CliError> {
    if !(r_max > WAVEFUNCTION_R_MIN && r_max.is_finite()) {
        return Err(parameter(format!(
            "--r-max must exceed {WAVEFUNCTION_R_MIN}, got {r_max}"
        )));
    }
    if points < 2 {
        return Err(parameter(format!(
            "--points must be at least 2, got {points}"
        )));
    }
    let st = analytic_state(n, &ModelParams::new(ctx.eta, ctx.rt)?, &ctx.s)?;
    let radii = log_spaced(WAVEFUNCTION_R_MIN, r_max, points);
    let profile = radial_wavefunction_with(Execution::default(), st.energy, &radii, &ctx.s)?;
    let length = ctx.units.as_ref().map_or(1.0, |u| u.length_meters);
    let rows = profile
        .radii
        .iter()
        .zip(&profile.values)
        .map(|(r, f)| {
            vec![
                Cell::Float(r * length),
                Cell::Float(f.re),
                Cell::Float(f.im),
                Cell::Float(f.norm()),
            ]
        })
        .collect();
    Ok(Table {
        columns: vec!["r", "re_f", "im_f", "abs_f"],
        rows,
    })
}

/// The report as a table, plus the first failure if any check failed.
pub fn verify(level: Level) -> Result<(Table, Option<String>), CliError> {
    let report = verify::run(level)?;
    let rows = report
        .checks
        .iter()
        .map(|c| {
            vec![
                Cell::Text(c.name.clone()),
                Cell::Text(if c.passed { "pass" } else { "fail" }.to_string()),
                Cell::Float(c.measured),
                Cell::Float(c.threshold),
                Cell::Text(c.detail.clone()),
            ]
        })
        .collect();
    let failure = report.first_failure().map(|c| c.to_string());
    Ok((
        Table {
            columns: vec!["check", "status", "measured", "threshold", "detail"],
            rows,
        },
        failure,
    ))
}
