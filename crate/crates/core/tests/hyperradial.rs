use efimov_core::efimov::{
    critical_eta, decay_rate, kappa_of_energy, lossless_energy, lossy_energy,
    solve_channel_exponent, trimer_size, ChannelExponent, ModelParams,
};
use efimov_core::hyperradial::{
    bc_amplitudes, boundary_radii, detuned_seed, find_state, find_state_shooting, integrate_ode,
    log_spaced, norm_integral, ode_residual, outward_log_derivative, radial_wavefunction,
    residual_grid, scan_states, shoot_match, uniform, RadialProfile, SolverConfig,
};
use efimov_core::specfun::small_z_coefficients;
use efimov_core::Complex64;

const ETAS: [f64; 5] = [0.0, 0.06, 0.5, 1.0, 1.5];

fn s() -> ChannelExponent {
    solve_channel_exponent(1e-13).unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn quantization_roots_follow_rotation_law() {
    let s = s();
    let cfg = SolverConfig::default();
    for eta in ETAS {
        let params = ModelParams::new(eta, 1.0).unwrap();
        for n in -1..=1 {
            let expected =
                Complex64::from_polar(1.0, 2.0 * eta / s.magnitude()) * lossless_energy(n, &s, 1.0);
            let st = find_state(detuned_seed(n, &params, &s), &params, &s, &cfg).unwrap();
            assert!(rel(st.energy, expected) < 1e-8, "n={n} eta={eta}");
            assert_eq!(st.n, n);
        }
    }
}

#[test]
fn shooting_roots_agree_with_quantization_roots() {
    let s = s();
    let cfg = SolverConfig::default();
    for eta in ETAS {
        let params = ModelParams::new(eta, 1.0).unwrap();
        for n in -1..=1 {
            let q = find_state(detuned_seed(n, &params, &s), &params, &s, &cfg).unwrap();
            let m = find_state_shooting(detuned_seed(n, &params, &s), &params, &s, &cfg).unwrap();
            assert!(
                rel(m.energy, q.energy) < 1e-7,
                "n={n} eta={eta}: {}",
                rel(m.energy, q.energy)
            );
        }
    }
}

#[test]
fn decay_rate_bridge() {
    let s = s();
    let cfg = SolverConfig::default();
    for eta in ETAS {
        let params = ModelParams::new(eta, 1.0).unwrap();
        for st in scan_states(-1, 1, &params, &s, &cfg).unwrap() {
            let closed =
                2.0 * (2.0 * eta / s.magnitude()).sin() * lossless_energy(st.n, &s, 1.0).abs();
            let numeric = decay_rate(st.energy).unwrap();
            assert!(
                (numeric - closed).abs() <= 1e-7 * closed.max(1e-300) + 1e-14 * st.energy.norm()
            );
        }
    }
}

#[test]
fn size_diverges_like_inverse_cosine() {
    let s = s();
    let cfg = SolverConfig::default();
    let base = scan_states(0, 0, &ModelParams::lossless(1.0).unwrap(), &s, &cfg).unwrap()[0];
    for k in 1..=3 {
        let eta = critical_eta(&s) * (1.0 - 10f64.powi(-k));
        let params = ModelParams::new(eta, 1.0).unwrap();
        let st = scan_states(0, 0, &params, &s, &cfg).unwrap()[0];
        let predicted = 1.0 / (eta / s.magnitude()).cos();
        let growth = trimer_size(&st) / trimer_size(&base);
        assert!(
            (growth / predicted - 1.0).abs() < 1e-2,
            "k={k}: {growth} vs {predicted}"
        );
    }
}

#[test]
fn boundary_amplitudes_of_grid_states() {
    let s = s();
    let cfg = SolverConfig::default();
    for eta in ETAS.iter().copied().chain([0.3]) {
        let params = ModelParams::new(eta, 1.0).unwrap();
        for st in scan_states(-1, 1, &params, &s, &cfg).unwrap() {
            let profile =
                radial_wavefunction(st.energy, &boundary_radii(st.kappa, 1.0), &s).unwrap();
            let ratio = bc_amplitudes(&profile, &params, &s).unwrap().ratio();
            let target = Complex64::new(-(-2.0 * eta).exp(), 0.0);
            let tol = if eta == 0.0 { 1e-8 } else { 1e-6 };
            assert!(
                (ratio - target).norm() < tol,
                "n={} eta={eta}: {ratio}",
                st.n
            );
            if eta > 0.0 {
                assert!(ratio.norm() < 1.0);
            }
        }
    }
}

#[test]
fn flipped_reflection_sign_is_detected() {
    // A state built with +exp(-2 eta*) instead of -exp(-2 eta*) fails the fit check.
    let s = s();
    let params = ModelParams::new(0.5, 1.0).unwrap();
    let kappa = Complex64::from_polar(1.2, 0.6);
    let (cm, cp) = small_z_coefficients(s.s(), kappa, 1.0).unwrap();
    let radii = boundary_radii(kappa, 1.0);
    let values = radii
        .iter()
        .map(|r| {
            let lx = r.ln();
            cm * (-s.s() * lx).exp() - (cp / cm + 2.0 * (-1.0f64).exp()) * cm * (s.s() * lx).exp()
        })
        .collect();
    let profile = RadialProfile::new(radii, values, -kappa * kappa / 2.0).unwrap();
    let ratio = bc_amplitudes(&profile, &params, &s).unwrap().ratio();
    assert!((ratio + (-1.0f64).exp()).norm() > 1e-2);
}

#[test]
fn analytic_profiles_solve_the_radial_equation() {
    let s = s();
    let cfg = SolverConfig::default();
    for eta in ETAS {
        let params = ModelParams::new(eta, 1.0).unwrap();
        for st in scan_states(-1, 1, &params, &s, &cfg).unwrap() {
            let profile = radial_wavefunction(st.energy, &residual_grid(st.kappa), &s).unwrap();
            let res = ode_residual(&profile, &s).unwrap();
            assert!(res < 1e-5, "n={} eta={eta}: {res:e}", st.n);
        }
    }
}

#[test]
fn residual_examples() {
    let s = s();
    let params = ModelParams::new(0.5, 1.0).unwrap();
    let e = lossy_energy(0, &params, &s).unwrap();
    let fine = radial_wavefunction(e, &uniform(0.5, 5.0, 4501), &s).unwrap();
    assert!(ode_residual(&fine, &s).unwrap() < 1e-5);

    let mut corrupted = fine.clone();
    corrupted.values[2000] *= 1.01;
    assert!(ode_residual(&corrupted, &s).unwrap() > 1e-2);

    // Fourth order: halving h cuts the residual by about 16. The grids are
    // padded by 2h so the first interior point stays at R = 0.5.
    let padded = |h: f64| {
        let n = (4.5 / h).round() as usize + 5;
        let p = radial_wavefunction(e, &uniform(0.5 - 2.0 * h, 5.0 + 2.0 * h, n), &s).unwrap();
        ode_residual(&p, &s).unwrap()
    };
    let gain = padded(0.05) / padded(0.025);
    assert!((gain - 16.0).abs() < 2.0, "{gain}");
}

#[test]
fn wavefunction_shape() {
    let s = s();
    let params = ModelParams::new(0.5, 1.0).unwrap();
    let e = lossy_energy(0, &params, &s).unwrap();
    let kappa = kappa_of_energy(e).unwrap();

    // Tail: |F| sqrt(R) e^{Re kappa R} tends to a constant. The first
    // asymptotic correction (4 s^2 - 1) / (8 kappa R) is still 3% at
    // kappa R = 20, so it is divided out there; far out the bare envelope is flat.
    let envelope = |x: f64, corrected: bool| {
        let r = x / kappa.norm();
        let f = radial_wavefunction(e, &[r, 2.0 * r], &s).unwrap().values[0];
        let mut v = f.norm() * r.sqrt() * (kappa.re * r).exp();
        if corrected {
            v /= (1.0 + (4.0 * s.s() * s.s() - 1.0) / (8.0 * kappa * r)).norm();
        }
        v
    };
    for x in [24.0, 30.0, 40.0] {
        assert!((envelope(x, true) / envelope(20.0, true) - 1.0).abs() < 1e-2);
    }
    for x in [90.0, 120.0, 160.0] {
        assert!((envelope(x, false) / envelope(80.0, false) - 1.0).abs() < 1e-2);
    }

    // Real up to a constant when there are no losses.
    let lossless = ModelParams::lossless(1.0).unwrap();
    let e0 = lossy_energy(0, &lossless, &s).unwrap();
    let grid = log_spaced(1e-3, 5.0, 40);
    let p0 = radial_wavefunction(e0, &grid, &s).unwrap();
    for f in &p0.values[1..] {
        let ratio = f / p0.values[0];
        assert!(ratio.im.abs() < 1e-10 * ratio.norm());
    }

    // Short distance: two power laws.
    let (cm, cp) = small_z_coefficients(s.s(), kappa, 1.0).unwrap();
    let small = log_spaced(1e-7, 1e-5, 5);
    let p = radial_wavefunction(e, &small, &s).unwrap();
    for (r, f) in small.iter().zip(&p.values) {
        let approx = cm * (-s.s() * r.ln()).exp() + cp * (s.s() * r.ln()).exp();
        assert!(rel(approx, *f) < 1e-8);
    }
}

#[test]
fn shooting_examples() {
    let s = s();
    let cfg = SolverConfig::default();
    let params = ModelParams::new(0.5, 1.0).unwrap();
    let e = lossy_energy(0, &params, &s).unwrap();
    let kappa = kappa_of_energy(e).unwrap();

    assert!(shoot_match(e, &params, &s, &cfg).unwrap().norm() < 1e-6);
    assert!(shoot_match(1.2 * e, &params, &s, &cfg).unwrap().norm() > 1e-2 * kappa.norm());

    let off = outward_log_derivative(1.2 * e, &params, &s, &cfg).unwrap();
    let k_off = kappa_of_energy(1.2 * e).unwrap();
    assert!(rel(off, k_off) < 0.1, "{off} vs {k_off}");

    let sol = integrate_ode(e, &params, &s, &cfg).unwrap();
    assert!(sol.mismatch().norm() < 1e-6 * kappa.norm());
    let analytic = radial_wavefunction(e, &sol.profile.radii, &s).unwrap();
    let i = sol.profile.radii.partition_point(|r| *r < sol.match_radius);
    let scale = analytic.values[i] / sol.profile.values[i];
    for (a, b) in analytic.values.iter().zip(&sol.profile.values) {
        assert!((scale * b - a).norm() < 1e-6 * a.norm().max(1e-3 * analytic.values[i].norm()));
    }

    // Decaying tail: F'/F near R_max approaches -kappa - 1/(2R).
    let n = sol.profile.len();
    let (r1, r2) = (sol.profile.radii[n - 2], sol.profile.radii[n - 1]);
    let (f1, f2) = (sol.profile.values[n - 2], sol.profile.values[n - 1]);
    let log_slope = (f2 / f1).ln() / (r2 - r1);
    let rm = 0.5 * (r1 + r2);
    assert!(rel(log_slope, -kappa - 0.5 / rm) < 1e-3);
}

#[test]
fn norm_integral_behaviour() {
    let s = s();
    let n0 = norm_integral(lossless_energy(0, &s, 1.0).into(), &s).unwrap();
    assert!(n0.is_finite() && n0 > 0.0);

    let mut previous = 0.0;
    for eta in ETAS {
        let e = lossy_energy(0, &ModelParams::new(eta, 1.0).unwrap(), &s).unwrap();
        let value = norm_integral(e, &s).unwrap();
        assert!(value.is_finite() && value > previous, "eta={eta}");
        previous = value;
    }

    let e = lossy_energy(0, &ModelParams::new(0.7, 1.0).unwrap(), &s).unwrap();
    let lambda: f64 = 3.0;
    let scaled = norm_integral(e / (lambda * lambda), &s).unwrap();
    let base = norm_integral(e, &s).unwrap();
    assert!((scaled / base / (lambda * lambda) - 1.0).abs() < 1e-8);
}

#[test]
fn outward_leg_alone_grows() {
    let s = s();
    let cfg = SolverConfig::default();
    let params = ModelParams::new(0.2, 1.0).unwrap();
    let e = 0.7 * lossy_energy(0, &params, &s).unwrap();
    let kappa = kappa_of_energy(e).unwrap();
    let l = outward_log_derivative(e, &params, &s, &cfg).unwrap();
    assert!(l.re > 0.0 && rel(l, kappa) < 0.1);
}
