use std::f64::consts::PI;

use efimov_core::ansatz::{
    angular_factor, bethe_peierls_check, jacobi, psi, psi_bessel, Positions, Vec3,
};
use efimov_core::efimov::{lossy_energy, solve_channel_exponent, ChannelExponent, ModelParams};
use efimov_core::specfun::bessel_k;
use efimov_core::{Complex64, Result};
use proptest::prelude::*;

fn s() -> ChannelExponent {
    solve_channel_exponent(1e-13).unwrap()
}

fn energy(eta: f64) -> Complex64 {
    lossy_energy(0, &ModelParams::new(eta, 1.0).unwrap(), &s()).unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn point() -> impl Strategy<Value = Vec3> {
    [-1.5..1.5f64, -1.5..1.5f64, -1.5..1.5f64]
}

fn config() -> impl Strategy<Value = Positions> {
    (point(), point(), point())
        .prop_map(|(a, b, c)| Positions::new(a, b, c))
        .prop_filter("separated", |p| {
            let d = |a: Vec3, b: Vec3| {
                ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
            };
            d(p.r1, p.r2) > 0.05 && d(p.r1, p.r3) > 0.05 && d(p.r2, p.r3) > 0.05
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetric_under_all_permutations(p in config(), eta in 0.0..1.5f64) {
        let s = s();
        let e = energy(eta);
        let base = psi_bessel(&p, e, &s).unwrap();
        let perms = [
            p.swap12(),
            p.swap13(),
            p.swap23(),
            p.swap12().swap13(),
            p.swap13().swap12(),
        ];
        for q in perms {
            let v = psi_bessel(&q, e, &s).unwrap();
            prop_assert!(rel(v, base) < 1e-12, "{v} vs {base}");
        }
    }

    #[test]
    fn translation_invariant(p in config(), d in point()) {
        let s = s();
        let e = energy(0.4);
        let a = psi_bessel(&p, e, &s).unwrap();
        let b = psi_bessel(&p.translated(d), e, &s).unwrap();
        prop_assert!(rel(b, a) < 1e-12);
    }

    #[test]
    fn hyperradial_factor_is_shared(p in config(), q in config()) {
        // Rescale q to the hyperradius of p, then psi / angular factor gives F(R) for both.
        let s = s();
        let e = energy(0.9);
        let scale = jacobi(&p).hyper_r / jacobi(&q).hyper_r;
        let q = Positions::new(
            q.r1.map(|x| x * scale),
            q.r2.map(|x| x * scale),
            q.r3.map(|x| x * scale),
        );
        let fp = psi_bessel(&p, e, &s).unwrap() / angular_factor(&p, &s).unwrap();
        let fq = psi_bessel(&q, e, &s).unwrap() / angular_factor(&q, &s).unwrap();
        prop_assert!(rel(fq, fp) < 1e-10);
    }
}

#[test]
fn jacobi_is_translation_invariant() {
    let p = Positions::new([0.1, 0.2, 0.3], [1.0, -0.4, 0.2], [-0.3, 0.8, 0.5]);
    let a = jacobi(&p);
    let b = jacobi(&p.translated([5.0, -2.0, 7.0]));
    assert!((a.r - b.r).abs() < 1e-12 && (a.rho - b.rho).abs() < 1e-12);
    assert!((a.hyper_r - b.hyper_r).abs() < 1e-12);
}

#[test]
fn equilateral_value() {
    // Each pairing has r = rho = 1, so the angular factor is 3 sin(s pi/4) and R = 1.
    let s = s();
    let e = energy(0.0);
    let p = Positions::new([0.0; 3], [1.0, 0.0, 0.0], [0.5, 3f64.sqrt() / 2.0, 0.0]);
    let kappa = (-2.0 * e).sqrt();
    let expected = 3.0 * (s.s() * PI / 4.0).sin() * bessel_k(s.s(), kappa).unwrap();
    let value = psi_bessel(&p, e, &s).unwrap();
    assert!(rel(value, expected) < 1e-12);
    assert!(value.norm() > 0.0);
    // frozen from the first build
    let frozen = Complex64::new(0.0, 0.436_509_203_932_448);
    assert!(rel(value, frozen) < 1e-10, "{value}");
}

#[test]
fn spectator_on_pair_axis_limit() {
    // rho -> 0 for pair (1,2): the identity term tends to s/r^2 and psi stays finite.
    let s = s();
    let e = energy(0.3);
    let at = |eps: f64| {
        let p = Positions::new([-0.5, 0.0, 0.0], [0.5, 0.0, 0.0], [0.0, eps, 0.0]);
        psi_bessel(&p, e, &s).unwrap()
    };
    let limit = at(0.0);
    assert!(limit.re.is_finite() && limit.im.is_finite());
    let mut previous = f64::INFINITY;
    for eps in [1e-2, 1e-3, 1e-4, 1e-5] {
        let gap = (at(eps) - limit).norm();
        assert!(gap < previous);
        previous = gap;
    }
    assert!(previous < 1e-8 * limit.norm());
}

#[test]
fn custom_radial_function() {
    let s = s();
    let e = energy(0.0);
    let p = Positions::new([0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
    let flat = |_r: f64| -> Result<Complex64> { Ok(Complex64::new(2.0, 0.0)) };
    let v = psi(&p, e, &s, &flat).unwrap();
    assert!(rel(v, 2.0 * angular_factor(&p, &s).unwrap()) < 1e-15);
}

/// `B / A` for `r12 psi = A + B r12` from the small-r expansion of the three pairings:
/// `A = F sin(s pi/2) / rho`, `B = -(3/4) F [s cos(s pi/2) - (8/sqrt 3) sin(s pi/6)] / d^2`,
/// with `d` the spectator distance and `rho = 2d / sqrt 3`.
fn contact_ratio_oracle(s: Complex64, d: f64) -> f64 {
    let rho = 2.0 * d / 3f64.sqrt();
    let a = (s * PI / 2.0).sin() / rho;
    let bracket = s * (s * PI / 2.0).cos() - 8.0 / 3f64.sqrt() * (s * PI / 6.0).sin();
    let b = -0.75 * bracket / (d * d);
    b.norm() * rho / 2f64.sqrt() / a.norm()
}

#[test]
fn contact_condition_holds_only_for_the_true_exponent() {
    let s = s();
    let detuned = ChannelExponent::with_magnitude(1.01 * s.magnitude()).unwrap();
    let cases = [
        ([0.0; 3], [1.0, 0.0, 0.0]),
        ([0.2, -0.1, 0.3], [0.5, 1.5, -0.4]),
    ];
    for eta in [0.0, 0.7] {
        let e = energy(eta);
        for (center, r3) in cases {
            let good = bethe_peierls_check(center, r3, e, &s).unwrap();
            assert!(good.constant_term_ratio < 1e-4);
            assert!(good.divergent_coeff.norm() > 0.0);

            let bad = bethe_peierls_check(center, r3, e, &detuned).unwrap();
            assert!(bad.constant_term_ratio > 1e-2);
            let d = (0..3)
                .map(|i| (r3[i] - center[i]).powi(2))
                .sum::<f64>()
                .sqrt();
            let oracle = contact_ratio_oracle(detuned.s(), d);
            assert!((bad.constant_term_ratio / oracle - 1.0).abs() < 1e-4);
        }
    }
}
