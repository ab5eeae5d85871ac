//! The three-body wavefunction in Efimov's form and the contact condition.
//!
//! ```text
//! psi = F(R) sum_{pairings} sin(s arctan(rho/r)) / (r rho)
//! ```
//!
//! where for each of the three ways of singling out a spectator, `r` is the
//! pair distance, `rho = |2 r_spectator - r_a - r_b| / sqrt 3` and
//! `R = sqrt((r^2 + rho^2)/2)` is the same for all three.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::efimov::{kappa_of_energy, ChannelExponent};
use crate::specfun::bessel_k;
use crate::{Error, Result};

pub type Vec3 = [f64; 3];

const INV_SQRT3: f64 = 0.577_350_269_189_625_8;

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(a: Vec3) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn axpy(a: f64, x: Vec3, y: Vec3) -> Vec3 {
    [a * x[0] + y[0], a * x[1] + y[1], a * x[2] + y[2]]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Positions {
    pub r1: Vec3,
    pub r2: Vec3,
    pub r3: Vec3,
}

impl Positions {
    pub fn new(r1: Vec3, r2: Vec3, r3: Vec3) -> Self {
        Self { r1, r2, r3 }
    }

    /// The configuration with all three positions shifted by `d`.
    pub fn translated(&self, d: Vec3) -> Self {
        Self::new(
            axpy(1.0, d, self.r1),
            axpy(1.0, d, self.r2),
            axpy(1.0, d, self.r3),
        )
    }

    /// `r1 <-> r3`.
    pub fn swap13(&self) -> Self {
        Self::new(self.r3, self.r2, self.r1)
    }

    /// `r2 <-> r3`.
    pub fn swap23(&self) -> Self {
        Self::new(self.r1, self.r3, self.r2)
    }

    /// `r1 <-> r2`.
    pub fn swap12(&self) -> Self {
        Self::new(self.r2, self.r1, self.r3)
    }

    fn min_pair_distance(&self) -> f64 {
        norm(sub(self.r2, self.r1))
            .min(norm(sub(self.r3, self.r1)))
            .min(norm(sub(self.r3, self.r2)))
    }
}

/// Jacobi coordinates of the pair (1, 2) with spectator 3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobiSet {
    pub r: f64,
    pub rho: f64,
    pub hyper_r: f64,
}

pub fn jacobi(p: &Positions) -> JacobiSet {
    let r = norm(sub(p.r2, p.r1));
    let rho = norm(sub(axpy(2.0, p.r3, [0.0; 3]), axpy(1.0, p.r1, p.r2))) * INV_SQRT3;
    JacobiSet {
        r,
        rho,
        hyper_r: (0.5 * (r * r + rho * rho)).sqrt(),
    }
}

/// `sin z / z`
fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// `arctan(t) / t`
fn atanc(t: f64) -> f64 {
    if t < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 3.0 + t2 * t2 / 5.0
    } else {
        t.atan() / t
    }
}

/// `sin(s arctan(rho/r)) / (r rho)`, written as
/// `(s/r^2) atanc(rho/r) sinc(s arctan(rho/r))` so that `rho = 0` is regular
/// (the limit is `s / r^2`).
pub fn pair_term(r: f64, rho: f64, s: Complex64) -> Complex64 {
    let t = rho / r;
    s / (r * r) * atanc(t) * sinc(s * t.atan())
}

/// Sum of [`pair_term`] over the identity and the relabelings `P13`, `P23`.
pub fn angular_factor(p: &Positions, s: &ChannelExponent) -> Result<Complex64> {
    check_distinct(p)?;
    let s = s.s();
    Ok([*p, p.swap13(), p.swap23()]
        .iter()
        .map(|q| {
            let j = jacobi(q);
            pair_term(j.r, j.rho, s)
        })
        .sum())
}

fn check_distinct(p: &Positions) -> Result<()> {
    if p.min_pair_distance() == 0.0 {
        return Err(Error::domain(
            "two particles coincide; psi diverges there, use bethe_peierls_check for the contact limit",
        ));
    }
    Ok(())
}

/// Hyperradial factor `F(R)` of the wavefunction.
pub trait RadialFunction {
    fn value(&self, hyper_r: f64) -> Result<Complex64>;
}

impl<T: Fn(f64) -> Result<Complex64>> RadialFunction for T {
    fn value(&self, hyper_r: f64) -> Result<Complex64> {
        self(hyper_r)
    }
}

/// `F(R) = K_s(kappa R)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselRadial {
    pub order: Complex64,
    pub kappa: Complex64,
}

impl BesselRadial {
    pub fn new(energy: Complex64, s: &ChannelExponent) -> Result<Self> {
        Ok(Self {
            order: s.s(),
            kappa: kappa_of_energy(energy)?,
        })
    }
}

impl RadialFunction for BesselRadial {
    fn value(&self, hyper_r: f64) -> Result<Complex64> {
        bessel_k(self.order, self.kappa * hyper_r)
    }
}

/// Efimov's three-body wavefunction, unnormalised.
pub fn psi(
    p: &Positions,
    energy: Complex64,
    s: &ChannelExponent,
    radial: &impl RadialFunction,
) -> Result<Complex64> {
    kappa_of_energy(energy)?;
    let angular = angular_factor(p, s)?;
    Ok(radial.value(jacobi(p).hyper_r)? * angular)
}

/// [`psi`] with `F(R) = K_s(kappa R)`.
pub fn psi_bessel(p: &Positions, energy: Complex64, s: &ChannelExponent) -> Result<Complex64> {
    psi(p, energy, s, &BesselRadial::new(energy, s)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContactCheck {
    /// Coefficient `A` of `psi ~ A / r12`.
    pub divergent_coeff: Complex64,
    /// Coefficient `B` of the regular term `psi ~ A / r12 + B`.
    pub constant_term: Complex64,
    /// `|B| R_ref / |A|`, with `R_ref` the hyperradius of the limiting
    /// configuration. Vanishes when the contact condition holds at `1/a = 0`.
    pub constant_term_ratio: f64,
}

const FIRST_LEVEL: i32 = 4;
const LAST_LEVEL: i32 = 12;
/// Separation of the third particle from the pair centre, relative to the
/// largest step `2^-4`.
const MIN_SPECTATOR_DISTANCE: f64 = 8.0 * 0.0625;
/// Fixed, generic direction along which the pair is pulled together.
const PAIR_AXIS: Vec3 = [0.6, 0.48, 0.64];

/// Richardson extrapolation to `h = 0` of samples at `h_k = h_0 2^-k`,
/// assuming an expansion in integer powers of `h`. Returns the diagonal of the
/// table with the smallest change between consecutive columns.
fn richardson(samples: &[Complex64]) -> Complex64 {
    let mut table: Vec<Vec<Complex64>> = vec![samples.to_vec()];
    let mut best = samples[samples.len() - 1];
    let mut best_change = f64::INFINITY;
    for j in 1..samples.len() {
        let factor = 2f64.powi(j as i32);
        let prev = &table[j - 1];
        let next: Vec<Complex64> = prev
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
        let change = (next[next.len() - 1] - prev[prev.len() - 1]).norm();
        if change < best_change {
            best_change = change;
            best = next[next.len() - 1];
        }
        table.push(next);
    }
    best
}

/// Pulls particles 1 and 2 together along a fixed axis about `pair_center`,
/// with particle 3 held at `r3`, and extracts `r12 psi = A + B r12 + O(r12^2)`
/// from `r12 = 2^-k`, `k = 4..=12`.
///
/// `A` comes from Richardson extrapolation of `r12 psi`; `B` from Richardson
/// extrapolation of the difference quotients `(g(h) - g(h/2)) / (h/2)`.
pub fn bethe_peierls_check(
    pair_center: Vec3,
    r3: Vec3,
    energy: Complex64,
    s: &ChannelExponent,
) -> Result<ContactCheck> {
    let spectator = norm(sub(r3, pair_center));
    if !(spectator >= MIN_SPECTATOR_DISTANCE) {
        return Err(Error::precondition(format!(
            "spectator at distance {spectator} from the pair centre; need at least {MIN_SPECTATOR_DISTANCE}"
        )));
    }
    let radial = BesselRadial::new(energy, s)?;
    let g = (FIRST_LEVEL..=LAST_LEVEL)
        .map(|k| {
            let h = 2f64.powi(-k);
            let p = Positions::new(
                axpy(-0.5 * h, PAIR_AXIS, pair_center),
                axpy(0.5 * h, PAIR_AXIS, pair_center),
                r3,
            );
            Ok(h * psi(&p, energy, s, &radial)?)
        })
        .collect::<Result<Vec<Complex64>>>()?;

    let divergent = richardson(&g);
    let quotients: Vec<Complex64> = g
        .windows(2)
        .enumerate()
        .map(|(i, w)| (w[0] - w[1]) / 2f64.powi(-(FIRST_LEVEL + i as i32 + 1)))
        .collect();
    let constant = richardson(&quotients);

    let all_finite = [divergent, constant]
        .iter()
        .all(|z| z.re.is_finite() && z.im.is_finite());
    if !all_finite || divergent.norm() == 0.0 {
        return Err(Error::Fit(format!(
            "contact expansion failed: A = {divergent}, B = {constant}"
        )));
    }
    let rho = 2.0 * spectator * INV_SQRT3;
    let reference = rho * FRAC_1_SQRT_2;
    Ok(ContactCheck {
        divergent_coeff: divergent,
        constant_term: constant,
        constant_term_ratio: constant.norm() * reference / divergent.norm(),
    })
}
