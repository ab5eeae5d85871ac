use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Principal branch of `ln Gamma(z)`.
///
/// For `Re z >= 1/2` this is the Lanczos approximation (g = 7, nine terms).
/// Smaller real parts are shifted up with `Gamma(z) = Gamma(z + k) / (z (z+1) ... (z+k-1))`,
/// summing principal logarithms, which keeps the result analytic off the
/// negative real axis. Non-positive integers are poles and are rejected.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain(format!(
            "ln_gamma of non-finite argument {z}"
        )));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::domain(format!(
            "ln_gamma has a pole at z = {}",
            z.re
        )));
    }

    if z.re >= 0.5 {
        return Ok(lanczos(z));
    }

    let shift = (0.5 - z.re).ceil() as usize;
    let mut log_product = Complex64::new(0.0, 0.0);
    for j in 0..shift {
        log_product += (z + j as f64).ln();
    }
    Ok(lanczos(z + shift as f64) - log_product)
}

/// `Gamma(z)` as `exp(ln_gamma(z))`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    ln_gamma(z).map(Complex64::exp)
}

fn lanczos(z: Complex64) -> Complex64 {
    let w = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (w + i as f64);
    }
    let t = w + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (w + 0.5) * t.ln() - t + series.ln()
}
