//! Dormand-Prince 5(4) for the complex pair `(F, F')`.

use num_complex::Complex64;

use crate::{Error, Result};

pub(crate) type State = [Complex64; 2];

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
// Fifth-order weights; also the last stage row (FSAL).
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// Fifth minus fourth order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const RESCALE_ABOVE: f64 = 1e100;
const MAX_STEPS: usize = 2_000_000;

fn combine(y: &State, h: f64, ks: &[State], coeffs: &[f64]) -> State {
    let mut out = *y;
    for (k, &a) in ks.iter().zip(coeffs) {
        if a != 0.0 {
            out[0] += k[0] * (h * a);
            out[1] += k[1] * (h * a);
        }
    }
    out
}

/// `|F|` and `|R F'|` combined, so both components are measured on the same scale.
fn scaled_norm(y: &State, r: f64) -> f64 {
    y[0].norm().hypot(y[1].norm() * r.abs())
}

/// Integrate `y' = rhs(r, y)` from `r0` to `r1` (either direction) with
/// relative tolerance `rtol`.
///
/// If `samples` is given, `(r, F)` is recorded at the start and after every
/// accepted step. Whenever `|F|` exceeds 1e100 the state and all samples are
/// divided by `|F|`, so only ratios such as `F'/F` are meaningful afterwards.
pub(crate) fn integrate<Fun>(
    rhs: Fun,
    r0: f64,
    y0: State,
    r1: f64,
    rtol: f64,
    mut samples: Option<&mut Vec<(f64, Complex64)>>,
) -> Result<State>
where
    Fun: Fn(f64, &State) -> State,
{
    let span = r1 - r0;
    let direction = span.signum();
    let mut r = r0;
    let mut y = y0;
    let mut h = direction * (1e-2 * r0.abs()).clamp(1e-12, span.abs() * 0.1);
    let mut k1 = rhs(r, &y);

    if let Some(s) = samples.as_deref_mut() {
        s.push((r, y[0]));
    }

    for _ in 0..MAX_STEPS {
        if (r1 - r) * direction <= 0.0 {
            return Ok(y);
        }
        if (r + h - r1) * direction > 0.0 {
            h = r1 - r;
        }

        let k2 = rhs(r + C[1] * h, &combine(&y, h, &[k1], &A2));
        let k3 = rhs(r + C[2] * h, &combine(&y, h, &[k1, k2], &A3));
        let k4 = rhs(r + C[3] * h, &combine(&y, h, &[k1, k2, k3], &A4));
        let k5 = rhs(r + C[4] * h, &combine(&y, h, &[k1, k2, k3, k4], &A5));
        let k6 = rhs(r + C[5] * h, &combine(&y, h, &[k1, k2, k3, k4, k5], &A6));
        let y_new = combine(&y, h, &[k1, k2, k3, k4, k5, k6], &B);
        let r_new = r + C[6] * h;
        let k7 = rhs(r_new, &y_new);

        let err_vec = combine(
            &[Complex64::new(0.0, 0.0); 2],
            h,
            &[k1, k2, k3, k4, k5, k6, k7],
            &E,
        );
        let scale = rtol * scaled_norm(&y, r).max(scaled_norm(&y_new, r_new));
        let err = scaled_norm(&err_vec, r_new) / scale;

        if err <= 1.0 {
            r = r_new;
            y = y_new;
            k1 = k7;
            let magnitude = y[0].norm();
            if magnitude > RESCALE_ABOVE {
                y[0] /= magnitude;
                y[1] /= magnitude;
                k1[0] /= magnitude;
                k1[1] /= magnitude;
                if let Some(s) = samples.as_deref_mut() {
                    for (_, v) in s.iter_mut() {
                        *v /= magnitude;
                    }
                }
            }
            if let Some(s) = samples.as_deref_mut() {
                s.push((r, y[0]));
            }
        }

        let factor = if err.is_finite() && err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else if err == 0.0 {
            5.0
        } else {
            0.2
        };
        h *= factor;
        if h.abs() < 1e-14 * r.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::Stiffness {
                radius: r,
                step: h.abs(),
            });
        }
    }
    Err(Error::Solver {
        message: format!("ODE integration exceeded {MAX_STEPS} steps at R = {r}"),
        trace: Vec::new(),
    })
}
