use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::{Error, Result};

/// Tolerances and budget for [`integrate_adaptive`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(
        relative_tolerance: f64,
        absolute_tolerance: f64,
        max_subdivisions: usize,
    ) -> Result<Self> {
        let spec = Self {
            relative_tolerance,
            absolute_tolerance,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0 && self.absolute_tolerance > 0.0) {
            return Err(Error::precondition(
                "quadrature tolerances must be positive",
            ));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::precondition("max_subdivisions must be at least 1"));
        }
        Ok(())
    }

    fn threshold(&self, value: Complex64) -> f64 {
        self.absolute_tolerance
            .max(self.relative_tolerance * value.norm())
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-12,
            absolute_tolerance: 1e-14,
            max_subdivisions: 1000,
        }
    }
}

// 21-point Kronrod rule and its embedded 10-point Gauss rule. Nodes are
// listed from the outside in; the Gauss nodes are the odd-indexed ones.
const KRONROD_NODES: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = f(center) * KRONROD_WEIGHTS[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    for i in 0..10 {
        let dx = half * KRONROD_NODES[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * KRONROD_WEIGHTS[i];
        if i % 2 == 1 {
            gauss += pair * GAUSS_WEIGHTS[i / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    Panel { a, b, value, error }
}

/// Adaptive Gauss-Kronrod (G10/K21) quadrature of a complex-valued function
/// over `[a, b]`, bisecting the panel with the largest error estimate until
/// the summed estimate is below `max(abs_tol, rel_tol * |I|)`.
///
/// When the subdivision budget runs out the best estimate is returned inside
/// [`Error::Accuracy`].
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    spec.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::precondition(format!(
            "integration interval [{a}, {b}] must be finite with a < b"
        )));
    }

    let first = kronrod_panel(&f, a, b);
    let mut total = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);

    let mut subdivisions = 1;
    while error > spec.threshold(total) {
        if !(total.re.is_finite() && total.im.is_finite()) {
            return Err(Error::Accuracy {
                estimate: total,
                error,
            });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Accuracy {
                estimate: total,
                error,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel can no longer be split in floating point.
            return Err(Error::Accuracy {
                estimate: total,
                error,
            });
        }
        let left = kronrod_panel(&f, worst.a, mid);
        let right = kronrod_panel(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;

        // Re-sum occasionally so cancellation in the running totals cannot drift.
        if subdivisions % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            error = heap.iter().map(|p| p.error).sum();
        }
    }
    Ok(heap.iter().map(|p| p.value).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant() {
        let v = integrate_adaptive(|_| Complex64::new(1.0, 0.0), 0.0, 1.0, &Default::default())
            .unwrap();
        assert!((v - 1.0).norm() < 1e-15);
    }

    #[test]
    fn exponential_decay() {
        let v = integrate_adaptive(
            |t| Complex64::new((-t).exp(), 0.0),
            0.0,
            40.0,
            &Default::default(),
        )
        .unwrap();
        let exact = -(-40f64).exp_m1();
        assert!((v.re - exact).abs() < 1e-12);
        assert!((v.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_complex() {
        // int_0^{2 pi} e^{i 5 t} t dt = 2 pi / (5 i)
        let v = integrate_adaptive(
            |t| Complex64::new(0.0, 5.0 * t).exp() * t,
            0.0,
            2.0 * std::f64::consts::PI,
            &Default::default(),
        )
        .unwrap();
        let exact = Complex64::new(0.0, -2.0 * std::f64::consts::PI / 5.0);
        assert!((v - exact).norm() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let spec = QuadratureSpec::new(1e-15, 1e-300, 2).unwrap();
        let err = integrate_adaptive(|t| Complex64::new(1.0 / t.sqrt(), 0.0), 1e-12, 50.0, &spec)
            .unwrap_err();
        match err {
            Error::Accuracy { estimate, error } => {
                assert!(estimate.re.is_finite());
                assert!(error > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_spec_and_interval() {
        assert!(QuadratureSpec::new(0.0, 1e-14, 10).is_err());
        assert!(QuadratureSpec::new(1e-10, 1e-14, 0).is_err());
        let r = integrate_adaptive(|_| Complex64::new(1.0, 0.0), 1.0, 1.0, &Default::default());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
