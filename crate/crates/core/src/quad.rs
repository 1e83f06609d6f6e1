//! Globally adaptive Gauss–Kronrod quadrature for complex-valued integrands.
//!
//! Uses the 7-point Gauss / 15-point Kronrod pair on each panel. The panel with
//! the largest error estimate is bisected until the summed estimate falls below
//! `max(abs_tol, rel_tol * |I|)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_119,
    0.417_959_183_673_469_4,
];

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 1_000_000,
        }
    }
}

impl QuadOptions {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        QuadOptions {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }
}

/// Integral value together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
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

fn kronrod15<F>(f: &mut F, a: f64, b: f64) -> Panel
where
    F: FnMut(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];

    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * w;
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }

    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).norm(),
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<Estimate>
where
    F: FnMut(f64) -> Complex64,
{
    integrate_with_breaks(f, &[a, b], opts)
}

/// Integrates `f` over `[points[0], points[last]]`, using the interior points
/// as initial panel boundaries (kinks, peaks, discontinuities).
pub fn integrate_with_breaks<F>(mut f: F, points: &[f64], opts: &QuadOptions) -> Result<Estimate>
where
    F: FnMut(f64) -> Complex64,
{
    if points.len() < 2 || points.iter().any(|p| !p.is_finite()) {
        return Err(Error::Precondition(
            "quadrature needs at least two finite interval endpoints".into(),
        ));
    }
    if points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Precondition(
            "quadrature breakpoints must be nondecreasing".into(),
        ));
    }

    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_error = 0.0;
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let panel = kronrod15(&mut f, w[0], w[1]);
        evaluations += 15;
        total += panel.value;
        total_error += panel.error;
        heap.push(panel);
    }

    let mut subdivisions = heap.len();
    loop {
        let requested = opts.abs_tol.max(opts.rel_tol * total.norm());
        if total_error <= requested {
            break;
        }
        if subdivisions >= opts.max_subdivisions {
            return Err(Error::Quadrature {
                estimate: total_error,
                requested,
            });
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel is at floating-point resolution; no further progress possible.
            return Err(Error::Quadrature {
                estimate: total_error,
                requested,
            });
        }
        let left = kronrod15(&mut f, worst.a, mid);
        let right = kronrod15(&mut f, mid, worst.b);
        evaluations += 30;
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }

    // Re-sum to shed the drift of the running totals.
    let (value, error) = heap
        .iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), p| {
            (v + p.value, e + p.error)
        });
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn kronrod_weights_sum_to_two() {
        let s: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        assert!((s - 2.0).abs() < 1e-15);
        let g: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_panel_is_exact_for_high_degree_polynomials() {
        let mut f = |x: f64| Complex64::new(x.powi(20), 0.0);
        let p = kronrod15(&mut f, -1.0, 1.0);
        assert!((p.value.re - 2.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn oscillatory_complex_integrand() {
        // ∫_0^{10π} e^{ix} dx = (e^{i10π} - 1)/i = 0
        let est = integrate(
            |x| Complex64::new(0.0, x).exp(),
            0.0,
            10.0 * PI,
            &QuadOptions::with_tolerances(1e-13, 1e-13),
        )
        .unwrap();
        assert!(est.value.norm() < 1e-12, "{:?}", est);
    }

    #[test]
    fn gaussian_mass() {
        let est = integrate(
            |x| Complex64::new((-x * x).exp(), 0.0),
            -8.0,
            8.0,
            &QuadOptions::default(),
        )
        .unwrap();
        assert!((est.value.re - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn breakpoints_handle_kinks() {
        let est = integrate_with_breaks(
            |x: f64| Complex64::new(x.abs(), 0.0),
            &[-1.0, 0.0, 2.0],
            &QuadOptions::default(),
        )
        .unwrap();
        assert!((est.value.re - 2.5).abs() < 1e-14);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol: 0.0,
            max_subdivisions: 4,
        };
        let err = integrate(|x: f64| Complex64::new(x.sqrt(), 0.0), 0.0, 1.0, &opts).unwrap_err();
        assert!(matches!(err, Error::Quadrature { estimate, .. } if estimate > 0.0));
    }

    #[test]
    fn rejects_reversed_breakpoints() {
        let r = integrate_with_breaks(|_| Complex64::new(1.0, 0.0), &[1.0, 0.0], &QuadOptions::default());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
