//! Normal-incidence transmission through a homogeneous slab `0 ≤ x ≤ L` of
//! complex refraction index `n`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::solve_dense;

/// Rows whose closed-form denominator falls below this modulus are poles.
pub const POLE_THRESHOLD: f64 = 1e-12;

/// Continuity residual (relative to the largest term) tolerated by [`slab_match`].
pub const CONTINUITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlabParams {
    pub n: Complex64,
    pub k: f64,
    pub length: f64,
}

impl SlabParams {
    pub fn from_index(n: Complex64, k: f64, length: f64) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Precondition(format!("slab length must be positive, got {length}")));
        }
        if k == 0.0 || !k.is_finite() {
            return Err(Error::ZeroWaveNumber(k));
        }
        if !(n.re.is_finite() && n.im.is_finite()) {
            return Err(Error::Precondition("refraction index must be finite".into()));
        }
        Ok(SlabParams { n, k, length })
    }

    /// `n = 1 + (φ + iσ)/k`.
    pub fn from_phase(phi: f64, sigma: f64, k: f64, length: f64) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(Error::Precondition(format!("attenuation must be non-negative, got {sigma}")));
        }
        if k == 0.0 || !k.is_finite() {
            return Err(Error::ZeroWaveNumber(k));
        }
        Self::from_index(1.0 + Complex64::new(phi, sigma) / k, k, length)
    }

    /// `c = kL`.
    pub fn c(&self) -> f64 {
        self.k * self.length
    }

    /// `κ = i n k`.
    pub fn kappa(&self) -> Complex64 {
        Complex64::i() * self.n * self.k
    }

    /// `2n cos(cn) - i(1 + n²) sin(cn)`.
    pub fn denominator(&self) -> Complex64 {
        let n = self.n;
        let cn = n * self.c();
        2.0 * n * cn.cos() - Complex64::i() * (1.0 + n * n) * cn.sin()
    }
}

/// Amplitudes of `e^{ikx} + r e^{-ikx}`, `A e^{κx} + B e^{-κx}` and `t e^{ikx}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlabSolution {
    pub r: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    pub t: Complex64,
    /// Largest relative mismatch of the four continuity equations.
    pub continuity_residual: f64,
}

impl SlabSolution {
    pub fn reflectance(&self) -> f64 {
        self.r.norm_sqr()
    }

    pub fn transmittance(&self) -> f64 {
        self.t.norm_sqr()
    }
}

fn continuity_rows(p: &SlabParams) -> (DMatrix<Complex64>, DVector<Complex64>) {
    let i = Complex64::i();
    let k = Complex64::new(p.k, 0.0);
    let kappa = p.kappa();
    let el = (kappa * p.length).exp();
    let eml = (-kappa * p.length).exp();
    let eikl = (i * k * p.length).exp();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        // unknowns: r, A, B, t
        one,     -one,        -one,         zero,
        -i * k,  -kappa,      kappa,        zero,
        zero,    el,          eml,          -eikl,
        zero,    kappa * el,  -kappa * eml, -i * k * eikl,
    ]);
    let rhs = DVector::from_vec(vec![-one, -i * k, zero, zero]);
    (m, rhs)
}

/// Solves the value and derivative continuity conditions at `x = 0` and `x = L`.
pub fn slab_match(p: &SlabParams) -> Result<SlabSolution> {
    let (m, rhs) = continuity_rows(p);
    let sol = solve_dense(m.clone(), &rhs)?;
    let x = &sol.x;
    let residual = &m * x - &rhs;
    let mut worst = 0.0f64;
    for row in 0..4 {
        let scale = (0..4)
            .map(|col| (m[(row, col)] * x[col]).norm())
            .fold(rhs[row].norm(), f64::max)
            .max(f64::MIN_POSITIVE);
        worst = worst.max(residual[row].norm() / scale);
    }
    if !(worst <= CONTINUITY_TOLERANCE) {
        return Err(Error::SingularSystem {
            condition: sol.condition,
        });
    }
    Ok(SlabSolution {
        r: x[0],
        a: x[1],
        b: x[2],
        t: x[3],
        continuity_residual: worst,
    })
}

/// `t = 2n e^{-ikL} / (2n cos(knL) - i(1 + n²) sin(knL))`.
pub fn transmission_amplitude(p: &SlabParams) -> Result<Complex64> {
    let den = p.denominator();
    if den.norm() < POLE_THRESHOLD {
        return Err(Error::Pole {
            denominator: den.norm(),
        });
    }
    Ok(2.0 * p.n * Complex64::new(0.0, -p.c()).exp() / den)
}

/// `T = 4|n|² / |2n cos(cn) - i(1 + n²) sin(cn)|²`.
pub fn transmittance(p: &SlabParams) -> Result<f64> {
    let den = p.denominator();
    if den.norm() < POLE_THRESHOLD {
        return Err(Error::Pole {
            denominator: den.norm(),
        });
    }
    Ok(4.0 * p.n.norm_sqr() / den.norm_sqr())
}

/// Inclusive grid `lo, lo + step, ...` up to `hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !lo.is_finite() || !hi.is_finite() || hi < lo {
            return Err(Error::Precondition(format!(
                "invalid grid [{lo}, {hi}] with step {step}"
            )));
        }
        Ok(Grid { lo, hi, step })
    }

    pub fn len(&self) -> usize {
        ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub re_n: f64,
    pub im_n: f64,
    /// `None` on a pole.
    pub transmittance: Option<f64>,
}

impl ScanRow {
    pub fn is_pole(&self) -> bool {
        self.transmittance.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanMetadata {
    pub sigma: f64,
    pub c: f64,
    pub length_convention: String,
    pub k: f64,
    pub im_n: f64,
    pub grid: Grid,
    pub rows: usize,
    pub poles: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
    pub metadata: ScanMetadata,
}

/// Transmittance against `Re(n)` at fixed attenuation `σ` and `c = kL`.
///
/// The slab has unit length, so `k = c` and `Im(n) = σ/c` is the same on
/// every row.
pub fn scan_transmittance(grid: Grid, sigma: f64, c: f64) -> Result<ScanTable> {
    if !(sigma >= 0.0) {
        return Err(Error::Precondition(format!("attenuation must be non-negative, got {sigma}")));
    }
    if c == 0.0 || !c.is_finite() {
        return Err(Error::ZeroWaveNumber(c));
    }
    let k = c;
    let im_n = sigma / k;
    let rows: Vec<ScanRow> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let re_n = grid.point(i);
            let p = SlabParams::from_index(Complex64::new(re_n, im_n), k, 1.0)?;
            let transmittance = match transmittance(&p) {
                Ok(t) => Some(t),
                Err(Error::Pole { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(ScanRow {
                re_n,
                im_n,
                transmittance,
            })
        })
        .collect::<Result<_>>()?;
    let poles = rows.iter().filter(|r| r.is_pole()).count();
    Ok(ScanTable {
        metadata: ScanMetadata {
            sigma,
            c,
            length_convention: "L = 1, k = c, Im(n) = sigma / c".into(),
            k,
            im_n,
            grid,
            rows: rows.len(),
            poles,
        },
        rows,
    })
}

/// Rounds to 12 significant digits and prints the shortest exact form.
pub fn format_sig12(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{rounded}")
}

impl ScanTable {
    /// CSV with header `re_n,im_n,T,flag`; pole rows have an empty `T` and flag 1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re_n,im_n,T,flag\n");
        for row in &self.rows {
            let (t, flag) = match row.transmittance {
                Some(t) => (format_sig12(t), 0),
                None => (String::new(), 1),
            };
            out.push_str(&format!(
                "{},{},{},{}\n",
                format_sig12(row.re_n),
                format_sig12(row.im_n),
                t,
                flag
            ));
        }
        out
    }

    pub fn max_transmittance_where(&self, pred: impl Fn(f64) -> bool) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| pred(r.re_n))
            .filter_map(|r| r.transmittance)
            .reduce(f64::max)
    }
}
