//! Foldy–Lax multiple scattering by point scatterers.
//!
//! The exciting field `ξ_i` at scatterer `i` solves the closed system
//!
//! ```text
//! ξ_i - Σ_{j≠i} G_j(r_i - r_j) f_j ξ_j = Ψ₀(r_i)
//! ```
//!
//! and the total field is `Ψ(r) = Ψ₀(r) + Σ_i G_i(r - r_i) f_i ξ_i`. The
//! configuration-averaged (coherent) field replaces the sum by an integral
//! against the scatterer density.

use std::cell::Cell;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greens::{norm3, Dimension, GreenKind, WaveNumber};
use crate::linalg::solve_dense;
use crate::quad::{integrate_with_breaks, Estimate, QuadOptions};
use crate::ComplexAmplitude;

pub type Point = [f64; 3];

/// Systems with a pivot-ratio condition estimate above this are treated as resonant.
pub const MAX_CONDITION: f64 = 1e14;

/// Scattering amplitude of a single scatterer as a function of `|k|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AmplitudeModel {
    Constant(Complex64),
    /// `f(k) = -b + i k b²`, the low-energy truncation for scattering length `b`.
    NuclearExpansion { scattering_length: f64 },
    /// Samples `(k, f)` sorted by `k`, linearly interpolated.
    Tabulated(Vec<(f64, Complex64)>),
}

impl AmplitudeModel {
    pub fn at(&self, k: f64) -> Result<Complex64> {
        match self {
            AmplitudeModel::Constant(f) => Ok(*f),
            AmplitudeModel::NuclearExpansion { scattering_length } => {
                Ok(amplitude_expansion(*scattering_length, k))
            }
            AmplitudeModel::Tabulated(samples) => interpolate(samples, k),
        }
    }
}

fn interpolate(samples: &[(f64, Complex64)], k: f64) -> Result<Complex64> {
    let out_of_range = || Error::Domain(format!("k = {k} outside the tabulated amplitude range"));
    let (first, last) = match (samples.first(), samples.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::Domain("tabulated amplitude has no samples".into())),
    };
    if k < first.0 || k > last.0 {
        return Err(out_of_range());
    }
    let idx = samples.partition_point(|s| s.0 <= k);
    if idx == 0 {
        return Ok(first.1);
    }
    if idx == samples.len() {
        return Ok(last.1);
    }
    let (k0, f0) = samples[idx - 1];
    let (k1, f1) = samples[idx];
    let w = (k - k0) / (k1 - k0);
    Ok(f0 * (1.0 - w) + f1 * w)
}

/// Low-energy scattering amplitude `-b + i k b²`.
pub fn amplitude_expansion(b: f64, k: f64) -> Complex64 {
    Complex64::new(-b, k * b * b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScattererSpec {
    pub position: Point,
    pub amplitude: AmplitudeModel,
    pub green: GreenKind,
}

/// Incident plane wave `A·e^{ik·r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWave {
    pub k_vector: Point,
    pub amplitude: Complex64,
}

impl PlaneWave {
    pub fn new(k_vector: Point) -> Self {
        PlaneWave {
            k_vector,
            amplitude: Complex64::new(1.0, 0.0),
        }
    }

    pub fn scaled(self, factor: Complex64) -> Self {
        PlaneWave {
            amplitude: self.amplitude * factor,
            ..self
        }
    }

    pub fn at(&self, r: Point) -> ComplexAmplitude {
        let phase = self.k_vector[0] * r[0] + self.k_vector[1] * r[1] + self.k_vector[2] * r[2];
        self.amplitude * Complex64::new(0.0, phase).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExcitingFields {
    pub xi: Vec<ComplexAmplitude>,
    /// Pivot-ratio condition estimate of the solved system (1 when no solve was needed).
    pub condition: f64,
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn validate(scatterers: &[ScattererSpec]) -> Result<()> {
    if scatterers.is_empty() {
        return Err(Error::Precondition("at least one scatterer is required".into()));
    }
    let dim = scatterers[0].green.dimension();
    for (i, s) in scatterers.iter().enumerate() {
        if s.green.dimension() != dim {
            return Err(Error::Precondition("scatterers mix 1D and 3D Green's functions".into()));
        }
        if dim == Dimension::One && (s.position[1] != 0.0 || s.position[2] != 0.0) {
            return Err(Error::Precondition(format!(
                "1D scatterer {i} must lie on the x axis"
            )));
        }
        if s.position.iter().any(|c| !c.is_finite()) {
            return Err(Error::Precondition(format!("scatterer {i} has a non-finite position")));
        }
        for (j, t) in scatterers[..i].iter().enumerate() {
            if s.position == t.position {
                return Err(Error::Precondition(format!(
                    "scatterers {j} and {i} share position {:?}",
                    s.position
                )));
            }
        }
    }
    Ok(())
}

/// Interaction matrix `M_ij = G_j(r_i - r_j) f_j` (zero diagonal).
pub fn interaction_matrix(scatterers: &[ScattererSpec], k: WaveNumber) -> Result<DMatrix<Complex64>> {
    validate(scatterers)?;
    let n = scatterers.len();
    let amplitudes = scatterers
        .iter()
        .map(|s| s.amplitude.at(k.magnitude()))
        .collect::<Result<Vec<_>>>()?;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let sj = &scatterers[j];
                m[(i, j)] = sj.green.eval(k, sub(scatterers[i].position, sj.position))? * amplitudes[j];
            }
        }
    }
    Ok(m)
}

/// Solves the closed Foldy–Lax system for the exciting fields.
pub fn solve_exciting_fields(
    scatterers: &[ScattererSpec],
    incident: &PlaneWave,
    k: WaveNumber,
) -> Result<ExcitingFields> {
    let m = interaction_matrix(scatterers, k)?;
    let n = scatterers.len();
    let rhs = DVector::from_iterator(n, scatterers.iter().map(|s| incident.at(s.position)));
    if n == 1 {
        return Ok(ExcitingFields {
            xi: vec![rhs[0]],
            condition: 1.0,
        });
    }
    let a = DMatrix::identity(n, n) - m;
    let sol = solve_dense(a, &rhs)?;
    if sol.condition > MAX_CONDITION {
        return Err(Error::SingularSystem {
            condition: sol.condition,
        });
    }
    Ok(ExcitingFields {
        xi: sol.x.iter().copied().collect(),
        condition: sol.condition,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions {
            max_iterations: 500,
            tolerance: 1e-13,
        }
    }
}

/// Fixed-point iteration on the unclosed form, where the exciting field is
/// driven by the total field at the other scatterers:
///
/// ```text
/// ξ_i = Ψ₀(r_i) + Σ_{j≠i} G_j(r_i - r_j) f_j Ψ(r_j),
/// Ψ(r_j) = Ψ₀(r_j) + Σ_l G_l(r_j - r_l) f_l ξ_l   (l = j included)
/// ```
///
/// The self term makes this unusable for 3D kernels. It agrees with
/// [`solve_exciting_fields`] to first order in the amplitudes.
pub fn solve_exciting_fields_iterative(
    scatterers: &[ScattererSpec],
    incident: &PlaneWave,
    k: WaveNumber,
    opts: &FixedPointOptions,
) -> Result<ExcitingFields> {
    let m = interaction_matrix(scatterers, k)?;
    let n = scatterers.len();
    let mut self_terms = Vec::with_capacity(n);
    for s in scatterers {
        let g0 = s.green.eval(k, [0.0; 3]).map_err(|_| {
            Error::Singularity("unclosed iteration needs a finite self term G(0)".into())
        })?;
        self_terms.push(g0 * s.amplitude.at(k.magnitude())?);
    }
    let psi0 = DVector::from_iterator(n, scatterers.iter().map(|s| incident.at(s.position)));
    let self_diag = DMatrix::from_diagonal(&DVector::from_vec(self_terms));
    let full = &m + &self_diag;

    let mut xi = psi0.clone();
    let mut last_update = f64::INFINITY;
    for _ in 0..opts.max_iterations {
        let psi_at = &psi0 + &full * &xi;
        let next = &psi0 + &m * &psi_at;
        last_update = max_norm(&(&next - &xi));
        let scale = max_norm(&next).max(1.0);
        xi = next;
        if !last_update.is_finite() {
            break;
        }
        if last_update <= opts.tolerance * scale {
            return Ok(ExcitingFields {
                xi: xi.iter().copied().collect(),
                condition: 1.0,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: opts.max_iterations,
        last_update,
    })
}

fn max_norm(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Power-iteration estimate of the spectral radius of `m`.
pub fn spectral_radius_estimate(m: &DMatrix<Complex64>, iterations: usize) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut v = DVector::from_fn(n, |i, _| Complex64::new(1.0 + 0.1 * i as f64, 0.05 * i as f64));
    v /= Complex64::new(v.norm(), 0.0);
    let mut estimate = 0.0;
    for _ in 0..iterations {
        let w = m * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        estimate = norm;
        v = w / Complex64::new(norm, 0.0);
    }
    estimate
}

/// `Ψ(r) = Ψ₀(r) + Σ_i G_i(r - r_i) f_i ξ_i`.
pub fn total_field(
    r: Point,
    scatterers: &[ScattererSpec],
    fields: &ExcitingFields,
    incident: &PlaneWave,
    k: WaveNumber,
) -> Result<ComplexAmplitude> {
    if fields.xi.len() != scatterers.len() {
        return Err(Error::Precondition(format!(
            "{} exciting fields for {} scatterers",
            fields.xi.len(),
            scatterers.len()
        )));
    }
    let mut psi = incident.at(r);
    for (s, xi) in scatterers.iter().zip(&fields.xi) {
        psi += s.green.eval(k, sub(r, s.position))? * s.amplitude.at(k.magnitude())? * xi;
    }
    Ok(psi)
}

/// [`total_field`] on many points, evaluated in parallel.
pub fn total_field_grid(
    points: &[Point],
    scatterers: &[ScattererSpec],
    fields: &ExcitingFields,
    incident: &PlaneWave,
    k: WaveNumber,
) -> Result<Vec<ComplexAmplitude>> {
    points
        .par_iter()
        .map(|&r| total_field(r, scatterers, fields, incident, k))
        .collect()
}

pub type Density1D = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Density3D = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

/// Scatterer number density, zero outside its support.
#[derive(Clone)]
pub enum DensityField {
    Empty,
    /// Exact deltas `Σ w_i δ(r - p_i)`.
    PointMasses(Vec<(Point, f64)>),
    /// `ρ(x)` on `[lo, hi]` along the x axis.
    Continuous1D { rho: Density1D, support: (f64, f64) },
    /// `ρ(r)` on the axis-aligned box `[lo, hi]`.
    Continuous3D { rho: Density3D, support: (Point, Point) },
}

impl std::fmt::Debug for DensityField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DensityField::Empty => write!(f, "Empty"),
            DensityField::PointMasses(p) => f.debug_tuple("PointMasses").field(p).finish(),
            DensityField::Continuous1D { support, .. } => {
                write!(f, "Continuous1D {{ support: {support:?} }}")
            }
            DensityField::Continuous3D { support, .. } => {
                write!(f, "Continuous3D {{ support: {support:?} }}")
            }
        }
    }
}

fn negative_density(at: String) -> Error {
    Error::Domain(format!("scatterer density is negative at {at}"))
}

/// Coherent field `e^{ik·r} + ∫_V G(r - r') f ρ(r') ξ(r') dr'`.
///
/// Point masses are summed exactly; continuous densities go through adaptive
/// quadrature, and the returned estimate carries its error bound.
#[allow(clippy::too_many_arguments)]
pub fn coherent_field(
    r: Point,
    density: &DensityField,
    amplitude: &AmplitudeModel,
    xi: &(dyn Fn(Point) -> Complex64 + Sync),
    green: GreenKind,
    incident: &PlaneWave,
    k: WaveNumber,
    opts: &QuadOptions,
) -> Result<Estimate> {
    let f = amplitude.at(k.magnitude())?;
    let base = incident.at(r);
    match density {
        DensityField::Empty => Ok(Estimate {
            value: base,
            error: 0.0,
            evaluations: 0,
        }),
        DensityField::PointMasses(masses) => {
            let mut value = base;
            for &(p, w) in masses {
                if w < 0.0 {
                    return Err(negative_density(format!("{p:?}")));
                }
                value += green.eval(k, sub(r, p))? * f * w * xi(p);
            }
            Ok(Estimate {
                value,
                error: 0.0,
                evaluations: 0,
            })
        }
        DensityField::Continuous1D { rho, support } => {
            if green.dimension() != Dimension::One {
                return Err(Error::Precondition("1D density needs a 1D Green's function".into()));
            }
            let (lo, hi) = *support;
            let mut breaks = vec![lo];
            if r[0] > lo && r[0] < hi {
                breaks.push(r[0]);
            }
            breaks.push(hi);
            let failure = Cell::new(None);
            let est = integrate_with_breaks(
                |x| {
                    let d = rho(x);
                    if d < 0.0 {
                        failure.set(Some(negative_density(format!("x = {x}"))));
                    }
                    let p = [x, 0.0, 0.0];
                    green.eval(k, [r[0] - x, 0.0, 0.0]).unwrap_or_default() * f * d * xi(p)
                },
                &breaks,
                opts,
            )?;
            if let Some(e) = failure.take() {
                return Err(e);
            }
            Ok(Estimate {
                value: base + est.value,
                ..est
            })
        }
        DensityField::Continuous3D { rho, support } => {
            if green.dimension() != Dimension::Three {
                return Err(Error::Precondition("3D density needs a 3D Green's function".into()));
            }
            let est = integrate_box(r, support, opts, |p| {
                let d = rho(p);
                if d < 0.0 {
                    return Err(negative_density(format!("{p:?}")));
                }
                let sep = sub(r, p);
                if norm3(sep) == 0.0 {
                    // integrable point singularity; measure zero
                    return Ok(Complex64::new(0.0, 0.0));
                }
                Ok(green.eval(k, sep)? * f * d * xi(p))
            })?;
            Ok(Estimate {
                value: base + est.value,
                ..est
            })
        }
    }
}

/// Iterated adaptive quadrature over an axis-aligned box, split at the
/// coordinates of `r` so the kernel singularity sits on panel corners.
fn integrate_box<F>(r: Point, support: &(Point, Point), opts: &QuadOptions, integrand: F) -> Result<Estimate>
where
    F: Fn(Point) -> Result<Complex64>,
{
    let (lo, hi) = *support;
    let breaks = |axis: usize| {
        let mut b = vec![lo[axis]];
        if r[axis] > lo[axis] && r[axis] < hi[axis] {
            b.push(r[axis]);
        }
        b.push(hi[axis]);
        b
    };
    let (bx, by, bz) = (breaks(0), breaks(1), breaks(2));
    let failure: Cell<Option<Error>> = Cell::new(None);
    let inner_error = Cell::new(0.0f64);
    let evaluations = Cell::new(0usize);
    // Inner integrals get a tighter budget so the outer estimate dominates.
    let inner_opts = QuadOptions {
        abs_tol: opts.abs_tol * 1e-2,
        rel_tol: opts.rel_tol * 1e-2,
        ..*opts
    };
    let record = |res: Result<Estimate>| -> Complex64 {
        match res {
            Ok(e) => {
                inner_error.set(inner_error.get().max(e.error));
                evaluations.set(evaluations.get() + e.evaluations);
                e.value
            }
            Err(e) => {
                failure.set(Some(e));
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let outer = integrate_with_breaks(
        |x| {
            let plane = integrate_with_breaks(
                |y| {
                    let line = integrate_with_breaks(
                        |z| match integrand([x, y, z]) {
                            Ok(v) => v,
                            Err(e) => {
                                failure.set(Some(e));
                                Complex64::new(0.0, 0.0)
                            }
                        },
                        &bz,
                        &inner_opts,
                    );
                    record(line)
                },
                &by,
                &inner_opts,
            );
            record(plane)
        },
        &bx,
        opts,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let volume = (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
    Ok(Estimate {
        value: outer.value,
        error: outer.error + inner_error.get() * volume.abs().max(1.0),
        evaluations: outer.evaluations + evaluations.get(),
    })
}

/// Optical potential of the averaged medium with `ξ = c·ψ`:
/// `-2π ħ² ρ f c / m` inside the scattering volume, zero outside.
pub fn optical_potential(rho: f64, f: Complex64, c: Complex64, mass: f64, hbar: f64, inside: bool) -> Result<Complex64> {
    if !(mass > 0.0) {
        return Err(Error::Precondition(format!("mass must be positive, got {mass}")));
    }
    if !inside {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(-2.0 * PI * hbar * hbar * rho * f * c / mass)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefractionIndex {
    pub n: Complex64,
    /// Wave number of the generated wave, `K' = √(k² + 4πρfc)` (principal root).
    pub k_prime: Complex64,
}

/// Positive-branch index `n = K'/k` from `K'² = k² + 4πρfc`.
pub fn positive_index(k: WaveNumber, rho: f64, f: Complex64, c: Complex64) -> RefractionIndex {
    let kv = k.value();
    let k_prime = (Complex64::new(kv * kv, 0.0) + 4.0 * PI * rho * f * c).sqrt();
    RefractionIndex { n: k_prime / kv, k_prime }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::GreenVariant;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn k1() -> WaveNumber {
        WaveNumber::new(1.0).unwrap()
    }

    fn one_d(x: f64, f: Complex64) -> ScattererSpec {
        ScattererSpec {
            position: [x, 0.0, 0.0],
            amplitude: AmplitudeModel::Constant(f),
            green: GreenKind::one_d(GreenVariant::Outgoing),
        }
    }

    #[test]
    fn amplitude_expansion_examples() {
        assert_eq!(amplitude_expansion(0.0, 3.0), c(0.0, 0.0));
        assert_eq!(amplitude_expansion(0.7, 0.0), c(-0.7, 0.0));
        assert_eq!(amplitude_expansion(1.0, 1.0), c(-1.0, 1.0));
    }

    #[test]
    fn tabulated_interpolation() {
        let m = AmplitudeModel::Tabulated(vec![(0.0, c(0.0, 0.0)), (2.0, c(2.0, -4.0))]);
        assert_eq!(m.at(1.0).unwrap(), c(1.0, -2.0));
        assert_eq!(m.at(2.0).unwrap(), c(2.0, -4.0));
        assert!(matches!(m.at(2.5), Err(Error::Domain(_))));
        assert!(AmplitudeModel::Tabulated(vec![]).at(1.0).is_err());
    }

    #[test]
    fn single_scatterer_sees_incident_field() {
        let inc = PlaneWave::new([1.0, 0.0, 0.0]);
        let s = [one_d(0.3, c(0.4, 0.2))];
        let xi = solve_exciting_fields(&s, &inc, k1()).unwrap();
        assert_eq!(xi.xi, vec![inc.at([0.3, 0.0, 0.0])]);
    }

    #[test]
    fn zero_amplitudes_decouple() {
        let inc = PlaneWave::new([1.0, 0.0, 0.0]);
        let s: Vec<_> = (0..5).map(|i| one_d(i as f64 * 0.7, c(0.0, 0.0))).collect();
        let xi = solve_exciting_fields(&s, &inc, k1()).unwrap();
        for (sc, x) in s.iter().zip(&xi.xi) {
            assert!((x - inc.at(sc.position)).norm() < 1e-15);
        }
    }

    #[test]
    fn duplicate_positions_rejected() {
        let inc = PlaneWave::new([1.0, 0.0, 0.0]);
        let s = [one_d(1.0, c(0.1, 0.0)), one_d(1.0, c(0.2, 0.0))];
        assert!(matches!(solve_exciting_fields(&s, &inc, k1()), Err(Error::Precondition(_))));
        assert!(matches!(solve_exciting_fields(&[], &inc, k1()), Err(Error::Precondition(_))));
    }

    #[test]
    fn resonant_pair_is_singular() {
        // 1 - (G(d) f)² = 0 with G(d) = e^{id}/2: choose f = 2 e^{-id}.
        let d = 0.9;
        let f = Complex64::new(0.0, -d).exp() * 2.0;
        let s = [one_d(0.0, f), one_d(d, f)];
        let err = solve_exciting_fields(&s, &PlaneWave::new([1.0, 0.0, 0.0]), k1()).unwrap_err();
        assert!(matches!(err, Error::SingularSystem { .. }), "{err:?}");
    }

    #[test]
    fn total_field_at_3d_scatterer_is_singular() {
        let s = [ScattererSpec {
            position: [0.0; 3],
            amplitude: AmplitudeModel::Constant(c(0.1, 0.0)),
            green: GreenKind::three_d(GreenVariant::Outgoing).unwrap(),
        }];
        let inc = PlaneWave::new([0.0, 0.0, 1.0]);
        let xi = solve_exciting_fields(&s, &inc, k1()).unwrap();
        assert!(matches!(total_field([0.0; 3], &s, &xi, &inc, k1()), Err(Error::Singularity(_))));
    }

    #[test]
    fn iterative_mode_rejects_3d() {
        let kind = GreenKind::three_d(GreenVariant::Outgoing).unwrap();
        let s: Vec<_> = (0..2)
            .map(|i| ScattererSpec {
                position: [i as f64, 0.0, 0.0],
                amplitude: AmplitudeModel::Constant(c(0.1, 0.0)),
                green: kind,
            })
            .collect();
        let r = solve_exciting_fields_iterative(&s, &PlaneWave::new([1.0, 0.0, 0.0]), k1(), &Default::default());
        assert!(matches!(r, Err(Error::Singularity(_))));
    }

    #[test]
    fn optical_potential_examples() {
        assert_eq!(optical_potential(0.0, c(1.0, 0.0), c(1.0, 0.0), 1.0, 1.0, true).unwrap(), c(0.0, 0.0));
        assert_eq!(optical_potential(3.0, c(1.0, 2.0), c(1.0, 0.0), 1.0, 1.0, false).unwrap(), c(0.0, 0.0));
        let v = optical_potential(1.0, c(1.0, 0.0), c(1.0, 0.0), 1.0, 1.0, true).unwrap();
        assert!((v - c(-2.0 * PI, 0.0)).norm() < 1e-15);
        assert!(optical_potential(1.0, c(1.0, 0.0), c(1.0, 0.0), 0.0, 1.0, true).is_err());
    }

    #[test]
    fn positive_index_examples() {
        let k = WaveNumber::new(2.0).unwrap();
        assert_eq!(positive_index(k, 0.0, c(1.0, 0.0), c(1.0, 0.0)).n, c(1.0, 0.0));
        // 4πρfc = 3k²
        let rho = 3.0 * 4.0 / (4.0 * PI);
        let idx = positive_index(k, rho, c(1.0, 0.0), c(1.0, 0.0));
        assert!((idx.n - c(2.0, 0.0)).norm() < 1e-14);
        // 4πρfc = -k²(1 - 1e-6)
        let rho = -4.0 * (1.0 - 1e-6) / (4.0 * PI);
        let idx = positive_index(k, rho, c(1.0, 0.0), c(1.0, 0.0));
        assert!((idx.n - c(1e-3, 0.0)).norm() < 1e-9, "{:?}", idx.n);
    }

    #[test]
    fn spectral_radius_of_diagonalizable_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.25, 0.0), c(0.25, 0.0), c(0.0, 0.0)]);
        assert!((spectral_radius_estimate(&m, 200) - 0.25).abs() < 1e-12);
    }
}
