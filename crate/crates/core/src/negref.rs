//! Explicit scatterer configurations whose scattered field is a standing
//! wave `g·(e^{ikx} - e^{-ikx})`, i.e. an incident component together with
//! its counter-propagating partner.
//!
//! Three constructions are checked:
//! - a delta-supported ensemble radiating through the odd kernel
//!   `G_e1(x) = i·sin(|k|x)/|k|` with amplitude `f = -2|k|g`,
//! - a Gaussian-extended version of the same ensemble,
//! - a 3D ensemble at the origin with weight `4π|r|` and the stationary
//!   kernel `-i·sin(|k||r|)/(4π|r|)`, checked in the paraxial far field.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foldy::Point;
use crate::greens::{green1d, green3d, norm3, Dimension, GreenKind, GreenVariant, WaveNumber};
use crate::quad::{integrate, integrate_with_breaks, Estimate, QuadOptions};
use crate::ComplexAmplitude;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Half-width of the Gaussian window in units of sigma; the truncated tail
/// mass is `erfc(8) ≈ 1e-29`.
pub const GAUSSIAN_WINDOW: f64 = 8.0;

/// `α = ρ·ξ`, the product of scatterer density and exciting field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AlphaField {
    /// `weight·δ(x - position)`.
    PointMass { position: f64, weight: Complex64 },
    /// `(1/(√(4π)σ))·e^{-x²/σ²}·e^{ikx}`.
    Gaussian1D { sigma: f64, k: f64 },
    /// `4π|r|·δ(r)`: all scatterers at the origin with a radial weight that
    /// cancels the `1/(4π|r|)` of the 3D kernel.
    RadialPointMass3D,
}

/// Which sign of the target `±2ig·sin(kx)` the checker accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignConvention {
    Plus,
    Minus,
    /// Accept either orientation and report the one that matched.
    #[default]
    Either,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchedSign {
    Plus,
    Minus,
}

/// One residual scan, serialized as a JSON record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub scenario: String,
    pub grid_size: usize,
    pub max_residual: f64,
    pub matched_sign: MatchedSign,
}

pub fn gaussian_alpha(sigma: f64, k: f64, x: f64) -> Result<ComplexAmplitude> {
    if !(sigma > 0.0) {
        return Err(Error::Precondition(format!("sigma must be positive, got {sigma}")));
    }
    let envelope = (-(x * x) / (sigma * sigma)).exp() / ((4.0 * PI).sqrt() * sigma);
    Ok(Complex64::new(0.0, k * x).exp() * envelope)
}

impl AlphaField {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AlphaField::Gaussian1D { sigma, .. } if !(sigma > 0.0) => Err(Error::Precondition(format!(
                "sigma must be positive, got {sigma}"
            ))),
            _ => Ok(()),
        }
    }
}

/// `∫ f·G(x - x')·α(x') dx'` for a 1D alpha field.
pub fn convolve_1d(
    alpha: &AlphaField,
    f: Complex64,
    green: GreenKind,
    k: WaveNumber,
    x: f64,
    opts: &QuadOptions,
) -> Result<Estimate> {
    if green.dimension() != Dimension::One {
        return Err(Error::InvalidKind {
            kind: "3D kernel in a 1D convolution",
            dimension: 1,
        });
    }
    alpha.validate()?;
    match *alpha {
        AlphaField::PointMass { position, weight } => Ok(Estimate {
            value: f * green1d(green, k, x - position)? * weight,
            error: 0.0,
            evaluations: 1,
        }),
        AlphaField::Gaussian1D { sigma, k: phase_k } => {
            let half = GAUSSIAN_WINDOW * sigma;
            let mut breaks = vec![-half];
            if x > -half && x < half {
                breaks.push(x);
            }
            breaks.push(half);
            let est = integrate_with_breaks(
                |xp| {
                    green1d(green, k, x - xp).unwrap_or_default()
                        * gaussian_alpha(sigma, phase_k, xp).unwrap_or_default()
                },
                &breaks,
                opts,
            )?;
            Ok(Estimate {
                value: est.value * f,
                error: est.error * f.norm(),
                ..est
            })
        }
        AlphaField::RadialPointMass3D => Err(Error::Domain(
            "radial 3D point mass has no 1D convolution".into(),
        )),
    }
}

/// `∫ f·G(r - r')·α(r') dr'` for the radial point mass at the origin:
/// the sifted kernel times the weight `4π|r|`, i.e. `f·G(r)·4π|r|`.
pub fn convolve_3d(alpha: &AlphaField, f: Complex64, green: GreenKind, k: WaveNumber, r: Point) -> Result<ComplexAmplitude> {
    match alpha {
        AlphaField::RadialPointMass3D => {
            let dist = norm3(r);
            Ok(f * green3d(green, k, r)? * (4.0 * PI * dist))
        }
        _ => Err(Error::Domain("only the radial point mass is defined in 3D".into())),
    }
}

fn pick_sign(plus: f64, minus: f64, sign: SignConvention) -> (f64, MatchedSign) {
    match sign {
        SignConvention::Plus => (plus, MatchedSign::Plus),
        SignConvention::Minus => (minus, MatchedSign::Minus),
        SignConvention::Either if minus < plus => (minus, MatchedSign::Minus),
        SignConvention::Either => (plus, MatchedSign::Plus),
    }
}

/// Max over `grid` of `|∫ f·G(x - x')·α(x') dx' ∓ 2ig·sin(kx)|`.
///
/// `SignConvention::Plus` compares against `+2ig·sin(kx)`, `Minus` against
/// `-2ig·sin(kx)`; `Either` keeps the smaller of the two maxima.
#[allow(clippy::too_many_arguments)]
pub fn negref_residual_1d(
    alpha: &AlphaField,
    f: Complex64,
    green: GreenKind,
    g: Complex64,
    k: WaveNumber,
    grid: &[f64],
    sign: SignConvention,
    opts: &QuadOptions,
) -> Result<ResidualReport> {
    if grid.is_empty() {
        return Err(Error::Precondition("residual grid is empty".into()));
    }
    let rows = grid
        .par_iter()
        .map(|&x| {
            let lhs = convolve_1d(alpha, f, green, k, x, opts)?.value;
            let target = I * g * (k.value() * x).sin() * 2.0;
            Ok(((lhs - target).norm(), (lhs + target).norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (plus, minus) = rows
        .iter()
        .fold((0.0f64, 0.0f64), |(p, m), &(a, b)| (p.max(a), m.max(b)));
    let (max_residual, matched_sign) = pick_sign(plus, minus, sign);
    Ok(ResidualReport {
        scenario: format!("1d:{alpha_name}:{green}", alpha_name = alpha_name(alpha)),
        grid_size: grid.len(),
        max_residual,
        matched_sign,
    })
}

fn alpha_name(alpha: &AlphaField) -> &'static str {
    match alpha {
        AlphaField::PointMass { .. } => "point-mass",
        AlphaField::Gaussian1D { .. } => "gaussian",
        AlphaField::RadialPointMass3D => "radial-point-mass",
    }
}

/// Scattering amplitude that turns the delta ensemble into a standing wave:
/// `f(|k|) = -2|k|·g(|k|)`.
pub fn example1_amplitude(k: WaveNumber, g: Complex64) -> Complex64 {
    g * (-2.0 * k.magnitude())
}

/// `f·G_e1(x)` with `f = -2|k|g`; identically `-2ig·sin(|k|x)`.
pub fn example1_field(k: WaveNumber, g: Complex64, grid: &[f64]) -> Vec<ComplexAmplitude> {
    let f = example1_amplitude(k, g);
    let e1 = GreenKind::one_d(GreenVariant::E1Anisotropic);
    grid.iter()
        .map(|&x| f * green1d(e1, k, x).unwrap_or_default())
        .collect()
}

/// Residual report of the delta-supported construction on `grid`.
pub fn example1_report(k: WaveNumber, g: Complex64, grid: &[f64], sign: SignConvention) -> Result<ResidualReport> {
    let alpha = AlphaField::PointMass {
        position: 0.0,
        weight: Complex64::new(1.0, 0.0),
    };
    let mut report = negref_residual_1d(
        &alpha,
        example1_amplitude(k, g),
        GreenKind::one_d(GreenVariant::E1Anisotropic),
        g,
        k,
        grid,
        sign,
        &QuadOptions::default(),
    )?;
    report.scenario = "example1".into();
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtendedDomain {
    pub numeric: ComplexAmplitude,
    pub numeric_error: f64,
    pub closed_form: ComplexAmplitude,
    /// `numeric / closed_form`.
    pub ratio: ComplexAmplitude,
}

/// `sin(a + ib) = sin(a)·cosh(b) + i·cos(a)·sinh(b)`.
pub fn shifted_sine_expansion(a: f64, b: f64) -> Complex64 {
    Complex64::new(a.sin() * b.cosh(), a.cos() * b.sinh())
}

/// Published closed form of the Gaussian-extended integral,
/// `(f/|k|)·(i√π/4)·e^{-k²σ²/2}·sin(kx' + ½ik²σ²)`.
pub fn extended_domain_closed_form(k: f64, sigma: f64, x_prime: f64, f: Complex64) -> ComplexAmplitude {
    let ak = k.abs();
    let beta = 0.5 * k * k * sigma * sigma;
    let s = Complex64::new(k * x_prime, beta).sin();
    f / ak * I * (PI.sqrt() / 4.0) * (-beta).exp() * s
}

/// Quadrature of `(f/|k|)·∫ sin(-|k|x)·α(x - x') dx` over the `±8σ` window
/// around `x'`, alongside the published closed form and their ratio.
pub fn extended_domain_integral(
    k: WaveNumber,
    sigma: f64,
    x_prime: f64,
    f: Complex64,
    opts: &QuadOptions,
) -> Result<ExtendedDomain> {
    if !(sigma > 0.0) {
        return Err(Error::Precondition(format!("sigma must be positive, got {sigma}")));
    }
    let ak = k.magnitude();
    let half = GAUSSIAN_WINDOW * sigma;
    let est = integrate(
        |x| {
            let kernel = gaussian_alpha(sigma, k.value(), x - x_prime).unwrap_or_default();
            kernel * (-ak * x).sin()
        },
        x_prime - half,
        x_prime + half,
        opts,
    )?;
    let numeric = est.value * f / ak;
    let closed_form = extended_domain_closed_form(k.value(), sigma, x_prime, f);
    Ok(ExtendedDomain {
        numeric,
        numeric_error: est.error * f.norm() / ak,
        closed_form,
        ratio: numeric / closed_form,
    })
}

/// Far-field comparison for the 3D construction at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarField {
    /// `-i f sin(|k_x|·|r|)`.
    pub exact: ComplexAmplitude,
    /// `-i f sin(|k_x|·x)`.
    pub paraxial: ComplexAmplitude,
    /// `|(y² + z²)/(2x)| <= 1`.
    pub paraxial_valid: bool,
    /// `|exact - (-2ig·sin(k_x x))|` with `g = f/2`.
    pub residual: f64,
    /// Mean-value bound `|f|·|k_x|·(y² + z²)/(2|x|)` on `|exact - paraxial|`.
    pub bound: f64,
}

pub fn example3d_field(k_x: WaveNumber, f: Complex64, r: Point) -> FarField {
    let ak = k_x.magnitude();
    let [x, y, z] = r;
    let transverse = y * y + z * z;
    let exact = -I * f * (ak * norm3(r)).sin();
    let paraxial = -I * f * (ak * x).sin();
    let g = f / 2.0;
    let target = -2.0 * I * g * (k_x.value() * x).sin();
    FarField {
        exact,
        paraxial,
        paraxial_valid: (transverse / (2.0 * x)).abs() <= 1.0,
        residual: (exact - target).norm(),
        bound: f.norm() * ak * transverse / (2.0 * x.abs()),
    }
}

/// Default far-field grid: `x ∈ {10², 10³, 10⁴}/k`, `y = z ∈ {0, 1, 3}/k`.
pub fn default_far_field_grid(k_x: WaveNumber) -> Vec<Point> {
    let ak = k_x.magnitude();
    let mut grid = Vec::with_capacity(9);
    for t in [0.0, 1.0, 3.0] {
        for x in [1e2, 1e3, 1e4] {
            grid.push([x / ak, t / ak, t / ak]);
        }
    }
    grid
}

/// Max far-field residual over `grid`. Points violating the paraxial
/// condition are still evaluated; the count is returned alongside.
pub fn example3d_report(k_x: WaveNumber, f: Complex64, grid: &[Point]) -> Result<(ResidualReport, usize)> {
    if grid.is_empty() {
        return Err(Error::Precondition("residual grid is empty".into()));
    }
    let fields: Vec<_> = grid.iter().map(|&r| example3d_field(k_x, f, r)).collect();
    let max_residual = fields.iter().map(|ff| ff.residual).fold(0.0, f64::max);
    let invalid = fields.iter().filter(|ff| !ff.paraxial_valid).count();
    Ok((
        ResidualReport {
            scenario: "far-field-3d".into(),
            grid_size: grid.len(),
            max_residual,
            matched_sign: MatchedSign::Minus,
        },
        invalid,
    ))
}
