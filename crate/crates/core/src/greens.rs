//! Green's functions of the 1D and 3D Helmholtz operators.
//!
//! All lengths are nondimensional; the wave number carries the only scale.
//! The 1D isotropic kernels solve `G'' + k²G = -δ(x)`, the 3D kernels
//! `∇²G + k²G = -δ(r)` (up to the sign conventions of the stationary
//! combinations). Two anisotropic 1D kernels are provided: `E1Anisotropic`,
//! the odd combination `i·sin(|k|x)/|k|`, and `E2Anisotropic`, the
//! superposition of two direction-dependent species with exponential tails.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ComplexAmplitude;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Nonzero, finite wave number. Kernels depend on `|k|` only; the sign is
/// kept for callers that need the propagation direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct WaveNumber(f64);

impl WaveNumber {
    pub fn new(k: f64) -> Result<Self> {
        if k == 0.0 || !k.is_finite() {
            return Err(Error::ZeroWaveNumber(k));
        }
        Ok(WaveNumber(k))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn magnitude(self) -> f64 {
        self.0.abs()
    }
}

impl TryFrom<f64> for WaveNumber {
    type Error = Error;
    fn try_from(k: f64) -> Result<Self> {
        WaveNumber::new(k)
    }
}

impl From<WaveNumber> for f64 {
    fn from(k: WaveNumber) -> f64 {
        k.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dimension {
    One,
    Three,
}

impl Dimension {
    pub fn as_u8(self) -> u8 {
        match self {
            Dimension::One => 1,
            Dimension::Three => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GreenVariant {
    Outgoing,
    Ingoing,
    CosStationary,
    SinStationary,
    /// 1D only.
    E1Anisotropic,
    /// 1D only.
    E2Anisotropic,
}

impl GreenVariant {
    fn name(self) -> &'static str {
        match self {
            GreenVariant::Outgoing => "outgoing",
            GreenVariant::Ingoing => "ingoing",
            GreenVariant::CosStationary => "cos",
            GreenVariant::SinStationary => "sin",
            GreenVariant::E1Anisotropic => "e1",
            GreenVariant::E2Anisotropic => "e2",
        }
    }

    fn is_anisotropic(self) -> bool {
        matches!(self, GreenVariant::E1Anisotropic | GreenVariant::E2Anisotropic)
    }
}

/// A Green's-function variant bound to its spatial dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GreenKind {
    dimension: Dimension,
    variant: GreenVariant,
}

impl GreenKind {
    pub fn new(dimension: Dimension, variant: GreenVariant) -> Result<Self> {
        if dimension == Dimension::Three && variant.is_anisotropic() {
            return Err(Error::InvalidKind {
                kind: variant.name(),
                dimension: 3,
            });
        }
        Ok(GreenKind { dimension, variant })
    }

    pub const fn one_d(variant: GreenVariant) -> Self {
        GreenKind {
            dimension: Dimension::One,
            variant,
        }
    }

    pub fn three_d(variant: GreenVariant) -> Result<Self> {
        GreenKind::new(Dimension::Three, variant)
    }

    pub fn dimension(self) -> Dimension {
        self.dimension
    }

    pub fn variant(self) -> GreenVariant {
        self.variant
    }

    /// Every valid kind, 1D first.
    pub fn all() -> Vec<GreenKind> {
        use GreenVariant::*;
        let mut v: Vec<_> = [Outgoing, Ingoing, CosStationary, SinStationary, E1Anisotropic, E2Anisotropic]
            .into_iter()
            .map(GreenKind::one_d)
            .collect();
        v.extend(
            [Outgoing, Ingoing, CosStationary, SinStationary]
                .into_iter()
                .map(|var| GreenKind {
                    dimension: Dimension::Three,
                    variant: var,
                }),
        );
        v
    }

    /// Evaluates the kernel at separation `r`. 1D kinds read `r[0]` only.
    pub fn eval(self, k: WaveNumber, r: [f64; 3]) -> Result<ComplexAmplitude> {
        match self.dimension {
            Dimension::One => green1d(self, k, r[0]),
            Dimension::Three => green3d(self, k, r),
        }
    }
}

impl fmt::Display for GreenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}d-{}", self.dimension.as_u8(), self.variant.name())
    }
}

impl FromStr for GreenKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("unknown Green's function kind '{s}'"));
        let (dim, var) = s.trim().split_once('-').ok_or_else(bad)?;
        let dimension = match dim {
            "1d" => Dimension::One,
            "3d" => Dimension::Three,
            _ => return Err(bad()),
        };
        let variant = match var {
            "outgoing" => GreenVariant::Outgoing,
            "ingoing" => GreenVariant::Ingoing,
            "cos" => GreenVariant::CosStationary,
            "sin" => GreenVariant::SinStationary,
            "e1" => GreenVariant::E1Anisotropic,
            "e2" => GreenVariant::E2Anisotropic,
            _ => return Err(bad()),
        };
        GreenKind::new(dimension, variant)
    }
}

impl TryFrom<String> for GreenKind {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GreenKind> for String {
    fn from(k: GreenKind) -> String {
        k.to_string()
    }
}

fn require_dimension(kind: GreenKind, dimension: Dimension) -> Result<()> {
    if kind.dimension != dimension {
        return Err(Error::InvalidKind {
            kind: kind.variant.name(),
            dimension: dimension.as_u8(),
        });
    }
    Ok(())
}

/// Evaluates a 1D kernel at `x`.
///
/// The second stationary combination uses the real argument `-|k||x|`, so
/// `SinStationary(x) = i·sin(|k||x|)/|k|`. For `E1Anisotropic` the `x >= 0`
/// branch owns the origin; both branches reduce to `i·sin(|k|x)/|k|`.
pub fn green1d(kind: GreenKind, k: WaveNumber, x: f64) -> Result<ComplexAmplitude> {
    require_dimension(kind, Dimension::One)?;
    let ak = k.magnitude();
    let phase = ak * x.abs();
    let value = match kind.variant {
        GreenVariant::Outgoing => Complex64::new(0.0, phase).exp() / (2.0 * ak),
        GreenVariant::Ingoing => Complex64::new(0.0, -phase).exp() / (2.0 * ak),
        GreenVariant::CosStationary => Complex64::new((-phase).cos() / ak, 0.0),
        GreenVariant::SinStationary => -I * (-phase).sin() / ak,
        GreenVariant::E1Anisotropic => {
            if x >= 0.0 {
                -I * (-phase).sin() / ak
            } else {
                I * (-phase).sin() / ak
            }
        }
        GreenVariant::E2Anisotropic => green_e2(k, x),
    };
    Ok(value)
}

/// Evaluates a 3D kernel at separation `r`.
pub fn green3d(kind: GreenKind, k: WaveNumber, r: [f64; 3]) -> Result<ComplexAmplitude> {
    require_dimension(kind, Dimension::Three)?;
    let dist = norm3(r);
    if dist == 0.0 {
        return Err(Error::Singularity(format!("3D {} kernel at r = 0", kind.variant.name())));
    }
    let phase = k.magnitude() * dist;
    let denom = 4.0 * PI * dist;
    let value = match kind.variant {
        GreenVariant::Outgoing => Complex64::new(0.0, phase).exp() / denom,
        GreenVariant::Ingoing => Complex64::new(0.0, -phase).exp() / denom,
        GreenVariant::CosStationary => Complex64::new(-phase.cos() / denom, 0.0),
        GreenVariant::SinStationary => -I * phase.sin() / denom,
        GreenVariant::E1Anisotropic | GreenVariant::E2Anisotropic => unreachable!("rejected by GreenKind::new"),
    };
    Ok(value)
}

pub(crate) fn norm3(r: [f64; 3]) -> f64 {
    (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt()
}

/// Direction of an anisotropic species: `Plus` radiates into `x >= 0`,
/// `Minus` into `x <= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    /// True on the half-line where the species carries `±G(x)`.
    pub fn on_branch(self, x: f64) -> bool {
        self.sign() * x >= 0.0
    }
}

/// Which tail coefficient is set to zero when matching continuity at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroedCoefficient {
    C1,
    C2,
}

/// One anisotropic species: `±G(x)` on its branch, `c1·e^{x|k|} + c2·e^{-x|k|}`
/// on the opposite half-line. The tail solves `-φ'' + k²φ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnisotropicSpecies {
    pub branch: Branch,
    /// Isotropic 1D kernel used on the branch.
    pub base: GreenVariant,
    pub c1: Complex64,
    pub c2: Complex64,
}

impl AnisotropicSpecies {
    /// Chooses `(c1, c2)` so the species is continuous at the origin, with the
    /// given coefficient forced to zero.
    pub fn continuous(
        branch: Branch,
        base: GreenVariant,
        k: WaveNumber,
        zeroed: ZeroedCoefficient,
    ) -> Result<Self> {
        let g0 = green1d(GreenKind::one_d(base), k, 0.0)? * branch.sign();
        let zero = Complex64::new(0.0, 0.0);
        let (c1, c2) = match zeroed {
            ZeroedCoefficient::C1 => (zero, g0),
            ZeroedCoefficient::C2 => (g0, zero),
        };
        Ok(AnisotropicSpecies { branch, base, c1, c2 })
    }

    /// Continuous species whose tail decays away from the origin:
    /// `e^{x|k|}` survives on `x < 0` for `Plus`, `e^{-x|k|}` on `x > 0` for `Minus`.
    pub fn decaying(branch: Branch, base: GreenVariant, k: WaveNumber) -> Result<Self> {
        let zeroed = match branch {
            Branch::Plus => ZeroedCoefficient::C2,
            Branch::Minus => ZeroedCoefficient::C1,
        };
        AnisotropicSpecies::continuous(branch, base, k, zeroed)
    }

    pub fn eval(&self, k: WaveNumber, x: f64) -> ComplexAmplitude {
        if self.branch.on_branch(x) {
            // base is isotropic 1D by construction of the callers
            green1d(GreenKind::one_d(self.base), k, x).unwrap_or_default() * self.branch.sign()
        } else {
            self.tail(k, x)
        }
    }

    pub fn tail(&self, k: WaveNumber, x: f64) -> ComplexAmplitude {
        let ak = k.magnitude();
        self.c1 * (x * ak).exp() + self.c2 * (-x * ak).exp()
    }

    /// Coefficient of `∂²φ` in the species' anisotropic Helmholtz operator.
    pub fn operator_sign(&self, x: f64) -> f64 {
        if self.branch.on_branch(x) {
            1.0
        } else {
            -1.0
        }
    }
}

/// `φ±(x)` built on the outgoing kernel with explicit tail coefficients.
pub fn anisotropic_phi(branch: Branch, k: WaveNumber, x: f64, c1: Complex64, c2: Complex64) -> ComplexAmplitude {
    AnisotropicSpecies {
        branch,
        base: GreenVariant::Outgoing,
        c1,
        c2,
    }
    .eval(k, x)
}

/// The two decaying species of [`green_e2`] for a given base kernel.
pub fn e2_species(base: GreenVariant, k: WaveNumber) -> Result<[AnisotropicSpecies; 2]> {
    if base.is_anisotropic() {
        return Err(Error::InvalidKind {
            kind: base.name(),
            dimension: 1,
        });
    }
    Ok([
        AnisotropicSpecies::decaying(Branch::Plus, base, k)?,
        AnisotropicSpecies::decaying(Branch::Minus, base, k)?,
    ])
}

/// Superposed two-species kernel `φ+(x) + φ-(x)` on the outgoing kernel with
/// decaying, continuity-matched tails.
pub fn green_e2(k: WaveNumber, x: f64) -> ComplexAmplitude {
    green_e2_with_base(GreenVariant::Outgoing, k, x).unwrap_or_default()
}

pub fn green_e2_with_base(base: GreenVariant, k: WaveNumber, x: f64) -> Result<ComplexAmplitude> {
    let [plus, minus] = e2_species(base, k)?;
    Ok(plus.eval(k, x) + minus.eval(k, x))
}

/// Central-difference residual `|∇²G + k²G|` at `point`, away from the source.
///
/// 1D kernels use the second difference in `x`; 3D kernels use the radial
/// Laplacian `(rG)''/r` along the ray through `point`. For `E2Anisotropic`
/// the residuals of the two species, each under its own anisotropic
/// operator, are summed.
pub fn helmholtz_residual(kind: GreenKind, k: WaveNumber, point: [f64; 3], h: f64) -> Result<f64> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Precondition(format!("step h must be positive, got {h}")));
    }
    let k2 = k.magnitude() * k.magnitude();
    match kind.dimension {
        Dimension::One => {
            let x = point[0];
            if x.abs() < 10.0 * h {
                return Err(Error::Precondition(format!(
                    "point x = {x} is within 10h = {} of the source",
                    10.0 * h
                )));
            }
            if kind.variant == GreenVariant::E2Anisotropic {
                let mut total = 0.0;
                for species in e2_species(GreenVariant::Outgoing, k)? {
                    let d2 = second_difference(|s| species.eval(k, s), x, h);
                    total += (d2 * species.operator_sign(x) + species.eval(k, x) * k2).norm();
                }
                return Ok(total);
            }
            let g = |s: f64| green1d(kind, k, s).unwrap_or_default();
            let d2 = second_difference(g, x, h);
            Ok((d2 + g(x) * k2).norm())
        }
        Dimension::Three => {
            let r = norm3(point);
            if r < 10.0 * h {
                return Err(Error::Precondition(format!(
                    "point |r| = {r} is within 10h = {} of the source",
                    10.0 * h
                )));
            }
            let dir = [point[0] / r, point[1] / r, point[2] / r];
            let along = |s: f64| green3d(kind, k, [dir[0] * s, dir[1] * s, dir[2] * s]).unwrap_or_default();
            let u = |s: f64| along(s) * s;
            let lap = second_difference(u, r, h) / r;
            Ok((lap + along(r) * k2).norm())
        }
    }
}

fn second_difference<F: Fn(f64) -> Complex64>(f: F, x: f64, h: f64) -> Complex64 {
    (f(x + h) - f(x) * 2.0 + f(x - h)) / (h * h)
}
