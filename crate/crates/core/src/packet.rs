//! Wave packets as spectral superpositions of plane waves,
//! `ψ(r, t) = ∫ g(k) e^{i(-k·r - ω(k) t)} dk` with `ω(k) = |k|²/(2m)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate, Estimate, QuadOptions};

/// Weights below this fraction of the peak lie outside the default window.
pub const WINDOW_CUTOFF: f64 = 1e-12;

/// Spectral weight `g(k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumWeight {
    /// `weight · δ(k - k0)`.
    PointMass { k0: Vec<f64>, weight: Complex64 },
    /// `amplitude · Π_d exp(-(k_d - center_d)² / (2 width²))`.
    Gaussian {
        center: Vec<f64>,
        width: f64,
        amplitude: Complex64,
    },
    /// One-dimensional samples `(k, g)` with linear interpolation, zero outside.
    Sampled { samples: Vec<(f64, Complex64)> },
}

impl SpectrumWeight {
    pub fn gaussian_1d(center: f64, width: f64, amplitude: Complex64) -> Self {
        SpectrumWeight::Gaussian {
            center: vec![center],
            width,
            amplitude,
        }
    }

    pub fn sampled(mut samples: Vec<(f64, Complex64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Precondition("a sampled spectrum needs at least two rows".into()));
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        if samples.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::Precondition("sampled wave numbers must be distinct".into()));
        }
        if samples
            .iter()
            .any(|(k, g)| !(k.is_finite() && g.re.is_finite() && g.im.is_finite()))
        {
            return Err(Error::Precondition("sampled spectrum must be finite".into()));
        }
        Ok(SpectrumWeight::Sampled { samples })
    }

    fn dimension(&self) -> Option<usize> {
        match self {
            SpectrumWeight::PointMass { k0, .. } => Some(k0.len()),
            SpectrumWeight::Gaussian { center, .. } => Some(center.len()),
            SpectrumWeight::Sampled { .. } => Some(1),
        }
    }

    /// Value at a one-dimensional `k`; point masses have no pointwise value.
    pub fn at_1d(&self, k: f64) -> Option<Complex64> {
        match self {
            SpectrumWeight::PointMass { .. } => None,
            SpectrumWeight::Gaussian {
                center,
                width,
                amplitude,
            } => {
                let z = (k - center[0]) / width;
                Some(amplitude * (-0.5 * z * z).exp())
            }
            SpectrumWeight::Sampled { samples } => Some(interpolate(samples, k)),
        }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        match self.clone() {
            SpectrumWeight::PointMass { k0, weight } => SpectrumWeight::PointMass { k0, weight: weight * s },
            SpectrumWeight::Gaussian {
                center,
                width,
                amplitude,
            } => SpectrumWeight::Gaussian {
                center,
                width,
                amplitude: amplitude * s,
            },
            SpectrumWeight::Sampled { samples } => SpectrumWeight::Sampled {
                samples: samples.into_iter().map(|(k, g)| (k, g * s)).collect(),
            },
        }
    }

    fn is_real(&self) -> bool {
        match self {
            SpectrumWeight::PointMass { weight, .. } => weight.im == 0.0,
            SpectrumWeight::Gaussian { amplitude, .. } => amplitude.im == 0.0,
            SpectrumWeight::Sampled { samples } => samples.iter().all(|(_, g)| g.im == 0.0),
        }
    }
}

fn interpolate(samples: &[(f64, Complex64)], k: f64) -> Complex64 {
    let (first, last) = (samples[0].0, samples[samples.len() - 1].0);
    if !(k >= first && k <= last) {
        return Complex64::new(0.0, 0.0);
    }
    let i = samples.partition_point(|(x, _)| *x <= k).clamp(1, samples.len() - 1);
    let (x0, g0) = samples[i - 1];
    let (x1, g1) = samples[i];
    g0 + (g1 - g0) * ((k - x0) / (x1 - x0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacketSpec {
    pub g: SpectrumWeight,
    pub dimension: usize,
    /// Mass in units where `ħ = 1`.
    pub mass: f64,
}

impl PacketSpec {
    pub fn new(g: SpectrumWeight, dimension: usize) -> Result<Self> {
        Self::with_mass(g, dimension, 1.0)
    }

    pub fn with_mass(g: SpectrumWeight, dimension: usize, mass: f64) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return Err(Error::Precondition(format!("dimension must be 1, 2 or 3, got {dimension}")));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Precondition(format!("mass must be positive, got {mass}")));
        }
        if g.dimension() != Some(dimension) {
            return Err(Error::Precondition(format!(
                "spectrum is {}-dimensional but the packet is {dimension}-dimensional",
                g.dimension().unwrap_or(0)
            )));
        }
        if let SpectrumWeight::Gaussian { width, .. } = &g {
            if !(*width > 0.0 && width.is_finite()) {
                return Err(Error::Precondition(format!("Gaussian width must be positive, got {width}")));
            }
        }
        Ok(PacketSpec { g, dimension, mass })
    }

    /// `ω(k) = |k|²/(2m)`.
    pub fn omega(&self, k_sq: f64) -> f64 {
        k_sq / (2.0 * self.mass)
    }

    /// Interval per axis holding all weight above [`WINDOW_CUTOFF`] of the peak.
    pub fn window(&self) -> Vec<(f64, f64)> {
        match &self.g {
            SpectrumWeight::PointMass { k0, .. } => k0.iter().map(|&k| (k, k)).collect(),
            SpectrumWeight::Gaussian { center, width, .. } => {
                let half = width * (-2.0 * WINDOW_CUTOFF.ln()).sqrt();
                center.iter().map(|&c| (c - half, c + half)).collect()
            }
            SpectrumWeight::Sampled { samples } => {
                let peak = samples.iter().map(|(_, g)| g.norm()).fold(0.0, f64::max);
                let keep: Vec<usize> = (0..samples.len())
                    .filter(|&i| samples[i].1.norm() > WINDOW_CUTOFF * peak)
                    .collect();
                match (keep.first(), keep.last()) {
                    (Some(&lo), Some(&hi)) => {
                        let lo = lo.saturating_sub(1);
                        let hi = (hi + 1).min(samples.len() - 1);
                        vec![(samples[lo].0, samples[hi].0)]
                    }
                    _ => vec![(samples[0].0, samples[0].0)],
                }
            }
        }
    }
}

fn check_point(spec: &PacketSpec, r: &[f64]) -> Result<()> {
    if r.len() != spec.dimension {
        return Err(Error::Precondition(format!(
            "position has {} components, packet is {}-dimensional",
            r.len(),
            spec.dimension
        )));
    }
    Ok(())
}

/// `∫ g(k) e^{i(s k·r - ω(k) t)} dk` for the given sign `s = ±1`.
fn transform(spec: &PacketSpec, r: &[f64], t: f64, sign: f64, opts: &QuadOptions) -> Result<Estimate> {
    check_point(spec, r)?;
    let phase = |k: f64, x: f64| sign * k * x - spec.omega(k * k) * t;
    match &spec.g {
        SpectrumWeight::PointMass { k0, weight } => {
            let dot: f64 = k0.iter().zip(r).map(|(k, x)| k * x).sum();
            let k_sq: f64 = k0.iter().map(|k| k * k).sum();
            Ok(Estimate {
                value: weight * Complex64::new(0.0, sign * dot - spec.omega(k_sq) * t).exp(),
                error: 0.0,
                evaluations: 0,
            })
        }
        SpectrumWeight::Gaussian {
            center,
            width,
            amplitude,
        } => {
            // The Gaussian and the dispersion both factor over axes.
            let window = spec.window();
            let mut value = *amplitude;
            let mut factors = Vec::with_capacity(center.len());
            let mut evaluations = 0;
            for ((&c, &x), &(lo, hi)) in center.iter().zip(r).zip(&window) {
                let est = integrate(
                    |k| {
                        let z = (k - c) / width;
                        Complex64::from_polar((-0.5 * z * z).exp(), phase(k, x))
                    },
                    lo,
                    hi,
                    opts,
                )?;
                evaluations += est.evaluations;
                value *= est.value;
                factors.push(est);
            }
            let mut error = 0.0;
            for (i, f) in factors.iter().enumerate() {
                let others: f64 = factors
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, g)| g.value.norm())
                    .product();
                error += f.error * others;
            }
            Ok(Estimate {
                value,
                error: error * amplitude.norm(),
                evaluations,
            })
        }
        SpectrumWeight::Sampled { samples } => {
            let (lo, hi) = spec.window()[0];
            if lo == hi {
                return Ok(Estimate {
                    value: Complex64::new(0.0, 0.0),
                    error: 0.0,
                    evaluations: 0,
                });
            }
            let x = r[0];
            integrate(|k| interpolate(samples, k) * Complex64::new(0.0, phase(k, x)).exp(), lo, hi, opts)
        }
    }
}

/// `ψ(r, t) = ∫ g(k) e^{i(-k·r - ω(k) t)} dk` by adaptive quadrature over
/// the spectral window.
pub fn synthesize(spec: &PacketSpec, r: &[f64], t: f64, opts: &QuadOptions) -> Result<Estimate> {
    transform(spec, r, t, -1.0, opts)
}

/// Synthesizes the packet on many points in parallel, preserving order.
pub fn synthesize_grid(spec: &PacketSpec, points: &[Vec<f64>], t: f64, opts: &QuadOptions) -> Result<Vec<Estimate>> {
    points.par_iter().map(|r| synthesize(spec, r, t, opts)).collect()
}

/// Stationary pair `ψ_in(r) = ∫ g e^{-ik·r} dk`, `ψ_out(r) = ∫ g e^{+ik·r} dk`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InOutPair {
    pub psi_in: Complex64,
    pub psi_out: Complex64,
    pub error: f64,
}

pub fn inout_pair(spec: &PacketSpec, r: &[f64], opts: &QuadOptions) -> Result<InOutPair> {
    let psi_in = transform(spec, r, 0.0, -1.0, opts)?;
    let psi_out = if spec.g.is_real() {
        Estimate {
            value: psi_in.value.conj(),
            ..psi_in
        }
    } else {
        transform(spec, r, 0.0, 1.0, opts)?
    };
    Ok(InOutPair {
        psi_in: psi_in.value,
        psi_out: psi_out.value,
        error: psi_in.error.max(psi_out.error),
    })
}

/// Closed form of the stationary 1D Gaussian transform,
/// `A w √(2π) e^{-i c r} e^{-w² r²/2}`.
pub fn gaussian_transform_1d(center: f64, width: f64, amplitude: Complex64, r: f64) -> Complex64 {
    amplitude
        * width
        * (2.0 * std::f64::consts::PI).sqrt()
        * Complex64::from_polar((-0.5 * width * width * r * r).exp(), -center * r)
}
