//! Multiple scattering of matter waves by point scatterers.
//!
//! The crate evaluates Helmholtz Green's functions, solves the Foldy–Lax
//! system for finite scatterer ensembles, builds explicit scatterer
//! configurations whose scattered field runs counter to the incident wave,
//! models a three-scatterer chain by its reflection/transmission
//! coefficients, and computes transmission through a slab of complex
//! refraction index.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain1d;
pub mod cli;
pub mod error;
pub mod foldy;
pub mod greens;
pub mod linalg;
pub mod negref;
pub mod packet;
pub mod quad;
pub mod slab;

pub use error::{Error, Result};
pub use greens::{GreenKind, GreenVariant, WaveNumber};

/// Complex field value; every amplitude in the crate is nondimensional.
pub type ComplexAmplitude = num_complex::Complex64;
