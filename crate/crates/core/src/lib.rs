//! Coulomb gas on the sphere with two macroscopic external charges.
//!
//! The crate covers both sides of the random-matrix duality for this system:
//!
//! * [`geometry`]: stereographic projection, spherical caps and the phase
//!   diagram in `(Q0, Q1, w)`.
//! * [`conformal`]: the rational conformal map whose image of the unit circle
//!   is the pre-critical droplet boundary, the symmetric ellipse, and the planar
//!   scaling limit.
//! * [`energy`]: closed-form electrostatic energies `K_pre`, `K_post` and the
//!   droplet integrals they are built from, together with a quadrature oracle.
//! * [`jue`]: Wachter law, hard-wall constrained Jacobi density, the
//!   large-deviation rate function and the soft-edge (Painlevé II) gap
//!   probability.
//! * [`oracle`]: Metropolis sampling of the finite-`N` gas and small-`N`
//!   direct checks of the duality identity.
//!
//! All constants use the `beta = 2` normalisation `(4 / (beta N^2)) log K`.

pub mod airy;
pub mod conformal;
pub mod energy;
mod error;
pub mod geometry;
pub mod jue;
pub mod oracle;
pub mod poly;
pub mod quad;

pub use error::{Error, Result};
pub use geometry::{ChargeConfig, Phase, PhaseTag};

pub use num_complex::Complex64;
