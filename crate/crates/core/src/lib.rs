//! Sampling and exact-geometry laboratory for random symmetric polytopes
//! with vertices drawn from the cone measure of ℓ_p spheres.
//!
//! The crate has four layers:
//! - [`distributions`]: seeded generalized-Gaussian, cone-measure and
//!   uniform-ball samplers plus the radial projection coupling them;
//! - [`polytope`] / [`hull`]: exact desk-scale geometry of symmetric
//!   V-polytopes — hull, triangulation, volume, covariance, isotropic
//!   constant, and the facet-combinatorial integral bounds;
//! - [`moments`]: closed-form moment oracles and ψ₂ / tail machinery;
//! - [`harness`]: experiment grids, persistence, and the verification
//!   battery wired into the `lplab` CLI.

pub mod distributions;
pub mod error;
pub mod exponent;
pub mod harness;
pub mod hull;
pub mod moments;
pub mod polytope;
pub mod rng;
pub mod vertex_file;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
