//! Numerical verification of curvature identities on (κ, μ, ν)-contact
//! metric manifolds and generalized (κ, μ, ν)-space forms.
//!
//! A manifold is declared by a [`ManifoldSpec`] (usually loaded from a TOML
//! manifest, see [`geometry::manifest`]). [`curvature::PointGeometry`]
//! evaluates the structure tensors, the Levi-Civita connection and the
//! curvature at a point; the other modules check identities against it.

pub mod conformal;
pub mod curvature;
pub mod deformation;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod kmn;
pub mod pointmodel;
pub mod registry;
pub mod report;
pub mod structure;
pub mod tensor;

pub use error::{Error, Result};
pub use geometry::{ManifoldSpec, PointFrameData};
