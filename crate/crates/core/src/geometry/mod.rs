//! Manifold representations and the finite-difference differentiation core.

pub mod fd;
pub mod fields;
pub mod manifest;
pub mod point;
pub mod spec;

pub use fd::{FdConfig, Level};
pub use point::{BasisKind, PointFrameData};
pub use spec::{Backend, ChartFields, FrameFields, ManifoldSpec, SampleDomain};
