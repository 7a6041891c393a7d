//! Parallel-beam tomography kernels with implementation-adapted filtering.
//!
//! Several deliberately different discretisations of filtered backprojection
//! live in [`reconstructors`]. [`filterbank`] computes, for any of them, the
//! detector filter that minimises the forward-projected residual, which pulls
//! their reconstructions of the same data closer together. [`phantoms`]
//! simulates foam data, [`metrics`] measures the spread, and [`experiments`]
//! wires everything into reproducible runs driven by a JSON config.

pub mod error;
pub mod experiments;
pub mod filterbank;
pub mod metrics;
pub mod phantoms;
pub mod raster;
pub mod reconstructors;

pub use error::{Error, Result};
pub use filterbank::{
    apply_filter, compute_adapted_filter, compute_reference_filter, expbin_basis, standard_filter,
    BasisSet, FilterSpec,
};
pub use raster::{Geometry, ImageGrid, Sinogram};
pub use reconstructors::{fbp, forward_project, sirt, Implementation, KernelKind, Reconstructor};
