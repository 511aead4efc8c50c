//! Separation, circle packing and covering, Beurling densities, and the
//! interpolation/sampling certificates they yield for Fock spaces.
//!
//! - [`geometry`]: points, windows, the grid index, separation and covering radius.
//! - [`lattice`]: hexagonal and square lattices, seeded perturbations.
//! - [`density`]: empirical densities and the separation/covering bounds.
//! - [`certify`]: thresholds and certificates.
//! - [`fock`]: kernels, Gram matrices and finite interpolation for `p = 2`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod density;
pub mod error;
pub mod fock;
pub mod geometry;
pub mod lattice;

pub use error::{Error, Result};
pub use geometry::{Disk, GridSpec, Point, PointSet, Region};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
