//! Lattice numerics for BMO-type function spaces on domains.
//!
//! The crate works on open sets sampled on uniform grids in one to three
//! dimensions. It provides exact distance transforms, sup-over-balls
//! seminorm engines, dyadic Whitney decompositions, extension operators,
//! normal-coordinate charts and normal-trace experiments.
//!
//! Points and indices are stored padded to three axes. A grid of dimension
//! `n` uses the trailing `n` axes; leading axes have extent one and
//! coordinate zero. The last axis is contiguous in memory.

pub mod error;
pub mod extension;
pub mod field;
pub mod grid_domain;
pub mod io;
pub mod normal_coords;
pub mod par;
pub mod seminorms;
pub mod stats;
pub mod suites;
pub mod trace;
pub mod whitney;

pub use error::{Error, Result};
pub use field::{ScalarField, VectorField};
pub use grid_domain::{build_domain, DistanceField, DomainSpec, Grid, GridDomain, Shape};

/// Padded point or vector.
pub type P3 = [f64; 3];
