//! Geodesics, effective potentials, circular photon orbits, and tidal
//! dynamics for three static spherically symmetric black holes:
//! Schwarzschild, Reissner-Nordstrom, and the stringy (GHS) dilaton
//! black hole.
//!
//! The crate is organized around cross-verification: every closed-form
//! quantity (Christoffel symbols, Riemann components, circular-orbit radii,
//! tidal couplings, deviation-equation solutions) is paired with an
//! independent numerical route (finite differences, root scans, adaptive
//! integration), and the `verify` machinery reports where the two disagree.
//!
//! Start with the runnable programs in `examples/`, or use the `bhgeo`
//! binary for file-based workflows.

// Index loops mirror the tensor contractions they implement, and
// `!(x > 0.0)` guards reject NaN as well as the out-of-range sign.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod deviation;
pub mod error;
pub mod geodesics;
pub mod ode;
pub mod output;
pub mod potential;
pub mod roots;
pub mod spacetime;

pub use error::{Error, Result};
