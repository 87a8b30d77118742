//! Logarithmic Schrödinger equation on a star graph with a delta vertex.
//!
//! The crate discretizes each edge of the star on a uniform grid and provides
//! the closed-form stationary states, the scalar functionals of the problem,
//! a conservative time integrator, ground-state computation on the Nehari
//! manifold, symmetric rearrangement and an orbital-stability harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod evolution;
pub mod graph;
pub mod io;
pub mod orlicz;
pub mod rearrange;
pub mod sampling;
pub mod special;
pub mod stability;
pub mod stationary;
pub mod variational;

pub use error::{Error, Result};
pub use graph::{build_grid, DiscreteOperator, EdgeProfile, GraphState, GridSpec};
