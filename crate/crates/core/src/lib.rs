//! Finite-volume solver for the resolvent equation
//! `u - f = div(u^m Du/|Du|)` on radial domains, with closed-form and
//! ODE-defined reference solutions and a property-check harness.
//!
//! The continuum problem is approached through the regularized family
//! `u - f = div((eps + |u|)^m Du/|Du|_eps + eps Du)`, driven `eps -> 0`
//! by warm-started Newton continuation.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod model;
pub mod oracles;
pub mod output;
pub mod solver;
pub mod tridiag;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    build_grid, mobility_eval, sample_source, BoundarySpec, DomainMode, DomainSpec, Field, Grid, MobilityLaw,
    ProblemSpec, SourceField,
};
pub use solver::{continuation_solve, extract_traces, SolutionBundle, SolverConfig};
