//! Finite-dimensional geometry of subspaces of `l_1` and `l_p`.
//!
//! A finite-dimensional subspace `Y` of `l_p^N` is encoded by an
//! *incarnating set*: a finite centrally symmetric set `K ⊂ R^m` such that
//! `Y` is the space of linear functions on `K` with the summed-evaluation
//! norm. The crate builds on that encoding:
//!
//! - [`geometry`]: l_p norms, planar convex hulls, linear congruence of sets.
//! - [`incarnation`]: generator sets, induced norms, the zonotope dual ball and
//!   its inverse, Besselian incarnation of subspaces, Cantor-type balls.
//! - [`amalgam`]: amalgams of V-formations over `l_1`.
//! - [`symmetry`]: finite orthogonal groups, ample groups, commutants,
//!   equivariant maps, invariant projections and projection constants.
//! - [`lp_experiments`]: regular-polygon sets in `l_{2n}` and the witness that
//!   two isometric Euclidean planes can have different projection constants.
//! - [`io`] and [`cli`]: JSON/CSV file formats and the command-line front end.
//!
//! Runnable walkthroughs for each capability live in the crate's `examples/`.

// `!(x >= y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amalgam;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod incarnation;
pub mod io;
pub mod lp_experiments;
pub mod optimize;
pub mod symmetry;

pub use error::{Error, Result};
pub use geometry::{Polytope2D, TOL};
pub use incarnation::{IncarnatingSet, PairRealization};

/// Library version string, embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
