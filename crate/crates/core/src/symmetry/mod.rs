//! Finite orthogonal groups, ample groups, equivariant maps and projection
//! constants of symmetric planar subspaces.

mod equivariant;
mod group;
mod projection;

pub use equivariant::{
    equivariant_basis, invariant_projection, symmetry_group, symmetry_group_with_tol, ActionTable,
    EquivariantMap, InvariantProjection,
};
pub use group::{
    ample_deviation, commutant_dim, helmert_basis, is_ample, make_g1, make_g2, rotation,
    FiniteOrthogonalGroup, GROUP_TOL,
};
pub use projection::{
    projection_constant, projection_constant_with, projection_norm, LambdaOptions, LambdaReport,
};
