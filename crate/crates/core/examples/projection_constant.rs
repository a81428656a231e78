//! Projection constant of the hexagon plane in l_p for a few exponents, and
//! the invariant projection behind it.

use amalgam_lab::lp_experiments::polygon_k;
use amalgam_lab::symmetry::{
    equivariant_basis, invariant_projection, projection_constant, symmetry_group, EquivariantMap,
};

fn main() -> amalgam_lab::Result<()> {
    let hexagon = polygon_k(2)?.points;
    let g = symmetry_group(&hexagon)?;
    let basis = equivariant_basis(&hexagon, &g)?;
    println!(
        "symmetry group order {}, equivariant maps: dimension {}",
        g.order(),
        basis.len()
    );

    let p = invariant_projection(&hexagon, &EquivariantMap::identity(&hexagon))?;
    println!(
        "P = {:.6} · Σ f(u) u   (matrix on half-set values: {:?})",
        p.scale,
        p.matrix().shape()
    );

    for exponent in [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0] {
        let r = projection_constant(&hexagon, exponent, &g)?;
        println!(
            "p = {exponent:>3}: λ = {:.12}  (worst direction {:?})",
            r.lambda, r.worst_direction
        );
    }
    Ok(())
}
