//! Incarnating a subspace of l_p^N: each ambient coordinate becomes one
//! evaluation point, and the induced norm reproduces the ambient norm.

use amalgam_lab::geometry::lp_norm;
use amalgam_lab::incarnation::{besselian_incarnate, triple_norm_budget};
use nalgebra::{DMatrix, DVector};

fn main() -> amalgam_lab::Result<()> {
    // span{e1, e2} in l_1^3.
    let basis = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    let r = besselian_incarnate(1.0, 3, &basis)?;
    println!(
        "l_1^3 ⊃ span(e1, e2): {} points, {} zero coordinate(s) dropped",
        r.subspace().len(),
        r.dropped_zeros()
    );
    println!("  Σ|||y||| = {}", triple_norm_budget(&r));

    // A generic plane in l_4^5.
    let basis =
        DMatrix::from_row_slice(5, 2, &[1.0, 0.2, -0.3, 1.0, 0.5, 0.5, 0.0, -1.0, 2.0, 0.1]);
    let r = besselian_incarnate(4.0, 5, &basis)?;
    let q = r.evaluation_basis().expect("orthonormal basis").clone();
    for c in [[1.0, 0.0], [0.3, -2.0], [-1.5, 0.7]] {
        let ambient = lp_norm((&q * DVector::from_row_slice(&c)).as_slice(), 4.0)?;
        let induced = r.induced_norm(&c)?;
        println!("  c = {c:?}: ambient {ambient:.12}, induced {induced:.12}");
    }
    let half = r.half_set_form()?;
    println!(
        "  half-set form norm of (0.3, -2): {:.12}",
        half.norm(&[0.3, -2.0])?
    );
    Ok(())
}
