//! The dual unit ball of a planar subspace of l_1 is a zonotope, and its half
//! edge vectors give back the generators.

use amalgam_lab::incarnation::{dual_ball, generators_from_polytope, isometric};
use amalgam_lab::IncarnatingSet;
use nalgebra::DVector;

fn main() -> amalgam_lab::Result<()> {
    let k = IncarnatingSet::new(
        2,
        vec![
            DVector::from_row_slice(&[1.0, 0.0]),
            DVector::from_row_slice(&[0.3, 0.7]),
            DVector::from_row_slice(&[-0.4, 0.5]),
        ],
        1.0,
    )?;
    let ball = dual_ball(&k)?;
    println!("dual ball has {} vertices:", ball.len());
    for v in ball.vertices() {
        println!("  ({:+.6}, {:+.6})", v.x, v.y);
    }
    let back = generators_from_polytope(&ball)?;
    println!("recovered generators:");
    for g in back.generators() {
        println!("  ({:+.6}, {:+.6})", g[0], g[1]);
    }
    println!("same subspace of l_1: {}", isometric(&k, &back));
    Ok(())
}
