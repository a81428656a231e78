//! Polygons approximating a planar unit ball whose dual-ball edge directions
//! accumulate on a Cantor set.

use amalgam_lab::incarnation::{cantor_ball, generators_from_polytope};

fn main() -> amalgam_lab::Result<()> {
    for depth in 1..=6 {
        let ball = cantor_ball(depth)?;
        let k = generators_from_polytope(&ball)?;
        let budget: f64 = k.generators().iter().map(|g| g.norm()).sum();
        println!(
            "depth {depth}: {:>3} vertices, {:>3} generators, Σ|y| = {budget:.9}",
            ball.len(),
            k.len()
        );
    }
    Ok(())
}
