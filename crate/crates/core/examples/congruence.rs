//! Two generator sets define the same subspace of l_1 exactly when, after
//! merging parallel generators, a linear map carries one onto the other.

use amalgam_lab::geometry::congruence;
use amalgam_lab::incarnation::isometric;
use amalgam_lab::symmetry::rotation;
use amalgam_lab::IncarnatingSet;
use nalgebra::DVector;

fn main() -> amalgam_lab::Result<()> {
    let k = IncarnatingSet::new(
        2,
        vec![
            DVector::from_row_slice(&[1.0, 0.0]),
            DVector::from_row_slice(&[0.2, 1.0]),
            DVector::from_row_slice(&[-0.6, 0.4]),
        ],
        1.0,
    )?;
    let moved = k.transformed(&(rotation(0.9) * 3.0))?;
    match congruence(&k, &moved) {
        Some(t) => println!("congruent via\n{t:.6}"),
        None => println!("not congruent"),
    }
    // Splitting a generator into two parallel halves changes nothing in l_1.
    let mut split: Vec<DVector<f64>> = k.generators().to_vec();
    let first = split.remove(0);
    split.push(&first * 0.5);
    split.push(&first * 0.5);
    let split = IncarnatingSet::new(2, split, 1.0)?;
    println!("split set isometric to original: {}", isometric(&k, &split));
    let other = IncarnatingSet::new(
        2,
        vec![
            DVector::from_row_slice(&[1.0, 0.0]),
            DVector::from_row_slice(&[0.0, 1.0]),
        ],
        1.0,
    )?;
    println!("square isometric to original: {}", isometric(&k, &other));
    Ok(())
}
