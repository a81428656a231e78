//! Ample groups: the averaged rank-one identity holds exactly when the
//! commutant consists of scalars.

use amalgam_lab::symmetry::{
    ample_deviation, commutant_dim, make_g1, make_g2, FiniteOrthogonalGroup,
};

fn main() -> amalgam_lab::Result<()> {
    let mut groups: Vec<(String, FiniteOrthogonalGroup)> = Vec::new();
    for n in 2..=4 {
        groups.push((format!("G1({n})"), make_g1(n)?));
        groups.push((format!("G2({n})"), make_g2(n)?));
    }
    groups.push(("dihedral(6)".into(), FiniteOrthogonalGroup::dihedral(6)?));
    groups.push(("cyclic(4)".into(), FiniteOrthogonalGroup::cyclic(4)?));
    groups.push(("{±I} in R^3".into(), FiniteOrthogonalGroup::central(3)));
    println!(
        "{:<14} {:>6} {:>12} {:>10}",
        "group", "order", "deviation", "commutant"
    );
    for (name, g) in &groups {
        println!(
            "{:<14} {:>6} {:>12.2e} {:>10}",
            name,
            g.order(),
            ample_deviation(g),
            commutant_dim(g)
        );
    }
    Ok(())
}
