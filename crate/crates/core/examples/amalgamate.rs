//! Builds random V-formations over l_1, amalgamates them and checks the
//! commuting square and both isometric legs.

use amalgam_lab::amalgam::{amalgamate, random_vformation, verify_amalgam, RandomVFormationSpec};

fn main() -> amalgam_lab::Result<()> {
    for (seed, root_dim) in [(1, 1), (2, 2), (3, 2)] {
        let v = random_vformation(
            seed,
            RandomVFormationSpec {
                root_dim,
                max_generators: 6,
            },
        )?;
        let a = amalgamate(&v)?;
        let r = verify_amalgam(&v, &a, 1000, seed)?;
        println!(
            "seed {seed}: root {root_dim}, Y dim {}, Z dim {} -> W dim {} with {} generators",
            v.k_y.dim(),
            v.k_z.dim(),
            a.k_w.dim(),
            a.k_w.len()
        );
        println!(
            "  commuting {:.1e}, leg errors {:.1e} / {:.1e}, intersection dim {}, passed {}",
            r.commuting_deviation, r.y_max_rel_err, r.z_max_rel_err, r.intersection_dim, r.passed
        );
    }
    Ok(())
}
