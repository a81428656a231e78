//! Amalgams of V-formations over `l_1`.
//!
//! A V-formation is a root space `X` (dimension 1 or 2) embedded
//! isometrically into two incarnated subspaces `Y` and `Z` of `l_1`. The
//! amalgam `W` is built on coordinates `root ⊕ Y′ ⊕ Z′`, where `Y′` and `Z′`
//! are the orthogonal complements of the root images. Generators of `Y` and
//! `Z` are grouped by the edge of the root's dual ball that their projection
//! is parallel to; within an edge class with projection lengths `α_i` (from
//! `Y`) and `β_j` (from `Z`), summing to `S`, each pair contributes
//!
//! ```text
//! c_ij = ( α_i β_j / S · r̂ ,  β_j / S · y_i′ ,  α_i / S · z_j′ )
//! ```
//!
//! Pulling `c_ij` back along `Y ↪ W` gives `(β_j / S) y_i`, and these sum to
//! `y_i` over `j`, so both legs stay isometric.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{self, null_space, orient, parallel_defect, LinearMap, Vector, TOL};
use crate::incarnation::{self, dual_ball, IncarnatingSet};

/// A root of dimension 1 or 2 isometrically embedded into two `l_1`
/// incarnated spaces.
#[derive(Debug, Clone)]
pub struct VFormation {
    pub root_dim: usize,
    pub k_y: IncarnatingSet,
    pub k_z: IncarnatingSet,
    pub i_y: LinearMap,
    pub i_z: LinearMap,
}

impl VFormation {
    /// Checks shapes, ranks and that both embeddings induce the same norm on
    /// the root (sampled on 360 directions for a planar root).
    pub fn new(
        root_dim: usize,
        k_y: IncarnatingSet,
        k_z: IncarnatingSet,
        i_y: LinearMap,
        i_z: LinearMap,
    ) -> Result<Self> {
        if !(1..=2).contains(&root_dim) {
            return Err(Error::UnsupportedDimension(root_dim));
        }
        for (k, i) in [(&k_y, &i_y), (&k_z, &i_z)] {
            if k.ambient_p() != 1.0 {
                return Err(Error::InvalidArgument(
                    "V-formations are built over l_1 (p = 1)".into(),
                ));
            }
            if i.nrows() != k.dim() {
                return Err(Error::DimensionMismatch {
                    expected: k.dim(),
                    got: i.nrows(),
                });
            }
            if i.ncols() != root_dim {
                return Err(Error::DimensionMismatch {
                    expected: root_dim,
                    got: i.ncols(),
                });
            }
        }
        let py = pullback(&k_y, &i_y)?;
        let pz = pullback(&k_z, &i_z)?;
        let dirs: Vec<Vec<f64>> = if root_dim == 1 {
            vec![vec![1.0]]
        } else {
            (0..360)
                .map(|k| {
                    let a = k as f64 * std::f64::consts::PI / 360.0;
                    vec![a.cos(), a.sin()]
                })
                .collect()
        };
        for x in &dirs {
            let ny = py.norm(x)?;
            let nz = pz.norm(x)?;
            if (ny - nz).abs() > TOL * ny.max(nz) {
                return Err(Error::NonMatchingRoot(format!(
                    "induced root norms differ at direction {x:?}: {ny} vs {nz}"
                )));
            }
        }
        Ok(Self {
            root_dim,
            k_y,
            k_z,
            i_y,
            i_z,
        })
    }

    /// The same V-formation with the two legs exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            root_dim: self.root_dim,
            k_y: self.k_z.clone(),
            k_z: self.k_y.clone(),
            i_y: self.i_z.clone(),
            i_z: self.i_y.clone(),
        }
    }
}

fn zero_threshold(k: &IncarnatingSet, i: &LinearMap) -> f64 {
    1e-12 * k.scale() * i.amax() * k.dim() as f64
}

/// `{ iᵀ y : y ∈ K, iᵀ y ≠ 0 }`: the incarnating set of the root under the
/// norm it inherits through `i`.
pub fn pullback(k: &IncarnatingSet, i: &LinearMap) -> Result<IncarnatingSet> {
    if i.nrows() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: i.nrows(),
        });
    }
    let r = geometry::rank(i);
    if r < i.ncols() {
        return Err(Error::RankDeficient {
            rank: r,
            cols: i.ncols(),
        });
    }
    let eps = zero_threshold(k, i);
    let it = i.transpose();
    let gens: Vec<Vector> = k
        .generators()
        .iter()
        .map(|y| &it * y)
        .filter(|p| p.amax() > eps)
        .collect();
    IncarnatingSet::new(i.ncols(), gens, k.ambient_p())
}

/// One generator of an edge class, oriented so that its projection is a
/// positive multiple of the class direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMember {
    /// Index into the generator list of the source set.
    pub index: usize,
    /// `±1`; the member is `sign · y`.
    pub sign: f64,
    /// Projection length `⟨iᵀ(sign·y), r̂⟩ > 0`.
    pub alpha: f64,
}

#[derive(Debug, Clone)]
pub struct EdgeClass {
    /// Unit direction `r̂` in root coordinates, oriented.
    pub direction: Vector,
    pub members: Vec<ClassMember>,
}

impl EdgeClass {
    pub fn total(&self) -> f64 {
        self.members.iter().map(|m| m.alpha).sum()
    }
}

#[derive(Debug, Clone)]
pub struct EdgeClasses {
    pub classes: Vec<EdgeClass>,
    /// Generators with zero projection onto the root.
    pub null: Vec<usize>,
}

/// Partitions the generators of `K` by the edge of the root's dual ball that
/// their projection `iᵀ y` is parallel to.
pub fn edge_classes(k: &IncarnatingSet, i: &LinearMap) -> Result<EdgeClasses> {
    let root_dim = i.ncols();
    let directions: Vec<Vector> = match root_dim {
        1 => vec![DVector::from_element(1, 1.0)],
        2 => {
            let ball = dual_ball(&pullback(k, i)?)?;
            let v = ball.vertices();
            (0..v.len() / 2)
                .map(|e| {
                    let d = v[e + 1] - v[e];
                    orient(&DVector::from_row_slice(&[d.x, d.y]).normalize())
                })
                .collect()
        }
        d => return Err(Error::UnsupportedDimension(d)),
    };
    let eps = zero_threshold(k, i);
    let it = i.transpose();
    let mut classes: Vec<EdgeClass> = directions
        .into_iter()
        .map(|direction| EdgeClass {
            direction,
            members: Vec::new(),
        })
        .collect();
    let mut null = Vec::new();
    for (index, y) in k.generators().iter().enumerate() {
        let p = &it * y;
        if p.amax() <= eps {
            null.push(index);
            continue;
        }
        let Some(class) = classes
            .iter_mut()
            .find(|c| parallel_defect(c.direction.as_slice(), p.as_slice()) < 1e-7)
        else {
            return Err(Error::Inconsistent(format!(
                "projection {:?} of generator {index} is parallel to no edge of the root dual ball",
                p.as_slice()
            )));
        };
        let along = class.direction.dot(&p);
        let sign = if along >= 0.0 { 1.0 } else { -1.0 };
        class.members.push(ClassMember {
            index,
            sign,
            alpha: sign * along,
        });
    }
    Ok(EdgeClasses { classes, null })
}

/// Construction summary carried with an amalgam.
#[derive(Debug, Clone, Default, Serialize)]
pub struct AmalgamSummary {
    pub edge_classes: usize,
    pub y_null_generators: usize,
    pub z_null_generators: usize,
    /// Largest relative mismatch `|S_Y − S_Z| / S` across edge classes.
    pub max_sum_mismatch: f64,
}

#[derive(Debug, Clone)]
pub struct AmalgamResult {
    pub k_w: IncarnatingSet,
    /// Embedding of the `Y` coordinate space into `W`.
    pub j_y: LinearMap,
    /// Embedding of the `Z` coordinate space into `W`.
    pub j_z: LinearMap,
    pub summary: AmalgamSummary,
}

/// Orthonormal basis of the orthogonal complement of the column span of `i`,
/// and the left inverse of `i` that annihilates that complement.
fn split_coordinates(i: &LinearMap) -> Result<(LinearMap, LinearMap)> {
    let complement = null_space(&i.transpose());
    let gram = i.transpose() * i;
    let gram_inv = gram.try_inverse().ok_or(Error::RankDeficient {
        rank: geometry::rank(i),
        cols: i.ncols(),
    })?;
    Ok((complement, gram_inv * i.transpose()))
}

/// Builds an amalgam of a V-formation over `l_1`.
pub fn amalgamate(v: &VFormation) -> Result<AmalgamResult> {
    let r = v.root_dim;
    let cy = edge_classes(&v.k_y, &v.i_y)?;
    let cz = edge_classes(&v.k_z, &v.i_z)?;
    if cy.classes.len() != cz.classes.len() {
        return Err(Error::NonMatchingRoot(format!(
            "{} edge classes on the Y side, {} on the Z side",
            cy.classes.len(),
            cz.classes.len()
        )));
    }
    let (by, left_y) = split_coordinates(&v.i_y)?;
    let (bz, left_z) = split_coordinates(&v.i_z)?;
    let (ay, az) = (by.ncols(), bz.ncols());
    let wdim = r + ay + az;

    let mut gens: Vec<Vector> = Vec::new();
    let mut max_mismatch = 0.0_f64;
    for class_y in &cy.classes {
        let Some(class_z) = cz
            .classes
            .iter()
            .find(|c| parallel_defect(c.direction.as_slice(), class_y.direction.as_slice()) < 1e-7)
        else {
            return Err(Error::NonMatchingRoot(format!(
                "edge direction {:?} has no counterpart on the Z side",
                class_y.direction.as_slice()
            )));
        };
        // Express Z projections along the Y direction.
        let flip = class_z.direction.dot(&class_y.direction).signum();
        let (sy, sz) = (class_y.total(), class_z.total());
        let s = 0.5 * (sy + sz);
        let mismatch = (sy - sz).abs() / s;
        if mismatch > TOL {
            return Err(Error::NonMatchingRoot(format!(
                "edge class sums differ: {sy} on the Y side, {sz} on the Z side"
            )));
        }
        max_mismatch = max_mismatch.max(mismatch);
        let rhat = &class_y.direction;
        for my in &class_y.members {
            let y = &v.k_y.generators()[my.index] * my.sign;
            let y_rest = by.transpose() * &y;
            for mz in &class_z.members {
                let z = &v.k_z.generators()[mz.index] * (mz.sign * flip);
                let z_rest = bz.transpose() * &z;
                let mut c = DVector::zeros(wdim);
                c.rows_mut(0, r)
                    .copy_from(&(rhat * (my.alpha * mz.alpha / s)));
                c.rows_mut(r, ay).copy_from(&(&y_rest * (mz.alpha / s)));
                c.rows_mut(r + ay, az)
                    .copy_from(&(&z_rest * (my.alpha / s)));
                gens.push(c);
            }
        }
    }
    for &idx in &cy.null {
        let mut c = DVector::zeros(wdim);
        c.rows_mut(r, ay)
            .copy_from(&(by.transpose() * &v.k_y.generators()[idx]));
        gens.push(c);
    }
    for &idx in &cz.null {
        let mut c = DVector::zeros(wdim);
        c.rows_mut(r + ay, az)
            .copy_from(&(bz.transpose() * &v.k_z.generators()[idx]));
        gens.push(c);
    }
    let k_w = IncarnatingSet::new(wdim, gens, 1.0)?;

    let mut j_y = DMatrix::zeros(wdim, v.k_y.dim());
    j_y.view_mut((0, 0), (r, v.k_y.dim())).copy_from(&left_y);
    j_y.view_mut((r, 0), (ay, v.k_y.dim()))
        .copy_from(&by.transpose());
    let mut j_z = DMatrix::zeros(wdim, v.k_z.dim());
    j_z.view_mut((0, 0), (r, v.k_z.dim())).copy_from(&left_z);
    j_z.view_mut((r + ay, 0), (az, v.k_z.dim()))
        .copy_from(&bz.transpose());

    Ok(AmalgamResult {
        k_w,
        j_y,
        j_z,
        summary: AmalgamSummary {
            edge_classes: cy.classes.len(),
            y_null_generators: cy.null.len(),
            z_null_generators: cz.null.len(),
            max_sum_mismatch: max_mismatch,
        },
    })
}

/// Outcome of [`verify_amalgam`].
#[derive(Debug, Clone, Serialize)]
pub struct AmalgamReport {
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    /// `max |j_Y i_Y − j_Z i_Z|`.
    pub commuting_deviation: f64,
    /// Largest relative error `|‖j_Y u‖_W − ‖u‖_Y| / ‖u‖_Y` over the samples.
    pub y_max_rel_err: f64,
    pub z_max_rel_err: f64,
    /// `dim(j_Y(Y) ∩ j_Z(Z))`, which must equal the root dimension.
    pub intersection_dim: usize,
    pub root_dim: usize,
    /// Merged pullbacks of `K_W` reproduce the merged legs.
    pub pullback_y_ok: bool,
    pub pullback_z_ok: bool,
    pub passed: bool,
}

/// Checks an amalgam: the commuting square, isometry of both legs on seeded
/// random samples, the intersection dimension and pullback reproduction.
pub fn verify_amalgam(
    v: &VFormation,
    a: &AmalgamResult,
    samples: usize,
    seed: u64,
) -> Result<AmalgamReport> {
    verify_amalgam_with_tol(v, a, samples, seed, TOL)
}

pub fn verify_amalgam_with_tol(
    v: &VFormation,
    a: &AmalgamResult,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<AmalgamReport> {
    let wdim = a.k_w.dim();
    if a.j_y.nrows() != wdim || a.j_z.nrows() != wdim {
        return Err(Error::DimensionMismatch {
            expected: wdim,
            got: a.j_y.nrows(),
        });
    }
    if a.j_y.ncols() != v.k_y.dim() || a.j_z.ncols() != v.k_z.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.k_y.dim(),
            got: a.j_y.ncols(),
        });
    }
    let commuting_deviation = (&a.j_y * &v.i_y - &a.j_z * &v.i_z).amax();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut leg_error = |k: &IncarnatingSet, j: &LinearMap| -> Result<f64> {
        let mut worst = 0.0_f64;
        for _ in 0..samples {
            let u = DVector::from_fn(k.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
            let direct = k.norm(u.as_slice())?;
            let through = a.k_w.norm((j * &u).as_slice())?;
            worst = worst.max((through - direct).abs() / direct.max(f64::MIN_POSITIVE));
        }
        Ok(worst)
    };
    let y_max_rel_err = leg_error(&v.k_y, &a.j_y)?;
    let z_max_rel_err = leg_error(&v.k_z, &a.j_z)?;

    let mut both = DMatrix::zeros(wdim, a.j_y.ncols() + a.j_z.ncols());
    both.view_mut((0, 0), (wdim, a.j_y.ncols()))
        .copy_from(&a.j_y);
    both.view_mut((0, a.j_y.ncols()), (wdim, a.j_z.ncols()))
        .copy_from(&a.j_z);
    let intersection_dim = (a.j_y.ncols() + a.j_z.ncols()).saturating_sub(geometry::rank(&both));

    let reproduces = |k: &IncarnatingSet, j: &LinearMap| -> bool {
        match pullback(&a.k_w, j) {
            Ok(pb) => pb.merged().approx_eq(&k.merged(), tol),
            Err(_) => false,
        }
    };
    let pullback_y_ok = reproduces(&v.k_y, &a.j_y);
    let pullback_z_ok = reproduces(&v.k_z, &a.j_z);

    let scale = v.i_y.amax().max(v.i_z.amax()).max(1.0);
    let passed = commuting_deviation <= 1e-12 * scale
        && y_max_rel_err < tol
        && z_max_rel_err < tol
        && intersection_dim == v.root_dim
        && pullback_y_ok
        && pullback_z_ok;
    Ok(AmalgamReport {
        seed,
        samples,
        tolerance: tol,
        commuting_deviation,
        y_max_rel_err,
        z_max_rel_err,
        intersection_dim,
        root_dim: v.root_dim,
        pullback_y_ok,
        pullback_z_ok,
        passed,
    })
}

/// Shape of a randomly generated V-formation.
#[derive(Debug, Clone, Copy)]
pub struct RandomVFormationSpec {
    pub root_dim: usize,
    /// Upper bound on generators per leg.
    pub max_generators: usize,
}

/// Draws a random V-formation with the given root dimension. The root norm
/// is fixed first; each leg splits every root generator into parallel pieces
/// with independent complement parts, adds a few generators invisible to the
/// root, and is then expressed in random coordinates.
pub fn random_vformation(seed: u64, spec: RandomVFormationSpec) -> Result<VFormation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = spec.root_dim;
    let max_gens = spec.max_generators.max(r + 2);
    let class_count = if r == 1 { 1 } else { rng.random_range(2..=3) };
    let root: Vec<Vector> = if r == 1 {
        vec![DVector::from_element(1, rng.random_range(0.5..2.0))]
    } else {
        let offset = rng.random_range(0.0..std::f64::consts::PI);
        (0..class_count)
            .map(|k| {
                let jitter: f64 = rng.random_range(-0.3..0.3);
                let a =
                    offset + (k as f64 + 0.5 + jitter) * std::f64::consts::PI / class_count as f64;
                let len = rng.random_range(0.5..1.5);
                DVector::from_row_slice(&[a.cos() * len, a.sin() * len])
            })
            .collect()
    };
    let leg = |rng: &mut ChaCha8Rng| -> Result<(IncarnatingSet, LinearMap)> {
        let extra = rng.random_range(0..=2usize);
        let mut gens: Vec<Vector> = Vec::new();
        let mut remaining = max_gens - extra;
        for (idx, g) in root.iter().enumerate() {
            let classes_left = root.len() - idx - 1;
            let most = (remaining - classes_left).clamp(1, 3);
            let pieces = rng.random_range(1..=most);
            remaining -= pieces;
            let weights: Vec<f64> = (0..pieces).map(|_| rng.random_range(0.2..1.0)).collect();
            let total: f64 = weights.iter().sum();
            for w in weights {
                let mut y = DVector::zeros(r + extra);
                y.rows_mut(0, r).copy_from(&(g * (w / total)));
                for e in 0..extra {
                    y[r + e] = rng.sample(StandardNormal);
                }
                if rng.random_bool(0.5) {
                    y = -y;
                }
                gens.push(y);
            }
        }
        for _ in 0..extra {
            let mut y = DVector::zeros(r + extra);
            for e in 0..extra {
                y[r + e] = rng.sample(StandardNormal);
            }
            gens.push(y);
        }
        let n = r + extra;
        let t = DMatrix::from_fn(n, n, |i, j| {
            let noise: f64 = rng.sample(StandardNormal);
            0.4 * noise + if i == j { 2.0 } else { 0.0 }
        });
        let t_inv_t = t
            .clone()
            .try_inverse()
            .ok_or(Error::RankDeficient { rank: 0, cols: n })?
            .transpose();
        let mut i0 = DMatrix::zeros(n, r);
        i0.view_mut((0, 0), (r, r)).fill_with_identity();
        let k = IncarnatingSet::new(n, gens.iter().map(|y| &t_inv_t * y).collect(), 1.0)?;
        Ok((k, &t * i0))
    };
    let (k_y, i_y) = leg(&mut rng)?;
    let (k_z, i_z) = leg(&mut rng)?;
    VFormation::new(r, k_y, k_z, i_y, i_z)
}

/// Whether two amalgams are related by a linear map of `W` carrying one
/// generator set onto the other after merging parallel classes.
pub fn congruent_amalgams(a: &AmalgamResult, b: &AmalgamResult) -> bool {
    incarnation::isometric(&a.k_w, &b.k_w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        DVector::from_row_slice(x)
    }

    fn square() -> IncarnatingSet {
        IncarnatingSet::new(2, vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])], 1.0).unwrap()
    }

    fn diagonal_vformation() -> VFormation {
        let i = DMatrix::from_row_slice(2, 1, &[0.5, 0.5]);
        VFormation::new(1, square(), square(), i.clone(), i).unwrap()
    }

    #[test]
    fn pullback_examples() {
        let inc = DMatrix::from_row_slice(2, 1, &[1.0, 0.0]);
        let pb = pullback(&square(), &inc).unwrap();
        assert_eq!(pb.len(), 1);
        assert_eq!(pb.generators()[0][0], 1.0);

        let diag = DMatrix::from_row_slice(2, 1, &[0.5, 0.5]);
        let pb = pullback(&square(), &diag).unwrap();
        assert_eq!(pb.len(), 2);
        assert!((pb.norm(&[3.0]).unwrap() - 3.0).abs() < 1e-15);

        let s3 = 3f64.sqrt() / 2.0;
        let hex = IncarnatingSet::new(2, vec![v(&[1.0, 0.0]), v(&[0.5, s3]), v(&[-0.5, s3])], 1.0)
            .unwrap();
        let pb = pullback(&hex, &DMatrix::identity(2, 2)).unwrap();
        assert_eq!(pb, hex);
    }

    #[test]
    fn pullback_rejects_rank_deficient_map() {
        let i = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(
            pullback(&square(), &i),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn edge_class_examples() {
        let diag = DMatrix::from_row_slice(2, 1, &[0.5, 0.5]);
        let ec = edge_classes(&square(), &diag).unwrap();
        assert_eq!(ec.classes.len(), 1);
        let alphas: Vec<f64> = ec.classes[0].members.iter().map(|m| m.alpha).collect();
        assert_eq!(alphas, vec![0.5, 0.5]);
        assert!(ec.null.is_empty());

        let s3 = 3f64.sqrt() / 2.0;
        let hex = IncarnatingSet::new(2, vec![v(&[1.0, 0.0]), v(&[0.5, s3]), v(&[-0.5, s3])], 1.0)
            .unwrap();
        let ec = edge_classes(&hex, &DMatrix::identity(2, 2)).unwrap();
        assert_eq!(ec.classes.len(), 3);
        assert!(ec.classes.iter().all(|c| c.members.len() == 1));
    }

    #[test]
    fn diagonal_amalgam_has_four_generators_in_r3() {
        let vf = diagonal_vformation();
        let a = amalgamate(&vf).unwrap();
        assert_eq!(a.k_w.dim(), 3);
        assert_eq!(a.k_w.len(), 4);
        let rep = verify_amalgam(&vf, &a, 1000, 7).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.y_max_rel_err < 1e-9 && rep.z_max_rel_err < 1e-9);
    }

    #[test]
    fn degenerate_root_equals_y() {
        let s3 = 3f64.sqrt() / 2.0;
        let hex = IncarnatingSet::new(2, vec![v(&[1.0, 0.0]), v(&[0.5, s3]), v(&[-0.5, s3])], 1.0)
            .unwrap();
        // Z contains the hexagon plane isometrically with one extra direction.
        let kz = IncarnatingSet::new(
            3,
            vec![
                v(&[1.0, 0.0, 0.3]),
                v(&[0.5, s3, -0.2]),
                v(&[-0.5, s3, 0.0]),
                v(&[0.0, 0.0, 1.0]),
            ],
            1.0,
        )
        .unwrap();
        let iz = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let vf = VFormation::new(2, hex.clone(), kz.clone(), DMatrix::identity(2, 2), iz).unwrap();
        let a = amalgamate(&vf).unwrap();
        assert!(incarnation::isometric(&a.k_w, &kz));
        let rep = verify_amalgam(&vf, &a, 500, 1).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.commuting_deviation < 1e-15);
        assert!(rep.y_max_rel_err < 1e-14);
    }

    #[test]
    fn perturbed_amalgam_fails_isometry() {
        let vf = diagonal_vformation();
        let mut a = amalgamate(&vf).unwrap();
        let mut gens = a.k_w.generators().to_vec();
        gens[0][0] += 1e-3;
        a.k_w = IncarnatingSet::new(3, gens, 1.0).unwrap();
        let rep = verify_amalgam(&vf, &a, 200, 3).unwrap();
        assert!(!rep.passed);
        assert!(rep.y_max_rel_err > 1e-9 || rep.z_max_rel_err > 1e-9);
    }

    #[test]
    fn swapping_legs_gives_congruent_amalgam() {
        let vf = random_vformation(
            11,
            RandomVFormationSpec {
                root_dim: 1,
                max_generators: 5,
            },
        )
        .unwrap();
        let a = amalgamate(&vf).unwrap();
        let b = amalgamate(&vf.swapped()).unwrap();
        assert!(congruent_amalgams(&a, &b));
        let vf = diagonal_vformation();
        assert!(congruent_amalgams(
            &amalgamate(&vf).unwrap(),
            &amalgamate(&vf.swapped()).unwrap()
        ));
    }

    #[test]
    fn mismatched_roots_rejected() {
        let i = DMatrix::from_row_slice(2, 1, &[0.5, 0.5]);
        let j = DMatrix::from_row_slice(2, 1, &[1.0, 0.5]);
        assert!(matches!(
            VFormation::new(1, square(), square(), i, j),
            Err(Error::NonMatchingRoot(_))
        ));
    }

    #[test]
    fn random_vformations_amalgamate() {
        for seed in 0..20 {
            for root_dim in [1, 2] {
                let vf = random_vformation(
                    seed,
                    RandomVFormationSpec {
                        root_dim,
                        max_generators: 12,
                    },
                )
                .unwrap();
                assert!(vf.k_y.len() <= 12 && vf.k_z.len() <= 12);
                let a = amalgamate(&vf).unwrap();
                let rep = verify_amalgam(&vf, &a, 200, seed).unwrap();
                assert!(rep.passed, "seed {seed} root {root_dim}: {rep:?}");
            }
        }
    }
}
