//! Incarnating sets.
//!
//! An [`IncarnatingSet`] stores one representative per antipodal pair `±y`
//! (the *half-set*), oriented into the closed upper half-space. The full
//! centrally symmetric set is `±(half-set)`.
//!
//! Norm conventions:
//!
//! - `p = 1`: `‖x‖ = Σ_half |⟨x, y⟩|`, which is half the full-set sum. The
//!   planar dual ball of this norm is exactly the zonotope `Σ [−y, y]`.
//! - `p > 1`: `‖x‖ = (2 Σ_half |⟨x, y⟩|^p)^{1/p}`, the full-set sum.
//!
//! Raw evaluation sets produced by [`besselian_incarnate`] sum every stored
//! point once; see [`PairRealization::induced_norm`].

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Vector2};

use crate::error::{Error, Result};
use crate::geometry::{
    self, congruence_with_tol, convex_hull_2d, lex_cmp, orient, parallel_defect, LinearMap,
    Polytope2D, Vector, TOL,
};

/// Half-multiset of generator vectors spanning `R^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncarnatingSet {
    dim: usize,
    generators: Vec<Vector>,
    ambient_p: f64,
}

impl IncarnatingSet {
    /// Validates and canonicalizes a raw generator list: zero vectors are
    /// dropped, every vector is replaced by its upper-half-space
    /// representative, completeness (rank = `dim`) is checked and the result
    /// is sorted lexicographically.
    pub fn new(dim: usize, raw: Vec<Vector>, ambient_p: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "dimension must be at least 1".into(),
            ));
        }
        if !(ambient_p >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "ambient p must be >= 1, got {ambient_p}"
            )));
        }
        let mut generators = Vec::with_capacity(raw.len());
        for v in raw {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(
                    "generator has a non-finite entry".into(),
                ));
            }
            if v.iter().all(|&x| x == 0.0) {
                continue;
            }
            generators.push(orient(&v));
        }
        if generators.is_empty() {
            return Err(Error::EmptySet);
        }
        generators.sort_by(|a, b| lex_cmp(a.as_slice(), b.as_slice()));
        let set = Self {
            dim,
            generators,
            ambient_p,
        };
        let rank = geometry::rank(&set.matrix());
        if rank < dim {
            return Err(Error::Incomplete { rank, dim });
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn ambient_p(&self) -> f64 {
        self.ambient_p
    }

    /// Same generators tagged with a different ambient exponent.
    pub fn with_ambient_p(&self, p: f64) -> Result<Self> {
        Self::new(self.dim, self.generators.clone(), p)
    }

    /// Generators as the columns of a `dim × len` matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.generators)
    }

    /// The full symmetric set `±(half-set)`: representatives first, then their
    /// negations in the same order.
    pub fn full_set(&self) -> Vec<Vector> {
        self.generators
            .iter()
            .cloned()
            .chain(self.generators.iter().map(|g| -g))
            .collect()
    }

    /// Largest absolute coordinate over all generators.
    pub fn scale(&self) -> f64 {
        self.generators.iter().map(|g| g.amax()).fold(0.0, f64::max)
    }

    /// `⟨x, y⟩` for every stored generator `y`.
    pub fn evaluations(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self
            .generators
            .iter()
            .map(|y| dot(y.as_slice(), x))
            .collect())
    }

    /// Induced norm of `x` under this set's convention (see module docs).
    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        let ev = self.evaluations(x)?;
        Ok(half_convention_norm(&ev, self.ambient_p))
    }

    /// `(Σ_full |⟨x, u⟩|^p)^{1/p}` over the full symmetric set, for any `p`.
    /// For `p = 1` this is twice [`IncarnatingSet::norm`].
    pub fn full_norm(&self, x: &[f64], p: f64) -> Result<f64> {
        let ev = self.evaluations(x)?;
        Ok(full_sum_norm(&ev, p))
    }

    /// `(Σ_stored |⟨x, y⟩|^p)^{1/p}`: each stored generator counted once.
    pub fn evaluation_norm(&self, x: &[f64]) -> Result<f64> {
        let ev = self.evaluations(x)?;
        Ok(geometry::lp_norm_unchecked(&ev, self.ambient_p))
    }

    /// `Σ |||y|||` over the stored generators.
    pub fn triple_norm_budget(&self) -> f64 {
        self.generators
            .iter()
            .map(|g| geometry::triple_norm(g.as_slice()))
            .sum()
    }

    /// Applies a linear map to every generator.
    pub fn transformed(&self, map: &LinearMap) -> Result<Self> {
        if map.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: map.ncols(),
            });
        }
        Self::new(
            map.nrows(),
            self.generators.iter().map(|g| map * g).collect(),
            self.ambient_p,
        )
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(
            self.dim,
            self.generators.iter().map(|g| g * t).collect(),
            self.ambient_p,
        )
    }

    /// Sums every parallel class into a single generator. For `p = 1` this
    /// leaves the induced norm unchanged.
    pub fn merged(&self) -> Self {
        let generators = merge_parallel(&self.generators, TOL);
        Self {
            dim: self.dim,
            generators,
            ambient_p: self.ambient_p,
        }
    }

    /// Whether two sets agree generator-by-generator within `tol` (relative
    /// to the larger scale). Both are canonical, so order is comparable.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.dim != other.dim || self.len() != other.len() {
            return false;
        }
        let eps = tol * self.scale().max(other.scale());
        let mut a = self.generators.clone();
        let mut b = other.generators.clone();
        a.sort_by(angle_key_cmp);
        b.sort_by(angle_key_cmp);
        if a.iter().zip(&b).all(|(x, y)| (x - y).amax() <= eps) {
            return true;
        }
        // Fall back to a matching that tolerates ordering noise.
        let mut used = vec![false; b.len()];
        'outer: for x in &a {
            for (j, y) in b.iter().enumerate() {
                if !used[j] && ((x - y).amax() <= eps || (x + y).amax() <= eps) {
                    used[j] = true;
                    continue 'outer;
                }
            }
            return false;
        }
        true
    }
}

fn angle_key_cmp(a: &Vector, b: &Vector) -> Ordering {
    lex_cmp(a.as_slice(), b.as_slice())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Norm from half-set evaluations under the storage convention.
pub(crate) fn half_convention_norm(ev: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        ev.iter().map(|x| x.abs()).sum()
    } else {
        full_sum_norm(ev, p)
    }
}

/// Full-set l_p norm from half-set evaluations.
pub(crate) fn full_sum_norm(ev: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return ev.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    }
    geometry::lp_norm_unchecked(ev, p) * 2f64.powf(1.0 / p)
}

/// Builds an incarnating set; see [`IncarnatingSet::new`].
pub fn make_incarnating_set(
    dim: usize,
    raw: Vec<Vector>,
    ambient_p: f64,
) -> Result<IncarnatingSet> {
    IncarnatingSet::new(dim, raw, ambient_p)
}

/// Induced norm of `x`; see [`IncarnatingSet::norm`].
pub fn subspace_norm(k: &IncarnatingSet, x: &[f64]) -> Result<f64> {
    k.norm(x)
}

/// Groups parallel vectors (normalized cross product below `tol`) and returns
/// one oriented class sum per group, sorted lexicographically.
pub fn merge_parallel(gens: &[Vector], tol: f64) -> Vec<Vector> {
    let mut classes: Vec<Vector> = Vec::new();
    let mut leads: Vec<Vector> = Vec::new();
    for g in gens {
        let g = orient(g);
        match leads
            .iter()
            .position(|l| parallel_defect(l.as_slice(), g.as_slice()) < tol)
        {
            Some(i) => {
                if leads[i].dot(&g) >= 0.0 {
                    classes[i] += &g;
                } else {
                    classes[i] -= &g;
                }
            }
            None => {
                leads.push(g.clone());
                classes.push(g);
            }
        }
    }
    let mut out: Vec<Vector> = classes.iter().map(orient).collect();
    out.sort_by(|a, b| lex_cmp(a.as_slice(), b.as_slice()));
    out
}

/// Polar angle of a planar vector folded into `[0, π)`.
pub(crate) fn half_angle(v: &[f64]) -> f64 {
    let a = v[1].atan2(v[0]);
    if a < 0.0 {
        if a > -1e-9 {
            0.0
        } else {
            a + PI
        }
    } else if a >= PI {
        0.0
    } else {
        a
    }
}

/// The dual unit ball of a planar `l_1` incarnating set: the zonotope
/// `Σ_half [−y, y]`, built by sweeping the merged generators by angle.
pub fn dual_ball(k: &IncarnatingSet) -> Result<Polytope2D> {
    if k.dim() != 2 {
        return Err(Error::UnsupportedDimension(k.dim()));
    }
    if k.ambient_p() != 1.0 {
        return Err(Error::InvalidArgument(format!(
            "dual ball is a zonotope only for p = 1, got p = {}",
            k.ambient_p()
        )));
    }
    let mut gens: Vec<Vector2<f64>> = merge_parallel(k.generators(), TOL)
        .iter()
        .map(|g| Vector2::new(g[0], g[1]))
        .collect();
    gens.sort_by(|a, b| {
        half_angle(a.as_slice())
            .partial_cmp(&half_angle(b.as_slice()))
            .unwrap_or(Ordering::Equal)
    });
    let sum: Vector2<f64> = gens.iter().sum();
    let mut vertices = Vec::with_capacity(2 * gens.len());
    let mut cur = -sum;
    for g in &gens {
        vertices.push(cur);
        cur += 2.0 * g;
    }
    for g in &gens {
        vertices.push(cur);
        cur -= 2.0 * g;
    }
    let start = (0..vertices.len())
        .min_by(|&i, &j| lex_cmp(vertices[i].as_slice(), vertices[j].as_slice()))
        .unwrap_or(0);
    vertices.rotate_left(start);
    Ok(Polytope2D::from_canonical(vertices))
}

/// Recovers the generator half-set of a centrally symmetric polygon: half of
/// each edge vector, one per antipodal edge pair.
pub fn generators_from_polytope(poly: &Polytope2D) -> Result<IncarnatingSet> {
    if poly.len() < 4 {
        return Err(if poly.len() == 3 {
            Error::Asymmetric
        } else {
            Error::InvalidArgument("a segment has no interior".into())
        });
    }
    if !poly.is_centrally_symmetric(TOL) {
        return Err(Error::Asymmetric);
    }
    let v = poly.vertices();
    let gens = (0..v.len() / 2)
        .map(|i| {
            let e = (v[i + 1] - v[i]) / 2.0;
            DVector::from_row_slice(e.as_slice())
        })
        .collect();
    IncarnatingSet::new(2, gens, 1.0)
}

/// An incarnation of `Y ↪ l_p^N`: evaluation points for every ambient
/// coordinate, expressed in an orthonormal coordinate system of `Y`.
#[derive(Debug, Clone)]
pub struct PairRealization {
    ambient_dim: usize,
    subspace: IncarnatingSet,
    dropped_zeros: usize,
    evaluation_basis: Option<LinearMap>,
}

impl PairRealization {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn ambient_p(&self) -> f64 {
        self.subspace.ambient_p()
    }

    /// Raw evaluation points (oriented, zeros removed). Each stored point is
    /// one ambient coordinate, so norms sum each point once.
    pub fn subspace(&self) -> &IncarnatingSet {
        &self.subspace
    }

    pub fn dropped_zeros(&self) -> usize {
        self.dropped_zeros
    }

    /// Orthonormal basis `Q` (`N × m`) of `Y`; `w = Q c` maps coordinates to
    /// ambient vectors.
    pub fn evaluation_basis(&self) -> Option<&LinearMap> {
        self.evaluation_basis.as_ref()
    }

    /// Norm of the subspace vector with coordinates `c`: equals the ambient
    /// `l_p` norm of `Q c`.
    pub fn induced_norm(&self, c: &[f64]) -> Result<f64> {
        self.subspace.evaluation_norm(c)
    }

    /// The same subspace as a half-set under the storage convention, so that
    /// [`IncarnatingSet::norm`] reproduces the ambient norm.
    pub fn half_set_form(&self) -> Result<IncarnatingSet> {
        let p = self.ambient_p();
        if p == 1.0 || p.is_infinite() {
            Ok(self.subspace.clone())
        } else {
            self.subspace.scaled(2f64.powf(-1.0 / p))
        }
    }
}

/// Incarnates the column span of `basis` (`N × m`, rank `m`) inside `l_p^N`.
///
/// The columns are orthonormalized to `Q`; the evaluation point of ambient
/// coordinate `i` is `Qᵀ e_i`, the coordinates of the orthogonal projection of
/// `e_i` onto the subspace. For every `c`, `Σ_i |⟨c, Qᵀe_i⟩|^p = ‖Qc‖_p^p`.
pub fn besselian_incarnate(
    ambient_p: f64,
    ambient_dim: usize,
    basis: &LinearMap,
) -> Result<PairRealization> {
    if basis.nrows() != ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: ambient_dim,
            got: basis.nrows(),
        });
    }
    let m = basis.ncols();
    let r = geometry::rank(basis);
    if m == 0 || r < m {
        return Err(Error::RankDeficient { rank: r, cols: m });
    }
    let q = basis.clone().qr().q();
    let points: Vec<Vector> = (0..ambient_dim).map(|i| q.row(i).transpose()).collect();
    let scale = points.iter().map(|p| p.amax()).fold(0.0, f64::max);
    let (nonzero, zeros): (Vec<Vector>, Vec<Vector>) =
        points.into_iter().partition(|p| p.amax() > 1e-14 * scale);
    let subspace = IncarnatingSet::new(m, nonzero, ambient_p)?;
    Ok(PairRealization {
        ambient_dim,
        subspace,
        dropped_zeros: zeros.len(),
        evaluation_basis: Some(q),
    })
}

/// `Σ |||y_i|||` over all evaluation points (dropped zeros contribute 0).
/// For `p = 1` this equals `Σ_j ‖e_j‖` over the orthonormal coordinate basis.
pub fn triple_norm_budget(r: &PairRealization) -> f64 {
    r.subspace.triple_norm_budget()
}

/// Whether two planar or higher-dimensional `l_1` incarnating sets define
/// isometric subspaces: after merging parallel classes, some linear map
/// carries one symmetric set onto the other. Sets for `p ≠ 1` are never
/// reported isometric by this test.
pub fn isometric(k1: &IncarnatingSet, k2: &IncarnatingSet) -> bool {
    isometric_with_tol(k1, k2, TOL)
}

pub fn isometric_with_tol(k1: &IncarnatingSet, k2: &IncarnatingSet, tol: f64) -> bool {
    if k1.ambient_p() != 1.0 || k2.ambient_p() != 1.0 || k1.dim() != k2.dim() {
        return false;
    }
    let a = merge_parallel(k1.generators(), tol);
    let b = merge_parallel(k2.generators(), tol);
    congruence_with_tol(&a, &b, tol).is_some()
}

/// Symmetric hull of the depth-`d` truncation of the Cantor set on the unit
/// circle: angles `π Σ_{k≤d} α_k 3^{-k}`, `α_k ∈ {0, 1}`.
pub fn cantor_ball(depth: u32) -> Result<Polytope2D> {
    if depth == 0 || depth > 20 {
        return Err(Error::InvalidArgument(format!(
            "cantor depth must be in 1..=20, got {depth}"
        )));
    }
    let n = 1usize << depth;
    let mut pts = Vec::with_capacity(2 * n);
    for bits in 0..n {
        let mut angle = 0.0;
        let mut w = PI;
        for k in 0..depth {
            w /= 3.0;
            if bits >> (depth - 1 - k) & 1 == 1 {
                angle += w;
            }
        }
        let p = Vector2::new(angle.cos(), angle.sin());
        pts.push(p);
        pts.push(-p);
    }
    convex_hull_2d(&pts)
}
