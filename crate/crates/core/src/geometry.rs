//! Small-dimension linear algebra, l_p norms, planar convex hulls and
//! linear congruence of symmetric point sets.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, Vector2};

use crate::error::{Error, Result};
use crate::incarnation::IncarnatingSet;

/// Coordinates in `R^m`.
pub type Vector = DVector<f64>;
/// Dense matrix; rows index the target space, columns the source space.
pub type LinearMap = DMatrix<f64>;

/// Absolute tolerance for set and vertex comparisons at unit scale.
pub const TOL: f64 = 1e-9;

/// Relative threshold below which singular values count as zero.
pub const RANK_TOL: f64 = 1e-9;

/// Coordinates whose magnitude is below this fraction of the vector's largest
/// entry are treated as zero when choosing an orientation.
const ORIENT_EPS: f64 = 1e-12;

/// `(Σ|v_i|^p)^{1/p}`, or `max |v_i|` when `p` is infinite.
pub fn lp_norm(v: &[f64], p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "l_p norm needs p >= 1, got {p}"
        )));
    }
    Ok(lp_norm_unchecked(v, p))
}

pub(crate) fn lp_norm_unchecked(v: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    } else if p == 1.0 {
        v.iter().map(|x| x.abs()).sum()
    } else if p == 2.0 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    } else {
        // Scale by the largest entry so large exponents do not overflow.
        let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        scale
            * v.iter()
                .map(|x| (x.abs() / scale).powf(p))
                .sum::<f64>()
                .powf(1.0 / p)
    }
}

/// The coordinate-wise absolute sum `|||v|||`.
pub fn triple_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Hölder conjugate exponent.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Numerical rank with singular values below `RANK_TOL * σ_max` treated as zero.
pub fn rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * smax).count()
}

/// Orthonormal basis (as columns) of the null space of `m`.
pub fn null_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::identity(cols, cols);
    }
    let padded = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let null: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| smax == 0.0 || svd.singular_values[i] <= RANK_TOL * smax)
        .collect();
    let mut basis = DMatrix::zeros(cols, null.len());
    for (k, &i) in null.iter().enumerate() {
        basis.set_column(k, &v_t.row(i).transpose());
    }
    basis
}

/// Accumulates linear constraints row-block by row-block and compresses them
/// with QR so that very tall systems never need to be held in memory.
pub(crate) struct RowReducer {
    cols: usize,
    rows: Vec<f64>,
    nrows: usize,
}

impl RowReducer {
    pub(crate) fn new(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
            nrows: 0,
        }
    }

    pub(crate) fn push_row(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.cols);
        self.rows.extend_from_slice(row);
        self.nrows += 1;
        if self.nrows >= 4 * self.cols.max(4) {
            self.compress();
        }
    }

    fn compress(&mut self) {
        if self.nrows <= self.cols {
            return;
        }
        let m = DMatrix::from_row_slice(self.nrows, self.cols, &self.rows);
        let r = m.qr().r();
        self.rows.clear();
        for i in 0..r.nrows() {
            for j in 0..self.cols {
                self.rows.push(r[(i, j)]);
            }
        }
        self.nrows = r.nrows();
    }

    pub(crate) fn finish(mut self) -> DMatrix<f64> {
        self.compress();
        DMatrix::from_row_slice(self.nrows, self.cols, &self.rows)
    }
}

/// Total order on coordinate vectors, lexicographic on exact values.
pub fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// True when `v` already lies in the closed upper half-space: its last
/// non-negligible coordinate is positive.
pub fn is_oriented(v: &[f64]) -> bool {
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    for &x in v.iter().rev() {
        if x.abs() > ORIENT_EPS * scale {
            return x > 0.0;
        }
    }
    true
}

/// Representative of `±v` in the closed upper half-space.
pub fn orient(v: &Vector) -> Vector {
    if is_oriented(v.as_slice()) {
        v.clone()
    } else {
        -v
    }
}

/// `|a × b| / (|a||b|)`: zero for parallel vectors, any dimension.
pub fn parallel_defect(a: &[f64], b: &[f64]) -> f64 {
    let na2: f64 = a.iter().map(|x| x * x).sum();
    let nb2: f64 = b.iter().map(|x| x * x).sum();
    if na2 == 0.0 || nb2 == 0.0 {
        return 0.0;
    }
    // |a|²|b|² − (a·b)² = |a ∧ b|², computed from the 2x2 minors for accuracy.
    let mut wedge2 = 0.0;
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            let m = a[i] * b[j] - a[j] * b[i];
            wedge2 += m * m;
        }
    }
    (wedge2 / (na2 * nb2)).sqrt()
}

fn cross2(o: &Vector2<f64>, a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// A convex polygon given by its vertices in counterclockwise order, starting
/// at the lexicographically smallest vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope2D {
    vertices: Vec<Vector2<f64>>,
}

impl Polytope2D {
    /// Wraps vertices already known to be in canonical order. Used by
    /// constructions that produce their vertices directly.
    pub(crate) fn from_canonical(vertices: Vec<Vector2<f64>>) -> Self {
        Self { vertices }
    }

    /// Builds a polygon from vertices in counterclockwise order, rotating the
    /// list to start at the lexicographic minimum. Fails unless the vertices
    /// form a strictly convex CCW polygon.
    pub fn from_ccw(mut vertices: Vec<Vector2<f64>>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::DegenerateHull);
        }
        let start = lex_min_index(&vertices);
        vertices.rotate_left(start);
        let scale = vertices.iter().fold(0.0_f64, |m, v| m.max(v.amax()));
        for i in 0..n {
            let a = &vertices[i];
            let b = &vertices[(i + 1) % n];
            let c = &vertices[(i + 2) % n];
            let e1 = b - a;
            let e2 = c - b;
            let turn = e1.x * e2.y - e1.y * e2.x;
            if !(turn > TOL * e1.norm() * e2.norm()) || e1.norm() <= TOL * scale {
                return Err(Error::InvalidArgument(
                    "vertices are not a strictly convex counterclockwise polygon".into(),
                ));
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Vector2<f64>] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Largest absolute coordinate over all vertices.
    pub fn scale(&self) -> f64 {
        self.vertices.iter().fold(0.0_f64, |m, v| m.max(v.amax()))
    }

    /// Support function `max_z ⟨x, z⟩` over the vertices.
    pub fn support(&self, x: &Vector2<f64>) -> f64 {
        self.vertices
            .iter()
            .map(|z| x.dot(z))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Vertex `i + len/2` is the negation of vertex `i` for every `i`.
    pub fn is_centrally_symmetric(&self, tol: f64) -> bool {
        let n = self.vertices.len();
        if !n.is_multiple_of(2) {
            return false;
        }
        let eps = tol * self.scale().max(f64::MIN_POSITIVE);
        let h = n / 2;
        (0..h).all(|i| (self.vertices[i] + self.vertices[i + h]).amax() <= eps)
    }

    /// Same vertex set up to `tol` (relative to the larger scale), regardless
    /// of which vertex each list starts at.
    pub fn same_vertices(&self, other: &Polytope2D, tol: f64) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let eps = tol * self.scale().max(other.scale()).max(f64::MIN_POSITIVE);
        self.max_vertex_distance(other) <= eps
    }

    /// Largest distance from a vertex of either polygon to the nearest vertex
    /// of the other.
    pub fn max_vertex_distance(&self, other: &Polytope2D) -> f64 {
        let one_way = |a: &[Vector2<f64>], b: &[Vector2<f64>]| {
            a.iter()
                .map(|p| {
                    b.iter()
                        .map(|q| (p - q).amax())
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0_f64, f64::max)
        };
        one_way(&self.vertices, &other.vertices).max(one_way(&other.vertices, &self.vertices))
    }
}

fn lex_min_index(v: &[Vector2<f64>]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if lex_cmp(v[i].as_slice(), v[best].as_slice()) == Ordering::Less {
            best = i;
        }
    }
    best
}

/// Convex hull of planar points: counterclockwise, starting at the
/// lexicographic minimum, with collinear boundary points removed.
pub fn convex_hull_2d(points: &[Vector2<f64>]) -> Result<Polytope2D> {
    let scale = points.iter().fold(0.0_f64, |m, v| m.max(v.amax()));
    if points.len() < 3 || scale == 0.0 {
        return Err(Error::DegenerateHull);
    }
    let mut pts: Vec<Vector2<f64>> = points.to_vec();
    pts.sort_by(|a, b| lex_cmp(a.as_slice(), b.as_slice()));
    pts.dedup_by(|a, b| (*a - *b).amax() <= TOL * scale);
    if pts.len() < 3 {
        return Err(Error::DegenerateHull);
    }

    // A turn counts only when its sine exceeds TOL; this keeps nearly collinear
    // noise out while retaining tightly packed points on a smooth curve.
    let keeps = |o: &Vector2<f64>, a: &Vector2<f64>, b: &Vector2<f64>| {
        let c = cross2(o, a, b);
        c > TOL * (a - o).norm() * (b - a).norm()
    };

    // Andrew's monotone chain.
    let mut hull: Vec<Vector2<f64>> = Vec::with_capacity(2 * pts.len());
    for p in &pts {
        while hull.len() >= 2 && !keeps(&hull[hull.len() - 2], &hull[hull.len() - 1], p) {
            hull.pop();
        }
        hull.push(*p);
    }
    let lower_len = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && !keeps(&hull[hull.len() - 2], &hull[hull.len() - 1], p) {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    if hull.len() < 3 {
        return Err(Error::DegenerateHull);
    }
    Ok(Polytope2D { vertices: hull })
}

/// Searches for an invertible linear map `U` with `U(±K1) = ±K2` as sets.
///
/// Both sets are compared as given (no merging of parallel generators); see
/// [`crate::incarnation::isometric`] for the norm-level test.
pub fn congruence(k1: &IncarnatingSet, k2: &IncarnatingSet) -> Option<LinearMap> {
    congruence_with_tol(k1.generators(), k2.generators(), TOL)
}

/// Point-set form of [`congruence`].
pub fn congruence_with_tol(k1: &[Vector], k2: &[Vector], tol: f64) -> Option<LinearMap> {
    let a = dedup_up_to_sign(k1, tol);
    let b = dedup_up_to_sign(k2, tol);
    let dim = a.first()?.len();
    if b.first()?.len() != dim || a.len() != b.len() {
        return None;
    }
    // Fixed independent tuple from K1, chosen greedily in stored order.
    let basis_idx = greedy_basis(&a)?;
    let src = columns(&a, &basis_idx);
    let src_inv = src.clone().try_inverse()?;
    let scale_b = b.iter().map(|v| v.amax()).fold(0.0_f64, f64::max);
    let target = SignedSet::new(&b, tol * scale_b);

    let mut choice = vec![0usize; dim];
    let mut signs = vec![1.0f64; dim];
    let total = (b.len() * 2).pow(dim as u32);
    for code in 0..total {
        let mut c = code;
        let mut distinct = true;
        // Earlier tuple slots vary slowest, so candidates come in
        // lexicographic order of (target, sign) per slot.
        for k in (0..dim).rev() {
            let d = c % (2 * b.len());
            c /= 2 * b.len();
            choice[k] = d / 2;
            signs[k] = if d.is_multiple_of(2) { 1.0 } else { -1.0 };
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if choice[i] == choice[j] {
                    distinct = false;
                }
            }
        }
        if !distinct {
            continue;
        }
        let mut dst = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            dst.set_column(k, &(&b[choice[k]] * signs[k]));
        }
        let u = &dst * &src_inv;
        if u.determinant().abs() <= RANK_TOL * u.amax().powi(dim as i32) {
            continue;
        }
        if a.iter().all(|v| target.contains(&(&u * v))) {
            return Some(u);
        }
    }
    None
}

/// Drops vectors that repeat an earlier one up to sign.
pub(crate) fn dedup_up_to_sign(v: &[Vector], tol: f64) -> Vec<Vector> {
    let scale = v.iter().map(|x| x.amax()).fold(0.0_f64, f64::max);
    let eps = tol * scale;
    let mut out: Vec<Vector> = Vec::new();
    for x in v {
        if !out
            .iter()
            .any(|y| (y - x).amax() <= eps || (y + x).amax() <= eps)
        {
            out.push(x.clone());
        }
    }
    out
}

fn greedy_basis(v: &[Vector]) -> Option<Vec<usize>> {
    let dim = v.first()?.len();
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..v.len() {
        let mut trial = chosen.clone();
        trial.push(i);
        if rank(&columns(v, &trial)) == trial.len() {
            chosen = trial;
            if chosen.len() == dim {
                return Some(chosen);
            }
        }
    }
    None
}

fn columns(v: &[Vector], idx: &[usize]) -> DMatrix<f64> {
    let dim = v[idx[0]].len();
    let mut m = DMatrix::zeros(dim, idx.len());
    for (k, &i) in idx.iter().enumerate() {
        m.set_column(k, &v[i]);
    }
    m
}

/// Membership test for `±S` with an absolute tolerance.
struct SignedSet<'a> {
    points: &'a [Vector],
    eps: f64,
}

impl<'a> SignedSet<'a> {
    fn new(points: &'a [Vector], eps: f64) -> Self {
        Self { points, eps }
    }

    fn contains(&self, x: &Vector) -> bool {
        self.points
            .iter()
            .any(|p| (p - x).amax() <= self.eps || (p + x).amax() <= self.eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn v(x: &[f64]) -> Vector {
        DVector::from_row_slice(x)
    }

    fn set(gens: &[[f64; 2]]) -> IncarnatingSet {
        IncarnatingSet::new(2, gens.iter().map(|g| v(g)).collect(), 1.0).unwrap()
    }

    #[test]
    fn lp_norm_examples() {
        assert!((lp_norm(&[3.0, 4.0], 2.0).unwrap() - 5.0).abs() < 1e-15);
        assert!((lp_norm(&[1.0; 4], 4.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(lp_norm(&[1.0, -2.0], 1.0).unwrap(), 3.0);
        assert_eq!(lp_norm(&[1.0, -7.0], f64::INFINITY).unwrap(), 7.0);
        assert!(lp_norm(&[1.0], 0.5).is_err());
        assert!(lp_norm(&[1.0], f64::NAN).is_err());
    }

    #[test]
    fn triple_norm_examples() {
        assert_eq!(triple_norm(&[1.0, -2.0]), 3.0);
        assert_eq!(triple_norm(&[0.0, 0.0]), 0.0);
        assert_eq!(triple_norm(&[0.5, 0.5, -1.0]), 2.0);
    }

    #[test]
    fn hull_drops_interior_point() {
        let pts = [
            [1.0, 1.0],
            [-1.0, 1.0],
            [-1.0, -1.0],
            [1.0, -1.0],
            [0.0, 0.0],
        ]
        .map(|p| Vector2::new(p[0], p[1]));
        let h = convex_hull_2d(&pts).unwrap();
        let want = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
        assert_eq!(h.len(), 4);
        for (a, b) in h.vertices().iter().zip(want) {
            assert_eq!(a.as_slice(), &b);
        }
    }

    #[test]
    fn hull_orders_hexagon() {
        let pts: Vec<_> = [3, 0, 4, 1, 5, 2]
            .iter()
            .map(|&k| {
                let a = k as f64 * PI / 3.0;
                Vector2::new(a.cos(), a.sin())
            })
            .collect();
        let h = convex_hull_2d(&pts).unwrap();
        assert_eq!(h.len(), 6);
        // Starts at (-1, 0) and runs counterclockwise.
        assert!((h.vertices()[0] - Vector2::new(-1.0, 0.0)).amax() < 1e-15);
        for k in 0..6 {
            let a = (k as f64 + 3.0) * PI / 3.0;
            assert!((h.vertices()[k] - Vector2::new(a.cos(), a.sin())).amax() < 1e-12);
        }
    }

    #[test]
    fn hull_rejects_collinear() {
        let pts = [
            Vector2::new(0.0, 0.0),
            Vector2::new(1.0, 1.0),
            Vector2::new(2.0, 2.0),
        ];
        assert!(matches!(convex_hull_2d(&pts), Err(Error::DegenerateHull)));
    }

    #[test]
    fn hull_is_idempotent_on_circle_points() {
        let pts: Vec<_> = (0..500)
            .map(|k| {
                let a = k as f64 * 0.0137;
                Vector2::new(a.cos(), a.sin())
            })
            .collect();
        let h = convex_hull_2d(&pts).unwrap();
        let h2 = convex_hull_2d(h.vertices()).unwrap();
        assert_eq!(h, h2);
    }

    #[test]
    fn from_ccw_rejects_clockwise() {
        let cw = vec![
            Vector2::new(0.0, 0.0),
            Vector2::new(0.0, 1.0),
            Vector2::new(1.0, 1.0),
            Vector2::new(1.0, 0.0),
        ];
        assert!(Polytope2D::from_ccw(cw.clone()).is_err());
        let mut ccw = cw;
        ccw.reverse();
        assert!(Polytope2D::from_ccw(ccw).is_ok());
    }

    #[test]
    fn congruence_finds_rotation() {
        let k1 = set(&[[1.0, 0.0], [0.0, 1.0]]);
        let t = PI / 6.0;
        let rot = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        let k2 = set(&[[t.cos(), t.sin()], [-t.sin(), t.cos()]]);
        let u = congruence(&k1, &k2).unwrap();
        assert!((&u - &rot).amax() < 1e-12, "{u}");
    }

    #[test]
    fn congruence_finds_scaling() {
        let k1 = set(&[[1.0, 0.0], [0.0, 1.0]]);
        let k2 = set(&[[2.0, 0.0], [0.0, 2.0]]);
        let u = congruence(&k1, &k2).unwrap();
        assert!((&u - DMatrix::identity(2, 2) * 2.0).amax() < 1e-12);
    }

    #[test]
    fn congruence_square_vs_hexagon_absent() {
        let sq = set(&[[1.0, 0.0], [0.0, 1.0]]);
        let s3 = 3f64.sqrt() / 2.0;
        let hex = set(&[[1.0, 0.0], [0.5, s3], [-0.5, s3]]);
        assert!(congruence(&sq, &hex).is_none());
        // Same cardinality but not linearly equivalent: three directions whose
        // cross-ratio differs from the hexagon's.
        let skew = set(&[[1.0, 0.0], [0.0, 1.0], [1.0, 3.0]]);
        assert!(congruence(&skew, &hex).is_none());
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let n = null_space(&m);
        assert_eq!(n.ncols(), 2);
        assert!((&m * &n).amax() < 1e-14);
    }

    #[test]
    fn orientation_normalizes_to_upper_half() {
        assert_eq!(orient(&v(&[1.0, -1.0])).as_slice(), &[-1.0, 1.0]);
        assert_eq!(orient(&v(&[-2.0, 0.0])).as_slice(), &[2.0, 0.0]);
        assert_eq!(orient(&v(&[-1.0, 1e-20])).as_slice(), &[1.0, -1e-20]);
    }
}
