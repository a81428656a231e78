//! Group actions on incarnating sets, equivariant maps and the invariant
//! projections they induce.

use nalgebra::{DMatrix, DVector};

use super::group::{FiniteOrthogonalGroup, GROUP_TOL};
use crate::error::{Error, Result};
use crate::geometry::{null_space, RowReducer, Vector, TOL};
use crate::incarnation::IncarnatingSet;

/// How each group element permutes the half-set: `g y_i = sign · y_target`.
#[derive(Debug, Clone)]
pub struct ActionTable {
    /// `maps[g][i] = (target, sign)`.
    maps: Vec<Vec<(usize, f64)>>,
}

impl ActionTable {
    /// Computes the action of every element of `g` on the half-multiset of
    /// `k`. Repeated generators are matched in stored order so that each
    /// element acts by a genuine permutation of the multiset.
    pub fn new(k: &IncarnatingSet, g: &FiniteOrthogonalGroup) -> Result<Self> {
        if g.n() != k.dim() {
            return Err(Error::DimensionMismatch {
                expected: k.dim(),
                got: g.n(),
            });
        }
        let gens = k.generators();
        let eps = TOL * k.scale();
        // Classes of equal generators (the set is oriented, so equality is
        // plain equality up to tolerance).
        let mut class_of = vec![usize::MAX; gens.len()];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for i in 0..gens.len() {
            if class_of[i] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let members: Vec<usize> = (i..gens.len())
                .filter(|&j| class_of[j] == usize::MAX && (&gens[j] - &gens[i]).amax() <= eps)
                .collect();
            for &j in &members {
                class_of[j] = id;
            }
            classes.push(members);
        }
        let mut maps = Vec::with_capacity(g.order());
        for m in g.elements() {
            let mut class_map = vec![(usize::MAX, 0.0); classes.len()];
            for (c, members) in classes.iter().enumerate() {
                let image = m * &gens[members[0]];
                let hit = classes.iter().enumerate().find_map(|(d, other)| {
                    let rep = &gens[other[0]];
                    if (rep - &image).amax() <= eps {
                        Some((d, 1.0))
                    } else if (rep + &image).amax() <= eps {
                        Some((d, -1.0))
                    } else {
                        None
                    }
                });
                match hit {
                    Some((d, s)) if classes[d].len() == members.len() => class_map[c] = (d, s),
                    _ => return Err(Error::NotInvariant),
                }
            }
            let mut map = vec![(0, 0.0); gens.len()];
            for (c, members) in classes.iter().enumerate() {
                let (d, s) = class_map[c];
                for (rank, &i) in members.iter().enumerate() {
                    map[i] = (classes[d][rank], s);
                }
            }
            maps.push(map);
        }
        Ok(Self { maps })
    }

    /// `(target, sign)` with `g y_i = sign · y_target` for element `g`.
    pub fn image(&self, g: usize, i: usize) -> (usize, f64) {
        self.maps[g][i]
    }

    pub fn order(&self) -> usize {
        self.maps.len()
    }

    /// `(g · f)(y) = f(g⁻¹ y)` for an odd function `f` given by its values
    /// on the half-set.
    pub fn act_on_function(&self, g: usize, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; f.len()];
        // f(g⁻¹ y_t) where y_t = s⁻¹ g y_i, i.e. (g f)(y_t) = s f(y_i).
        for (i, &(t, s)) in self.maps[g].iter().enumerate() {
            out[t] = s * f[i];
        }
        out
    }
}

/// The stabilizer of a planar set `±K` (as a multiset) in `O(2)`.
///
/// Candidates are the linear maps sending a fixed pair of independent points
/// of the symmetric set to every other ordered pair; those that are
/// orthogonal and preserve the set with multiplicities are kept.
pub fn symmetry_group(k: &IncarnatingSet) -> Result<FiniteOrthogonalGroup> {
    symmetry_group_with_tol(k, TOL)
}

pub fn symmetry_group_with_tol(k: &IncarnatingSet, tol: f64) -> Result<FiniteOrthogonalGroup> {
    if k.dim() != 2 {
        return Err(Error::UnsupportedDimension(k.dim()));
    }
    let scale = k.scale();
    let eps = tol * scale;
    // Distinct points of the full set with multiplicities.
    let mut points: Vec<(Vector, usize)> = Vec::new();
    for p in k.full_set() {
        match points.iter_mut().find(|(q, _)| (q - &p).amax() <= eps) {
            Some((_, m)) => *m += 1,
            None => points.push((p, 1)),
        }
    }
    let a = points[0].0.clone();
    let b = points
        .iter()
        .map(|(p, _)| p)
        .max_by(|p, q| cross(&a, p).abs().total_cmp(&cross(&a, q).abs()))
        .cloned()
        .ok_or(Error::EmptySet)?;
    let src = DMatrix::from_columns(&[a.clone(), b.clone()]);
    let src_inv = src
        .try_inverse()
        .ok_or(Error::Incomplete { rank: 1, dim: 2 })?;
    let (na, nb) = (a.norm(), b.norm());

    let mut found: Vec<DMatrix<f64>> = Vec::new();
    for (u, _) in points.iter().filter(|(u, _)| (u.norm() - na).abs() <= eps) {
        for (w, _) in points.iter().filter(|(w, _)| (w.norm() - nb).abs() <= eps) {
            let m = DMatrix::from_columns(&[u.clone(), w.clone()]) * &src_inv;
            if (m.transpose() * &m - DMatrix::identity(2, 2)).amax() > GROUP_TOL.max(tol) {
                continue;
            }
            let preserves = points.iter().all(|(p, mult)| {
                let img = &m * p;
                points
                    .iter()
                    .any(|(q, mq)| mq == mult && (q - &img).amax() <= eps)
            });
            if preserves && !found.iter().any(|f| (f - &m).amax() <= GROUP_TOL) {
                found.push(m);
            }
        }
    }
    FiniteOrthogonalGroup::from_elements(2, found)
}

fn cross(a: &Vector, b: &Vector) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// A map `μ` from the half-set to `R^n`, extended to the full set by
/// `μ(−u) = −μ(u)`, so that `f(u) μ(u)` is even for every odd `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivariantMap {
    values: Vec<Vector>,
}

impl EquivariantMap {
    pub fn new(values: Vec<Vector>) -> Self {
        Self { values }
    }

    /// `μ(u) = u`.
    pub fn identity(k: &IncarnatingSet) -> Self {
        Self {
            values: k.generators().to_vec(),
        }
    }

    pub fn values(&self) -> &[Vector] {
        &self.values
    }

    /// Values stacked generator by generator into one vector of length `N·n`.
    pub fn flatten(&self) -> DVector<f64> {
        let n = self.values.first().map_or(0, |v| v.len());
        DVector::from_iterator(
            self.values.len() * n,
            self.values.iter().flat_map(|v| v.iter().cloned()),
        )
    }

    pub fn from_flat(flat: &DVector<f64>, n: usize) -> Self {
        Self {
            values: flat
                .as_slice()
                .chunks(n)
                .map(DVector::from_row_slice)
                .collect(),
        }
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * t).collect(),
        }
    }

    /// `Σ_k c_k basis_k`.
    pub fn combination(basis: &[EquivariantMap], coeffs: &[f64]) -> Self {
        let mut flat = basis[0].flatten() * coeffs[0];
        for (b, c) in basis.iter().zip(coeffs).skip(1) {
            flat += b.flatten() * *c;
        }
        let n = basis[0].values[0].len();
        Self::from_flat(&flat, n)
    }

    /// Largest violation of `μ(g u) = g μ(u)` over the group.
    pub fn equivariance_defect(&self, table: &ActionTable, g: &FiniteOrthogonalGroup) -> f64 {
        let mut worst = 0.0_f64;
        for (gi, m) in g.elements().iter().enumerate() {
            for (i, v) in self.values.iter().enumerate() {
                let (t, s) = table.image(gi, i);
                worst = worst.max((&self.values[t] * s - m * v).amax());
            }
        }
        worst
    }
}

/// Orthonormal basis of the space of equivariant maps `μ(gu) = g μ(u)`.
pub fn equivariant_basis(
    k: &IncarnatingSet,
    g: &FiniteOrthogonalGroup,
) -> Result<Vec<EquivariantMap>> {
    let table = ActionTable::new(k, g)?;
    let n = k.dim();
    let count = k.len();
    let unknowns = count * n;
    let mut sys = RowReducer::new(unknowns);
    let mut row = vec![0.0; unknowns];
    for (gi, m) in g.elements().iter().enumerate() {
        for i in 0..count {
            let (t, s) = table.image(gi, i);
            // s μ_t − g μ_i = 0, one row per output coordinate.
            for r in 0..n {
                row.iter_mut().for_each(|x| *x = 0.0);
                row[t * n + r] += s;
                for c in 0..n {
                    row[i * n + c] -= m[(r, c)];
                }
                sys.push_row(&row);
            }
        }
    }
    let basis = null_space(&sys.finish());
    Ok((0..basis.ncols())
        .map(|c| EquivariantMap::from_flat(&basis.column(c).into_owned(), n))
        .collect())
}

/// `P(f) = n (Σ_{u∈K} (u, μ(u)))⁻¹ Σ_{u∈K} f(u) μ(u)`, sums over the full set.
///
/// Functions on `K` are odd and given by their values on the half-set.
#[derive(Debug, Clone)]
pub struct InvariantProjection {
    /// Half-set generators as rows (`N × n`).
    pub evaluation: DMatrix<f64>,
    /// `μ` values as rows (`N × n`).
    pub mu: DMatrix<f64>,
    /// `n / Σ_full (u, μ(u))`.
    pub scale: f64,
}

impl InvariantProjection {
    pub fn dim(&self) -> usize {
        self.evaluation.ncols()
    }

    /// `P(f)` for an odd function with half-set values `f`.
    pub fn apply(&self, f: &[f64]) -> Vector {
        let fv = DVector::from_row_slice(f);
        self.mu.transpose() * fv * (2.0 * self.scale)
    }

    /// The linear function `⟨·, y⟩` as half-set values.
    pub fn evaluate(&self, y: &[f64]) -> Vec<f64> {
        (&self.evaluation * DVector::from_row_slice(y))
            .as_slice()
            .to_vec()
    }

    /// `n × N` matrix of `P` acting on half-set values.
    pub fn matrix(&self) -> DMatrix<f64> {
        self.mu.transpose() * (2.0 * self.scale)
    }
}

/// Builds the invariant projection determined by `μ`.
pub fn invariant_projection(
    k: &IncarnatingSet,
    mu: &EquivariantMap,
) -> Result<InvariantProjection> {
    if mu.values().len() != k.len() {
        return Err(Error::DimensionMismatch {
            expected: k.len(),
            got: mu.values().len(),
        });
    }
    let n = k.dim();
    if mu.values().iter().any(|v| v.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: mu.values()[0].len(),
        });
    }
    let full_pairing: f64 = 2.0
        * k.generators()
            .iter()
            .zip(mu.values())
            .map(|(u, m)| u.dot(m))
            .sum::<f64>();
    let magnitude: f64 = k
        .generators()
        .iter()
        .zip(mu.values())
        .map(|(u, m)| u.norm() * m.norm())
        .sum();
    if !(full_pairing.abs() > 1e-12 * magnitude) {
        return Err(Error::DegenerateMu);
    }
    let rows = |v: &[Vector]| DMatrix::from_fn(v.len(), n, |i, j| v[i][j]);
    Ok(InvariantProjection {
        evaluation: rows(k.generators()),
        mu: rows(mu.values()),
        scale: n as f64 / full_pairing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn polygon(count: usize, offset: f64) -> IncarnatingSet {
        let gens = (0..count)
            .map(|k| {
                let a = offset + k as f64 * PI / count as f64;
                DVector::from_row_slice(&[a.cos(), a.sin()])
            })
            .collect();
        IncarnatingSet::new(2, gens, 1.0).unwrap()
    }

    fn in_span(basis: &[EquivariantMap], target: &EquivariantMap) -> bool {
        let t = target.flatten();
        let mut residual = t.clone();
        for b in basis {
            let f = b.flatten();
            residual -= &f * f.dot(&t);
        }
        residual.amax() < 1e-9 * t.amax()
    }

    #[test]
    fn symmetry_group_examples() {
        let hex = polygon(3, 0.0);
        let g = symmetry_group(&hex).unwrap();
        assert_eq!(g.order(), 12);
        let sq = polygon(2, 0.0);
        assert_eq!(symmetry_group(&sq).unwrap().order(), 8);
        let generic = IncarnatingSet::new(
            2,
            vec![
                DVector::from_row_slice(&[1.0, 0.1]),
                DVector::from_row_slice(&[0.3, 0.9]),
                DVector::from_row_slice(&[-0.7, 0.45]),
            ],
            1.0,
        )
        .unwrap();
        let g = symmetry_group(&generic).unwrap();
        assert_eq!(g.order(), 2);
        assert!(g.contains(&-DMatrix::identity(2, 2)));
    }

    #[test]
    fn equivariant_basis_examples() {
        for (k, order) in [(polygon(3, 0.0), 12), (polygon(2, 0.0), 8)] {
            let g = symmetry_group(&k).unwrap();
            assert_eq!(g.order(), order);
            let basis = equivariant_basis(&k, &g).unwrap();
            assert_eq!(basis.len(), 1);
            assert!(in_span(&basis, &EquivariantMap::identity(&k)));
        }
        let generic = IncarnatingSet::new(
            2,
            vec![
                DVector::from_row_slice(&[1.0, 0.1]),
                DVector::from_row_slice(&[0.3, 0.9]),
                DVector::from_row_slice(&[-0.7, 0.45]),
            ],
            1.0,
        )
        .unwrap();
        let basis = equivariant_basis(&generic, &FiniteOrthogonalGroup::central(2)).unwrap();
        assert_eq!(basis.len(), 2 * 3);
    }

    #[test]
    fn equivariant_basis_rejects_non_invariant_group() {
        let sq = polygon(2, 0.0);
        let g = FiniteOrthogonalGroup::dihedral(3).unwrap();
        assert!(matches!(
            equivariant_basis(&sq, &g),
            Err(Error::NotInvariant)
        ));
    }

    #[test]
    fn hexagon_projection_reproduces_linear_data() {
        let hex = polygon(3, 0.0);
        let p = invariant_projection(&hex, &EquivariantMap::identity(&hex)).unwrap();
        assert!((p.scale - 1.0 / 3.0).abs() < 1e-15);
        let y = [0.7, -1.3];
        let back = p.apply(&p.evaluate(&y));
        assert!((back[0] - y[0]).abs() < 1e-14 && (back[1] - y[1]).abs() < 1e-14);
    }

    #[test]
    fn square_projection_is_coordinate_projection() {
        let sq = polygon(2, 0.0);
        let p = invariant_projection(&sq, &EquivariantMap::identity(&sq)).unwrap();
        // Half-set is {(0,1)?,(1,0)} in canonical order; P picks f at each axis.
        let m = p.matrix();
        for (i, g) in sq.generators().iter().enumerate() {
            let col = m.column(i);
            assert!((col - g).amax() < 1e-15);
        }
    }

    #[test]
    fn projection_is_scale_invariant_in_mu() {
        let hex = polygon(3, 0.2);
        let mu = EquivariantMap::identity(&hex);
        let a = invariant_projection(&hex, &mu).unwrap().matrix();
        let b = invariant_projection(&hex, &mu.scaled(-3.5))
            .unwrap()
            .matrix();
        assert!((a - b).amax() < 1e-14);
    }

    #[test]
    fn degenerate_mu_rejected() {
        let sq = polygon(2, 0.0);
        let rot: Vec<Vector> = sq
            .generators()
            .iter()
            .map(|g| DVector::from_row_slice(&[-g[1], g[0]]))
            .collect();
        assert!(matches!(
            invariant_projection(&sq, &EquivariantMap::new(rot)),
            Err(Error::DegenerateMu)
        ));
    }

    #[test]
    fn action_on_functions_is_a_representation() {
        let hex = polygon(3, 0.0);
        let g = symmetry_group(&hex).unwrap();
        let table = ActionTable::new(&hex, &g).unwrap();
        let f = vec![0.3, -1.1, 2.0];
        for a in 0..g.order() {
            for b in 0..g.order() {
                let prod = &g.elements()[a] * &g.elements()[b];
                let ab = g.position(&prod).unwrap();
                let lhs = table.act_on_function(ab, &f);
                let rhs = table.act_on_function(a, &table.act_on_function(b, &f));
                assert_eq!(lhs, rhs);
            }
        }
    }
}
