//! Finite groups of orthogonal matrices.

use std::collections::HashMap;
use std::collections::VecDeque;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{RowReducer, RANK_TOL};

/// Entry-wise tolerance for matrix equality and orthogonality.
pub const GROUP_TOL: f64 = 1e-9;

/// Largest group `generate` will enumerate.
const MAX_ORDER: usize = 200_000;

/// A finite subgroup of `O(n)`, stored as an explicit element list with the
/// identity first. Haar averages are uniform averages over `elements`.
#[derive(Debug, Clone)]
pub struct FiniteOrthogonalGroup {
    n: usize,
    elements: Vec<DMatrix<f64>>,
}

/// Hash lookup of matrices up to `GROUP_TOL`, keyed by a rounded scalar
/// fingerprint; neighbouring buckets are probed so noise never hides a match.
struct ElementIndex {
    weights: DMatrix<f64>,
    buckets: HashMap<i64, Vec<usize>>,
}

impl ElementIndex {
    fn new(n: usize) -> Self {
        let weights = DMatrix::from_fn(n, n, |i, j| {
            (1.7 + 3.1 * i as f64 + 7.3 * j as f64).sin() + 1.5
        });
        Self {
            weights,
            buckets: HashMap::new(),
        }
    }

    fn key(&self, m: &DMatrix<f64>) -> i64 {
        (self.weights.dot(m) * 1e6).round() as i64
    }

    fn insert(&mut self, m: &DMatrix<f64>, idx: usize) {
        self.buckets.entry(self.key(m)).or_default().push(idx);
    }

    fn find(&self, m: &DMatrix<f64>, elements: &[DMatrix<f64>]) -> Option<usize> {
        let k = self.key(m);
        for probe in [k, k - 1, k + 1] {
            if let Some(list) = self.buckets.get(&probe) {
                for &i in list {
                    if (&elements[i] - m).amax() <= GROUP_TOL {
                        return Some(i);
                    }
                }
            }
        }
        None
    }
}

fn is_orthogonal(g: &DMatrix<f64>) -> bool {
    let n = g.nrows();
    g.ncols() == n && (g.transpose() * g - DMatrix::identity(n, n)).amax() < GROUP_TOL
}

impl FiniteOrthogonalGroup {
    /// Validates an explicit element list: every element orthogonal, the
    /// identity present, closed under products and inverses. Duplicates are
    /// rejected. The identity is moved to the front.
    pub fn from_elements(n: usize, elements: Vec<DMatrix<f64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "group dimension must be at least 1".into(),
            ));
        }
        let mut index = ElementIndex::new(n);
        for (i, g) in elements.iter().enumerate() {
            if g.nrows() != n || g.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: g.nrows(),
                });
            }
            if !is_orthogonal(g) {
                return Err(Error::NotAGroup(format!("element {i} is not orthogonal")));
            }
            if index.find(g, &elements).is_some() {
                return Err(Error::NotAGroup(format!("element {i} is repeated")));
            }
            index.insert(g, i);
        }
        let id = DMatrix::identity(n, n);
        let Some(id_pos) = index.find(&id, &elements) else {
            return Err(Error::NotAGroup("identity is missing".into()));
        };
        for (i, g) in elements.iter().enumerate() {
            if index.find(&g.transpose(), &elements).is_none() {
                return Err(Error::NotAGroup(format!(
                    "inverse of element {i} is missing"
                )));
            }
            for (j, h) in elements.iter().enumerate() {
                if index.find(&(g * h), &elements).is_none() {
                    return Err(Error::NotAGroup(format!(
                        "product of elements {i} and {j} is missing"
                    )));
                }
            }
        }
        let mut elements = elements;
        let identity = elements.remove(id_pos);
        elements.insert(0, identity);
        Ok(Self { n, elements })
    }

    /// The group generated by orthogonal `generators`, enumerated breadth
    /// first from the identity. Closure holds by construction.
    pub fn generate(n: usize, generators: &[DMatrix<f64>]) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if g.nrows() != n || g.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: g.nrows(),
                });
            }
            if !is_orthogonal(g) {
                return Err(Error::NotAGroup(format!("generator {i} is not orthogonal")));
            }
        }
        let mut elements = vec![DMatrix::identity(n, n)];
        let mut index = ElementIndex::new(n);
        index.insert(&elements[0], 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for s in generators {
                let prod = &elements[i] * s;
                if index.find(&prod, &elements).is_none() {
                    if elements.len() >= MAX_ORDER {
                        return Err(Error::NotAGroup(format!(
                            "generated group exceeds {MAX_ORDER} elements"
                        )));
                    }
                    index.insert(&prod, elements.len());
                    queue.push_back(elements.len());
                    elements.push(prod);
                }
            }
        }
        Ok(Self { n, elements })
    }

    /// `{I}` in dimension `n`.
    pub fn trivial(n: usize) -> Self {
        Self {
            n,
            elements: vec![DMatrix::identity(n, n)],
        }
    }

    /// `{I, −I}` in dimension `n`.
    pub fn central(n: usize) -> Self {
        Self {
            n,
            elements: vec![DMatrix::identity(n, n), -DMatrix::identity(n, n)],
        }
    }

    /// Planar rotations by multiples of `2π/k`.
    pub fn cyclic(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument(
                "cyclic group order must be positive".into(),
            ));
        }
        Self::generate(2, &[rotation(2.0 * std::f64::consts::PI / k as f64)])
    }

    /// Planar dihedral group of order `2k`: rotations by `2π/k` and the
    /// reflection in the first axis.
    pub fn dihedral(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument(
                "dihedral group order must be positive".into(),
            ));
        }
        let refl = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        Self::generate(2, &[rotation(2.0 * std::f64::consts::PI / k as f64), refl])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[DMatrix<f64>] {
        &self.elements
    }

    /// Position of `m` in the element list, if present.
    pub fn position(&self, m: &DMatrix<f64>) -> Option<usize> {
        self.elements
            .iter()
            .position(|g| (g - m).amax() <= GROUP_TOL)
    }

    pub fn contains(&self, m: &DMatrix<f64>) -> bool {
        self.position(m).is_some()
    }

    /// Whether every element of `self` lies in `other`.
    pub fn is_subgroup_of(&self, other: &Self) -> bool {
        self.n == other.n && self.elements.iter().all(|g| other.contains(g))
    }
}

/// Planar rotation by `angle`.
pub fn rotation(angle: f64) -> DMatrix<f64> {
    let (s, c) = angle.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

fn check_range(n: usize) -> Result<()> {
    if !(1..=6).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "group dimension must be in 1..=6, got {n}"
        )));
    }
    Ok(())
}

fn transposition(n: usize, a: usize, b: usize) -> DMatrix<f64> {
    let mut m = DMatrix::identity(n, n);
    m[(a, a)] = 0.0;
    m[(b, b)] = 0.0;
    m[(a, b)] = 1.0;
    m[(b, a)] = 1.0;
    m
}

/// All signed permutation matrices of size `n` (order `2^n n!`).
pub fn make_g1(n: usize) -> Result<FiniteOrthogonalGroup> {
    check_range(n)?;
    let mut gens: Vec<DMatrix<f64>> = (0..n.saturating_sub(1))
        .map(|i| transposition(n, i, i + 1))
        .collect();
    let mut flip = DMatrix::identity(n, n);
    flip[(0, 0)] = -1.0;
    gens.push(flip);
    FiniteOrthogonalGroup::generate(n, &gens)
}

/// Orthonormal basis of the zero-sum hyperplane of `R^{n+1}`, as the rows of
/// an `n × (n+1)` matrix. Row `k` is `(1, …, 1, −(k+1), 0, …, 0) / √((k+1)(k+2))`
/// with `k+1` leading ones.
pub fn helmert_basis(n: usize) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(n, n + 1);
    for k in 0..n {
        let norm = (((k + 1) * (k + 2)) as f64).sqrt();
        for j in 0..=k {
            h[(k, j)] = 1.0 / norm;
        }
        h[(k, k + 1)] = -((k + 1) as f64) / norm;
    }
    h
}

/// The symmetric group `S_{n+1}` permuting coordinates of `R^{n+1}`,
/// restricted to the zero-sum hyperplane and written in the Helmert basis
/// (order `(n+1)!`).
pub fn make_g2(n: usize) -> Result<FiniteOrthogonalGroup> {
    check_range(n)?;
    let h = helmert_basis(n);
    let gens: Vec<DMatrix<f64>> = (0..n)
        .map(|i| &h * transposition(n + 1, i, i + 1) * h.transpose())
        .collect();
    FiniteOrthogonalGroup::generate(n, &gens)
}

/// Largest entry-wise deviation of `(1/|G|) Σ_g (g u)(x, g v)` from
/// `n^{-1} (u, v) x`, over all standard basis triples `(u, x, v)`.
pub fn ample_deviation(g: &FiniteOrthogonalGroup) -> f64 {
    let n = g.n();
    // acc[a][b][c] is the n-vector Σ_g g[:, a] · g[b, c].
    let mut acc = vec![0.0; n * n * n * n];
    for m in g.elements() {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let w = m[(b, c)];
                    if w == 0.0 {
                        continue;
                    }
                    let base = ((a * n + b) * n + c) * n;
                    for r in 0..n {
                        acc[base + r] += m[(r, a)] * w;
                    }
                }
            }
        }
    }
    let inv = 1.0 / g.order() as f64;
    let mut worst = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let base = ((a * n + b) * n + c) * n;
                for r in 0..n {
                    let want = if a == c && r == b {
                        1.0 / n as f64
                    } else {
                        0.0
                    };
                    worst = worst.max((acc[base + r] * inv - want).abs());
                }
            }
        }
    }
    worst
}

/// Whether `G` is ample: the averaged identity holds within `tol`.
pub fn is_ample(g: &FiniteOrthogonalGroup, tol: f64) -> bool {
    ample_deviation(g) <= tol
}

/// Dimension of `{T : Tg = gT for all g ∈ G}`.
pub fn commutant_dim(g: &FiniteOrthogonalGroup) -> usize {
    let n = g.n();
    let mut sys = RowReducer::new(n * n);
    let mut row = vec![0.0; n * n];
    for m in g.elements() {
        for a in 0..n {
            for b in 0..n {
                row.iter_mut().for_each(|x| *x = 0.0);
                // (Tg − gT)_{ab} = Σ_c T_{ac} g_{cb} − g_{ac} T_{cb}
                for c in 0..n {
                    row[a * n + c] += m[(c, b)];
                    row[c * n + b] -= m[(a, c)];
                }
                sys.push_row(&row);
            }
        }
    }
    let reduced = sys.finish();
    let sv = reduced.svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    let rank = if smax == 0.0 {
        0
    } else {
        sv.iter().filter(|&&s| s > RANK_TOL * smax).count()
    };
    n * n - rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g1_orders() {
        assert_eq!(make_g1(1).unwrap().order(), 2);
        assert_eq!(make_g1(2).unwrap().order(), 8);
        assert_eq!(make_g1(3).unwrap().order(), 48);
        assert_eq!(make_g1(4).unwrap().order(), 384);
        for n in 1..=4 {
            assert!(make_g1(n).unwrap().contains(&-DMatrix::identity(n, n)));
        }
        assert!(make_g1(0).is_err());
        assert!(make_g1(7).is_err());
    }

    #[test]
    fn g2_orders_and_fixed_direction() {
        assert_eq!(make_g2(2).unwrap().order(), 6);
        assert_eq!(make_g2(3).unwrap().order(), 24);
        let n = 3;
        let h = helmert_basis(n);
        assert!((&h * DMatrix::from_element(n + 1, 1, 1.0)).amax() < 1e-15);
        let ones = DMatrix::from_element(n + 1, n + 1, 1.0 / (n + 1) as f64);
        for g in make_g2(n).unwrap().elements() {
            // Lift back to R^{n+1}: must be a permutation matrix fixing 1.
            let lifted = h.transpose() * g * &h + &ones;
            let fixed = &lifted * DMatrix::from_element(n + 1, 1, 1.0);
            assert!((fixed - DMatrix::from_element(n + 1, 1, 1.0)).amax() < 1e-12);
            for r in 0..=n {
                let row: Vec<f64> = lifted.row(r).iter().cloned().collect();
                assert_eq!(row.iter().filter(|x| (*x - 1.0).abs() < 1e-12).count(), 1);
                assert_eq!(row.iter().filter(|x| x.abs() < 1e-12).count(), n);
            }
        }
    }

    #[test]
    fn ample_examples() {
        assert!(is_ample(&make_g1(3).unwrap(), 1e-9));
        assert!(is_ample(&make_g2(3).unwrap(), 1e-9));
        assert!(!is_ample(&FiniteOrthogonalGroup::trivial(2), 1e-9));
    }

    #[test]
    fn commutant_examples() {
        assert_eq!(commutant_dim(&make_g1(2).unwrap()), 1);
        assert_eq!(commutant_dim(&FiniteOrthogonalGroup::trivial(2)), 4);
        assert_eq!(commutant_dim(&FiniteOrthogonalGroup::cyclic(4).unwrap()), 2);
        assert_eq!(commutant_dim(&FiniteOrthogonalGroup::central(3)), 9);
    }

    #[test]
    fn from_elements_validates() {
        let g = make_g1(2).unwrap();
        let ok =
            FiniteOrthogonalGroup::from_elements(2, g.elements().iter().rev().cloned().collect())
                .unwrap();
        assert_eq!(ok.order(), 8);
        assert!((&ok.elements()[0] - DMatrix::identity(2, 2)).amax() == 0.0);
        let mut missing = g.elements().to_vec();
        missing.pop();
        assert!(matches!(
            FiniteOrthogonalGroup::from_elements(2, missing),
            Err(Error::NotAGroup(_))
        ));
        let skew = vec![
            DMatrix::identity(2, 2),
            DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]),
        ];
        assert!(FiniteOrthogonalGroup::from_elements(2, skew).is_err());
    }
}
