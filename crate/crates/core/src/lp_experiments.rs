//! Regular-polygon sets in `l_{2n}` and the projection-constant witness.
//!
//! The vertices of the regular `(2n+2)`-gon incarnate a Euclidean plane in
//! `l_{2n}^{2n+2}`. A union of `m` rotated copies incarnates a plane that is
//! again Euclidean (the norm is multiplied by `m^{1/2n}`), so the two planes
//! are isometric; yet for `p ≠ 2` their projection constants differ, which is
//! what rules out amalgamation in `l_p`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::incarnation::{full_sum_norm, IncarnatingSet};
use crate::io;
use crate::symmetry::{projection_constant_with, symmetry_group, LambdaOptions, LambdaReport};

/// Directions sampled by [`euclidean_check`].
pub const EUCLID_DIRECTIONS: usize = 720;
/// Largest `max/min − 1` of `‖u‖ / |u|` accepted as Euclidean.
pub const EUCLID_SPREAD_TOL: f64 = 1e-10;
/// `λ_m < λ_1 − VERDICT_MARGIN` counts as a strict inequality.
pub const VERDICT_MARGIN: f64 = 1e-4;

/// `m` copies of the regular `(2n+2)`-gon in `l_{2n}`.
#[derive(Debug, Clone)]
pub struct PolygonFamily {
    pub n: usize,
    pub m: usize,
    pub points: IncarnatingSet,
}

impl PolygonFamily {
    pub fn p(&self) -> f64 {
        2.0 * self.n as f64
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "polygon parameter n must be >= 2, got {n}"
        )));
    }
    Ok(())
}

/// Half-set angles `kπ/(n+1)`, `k = 0..=n`, of the regular `(2n+2)`-gon.
pub fn polygon_k(n: usize) -> Result<PolygonFamily> {
    rotated_union(n, 1)
}

/// `⋃_{i<m} K` rotated by `πi/(nm)`.
///
/// When a rotated copy lands on points already present, the coincident
/// generators are kept as repeated entries of the half-multiset, so every
/// copy carries its full weight and `‖u‖^{2n}` scales exactly by `m`.
pub fn rotated_union(n: usize, m: usize) -> Result<PolygonFamily> {
    check_n(n)?;
    if m == 0 {
        return Err(Error::InvalidArgument(
            "number of copies must be >= 1".into(),
        ));
    }
    let gens = (0..m)
        .flat_map(|i| {
            (0..=n).map(move |k| {
                let a = k as f64 * PI / (n + 1) as f64 + PI * i as f64 / (n * m) as f64;
                DVector::from_row_slice(&[a.cos(), a.sin()])
            })
        })
        .collect();
    let points = IncarnatingSet::new(2, gens, 2.0 * n as f64)?;
    Ok(PolygonFamily { n, m, points })
}

/// Outcome of [`euclidean_check`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EuclidCheck {
    pub is_euclidean: bool,
    /// Mean of `‖u‖^p / |u|^p` over the sweep; the constant when Euclidean.
    pub c: f64,
    /// `max/min − 1` of `‖u‖ / |u|`.
    pub spread: f64,
}

pub fn euclidean_check(f: &PolygonFamily) -> EuclidCheck {
    euclidean_check_set(&f.points)
}

/// Sweeps unit directions in `[0, π)` and tests whether the full-set
/// `l_p` norm of `K` is a multiple of the Euclidean norm.
pub fn euclidean_check_set(k: &IncarnatingSet) -> EuclidCheck {
    let p = k.ambient_p();
    let ratios: Vec<f64> = (0..EUCLID_DIRECTIONS)
        .map(|j| {
            let t = PI * j as f64 / EUCLID_DIRECTIONS as f64;
            let ev: Vec<f64> = k
                .generators()
                .iter()
                .map(|u| u[0] * t.cos() + u[1] * t.sin())
                .collect();
            full_sum_norm(&ev, p)
        })
        .collect();
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let spread = max / min - 1.0;
    let c = if p.is_infinite() {
        max
    } else {
        ratios.iter().map(|r| r.powf(p)).sum::<f64>() / ratios.len() as f64
    };
    EuclidCheck {
        is_euclidean: spread < EUCLID_SPREAD_TOL,
        c,
        spread,
    }
}

/// Projection constants of `K^{[m]}` in `l_{2n}` for each `m`.
pub fn lambda_curve(n: usize, m_list: &[usize]) -> Result<Vec<LambdaReport>> {
    lambda_curve_with(n, m_list, None, &LambdaOptions::default())
}

/// [`lambda_curve`] with an optional ambient exponent replacing `2n`.
pub fn lambda_curve_with(
    n: usize,
    m_list: &[usize],
    p: Option<f64>,
    opts: &LambdaOptions,
) -> Result<Vec<LambdaReport>> {
    check_n(n)?;
    let p = p.unwrap_or(2.0 * n as f64);
    m_list
        .par_iter()
        .map(|&m| {
            let family = rotated_union(n, m)?;
            let g = symmetry_group(&family.points)?;
            projection_constant_with(&family.points, p, &g, opts)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormComparison {
    pub a: f64,
    pub b: f64,
    pub strict: bool,
}

/// Full-set `l_{4/3}` norms over the hexagon of the evaluations of the
/// vertex direction `(1/2, √3/2)` (`a`) and the diagonal `(√2/2, √2/2)` (`b`).
pub fn norm_comparison_4_3(n: usize) -> Result<NormComparison> {
    if n != 2 {
        return Err(Error::InvalidArgument(format!(
            "the l_4/3 comparison is defined for n = 2, got {n}"
        )));
    }
    let hexagon = polygon_k(2)?.points;
    let eval = |x: [f64; 2]| {
        let ev: Vec<f64> = hexagon
            .generators()
            .iter()
            .map(|u| u[0] * x[0] + u[1] * x[1])
            .collect();
        full_sum_norm(&ev, 4.0 / 3.0)
    };
    let a = eval([0.5, 3f64.sqrt() / 2.0]);
    let b = eval([2f64.sqrt() / 2.0, 2f64.sqrt() / 2.0]);
    Ok(NormComparison {
        a,
        b,
        strict: a > b + 1e-6,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveRow {
    pub m: usize,
    pub lambda: f64,
    pub euclid_c: f64,
    pub identity_lambda: f64,
    pub basis_dim: usize,
    pub group_order: usize,
    pub estimated_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub verdict_margin: f64,
    pub euclid_spread: f64,
    pub angle_tol: f64,
    pub grid_points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub version: String,
    pub seed: u64,
    pub n: usize,
    pub p: f64,
    pub rows: Vec<CurveRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_comparison: Option<NormComparison>,
    /// Some `λ_m` lies below `λ_1` by more than the verdict margin.
    pub strict_inequality_found: bool,
    /// Every `L(K^{[m]})` is Euclidean, so all the planes are isometric.
    pub isometric_premise: bool,
    pub tolerances: Tolerances,
}

/// Computes the report for `m = 1..=m_max`. The ambient exponent is `2n`
/// unless `p` overrides it.
pub fn build_counterexample(
    n: usize,
    m_max: usize,
    p: Option<f64>,
    opts: &LambdaOptions,
) -> Result<CounterexampleReport> {
    if !(2..=4).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "n must be 2, 3 or 4, got {n}"
        )));
    }
    if !(1..=16).contains(&m_max) {
        return Err(Error::InvalidArgument(format!(
            "m_max must be in 1..=16, got {m_max}"
        )));
    }
    let ms: Vec<usize> = (1..=m_max).collect();
    let curve = lambda_curve_with(n, &ms, p, opts)?;
    let mut rows = Vec::with_capacity(ms.len());
    let mut isometric_premise = true;
    for (&m, r) in ms.iter().zip(&curve) {
        let check = euclidean_check(&rotated_union(n, m)?);
        isometric_premise &= check.is_euclidean;
        rows.push(CurveRow {
            m,
            lambda: r.lambda,
            euclid_c: check.c,
            identity_lambda: r.identity_lambda,
            basis_dim: r.basis_dim,
            group_order: r.group_order,
            estimated_error: r.estimated_error,
        });
    }
    let lambda_1 = rows[0].lambda;
    let strict_inequality_found = rows
        .iter()
        .skip(1)
        .any(|r| r.lambda < lambda_1 - VERDICT_MARGIN);
    Ok(CounterexampleReport {
        version: crate::VERSION.into(),
        seed: 0,
        n,
        p: p.unwrap_or(2.0 * n as f64),
        rows,
        norm_comparison: if n == 2 {
            Some(norm_comparison_4_3(2)?)
        } else {
            None
        },
        strict_inequality_found,
        isometric_premise,
        tolerances: Tolerances {
            verdict_margin: VERDICT_MARGIN,
            euclid_spread: EUCLID_SPREAD_TOL,
            angle_tol: opts.angle_tol,
            grid_points: opts.grid_points,
        },
    })
}

/// Sibling CSV path of a JSON report: same stem, `.csv` extension.
pub fn csv_path(out: &Path) -> PathBuf {
    out.with_extension("csv")
}

/// Writes the report as JSON to `out` and its table as CSV next to it.
pub fn write_counterexample(report: &CounterexampleReport, out: &Path) -> Result<()> {
    io::write_json(out, report)?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.m.to_string(),
                io::csv_number(r.lambda),
                io::csv_number(r.euclid_c),
            ]
        })
        .collect();
    io::write_csv(&csv_path(out), &["m", "lambda", "euclid_c"], &rows)
}

/// Builds the report with default settings and writes it to `out`.
pub fn counterexample_report(n: usize, m_max: usize, out: &Path) -> Result<CounterexampleReport> {
    let report = build_counterexample(n, m_max, None, &LambdaOptions::default())?;
    write_counterexample(&report, out)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_examples() {
        let hex = polygon_k(2).unwrap();
        assert_eq!(hex.points.len(), 3);
        let oct = polygon_k(3).unwrap();
        assert_eq!(oct.points.len(), 4);
        for g in oct.points.generators() {
            assert!((g.norm() - 1.0).abs() < 1e-15);
        }
        assert!(polygon_k(1).is_err());
        assert_eq!(rotated_union(2, 2).unwrap().points.len(), 6);
        // The π/3 copy reproduces the original hexagon; it stays as a repeat.
        assert_eq!(rotated_union(2, 3).unwrap().points.len(), 9);
    }

    #[test]
    fn hexagon_constant() {
        let r = euclidean_check(&polygon_k(2).unwrap());
        assert!(r.is_euclidean);
        assert!((r.c - 2.25).abs() < 1e-12, "{}", r.c);
        let r = euclidean_check(&rotated_union(2, 2).unwrap());
        assert!(r.is_euclidean);
        assert!((r.c - 4.5).abs() < 1e-12, "{}", r.c);
    }

    #[test]
    fn square_is_not_euclidean_in_l4() {
        let sq = IncarnatingSet::new(
            2,
            vec![
                DVector::from_row_slice(&[1.0, 0.0]),
                DVector::from_row_slice(&[0.0, 1.0]),
            ],
            4.0,
        )
        .unwrap();
        assert!(!euclidean_check_set(&sq).is_euclidean);
    }

    #[test]
    fn comparison_values() {
        // Direct summation: a = (2 + 4·2^{-4/3})^{3/4}; b over cos(π/4 − kπ/3).
        let r = norm_comparison_4_3(2).unwrap();
        assert!((r.a - 2.606_663_365_690_972).abs() < 1e-12, "{}", r.a);
        assert!((r.b - 2.558_589_540_171_006_6).abs() < 1e-12, "{}", r.b);
        assert!(r.strict);
        assert!(norm_comparison_4_3(3).is_err());
    }

    #[test]
    fn curve_at_p4() {
        let reports = lambda_curve(2, &[1, 2]).unwrap();
        assert!((reports[0].lambda - 1.064_165_862_858_1).abs() < 1e-8);
        assert!((reports[1].lambda - 1.053_553_098_592).abs() < 1e-6);
    }

    #[test]
    fn euclidean_override_flattens_the_curve() {
        let r = build_counterexample(2, 3, Some(2.0), &LambdaOptions::default()).unwrap();
        assert!(r.rows.iter().all(|row| (row.lambda - 1.0).abs() < 1e-8));
        assert!(!r.strict_inequality_found);
        assert!(r.isometric_premise);
    }
}
