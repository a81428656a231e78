//! Property-based checks of the geometric invariants.

use std::f64::consts::PI;

use amalgam_lab::geometry::{congruence, convex_hull_2d, lp_norm};
use amalgam_lab::incarnation::{
    besselian_incarnate, dual_ball, generators_from_polytope, merge_parallel,
};
use amalgam_lab::lp_experiments::{euclidean_check_set, rotated_union};
use amalgam_lab::symmetry::{projection_constant, rotation, symmetry_group};
use amalgam_lab::{IncarnatingSet, TOL};
use nalgebra::{DMatrix, DVector, Vector2};
use proptest::prelude::*;

fn planar_set() -> impl Strategy<Value = IncarnatingSet> {
    prop::collection::vec((0.0..PI, 0.1..3.0f64), 2..10).prop_filter_map("spanning", |pairs| {
        let gens = pairs
            .iter()
            .map(|&(a, r)| DVector::from_row_slice(&[r * a.cos(), r * a.sin()]))
            .collect();
        IncarnatingSet::new(2, gens, 1.0).ok()
    })
}

fn vector(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, dim)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn lp_norm_is_a_norm(x in vector(5), y in vector(5), t in -5.0..5.0f64,
                         p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0, 4.0, f64::INFINITY])) {
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let scaled: Vec<f64> = x.iter().map(|a| t * a).collect();
        let nx = lp_norm(&x, p).unwrap();
        prop_assert!(lp_norm(&sum, p).unwrap() <= nx + lp_norm(&y, p).unwrap() + 1e-12);
        prop_assert!(close(lp_norm(&scaled, p).unwrap(), t.abs() * nx, 1e-12));
    }

    #[test]
    fn hull_is_idempotent(points in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 3..40)) {
        let pts: Vec<Vector2<f64>> = points.iter().map(|&(x, y)| Vector2::new(x, y)).collect();
        if let Ok(hull) = convex_hull_2d(&pts) {
            let again = convex_hull_2d(hull.vertices()).unwrap();
            prop_assert!(again.same_vertices(&hull, 1e-12));
        }
    }

    #[test]
    fn dual_ball_support_is_the_norm(k in planar_set(), x in vector(2)) {
        let ball = dual_ball(&k).unwrap();
        let h = ball.support(&Vector2::new(x[0], x[1]));
        prop_assert!(close(h, k.norm(&x).unwrap(), 1e-10));
    }

    #[test]
    fn generators_survive_the_dual_ball(k in planar_set()) {
        let back = generators_from_polytope(&dual_ball(&k).unwrap()).unwrap();
        prop_assert!(back.approx_eq(&k.merged(), 1e-9));
    }

    #[test]
    fn edges_are_twice_the_merged_generators(k in planar_set()) {
        let ball = dual_ball(&k).unwrap();
        let v = ball.vertices();
        let perimeter: f64 = (0..v.len()).map(|i| (v[(i + 1) % v.len()] - v[i]).norm()).sum();
        let merged: f64 = merge_parallel(k.generators(), TOL).iter().map(|g| g.norm()).sum();
        prop_assert!(close(perimeter, 4.0 * merged, 1e-10));
    }

    #[test]
    fn polygons_survive_the_round_trip(angles in prop::collection::vec((0.0..PI, 0.2..2.0f64), 2..20)) {
        let mut sorted = angles.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let edges: Vec<Vector2<f64>> = sorted.iter().map(|&(a, r)| Vector2::new(a.cos(), a.sin()) * r).collect();
        let mut p = -edges.iter().sum::<Vector2<f64>>() * 0.5;
        let mut pts = Vec::new();
        for e in edges.iter().cloned().chain(edges.iter().map(|e| -e)) {
            pts.push(p);
            p += e;
        }
        let poly = convex_hull_2d(&pts).unwrap();
        let back = dual_ball(&generators_from_polytope(&poly).unwrap()).unwrap();
        prop_assert!(back.len() == poly.len() && back.max_vertex_distance(&poly) < 1e-9);
    }

    #[test]
    fn congruence_is_symmetric(k in planar_set(), angle in 0.0..2.0 * PI, s in 0.2..4.0f64) {
        let map = rotation(angle) * s;
        let moved = k.transformed(&map).unwrap();
        let t = congruence(&k, &moved);
        let u = congruence(&moved, &k);
        prop_assert!(t.is_some() && u.is_some());
        let moved_back = moved.transformed(&u.unwrap()).unwrap();
        prop_assert!(moved_back.merged().approx_eq(&k.merged(), 1e-8));
    }

    #[test]
    fn besselian_incarnation_is_exact(entries in prop::collection::vec(-3.0..3.0f64, 12),
                                      c in vector(2),
                                      p in prop::sample::select(vec![1.0, 1.5, 2.0, 4.0, 6.0])) {
        let basis = DMatrix::from_row_slice(6, 2, &entries);
        if let Ok(r) = besselian_incarnate(p, 6, &basis) {
            let q = r.evaluation_basis().unwrap();
            let ambient = lp_norm((q * DVector::from_row_slice(&c)).as_slice(), p).unwrap();
            prop_assert!(close(r.induced_norm(&c).unwrap(), ambient, 1e-10));
            prop_assert!(close(r.half_set_form().unwrap().norm(&c).unwrap(), ambient, 1e-10));
        }
    }

    #[test]
    fn union_norm_scales_with_copies(n in 2usize..=4, m in 1usize..=6, u in vector(2)) {
        let base = rotated_union(n, 1).unwrap().points;
        let union = rotated_union(n, m).unwrap().points;
        let p = 2 * n as i32;
        let lhs = union.norm(&u).unwrap().powi(p);
        let rhs = m as f64 * base.norm(&u).unwrap().powi(p);
        prop_assert!(close(lhs, rhs, 1e-10));
    }

    #[test]
    fn euclidean_constant_ignores_rotation(n in 2usize..=4, m in 1usize..=4, angle in 0.0..PI) {
        let k = rotated_union(n, m).unwrap().points;
        let turned = k.transformed(&rotation(angle)).unwrap();
        let (a, b) = (euclidean_check_set(&k), euclidean_check_set(&turned));
        prop_assert!(a.is_euclidean && b.is_euclidean);
        prop_assert!(close(a.c, b.c, 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn projection_constant_ignores_rotation_and_scale(angle in 0.0..PI, s in 0.3..3.0f64,
                                                      p in prop::sample::select(vec![3.0, 4.0])) {
        let k = rotated_union(2, 2).unwrap().points;
        let g = symmetry_group(&k).unwrap();
        let base = projection_constant(&k, p, &g).unwrap().lambda;
        let moved = k.transformed(&(rotation(angle) * s)).unwrap();
        let gm = symmetry_group(&moved).unwrap();
        let other = projection_constant(&moved, p, &gm).unwrap().lambda;
        prop_assert!(base >= 1.0);
        prop_assert!((base - other).abs() < 1e-8, "{} vs {}", base, other);
    }
}
