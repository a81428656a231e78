//! Projection constants of planar subspaces of `l_p` by invariant projections.
//!
//! `Y` is the plane with norm `‖x‖_Y = (Σ_{u∈±K} |⟨x, u⟩|^p)^{1/p}` sitting in
//! `l_p(±K)`. For an equivariant `μ` the projection `P f = c Σ f(u) μ(u)` has
//! norm
//!
//! ```text
//! ‖P‖ = |c| · sup_v ‖(⟨v, μ(u)⟩)_{u∈±K}‖_{p′} / ‖v‖_{Y*}
//! ```
//!
//! computed on an angle grid over `[0, π)` with golden-section refinement.
//! The outer infimum runs over the equivariant maps.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::equivariant::{equivariant_basis, EquivariantMap};
use super::group::FiniteOrthogonalGroup;
use crate::error::{Error, Result};
use crate::geometry::{conjugate_exponent, null_space, Vector};
use crate::incarnation::{full_sum_norm, IncarnatingSet};
use crate::optimize::{golden_max, nelder_mead, NelderMeadOptions};

/// Local maxima of the grid ratio within this relative distance of the
/// largest are refined.
const REFINE_BAND: f64 = 1e-3;

/// At most this many peaks are refined, highest first.
const MAX_PEAKS: usize = 64;

#[derive(Debug, Clone, Copy)]
pub struct LambdaOptions {
    /// Directions sampled in `[0, π)`; the unit sphere of `Y` is sampled at
    /// twice as many angles over `[0, 2π)`.
    pub grid_points: usize,
    /// Golden-section stopping width, in radians.
    pub angle_tol: f64,
    pub nelder_mead: NelderMeadOptions,
    /// Minimize over equivariant maps; when false, `μ = id` is used.
    pub optimize: bool,
}

impl Default for LambdaOptions {
    fn default() -> Self {
        Self {
            grid_points: 4096,
            angle_tol: 1e-10,
            nelder_mead: NelderMeadOptions {
                initial_step: 0.05,
                x_tol: 1e-9,
                f_tol: 1e-13,
                max_iter: 4000,
            },
            optimize: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LambdaReport {
    pub lambda: f64,
    pub p: f64,
    /// Norm of the projection built from `μ = id`.
    pub identity_lambda: f64,
    /// Coordinates of the optimal `μ` in the orthonormal equivariant basis.
    pub mu_coefficients: Vec<f64>,
    /// Optimal `μ` on the stored half-set, scaled to `Σ (u, μ(u)) = Σ |u|²`.
    pub mu_values: Vec<Vec<f64>>,
    /// Functional `v ∈ Y*` attaining the norm.
    pub worst_direction: Vec<f64>,
    pub grid_points: usize,
    pub refinement_iters: usize,
    pub nm_iterations: usize,
    pub basis_dim: usize,
    pub group_order: usize,
    pub estimated_error: f64,
    pub convention: String,
}

/// Angle sampling of the unit sphere of `Y`.
struct Sweep<'a> {
    gens: &'a [Vector],
    p: f64,
    q: f64,
    angle_tol: f64,
    phis: Vec<f64>,
    inv_radius: Vec<f64>,
}

impl<'a> Sweep<'a> {
    fn new(k: &'a IncarnatingSet, p: f64, grid_points: usize, angle_tol: f64) -> Self {
        let count = 2 * grid_points;
        let phis: Vec<f64> = (0..count)
            .map(|j| 2.0 * PI * j as f64 / count as f64)
            .collect();
        let mut sweep = Self {
            gens: k.generators(),
            p,
            q: conjugate_exponent(p),
            angle_tol,
            phis,
            inv_radius: Vec::new(),
        };
        sweep.inv_radius = sweep
            .phis
            .iter()
            .map(|&phi| 1.0 / sweep.y_norm_dir(phi))
            .collect();
        sweep
    }

    fn y_norm_dir(&self, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        let ev: Vec<f64> = self.gens.iter().map(|u| u[0] * c + u[1] * s).collect();
        full_sum_norm(&ev, self.p)
    }

    /// `⟨e_θ, b(φ)⟩` with `b(φ)` the boundary point of the unit ball at angle φ.
    fn support(&self, theta: f64, phi: f64) -> f64 {
        (theta - phi).cos() / self.y_norm_dir(phi)
    }

    fn grid_support(&self, theta: f64, j: usize) -> f64 {
        (theta - self.phis[j]).cos() * self.inv_radius[j]
    }

    /// `‖e_θ‖_{Y*}`, refined around the grid maximizer `j`.
    fn dual_norm_from(&self, theta: f64, j: usize) -> (f64, usize) {
        let h = 2.0 * PI / self.phis.len() as f64;
        let lo = self.phis[j] - h;
        let r = golden_max(
            |phi| self.support(theta, phi),
            lo,
            lo + 2.0 * h,
            self.angle_tol,
        );
        (r.value.max(self.grid_support(theta, j)), r.iterations)
    }

    /// Dual norms at `θ_k = kπ/M`. The maximizing boundary angle moves
    /// monotonically with θ, so one forward pointer locates every maximizer.
    fn dual_grid(&self, thetas: &[f64]) -> (Vec<f64>, Vec<usize>) {
        let len = self.phis.len();
        let mut argmax = Vec::with_capacity(thetas.len());
        let mut j = (0..len)
            .max_by(|&a, &b| {
                self.grid_support(thetas[0], a)
                    .total_cmp(&self.grid_support(thetas[0], b))
            })
            .unwrap_or(0);
        for &theta in thetas {
            let mut steps = 0;
            while steps < len
                && self.grid_support(theta, (j + 1) % len) >= self.grid_support(theta, j)
            {
                j = (j + 1) % len;
                steps += 1;
            }
            argmax.push(j);
        }
        let values = thetas
            .par_iter()
            .zip(argmax.par_iter())
            .map(|(&theta, &j)| self.dual_norm_from(theta, j).0)
            .collect();
        (values, argmax)
    }

    /// `‖(⟨e_θ, μ(u)⟩)_{u∈±K}‖_{p′}`.
    fn numerator(&self, mu: &[Vector], theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        let ev: Vec<f64> = mu.iter().map(|m| m[0] * c + m[1] * s).collect();
        full_sum_norm(&ev, self.q)
    }
}

/// `n / Σ_{u∈±K} (u, μ(u))`, or `None` when `μ` is degenerate.
fn projection_scale(k: &IncarnatingSet, mu: &[Vector]) -> Option<f64> {
    let pairing: f64 = 2.0
        * k.generators()
            .iter()
            .zip(mu)
            .map(|(u, m)| u.dot(m))
            .sum::<f64>();
    let magnitude: f64 = k
        .generators()
        .iter()
        .zip(mu)
        .map(|(u, m)| u.norm() * m.norm())
        .sum();
    (pairing.abs() > 1e-12 * magnitude).then(|| k.dim() as f64 / pairing)
}

/// Precomputed angle grid shared by every `μ` evaluation.
struct Grid<'a> {
    sweep: Sweep<'a>,
    thetas: Vec<f64>,
    dual: Vec<f64>,
    argmax: Vec<usize>,
}

impl<'a> Grid<'a> {
    fn new(k: &'a IncarnatingSet, p: f64, opts: &LambdaOptions) -> Self {
        let sweep = Sweep::new(k, p, opts.grid_points, opts.angle_tol);
        let m = opts.grid_points;
        let thetas: Vec<f64> = (0..m).map(|i| PI * i as f64 / m as f64).collect();
        let (dual, argmax) = sweep.dual_grid(&thetas);
        Self {
            sweep,
            thetas,
            dual,
            argmax,
        }
    }

    /// `‖e_θ‖_{Y*}` for any θ. Between grid directions `θ_k ≤ θ ≤ θ_{k+1}`
    /// the boundary maximizer lies between theirs.
    fn dual_norm(&self, theta: f64) -> f64 {
        let m = self.thetas.len();
        let len = self.sweep.phis.len();
        let t = theta.rem_euclid(PI);
        let k = ((t / PI * m as f64).floor() as usize).min(m - 1);
        // Directions θ and θ + π share the same norm; work in [0, π).
        let (lo, hi) = (
            self.argmax[k],
            if k + 1 < m {
                self.argmax[k + 1]
            } else {
                (self.argmax[0] + len / 2) % len
            },
        );
        let span = (hi + len - lo) % len;
        let j = (0..=span)
            .map(|d| (lo + d) % len)
            .max_by(|&a, &b| {
                self.sweep
                    .grid_support(t, a)
                    .total_cmp(&self.sweep.grid_support(t, b))
            })
            .unwrap_or(lo);
        self.sweep.dual_norm_from(t, j).0
    }

    fn ratios(&self, mu: &[Vector]) -> Vec<f64> {
        self.thetas
            .iter()
            .zip(&self.dual)
            .map(|(&t, &d)| self.sweep.numerator(mu, t) / d)
            .collect()
    }

    fn grid_norm(&self, k: &IncarnatingSet, mu: &[Vector]) -> f64 {
        match projection_scale(k, mu) {
            Some(c) => c.abs() * self.ratios(mu).into_iter().fold(0.0, f64::max),
            None => f64::INFINITY,
        }
    }

    /// Refines every near-maximal local maximum of the grid ratio.
    /// Returns `(norm, worst angle, golden iterations, largest grid slope)`.
    fn refine(&self, k: &IncarnatingSet, mu: &[Vector]) -> Result<(f64, f64, usize, f64)> {
        let c = projection_scale(k, mu).ok_or(Error::DegenerateMu)?.abs();
        let r = self.ratios(mu);
        let m = r.len();
        let h = PI / m as f64;
        let top = r.iter().cloned().fold(0.0, f64::max);
        // The ratio has period π, so neighbours wrap around.
        let mut slope = 0.0_f64;
        let start = r.iter().position(|&x| x == top).unwrap_or(0);
        let mut best = (top, self.thetas[start]);
        // Peaks: a plateau contributes only its right end, so flat ratios
        // (Euclidean ambient) need no refinement at all.
        let mut peaks: Vec<usize> = Vec::new();
        for i in 0..m {
            let prev = r[(i + m - 1) % m];
            let next = r[(i + 1) % m];
            slope = slope.max((next - r[i]).abs() / h);
            if r[i] >= prev && r[i] > next && r[i] >= top * (1.0 - REFINE_BAND) {
                peaks.push(i);
            }
        }
        // A ratio constant up to rounding has nothing to refine.
        let bottom = r.iter().cloned().fold(f64::MAX, f64::min);
        if top - bottom <= 1e-12 * top {
            peaks.clear();
        }
        peaks.sort_by(|&a, &b| r[b].total_cmp(&r[a]).then(a.cmp(&b)));
        peaks.truncate(MAX_PEAKS);
        let mut iterations = 0;
        for i in peaks {
            let theta = self.thetas[i];
            let f = |t: f64| self.sweep.numerator(mu, t) / self.dual_norm(t);
            let g = golden_max(f, theta - h, theta + h, self.sweep.angle_tol);
            iterations += g.iterations;
            if g.value > best.0 {
                best = (g.value, g.x);
            }
        }
        Ok((c * best.0, best.1.rem_euclid(PI), iterations, c * slope))
    }
}

/// Norm of the projection built from a fixed `μ`.
pub fn projection_norm(
    k: &IncarnatingSet,
    p: f64,
    mu: &EquivariantMap,
    opts: &LambdaOptions,
) -> Result<f64> {
    check_inputs(k, p, opts)?;
    let grid = Grid::new(k, p, opts);
    Ok(grid.refine(k, mu.values())?.0)
}

fn check_inputs(k: &IncarnatingSet, p: f64, opts: &LambdaOptions) -> Result<()> {
    if k.dim() != 2 {
        return Err(Error::UnsupportedDimension(k.dim()));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "exponent p must be >= 1, got {p}"
        )));
    }
    if opts.grid_points < 8 {
        return Err(Error::InvalidArgument(
            "grid_points must be at least 8".into(),
        ));
    }
    if !(opts.angle_tol > 0.0) {
        return Err(Error::InvalidArgument(
            "angle tolerance must be positive".into(),
        ));
    }
    Ok(())
}

/// Projection constant of the plane spanned by `K` in `l_p(±K)` with the
/// default schedule; see [`projection_constant_with`].
pub fn projection_constant(
    k: &IncarnatingSet,
    p: f64,
    g: &FiniteOrthogonalGroup,
) -> Result<LambdaReport> {
    projection_constant_with(k, p, g, &LambdaOptions::default())
}

/// Minimizes the projection norm over `G`-equivariant maps `μ`.
///
/// `μ = c₀ + W t`, where `c₀` is the identity map (always equivariant) and
/// `W` spans its orthogonal complement inside the equivariant space; this
/// removes the irrelevant overall scale.
pub fn projection_constant_with(
    k: &IncarnatingSet,
    p: f64,
    g: &FiniteOrthogonalGroup,
    opts: &LambdaOptions,
) -> Result<LambdaReport> {
    check_inputs(k, p, opts)?;
    let basis = equivariant_basis(k, g)?;
    let n = k.dim();
    let flat_basis = DMatrix::from_columns(&basis.iter().map(|b| b.flatten()).collect::<Vec<_>>());
    let identity = EquivariantMap::identity(k).flatten();
    let c0 = &identity / identity.norm();
    let grid = Grid::new(k, p, opts);

    let to_map = |flat: &DVector<f64>| EquivariantMap::from_flat(flat, n);
    let identity_lambda = grid.refine(k, to_map(&c0).values())?.0;

    let (best, nm_iterations, spread) = if opts.optimize && basis.len() > 1 {
        let a = flat_basis.transpose() * &c0;
        let w = &flat_basis * null_space(&DMatrix::from_row_slice(1, a.len(), a.as_slice()));
        let point = |t: &[f64]| &c0 + &w * DVector::from_row_slice(t);
        let objective = |t: &[f64]| grid.grid_norm(k, to_map(&point(t)).values());
        let start = vec![0.0; w.ncols()];
        let r = nelder_mead(objective, &start, opts.nelder_mead);
        (point(&r.x), r.iterations, r.spread)
    } else {
        (c0.clone(), 0, 0.0)
    };

    let mu = to_map(&best);
    let (lambda, theta, refinement_iters, slope) = grid.refine(k, mu.values())?;
    // Normalize μ so that Σ_half (u, μ(u)) = Σ_half |u|².
    let target: f64 = k.generators().iter().map(|u| u.norm_squared()).sum();
    let pairing: f64 = k
        .generators()
        .iter()
        .zip(mu.values())
        .map(|(u, m)| u.dot(m))
        .sum();
    let mu = mu.scaled(target / pairing);
    let coeffs = flat_basis.transpose() * mu.flatten();
    let dual = grid.dual_norm(theta);
    Ok(LambdaReport {
        lambda,
        p,
        identity_lambda,
        mu_coefficients: coeffs.iter().cloned().collect(),
        mu_values: mu
            .values()
            .iter()
            .map(|v| v.iter().cloned().collect())
            .collect(),
        worst_direction: vec![theta.cos() / dual, theta.sin() / dual],
        grid_points: opts.grid_points,
        refinement_iters,
        nm_iterations,
        basis_dim: basis.len(),
        group_order: g.order(),
        estimated_error: spread + slope * opts.angle_tol,
        convention: "full-set".into(),
    })
}
