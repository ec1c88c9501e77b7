//! Dirichlet ground state of `−Δ` on the cross-polytope `{Σ|μᵢ| ≤ 1/2}`.
//!
//! Nodes sit at `μ = k·h` with integer `k ∈ {−K, …, K}^p` and `h = 1/(2K)`,
//! so the boundary `Σ|kᵢ| = K` passes exactly through grid nodes and every
//! exterior neighbor of an interior node lies on it. The standard `2p+1`
//! point stencil then converges at `O(h²)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest bounding-box node count accepted by the solver.
pub const MAX_GRID_NODES: usize = 20_000_000;
const MIN_INTERIOR_PER_AXIS: usize = 8;
const RESIDUAL_TARGET: f64 = 1e-9;
const MAX_OUTER_ITERATIONS: usize = 500;
const UNSET: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexSpectrum {
    pub p: usize,
    /// Interior grid points per axis actually used (always odd).
    pub grid_points_per_axis: usize,
    pub h: f64,
    /// Smallest eigenvalue of the discrete Dirichlet Laplacian.
    pub energy: f64,
    /// Outer inverse-iteration steps.
    pub iterations: usize,
    /// Total inner conjugate-gradient steps.
    pub inner_iterations: usize,
    /// `‖Ax − Ex‖` for the unit-norm eigenvector estimate.
    pub residual: f64,
    pub interior_nodes: usize,
}

/// Discrete ground state; `values` are scaled to a maximum of 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexGroundState {
    pub spectrum: SimplexSpectrum,
    /// Node coordinates, `p` per node.
    pub coordinates: Vec<f64>,
    pub values: Vec<f64>,
}

impl SimplexGroundState {
    pub fn point(&self, i: usize) -> &[f64] {
        let p = self.spectrum.p;
        &self.coordinates[i * p..(i + 1) * p]
    }
}

/// Default interior points per axis: 999, 399, 79, 31 for `p` = 1…4.
pub fn default_grid(p: usize) -> Option<usize> {
    match p {
        1 => Some(999),
        2 => Some(399),
        3 => Some(79),
        4 => Some(31),
        _ => None,
    }
}

struct Grid {
    p: usize,
    h: f64,
    nodes: Vec<i32>,
    /// `2p` neighbor indices per node, `UNSET` on the boundary.
    neighbors: Vec<u32>,
}

impl Grid {
    fn len(&self) -> usize {
        self.nodes.len() / self.p
    }

    fn build(p: usize, half: usize) -> Result<Self> {
        let side = 2 * half + 1;
        let box_nodes = (side as f64).powi(p as i32);
        if box_nodes > MAX_GRID_NODES as f64 {
            return Err(Error::ResourceLimit(format!(
                "grid with {side}^{p} nodes exceeds the limit of {MAX_GRID_NODES}"
            )));
        }
        let box_nodes = box_nodes as usize;
        let k = half as i32;
        let mut lookup = vec![UNSET; box_nodes];
        let mut nodes = Vec::new();
        let mut count: u32 = 0;
        let mut idx = vec![0usize; p];
        for (flat, slot) in lookup.iter_mut().enumerate() {
            let mut rem = flat;
            for d in (0..p).rev() {
                idx[d] = rem % side;
                rem /= side;
            }
            let l1: i32 = idx.iter().map(|&i| (i as i32 - k).abs()).sum();
            if l1 < k {
                *slot = count;
                count += 1;
                nodes.extend(idx.iter().map(|&i| i as i32 - k));
            }
        }
        let n = count as usize;
        let strides: Vec<usize> = (0..p).map(|d| side.pow((p - 1 - d) as u32)).collect();
        let mut neighbors = vec![UNSET; n * 2 * p];
        for i in 0..n {
            let node = &nodes[i * p..(i + 1) * p];
            let flat: usize = node
                .iter()
                .zip(&strides)
                .map(|(&c, &s)| (c + k) as usize * s)
                .sum();
            for d in 0..p {
                // interior nodes satisfy |c| < K, so both neighbors stay inside the box
                neighbors[i * 2 * p + 2 * d] = lookup[flat - strides[d]];
                neighbors[i * 2 * p + 2 * d + 1] = lookup[flat + strides[d]];
            }
        }
        Ok(Self {
            p,
            h: 1.0 / (2.0 * half as f64),
            nodes,
            neighbors,
        })
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let p2 = 2 * self.p;
        let diag = p2 as f64;
        let inv_h2 = 1.0 / (self.h * self.h);
        let neighbors = &self.neighbors;
        y.par_iter_mut()
            .with_min_len(4096)
            .enumerate()
            .for_each(|(i, yi)| {
                let mut s = diag * x[i];
                for &nb in &neighbors[i * p2..(i + 1) * p2] {
                    if nb != UNSET {
                        s -= x[nb as usize];
                    }
                }
                *yi = s * inv_h2;
            });
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Conjugate gradients for `A y = b` from `y`; stops at `‖r‖ ≤ tol`. Returns the step count.
fn conjugate_gradient(grid: &Grid, b: &[f64], y: &mut [f64], tol: f64, max_iter: usize) -> usize {
    let n = b.len();
    let mut ay = vec![0.0; n];
    grid.apply(y, &mut ay);
    let mut r: Vec<f64> = b.iter().zip(&ay).map(|(bi, ai)| bi - ai).collect();
    let mut d = r.clone();
    let mut rr = dot(&r, &r);
    let mut ad = vec![0.0; n];
    for it in 0..max_iter {
        if rr.sqrt() <= tol {
            return it;
        }
        grid.apply(&d, &mut ad);
        let step = rr / dot(&d, &ad);
        for i in 0..n {
            y[i] += step * d[i];
            r[i] -= step * ad[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            d[i] = r[i] + beta * d[i];
        }
    }
    max_iter
}

fn solve(p: usize, grid_points_per_axis: usize) -> Result<(Grid, SimplexSpectrum, Vec<f64>)> {
    if !(1..=4).contains(&p) {
        return Err(invalid("the simplex solver supports p = 1..4"));
    }
    if grid_points_per_axis < MIN_INTERIOR_PER_AXIS {
        return Err(invalid(format!(
            "grid too coarse: at least {MIN_INTERIOR_PER_AXIS} interior points per axis are required"
        )));
    }
    // An odd count puts the boundary through grid nodes.
    let g = grid_points_per_axis | 1;
    let half = g.div_ceil(2);
    let grid = Grid::build(p, half)?;
    let n = grid.len();

    // Start from cos(π Σ|μᵢ|), positive inside and zero on the boundary.
    let mut x: Vec<f64> = (0..n)
        .map(|i| {
            let l1: i32 = grid.nodes[i * p..(i + 1) * p].iter().map(|c| c.abs()).sum();
            (std::f64::consts::PI * l1 as f64 * grid.h).cos()
        })
        .collect();
    let nx = norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);

    let mut ax = vec![0.0; n];
    grid.apply(&x, &mut ax);
    let mut energy = dot(&x, &ax);
    let mut residual = f64::INFINITY;
    let mut inner_total = 0;
    let max_inner = (50 * n).max(10_000);
    for outer in 1..=MAX_OUTER_ITERATIONS {
        // inexact solves: accuracy tracks the current eigen-residual
        let tol = if residual.is_finite() {
            (1e-3 * residual / energy).clamp(1e-14, 1e-6)
        } else {
            1e-6
        };
        let mut y: Vec<f64> = x.iter().map(|v| v / energy).collect();
        inner_total += conjugate_gradient(&grid, &x, &mut y, tol, max_inner);
        let ny = norm(&y);
        if !(ny > 0.0 && ny.is_finite()) {
            return Err(Error::Numerical(
                "inverse iteration produced a degenerate vector".into(),
            ));
        }
        x = y.into_iter().map(|v| v / ny).collect();
        grid.apply(&x, &mut ax);
        energy = dot(&x, &ax);
        residual = ax
            .iter()
            .zip(&x)
            .map(|(a, v)| (a - energy * v).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= RESIDUAL_TARGET * energy {
            let spectrum = SimplexSpectrum {
                p,
                grid_points_per_axis: g,
                h: grid.h,
                energy,
                iterations: outer,
                inner_iterations: inner_total,
                residual,
                interior_nodes: n,
            };
            return Ok((grid, spectrum, x));
        }
    }
    Err(Error::Convergence {
        iterations: MAX_OUTER_ITERATIONS,
        residual,
    })
}

/// Smallest Dirichlet eigenvalue on the cross-polytope, `p ∈ {1, …, 4}`.
/// An even `grid_points_per_axis` is raised by one.
pub fn simplex_ground_energy(p: usize, grid_points_per_axis: usize) -> Result<SimplexSpectrum> {
    solve(p, grid_points_per_axis).map(|(_, s, _)| s)
}

/// As [`simplex_ground_energy`], also returning the eigenvector on the interior nodes.
pub fn simplex_ground_state(p: usize, grid_points_per_axis: usize) -> Result<SimplexGroundState> {
    let (grid, spectrum, x) = solve(p, grid_points_per_axis)?;
    let peak = x
        .iter()
        .copied()
        .fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
    let values = x.iter().map(|v| v / peak).collect();
    let coordinates = grid.nodes.iter().map(|&c| c as f64 * grid.h).collect();
    Ok(SimplexGroundState {
        spectrum,
        coordinates,
        values,
    })
}

/// Two-grid Richardson extrapolation `(4E_h/2 − E_h)/3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichardsonEstimate {
    pub coarse: SimplexSpectrum,
    pub fine: SimplexSpectrum,
    pub extrapolated: f64,
}

/// Solves on `G` and `2G + 1` interior points per axis (halving `h`) and extrapolates.
pub fn richardson_ground_energy(
    p: usize,
    grid_points_per_axis: usize,
) -> Result<RichardsonEstimate> {
    let coarse = simplex_ground_energy(p, grid_points_per_axis)?;
    let fine = simplex_ground_energy(p, 2 * coarse.grid_points_per_axis + 1)?;
    let extrapolated = (4.0 * fine.energy - coarse.energy) / 3.0;
    Ok(RichardsonEstimate {
        coarse,
        fine,
        extrapolated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn one_dimensional_eigenvalue_is_exact_discrete_sine() {
        let s = simplex_ground_energy(1, 99).unwrap();
        let h = s.h;
        assert_eq!(s.interior_nodes, 99);
        assert_relative_eq!(
            s.energy,
            4.0 / (h * h) * (PI * h / 2.0).sin().powi(2),
            max_relative = 1e-9
        );
    }

    #[test]
    fn two_dimensional_eigenvalue_is_exact_discrete_cosine() {
        let s = simplex_ground_energy(2, 63).unwrap();
        let h = s.h;
        // (cos 2πx + cos 2πy)/2 is an exact discrete eigenvector
        assert_relative_eq!(
            s.energy,
            4.0 / (h * h) * (PI * h).sin().powi(2),
            max_relative = 1e-9
        );
        assert!(s.residual <= 1e-8 * s.energy);
    }

    #[test]
    fn even_grid_is_bumped() {
        let s = simplex_ground_energy(1, 20).unwrap();
        assert_eq!(s.grid_points_per_axis, 21);
        assert_relative_eq!(s.h, 1.0 / 22.0, max_relative = 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            simplex_ground_energy(2, 7),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            simplex_ground_energy(5, 31),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            simplex_ground_energy(4, 301),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn richardson_one_dimensional() {
        let r = richardson_ground_energy(1, 99).unwrap();
        assert!((r.extrapolated - PI * PI).abs() / (PI * PI) < 1e-6);
    }

    #[test]
    fn energy_approaches_limit_from_below() {
        // the 2p+1 stencil underestimates smooth Dirichlet eigenvalues
        for (p, limit) in [(1, PI * PI), (2, 4.0 * PI * PI)] {
            let coarse = simplex_ground_energy(p, 21).unwrap().energy;
            let fine = simplex_ground_energy(p, 43).unwrap().energy;
            assert!(coarse < fine && fine < limit);
        }
        let coarse = simplex_ground_energy(3, 15).unwrap().energy;
        let fine = simplex_ground_energy(3, 31).unwrap().energy;
        assert!(coarse < fine);
    }

    #[test]
    fn planar_ground_state_is_product_cosine() {
        let g = simplex_ground_state(2, 99).unwrap();
        for i in 0..g.values.len() {
            let mu = g.point(i);
            let expected = ((2.0 * PI * mu[0]).cos() + (2.0 * PI * mu[1]).cos()) / 2.0;
            assert!((g.values[i] - expected).abs() < 1e-2);
        }
    }
}
