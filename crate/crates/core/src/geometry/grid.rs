use std::sync::OnceLock;

use super::{volume_form_constant, DomainSpec};
use crate::dirichlet_solver::banded::BandedLu;

/// Interior node of the Cartesian disk grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridNode {
    pub i: usize,
    pub j: usize,
    pub x: f64,
    pub y: f64,
}

/// Neighbor directions, in stencil order.
pub const EAST: usize = 0;
pub const WEST: usize = 1;
pub const NORTH: usize = 2;
pub const SOUTH: usize = 3;

/// Cell-centered lattice on `[-R, R]^2` restricted to the open disk.
///
/// The square is cut into `grid_res × grid_res` cells of side `h = 2R/grid_res`
/// and nodes sit at the cell centers. Each interior node carries its four
/// arm lengths (as fractions of `h`) to the next interior node or to the
/// circle, whichever comes first.
#[derive(Debug)]
pub struct GridDomain {
    pub spec: DomainSpec,
    pub res: usize,
    pub h: f64,
    pub nodes: Vec<GridNode>,
    /// `res * res` lattice, row-major in `j`, mapping to interior indices.
    pub index: Vec<Option<usize>>,
    pub neighbors: Vec<[Option<usize>; 4]>,
    pub arms: Vec<[f64; 4]>,
    /// Clipped cell areas times the `dV` constant.
    pub weights: Vec<f64>,
    pub(crate) laplacian_lu: OnceLock<BandedLu>,
}

impl GridDomain {
    pub(super) fn new(spec: DomainSpec) -> Self {
        let res = spec.grid_res.expect("validated full-grid spec");
        let radius = spec.radius;
        let h = 2.0 * radius / res as f64;
        let coord = |i: usize| (i as f64 - (res as f64 - 1.0) / 2.0) * h;
        let r2 = radius * radius;
        let inside = |x: f64, y: f64| x * x + y * y < r2 * (1.0 - 1e-12);

        let mut nodes = Vec::new();
        let mut index = vec![None; res * res];
        for j in 0..res {
            for i in 0..res {
                let (x, y) = (coord(i), coord(j));
                if inside(x, y) {
                    index[j * res + i] = Some(nodes.len());
                    nodes.push(GridNode { i, j, x, y });
                }
            }
        }

        let lookup = |i: isize, j: isize| -> Option<usize> {
            if i < 0 || j < 0 || i >= res as isize || j >= res as isize {
                None
            } else {
                index[j as usize * res + i as usize]
            }
        };

        let mut neighbors = Vec::with_capacity(nodes.len());
        let mut arms = Vec::with_capacity(nodes.len());
        for p in &nodes {
            let (i, j) = (p.i as isize, p.j as isize);
            let nb = [
                lookup(i + 1, j),
                lookup(i - 1, j),
                lookup(i, j + 1),
                lookup(i, j - 1),
            ];
            // ρ restricted to a grid line is quadratic, so the crossing is exact.
            let half_x = (r2 - p.y * p.y).max(0.0).sqrt();
            let half_y = (r2 - p.x * p.x).max(0.0).sqrt();
            let cut = [
                (half_x - p.x) / h,
                (p.x + half_x) / h,
                (half_y - p.y) / h,
                (p.y + half_y) / h,
            ];
            let mut a = [1.0; 4];
            for d in 0..4 {
                if nb[d].is_none() {
                    a[d] = cut[d].clamp(f64::MIN_POSITIVE, 1.0);
                }
            }
            neighbors.push(nb);
            arms.push(a);
        }

        let weights = cell_weights(res, h, radius, &index, &nodes)
            .into_iter()
            .map(|w| w * volume_form_constant(1))
            .collect();

        Self {
            spec,
            res,
            h,
            nodes,
            index,
            neighbors,
            arms,
            weights,
            laplacian_lu: OnceLock::new(),
        }
    }

    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - (self.res as f64 - 1.0) / 2.0) * self.h
    }

    /// Stencil coefficients `[east, west, north, south]` and the diagonal.
    pub(crate) fn stencil(&self, node: usize) -> ([f64; 4], f64) {
        let a = self.arms[node];
        let h2 = self.h * self.h;
        let c = [
            2.0 / (h2 * a[EAST] * (a[EAST] + a[WEST])),
            2.0 / (h2 * a[WEST] * (a[EAST] + a[WEST])),
            2.0 / (h2 * a[NORTH] * (a[NORTH] + a[SOUTH])),
            2.0 / (h2 * a[SOUTH] * (a[NORTH] + a[SOUTH])),
        ];
        let diag = -2.0 / h2 * (1.0 / (a[EAST] * a[WEST]) + 1.0 / (a[NORTH] * a[SOUTH]));
        (c, diag)
    }

    /// Shortley–Weller Laplacian of a field with zero boundary values.
    pub fn laplacian(&self, values: &[f64]) -> Vec<f64> {
        self.laplacian_with_trace(values, |_, _| 0.0)
    }

    /// Shortley–Weller Laplacian with boundary values taken from `trace` at
    /// the points where the arms meet the circle.
    pub fn laplacian_with_trace(
        &self,
        values: &[f64],
        trace: impl Fn(f64, f64) -> f64,
    ) -> Vec<f64> {
        debug_assert_eq!(values.len(), self.nodes.len());
        let h = self.h;
        (0..self.nodes.len())
            .map(|k| {
                let (c, diag) = self.stencil(k);
                let p = self.nodes[k];
                let a = self.arms[k];
                let mut acc = diag * values[k];
                for d in 0..4 {
                    let v = match self.neighbors[k][d] {
                        Some(m) => values[m],
                        None => {
                            let (bx, by) = match d {
                                EAST => (p.x + a[d] * h, p.y),
                                WEST => (p.x - a[d] * h, p.y),
                                NORTH => (p.x, p.y + a[d] * h),
                                _ => (p.x, p.y - a[d] * h),
                            };
                            trace(bx, by)
                        }
                    };
                    acc += c[d] * v;
                }
                acc
            })
            .collect()
    }
}

/// Lebesgue area of `[x0, x1] × [y0, y1] ∩ {x^2 + y^2 < R^2}`.
pub fn disk_square_area(x0: f64, x1: f64, y0: f64, y1: f64, radius: f64) -> f64 {
    let r2 = radius * radius;
    let lo = x0.max(-radius);
    let hi = x1.min(radius);
    if lo >= hi || y0 >= y1 {
        return 0.0;
    }
    let half = |x: f64| (r2 - x * x).max(0.0).sqrt();
    // Antiderivative of half(x).
    let prim = |x: f64| {
        let t = (x / radius).clamp(-1.0, 1.0);
        0.5 * (x * half(x) + r2 * t.asin())
    };

    let mut breaks = vec![lo, hi];
    for y in [y0, y1] {
        if y.abs() < radius {
            let xb = (r2 - y * y).sqrt();
            breaks.extend([-xb, xb]);
        }
    }
    breaks.retain(|&b| b >= lo && b <= hi);
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();

    let mut area = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let m = 0.5 * (a + b);
        let g = half(m);
        let top_is_circle = g <= y1;
        let bottom_is_circle = -g >= y0;
        let top_m = if top_is_circle { g } else { y1 };
        let bottom_m = if bottom_is_circle { -g } else { y0 };
        if top_m <= bottom_m {
            continue;
        }
        let top = if top_is_circle {
            prim(b) - prim(a)
        } else {
            y1 * (b - a)
        };
        let bottom = if bottom_is_circle {
            -(prim(b) - prim(a))
        } else {
            y0 * (b - a)
        };
        area += top - bottom;
    }
    area
}

fn cell_weights(
    res: usize,
    h: f64,
    radius: f64,
    index: &[Option<usize>],
    nodes: &[GridNode],
) -> Vec<f64> {
    let half = 0.5 * h;
    let coord = |i: usize| (i as f64 - (res as f64 - 1.0) / 2.0) * h;
    let area_of = |i: usize, j: usize| {
        let (x, y) = (coord(i), coord(j));
        disk_square_area(x - half, x + half, y - half, y + half, radius)
    };

    let mut w: Vec<f64> = nodes.iter().map(|p| area_of(p.i, p.j)).collect();

    // Cells whose center lies outside the disk still overlap it; their
    // overlap goes to the nearest interior nodes so the weights sum to the
    // disk area.
    for j in 0..res {
        for i in 0..res {
            if index[j * res + i].is_some() {
                continue;
            }
            let sliver = area_of(i, j);
            if sliver <= 0.0 {
                continue;
            }
            let mut targets = Vec::new();
            for reach in 1..=3isize {
                for dj in -reach..=reach {
                    for di in -reach..=reach {
                        if di.abs().max(dj.abs()) != reach {
                            continue;
                        }
                        // Prefer the axis neighbours on the first ring.
                        if reach == 1 && di != 0 && dj != 0 {
                            continue;
                        }
                        let (ii, jj) = (i as isize + di, j as isize + dj);
                        if ii < 0 || jj < 0 || ii >= res as isize || jj >= res as isize {
                            continue;
                        }
                        if let Some(k) = index[jj as usize * res + ii as usize] {
                            targets.push(k);
                        }
                    }
                }
                if !targets.is_empty() {
                    break;
                }
            }
            let share = sliver / targets.len().max(1) as f64;
            for k in targets {
                w[k] += share;
            }
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, Domain};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn grid(radius: f64, res: usize) -> std::sync::Arc<Domain> {
        build_domain(&DomainSpec::full_grid(radius, res)).unwrap()
    }

    #[test]
    fn interior_count_matches_area_ratio() {
        let d = grid(1.0, 65);
        let expected = PI / 4.0 * 65.0 * 65.0;
        let got = d.len() as f64;
        assert!(
            (got - expected).abs() / expected < 0.02,
            "{got} vs {expected}"
        );
    }

    #[test]
    fn mask_is_strict() {
        let d = grid(0.5, 33);
        let g = d.as_grid().unwrap();
        assert!(g.nodes.iter().all(|p| (p.x * p.x + p.y * p.y).sqrt() < 0.5));
        assert!(g.arms.iter().flatten().all(|&a| a > 0.0 && a <= 1.0));
    }

    #[test]
    fn deterministic() {
        let a = grid(1.0, 33);
        let b = grid(1.0, 33);
        let (a, b) = (a.as_grid().unwrap(), b.as_grid().unwrap());
        assert_eq!(a.nodes, b.nodes);
        assert_eq!(a.arms, b.arms);
        assert_eq!(a.weights, b.weights);
    }

    #[test]
    fn square_disk_area_cases() {
        // Fully inside, fully outside, whole disk, half disk.
        assert_relative_eq!(
            disk_square_area(-0.1, 0.1, -0.1, 0.1, 1.0),
            0.04,
            max_relative = 1e-14
        );
        assert_eq!(disk_square_area(2.0, 3.0, 0.0, 1.0, 1.0), 0.0);
        assert_relative_eq!(
            disk_square_area(-2.0, 2.0, -2.0, 2.0, 1.0),
            PI,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            disk_square_area(-2.0, 2.0, 0.0, 2.0, 1.0),
            PI / 2.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            disk_square_area(0.0, 2.0, 0.0, 2.0, 1.0),
            PI / 4.0,
            max_relative = 1e-14
        );
        // Corner cell: brute-force midpoint count.
        let (x0, x1, y0, y1) = (0.6, 0.8, 0.5, 0.7);
        let m = 2000;
        let mut hits = 0usize;
        for a in 0..m {
            for b in 0..m {
                let x = x0 + (a as f64 + 0.5) * (x1 - x0) / m as f64;
                let y = y0 + (b as f64 + 0.5) * (y1 - y0) / m as f64;
                if x * x + y * y < 1.0 {
                    hits += 1;
                }
            }
        }
        let brute = hits as f64 * (x1 - x0) * (y1 - y0) / (m * m) as f64;
        assert_relative_eq!(
            disk_square_area(x0, x1, y0, y1, 1.0),
            brute,
            max_relative = 1e-4
        );
    }

    #[test]
    fn laplacian_exact_on_quadratics() {
        let d = grid(1.0, 33);
        let g = d.as_grid().unwrap();
        let u: Vec<f64> = g
            .nodes
            .iter()
            .map(|p| p.x * p.x + p.y * p.y - 1.0)
            .collect();
        for v in g.laplacian(&u) {
            assert_relative_eq!(v, 4.0, max_relative = 1e-9);
        }
        let harm: Vec<f64> = g.nodes.iter().map(|p| p.x * p.x - p.y * p.y).collect();
        for v in g.laplacian_with_trace(&harm, |x, y| x * x - y * y) {
            assert!(v.abs() < 1e-7, "{v}");
        }
    }
}
