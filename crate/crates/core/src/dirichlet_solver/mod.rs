//! Dirichlet problems `(dd^c ψ)^n = g dV`, `ψ = 0` on the sphere, and the
//! operator `T(φ) = ψ` with data `g = R(φ) (-φ)^n f`.

pub(crate) mod banded;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DensitySpec, Domain, Field, GridDomain};
use crate::pluripotential::rayleigh;

use banded::{BandedLu, BandedMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Relative residual target for the full-grid linear solve.
    pub tol_lin: f64,
    /// Sup-norm accuracy target for ψ.
    pub tol_solver: f64,
    /// Iterative refinement steps allowed after the direct solve.
    pub max_lin_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_lin: 1e-10,
            tol_solver: 1e-8,
            max_lin_iters: 10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_lin > 0.0 && self.tol_solver > 0.0) {
            return Err(Error::InvalidParameter(
                "solver tolerances must be positive".into(),
            ));
        }
        if self.max_lin_iters == 0 {
            return Err(Error::InvalidParameter(
                "max_lin_iters must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

fn check_data(g: &[f64], expected: usize) -> Result<()> {
    if g.len() != expected {
        return Err(Error::LengthMismatch {
            what: "Monge-Ampere data",
            expected,
            got: g.len(),
        });
    }
    for (node, &v) in g.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite {
                what: "Monge-Ampere data",
                node,
            });
        }
        if v < 0.0 {
            return Err(Error::NegativeData { node, value: v });
        }
    }
    Ok(())
}

fn assemble_laplacian(grid: &GridDomain) -> BandedMatrix {
    let n = grid.nodes.len();
    let band = grid
        .neighbors
        .iter()
        .enumerate()
        .flat_map(|(k, nb)| nb.iter().flatten().map(move |&m| k.abs_diff(m)))
        .max()
        .unwrap_or(0);
    let mut a = BandedMatrix::zeros(n, band, band);
    for k in 0..n {
        let (c, diag) = grid.stencil(k);
        a.set(k, k, diag);
        for (d, nb) in grid.neighbors[k].iter().enumerate() {
            if let Some(m) = *nb {
                a.set(k, m, c[d]);
            }
        }
    }
    a
}

fn laplacian_lu(grid: &GridDomain) -> Result<&BandedLu> {
    if let Some(lu) = grid.laplacian_lu.get() {
        return Ok(lu);
    }
    let lu = assemble_laplacian(grid).factor()?;
    Ok(grid.laplacian_lu.get_or_init(|| lu))
}

/// `n = 1`: solves `Δ_h ψ = 4 g` with the cut-cell stencil.
pub fn solve_ma_fullgrid(g: &[f64], domain: &Arc<Domain>, config: &SolverConfig) -> Result<Field> {
    let grid = domain
        .as_grid()
        .ok_or(Error::UnsupportedMode("a full-grid domain"))?;
    check_data(g, grid.nodes.len())?;
    let rhs: Vec<f64> = g.iter().map(|v| 4.0 * v).collect();
    let scale = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(Field::zeros(domain.clone()));
    }
    let lu = laplacian_lu(grid)?;
    let mut psi = lu.solve(&rhs);
    let mut residual = f64::INFINITY;
    for _ in 0..config.max_lin_iters {
        let applied = grid.laplacian(&psi);
        let r: Vec<f64> = rhs.iter().zip(&applied).map(|(b, a)| b - a).collect();
        residual = r.iter().fold(0.0f64, |m, v| m.max(v.abs())) / scale;
        if residual <= config.tol_lin {
            return Field::new(domain.clone(), psi);
        }
        let correction = lu.solve(&r);
        for (p, c) in psi.iter_mut().zip(correction) {
            *p += c;
        }
    }
    Err(Error::LinearSolve {
        iterations: config.max_lin_iters,
        residual,
    })
}

/// Radial solve that inverts the discrete density of
/// [`radial_ma_density`](crate::pluripotential::radial_ma_density) exactly at
/// every node but the last.
///
/// The equations only involve differences, so the profile is marched outward
/// from `v_0 = 0` one node at a time and shifted at the end so that
/// `v(R^2) = 0`. Each step solves `d^{n-1} (K d - C) = g_i` for the centered
/// slope `d` on the branch where both factors are nonnegative.
pub fn solve_ma_radial(g: &[f64], domain: &Arc<Domain>) -> Result<Field> {
    let radial = domain
        .as_radial()
        .ok_or(Error::UnsupportedMode("a radial domain"))?;
    check_data(g, radial.s.len())?;
    let n = radial.spec.n;
    let h = radial.ds;
    let s = &radial.s;
    let m = s.len();

    let mut v = vec![0.0; m];
    // Nodes 0 and 1 together: p is the one-sided slope at 0, q the centered slope at 1.
    let p = g[0].powf(1.0 / n as f64);
    let q = if n == 1 {
        0.5 * (g[1] + p)
    } else {
        centered_slope(n, 2.0, p, g[1])
    };
    v[2] = 2.0 * h * q;
    v[1] = 0.25 * (v[2] + 2.0 * h * p);
    for i in 2..m - 1 {
        let k = 1.0 + 2.0 * s[i] / h;
        let c = 2.0 * s[i] * (v[i] - v[i - 1]) / (h * h);
        let d = if n == 1 {
            (g[i] + c) / k
        } else {
            centered_slope(n, k, c, g[i])
        };
        v[i + 1] = v[i - 1] + 2.0 * h * d;
    }
    let top = v[m - 1];
    for x in &mut v {
        *x -= top;
    }
    Field::new(domain.clone(), v)
}

/// Root of `d^{n-1} (k d - c) = g` with `d ≥ 0` and `k d ≥ c`, for `n ≥ 2`.
///
/// The left side is increasing and convex on that branch, so Newton started
/// to the right of the root converges monotonically.
fn centered_slope(n: usize, k: f64, c: f64, g: f64) -> f64 {
    let lo = (c / k).max(0.0);
    if g == 0.0 {
        return lo;
    }
    let e = n as i32 - 1;
    let mut d = lo + (g / k).powf(1.0 / n as f64);
    for _ in 0..200 {
        let pow = d.powi(e - 1);
        let f = pow * d * (k * d - c) - g;
        let df = pow * (e as f64 * (k * d - c) + k * d);
        if df <= 0.0 {
            break;
        }
        let next = (d - f / df).max(lo);
        if next >= d || d - next <= 1e-16 * d {
            d = next.min(d);
            break;
        }
        d = next;
    }
    d
}

pub fn solve_ma(g: &[f64], domain: &Arc<Domain>, config: &SolverConfig) -> Result<Field> {
    match &**domain {
        Domain::Grid(_) => solve_ma_fullgrid(g, domain, config),
        Domain::Radial(_) => solve_ma_radial(g, domain),
    }
}

/// `R(φ)` and the nodal data `R(φ) (-φ)^n f` of the problem defining `T(φ)`.
pub fn t_data(phi: &Field, f: &DensitySpec) -> Result<(f64, Vec<f64>)> {
    let r = rayleigh(phi, f)?;
    let domain = phi.domain();
    let n = domain.n() as i32;
    let fv = f.eval_on(domain)?;
    let g = phi
        .values()
        .iter()
        .zip(&fv)
        .map(|(&u, &fi)| r * (-u).max(0.0).powi(n) * fi)
        .collect();
    Ok((r, g))
}

/// `T(φ)`: the solution of `(dd^c ψ)^n = R(φ)(-φ)^n f dV` with zero boundary values.
pub fn apply_t(phi: &Field, f: &DensitySpec, config: &SolverConfig) -> Result<Field> {
    let (_, g) = t_data(phi, f)?;
    solve_ma(&g, phi.domain(), config)
}
