//! Discrete complex Hessians and the functionals built from them.
//!
//! For `n = 1` on the grid the Monge-Ampère density is `u_{zz̄} = Δu/4`.
//! For radial `u(z) = v(|z|^2)` the complex Hessian `v' I + v'' z̄ ⊗ z` has
//! determinant `(v')^{n-1} (v' + s v'')`.

use crate::error::{Error, Result};
use crate::geometry::{DensitySpec, Domain, Field};

/// Absolute tolerance on density values for plurisubharmonicity checks.
pub const TOL_PSH: f64 = 1e-8;
/// Fields with sup norm at or below this are treated as identically zero.
pub const TOL_ZERO: f64 = 1e-12;

/// Per-node `det(∂²u/∂z_j∂z̄_k)`.
#[derive(Debug, Clone)]
pub struct MaDensity {
    pub values: Vec<f64>,
    /// Nodes where the discrete Hessian fails to be nonnegative by more than `TOL_PSH`.
    pub flagged: Vec<usize>,
}

impl MaDensity {
    pub fn check_psh(&self) -> Result<()> {
        match self.flagged.first() {
            Some(&node) => Err(Error::NotPlurisubharmonic {
                node,
                value: self.values[node],
            }),
            None => Ok(()),
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn ma_density(u: &Field) -> MaDensity {
    match &**u.domain() {
        Domain::Grid(g) => {
            let values: Vec<f64> = g
                .laplacian(u.values())
                .into_iter()
                .map(|l| 0.25 * l)
                .collect();
            let flagged = values
                .iter()
                .enumerate()
                .filter(|(_, &v)| v < -TOL_PSH)
                .map(|(i, _)| i)
                .collect();
            MaDensity { values, flagged }
        }
        Domain::Radial(r) => radial_ma_density(u.values(), r.ds, &r.s, r.spec.n),
    }
}

/// Radial density from samples `v_i = v(s_i)` on a uniform `s` grid.
///
/// Interior derivatives are centered; both endpoints use one-sided
/// second-order formulas. At `s = 0` the density reduces to `(v')^n`.
/// Endpoint nodes are flagged with a tolerance proportional to `ds`.
pub fn radial_ma_density(v: &[f64], ds: f64, s: &[f64], n: usize) -> MaDensity {
    let m = v.len();
    assert!(m >= 4, "radial density needs at least four nodes");
    let mut values = Vec::with_capacity(m);
    let mut flagged = Vec::new();
    for i in 0..m {
        let (d1, d2) = if i == 0 {
            (
                (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * ds),
                (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (ds * ds),
            )
        } else if i == m - 1 {
            (
                (3.0 * v[i] - 4.0 * v[i - 1] + v[i - 2]) / (2.0 * ds),
                (2.0 * v[i] - 5.0 * v[i - 1] + 4.0 * v[i - 2] - v[i - 3]) / (ds * ds),
            )
        } else {
            (
                (v[i + 1] - v[i - 1]) / (2.0 * ds),
                (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (ds * ds),
            )
        };
        let radial = if i == 0 { d1 } else { d1 + s[i] * d2 };
        let density = d1.powi(n as i32 - 1) * radial;
        // One-sided stencils lose an order; allow for it at the ends.
        let tol = if i == 0 || i == m - 1 {
            TOL_PSH + ds * (d1.abs() + s[i] * d2.abs())
        } else {
            TOL_PSH
        };
        if d1 < -tol || radial < -tol {
            flagged.push(i);
        }
        values.push(density);
    }
    MaDensity { values, flagged }
}

/// `E(φ) = 1/(n+1) ∫ (-φ) (dd^c φ)^n`.
pub fn energy(phi: &Field) -> Result<f64> {
    phi.check_nonpositive(TOL_PSH)?;
    let density = ma_density(phi);
    density.check_psh()?;
    let n = phi.domain().n() as f64;
    let integrand: Vec<f64> = phi
        .values()
        .iter()
        .zip(&density.values)
        .map(|(&u, &d)| -u * d)
        .collect();
    Ok(phi.domain().integrate(&integrand)? / (n + 1.0))
}

/// `I_μ(φ) = 1/(n+1) ∫ (-φ)^{n+1} f dV`.
pub fn integral_i(phi: &Field, f: &DensitySpec) -> Result<f64> {
    phi.check_nonpositive(TOL_PSH)?;
    let domain = phi.domain();
    let n = domain.n();
    let fv = f.eval_on(domain)?;
    let integrand: Vec<f64> = phi
        .values()
        .iter()
        .zip(&fv)
        .map(|(&u, &fi)| (-u).max(0.0).powi(n as i32 + 1) * fi)
        .collect();
    Ok(domain.integrate(&integrand)? / (n as f64 + 1.0))
}

/// `R(φ) = E(φ) / I_μ(φ)`.
pub fn rayleigh(phi: &Field, f: &DensitySpec) -> Result<f64> {
    let sup = phi.sup_norm();
    if sup <= TOL_ZERO {
        return Err(Error::ZeroField { sup });
    }
    Ok(energy(phi)? / integral_i(phi, f)?)
}

/// `d/dt E((1-t)φ + tψ) = ∫ -(ψ - φ) (dd^c φ_t)^n`.
pub fn energy_directional_derivative(phi: &Field, psi: &Field, t: f64) -> Result<f64> {
    let path = phi.lerp(psi, t)?;
    path.check_nonpositive(TOL_PSH)?;
    let density = ma_density(&path);
    density.check_psh()?;
    let integrand: Vec<f64> = psi
        .values()
        .iter()
        .zip(phi.values())
        .zip(&density.values)
        .map(|((&b, &a), &d)| -(b - a) * d)
        .collect();
    phi.domain().integrate(&integrand)
}
