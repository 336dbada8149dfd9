use std::sync::Arc;

use super::{DensitySpec, Domain};
use crate::error::{Error, Result};
use crate::pluripotential::TOL_PSH;

/// Nodal values of a function on a discretized ball with zero boundary trace.
///
/// On the grid the values live on interior nodes only and the trace is zero
/// implicitly; in radial mode the last node is `s = R^2` and holds `0`.
#[derive(Debug, Clone)]
pub struct Field {
    domain: Arc<Domain>,
    values: Vec<f64>,
}

impl Field {
    pub fn new(domain: Arc<Domain>, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::LengthMismatch {
                what: "field",
                expected: domain.len(),
                got: values.len(),
            });
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "field",
                node,
            });
        }
        if let Domain::Radial(r) = &*domain {
            let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let last = values[r.last()];
            if last.abs() > 1e-12 * (1.0 + scale) {
                return Err(Error::NonzeroTrace { value: last });
            }
        }
        Ok(Self { domain, values })
    }

    pub fn zeros(domain: Arc<Domain>) -> Self {
        let values = vec![0.0; domain.len()];
        Self { domain, values }
    }

    /// Samples a function of `s = |z|^2`.
    pub fn from_radial_fn(domain: Arc<Domain>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..domain.len()).map(|i| f(domain.node_s(i))).collect();
        Self::new(domain, values)
    }

    /// Samples a function of `(x, y)` on a full grid.
    pub fn from_xy_fn(domain: Arc<Domain>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = match &*domain {
            Domain::Grid(g) => g.nodes.iter().map(|p| f(p.x, p.y)).collect(),
            Domain::Radial(_) => return Err(Error::UnsupportedMode("a full-grid domain")),
        };
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            domain: self.domain.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// `(1 - t) self + t other`.
    pub fn lerp(&self, other: &Field, t: f64) -> Result<Self> {
        self.check_same_domain(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (1.0 - t) * a + t * b)
            .collect();
        Ok(Self {
            domain: self.domain.clone(),
            values,
        })
    }

    pub fn sub(&self, other: &Field) -> Result<Self> {
        self.check_same_domain(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            domain: self.domain.clone(),
            values,
        })
    }

    /// `‖self - other‖_∞`.
    pub fn sup_distance(&self, other: &Field) -> Result<f64> {
        Ok(self.sub(other)?.sup_norm())
    }

    pub fn check_same_domain(&self, other: &Field) -> Result<()> {
        let same =
            Arc::ptr_eq(&self.domain, &other.domain) || self.domain.spec() == other.domain.spec();
        if same {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }

    /// Errors if some value exceeds `tol`.
    pub fn check_nonpositive(&self, tol: f64) -> Result<()> {
        match self.values.iter().position(|&v| v > tol) {
            Some(node) => Err(Error::PositiveField {
                node,
                value: self.values[node],
            }),
            None => Ok(()),
        }
    }
}

/// `‖φ‖_{L^{n+1}(Ω, μ)} = (∫ (-φ)^{n+1} f dV)^{1/(n+1)}`.
pub fn norm_lnp1_mu(phi: &Field, f: &DensitySpec) -> Result<f64> {
    phi.check_nonpositive(TOL_PSH)?;
    let domain = phi.domain();
    let p = domain.n() as i32 + 1;
    let fv = f.eval_on(domain)?;
    let integrand: Vec<f64> = phi
        .values()
        .iter()
        .zip(&fv)
        .map(|(&v, &fi)| (-v).max(0.0).powi(p) * fi)
        .collect();
    Ok(domain.integrate(&integrand)?.powf(1.0 / p as f64))
}
