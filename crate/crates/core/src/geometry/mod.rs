//! Balls in `C^n`, their discretizations, quadrature and the weighted norms.
//!
//! Volumes are taken against `dV = β^n` with `β = dd^c|z|^2`. With
//! `dd^c = i∂∂̄` this form is `2^n n!` times Lebesgue measure on `R^{2n}`,
//! and every integral reported by this crate carries that factor.

mod density;
mod field;
mod grid;
mod radial;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use density::DensitySpec;
pub use field::{norm_lnp1_mu, Field};
pub use grid::{disk_square_area, GridDomain, GridNode};
pub use radial::RadialDomain;

pub const MIN_GRID_RES: usize = 17;
pub const MIN_RADIAL_RES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Cartesian grid on the disk, `n = 1` only.
    FullGrid,
    /// Functions of `s = |z|^2`, any `n`.
    Radial,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::FullGrid => "full-grid",
            Mode::Radial => "radial",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full-grid" => Ok(Mode::FullGrid),
            "radial" => Ok(Mode::Radial),
            other => Err(Error::InvalidDomain(format!("unknown mode `{other}`"))),
        }
    }
}

/// The ball `B(0, radius) ⊂ C^n` together with its discretization choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub n: usize,
    pub radius: f64,
    pub mode: Mode,
    /// Points per real axis (full-grid).
    pub grid_res: Option<usize>,
    /// Number of nodes on `[0, radius^2]` (radial).
    pub radial_res: Option<usize>,
}

impl DomainSpec {
    pub fn full_grid(radius: f64, grid_res: usize) -> Self {
        Self {
            n: 1,
            radius,
            mode: Mode::FullGrid,
            grid_res: Some(grid_res),
            radial_res: None,
        }
    }

    pub fn radial(n: usize, radius: f64, radial_res: usize) -> Self {
        Self {
            n,
            radius,
            mode: Mode::Radial,
            grid_res: None,
            radial_res: Some(radial_res),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidDomain(
                "complex dimension must be at least 1".into(),
            ));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::InvalidDomain(format!(
                "radius must be positive, got {}",
                self.radius
            )));
        }
        match self.mode {
            Mode::FullGrid => {
                if self.n != 1 {
                    return Err(Error::InvalidDomain(format!(
                        "full-grid mode requires n = 1, got n = {}",
                        self.n
                    )));
                }
                match self.grid_res {
                    Some(r) if r >= MIN_GRID_RES => {}
                    Some(r) => {
                        return Err(Error::InvalidDomain(format!(
                            "grid_res must be at least {MIN_GRID_RES}, got {r}"
                        )))
                    }
                    None => return Err(Error::InvalidDomain("grid_res is required".into())),
                }
            }
            Mode::Radial => match self.radial_res {
                Some(r) if r >= MIN_RADIAL_RES => {}
                Some(r) => {
                    return Err(Error::InvalidDomain(format!(
                        "radial_res must be at least {MIN_RADIAL_RES}, got {r}"
                    )))
                }
                None => return Err(Error::InvalidDomain("radial_res is required".into())),
            },
        }
        Ok(())
    }
}

/// Density of `dV` against Lebesgue measure on `R^{2n}`: `2^n n!`.
pub fn volume_form_constant(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * 2.0 * k as f64)
}

/// `ρ(z) = |z|^2 - R^2`; `point` holds `(Re z_j, Im z_j)` pairs.
pub fn defining_function(spec: &DomainSpec, point: &[[f64; 2]]) -> f64 {
    debug_assert_eq!(point.len(), spec.n);
    let s: f64 = point.iter().map(|[a, b]| a * a + b * b).sum();
    s - spec.radius * spec.radius
}

/// A discretized ball.
#[derive(Debug)]
pub enum Domain {
    Grid(GridDomain),
    Radial(RadialDomain),
}

pub fn build_domain(spec: &DomainSpec) -> Result<Arc<Domain>> {
    spec.validate()?;
    let domain = match spec.mode {
        Mode::FullGrid => Domain::Grid(GridDomain::new(spec.clone())),
        Mode::Radial => Domain::Radial(RadialDomain::new(spec.clone())),
    };
    Ok(Arc::new(domain))
}

impl Domain {
    pub fn spec(&self) -> &DomainSpec {
        match self {
            Domain::Grid(g) => &g.spec,
            Domain::Radial(r) => &r.spec,
        }
    }

    pub fn n(&self) -> usize {
        self.spec().n
    }

    pub fn radius(&self) -> f64 {
        self.spec().radius
    }

    pub fn mode(&self) -> Mode {
        self.spec().mode
    }

    /// Number of unknowns carried by a field on this domain.
    pub fn len(&self) -> usize {
        match self {
            Domain::Grid(g) => g.nodes.len(),
            Domain::Radial(r) => r.s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `|z|^2` at node `i`.
    pub fn node_s(&self, i: usize) -> f64 {
        match self {
            Domain::Grid(g) => {
                let p = &g.nodes[i];
                p.x * p.x + p.y * p.y
            }
            Domain::Radial(r) => r.s[i],
        }
    }

    pub fn as_grid(&self) -> Option<&GridDomain> {
        match self {
            Domain::Grid(g) => Some(g),
            Domain::Radial(_) => None,
        }
    }

    pub fn as_radial(&self) -> Option<&RadialDomain> {
        match self {
            Domain::Radial(r) => Some(r),
            Domain::Grid(_) => None,
        }
    }

    /// Quadrature weights, already multiplied by the `dV` constant.
    pub fn weights(&self) -> &[f64] {
        match self {
            Domain::Grid(g) => &g.weights,
            Domain::Radial(r) => &r.weights,
        }
    }

    /// `∫_Ω g dV` from nodal values of `g`.
    pub fn integrate(&self, integrand: &[f64]) -> Result<f64> {
        let w = self.weights();
        if integrand.len() != w.len() {
            return Err(Error::LengthMismatch {
                what: "integrand",
                expected: w.len(),
                got: integrand.len(),
            });
        }
        let mut acc = 0.0;
        for (i, (&g, &wi)) in integrand.iter().zip(w).enumerate() {
            if g.is_nan() {
                return Err(Error::NonFinite {
                    what: "integrand",
                    node: i,
                });
            }
            acc += g * wi;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn rejects_bad_specs() {
        let mut s = DomainSpec::full_grid(1.0, 65);
        s.n = 2;
        assert!(build_domain(&s).is_err());
        assert!(build_domain(&DomainSpec::full_grid(-1.0, 65)).is_err());
        assert!(build_domain(&DomainSpec::full_grid(0.0, 65)).is_err());
        assert!(build_domain(&DomainSpec::full_grid(1.0, 16)).is_err());
        assert!(build_domain(&DomainSpec::radial(2, 1.0, 63)).is_err());
        assert!(build_domain(&DomainSpec::radial(0, 1.0, 64)).is_err());
        let missing = DomainSpec {
            radial_res: None,
            ..DomainSpec::radial(1, 1.0, 64)
        };
        assert!(build_domain(&missing).is_err());
    }

    #[test]
    fn defining_function_values() {
        let s1 = DomainSpec::full_grid(1.0, 65);
        assert_eq!(defining_function(&s1, &[[0.0, 0.0]]), -1.0);
        let a = std::f64::consts::FRAC_1_SQRT_2;
        assert!(defining_function(&s1, &[[a, a]]).abs() < 1e-15);
        let s2 = DomainSpec::radial(2, 2.0, 64);
        assert_eq!(defining_function(&s2, &[[1.0, 0.0], [0.0, 0.0]]), -3.0);
    }

    #[test]
    fn volume_constant() {
        assert_eq!(volume_form_constant(1), 2.0);
        assert_eq!(volume_form_constant(2), 8.0);
        assert_eq!(volume_form_constant(3), 48.0);
    }

    #[test]
    fn integrate_constants_and_zero() {
        let d = build_domain(&DomainSpec::full_grid(1.0, 65)).unwrap();
        let ones = vec![1.0; d.len()];
        assert_relative_eq!(d.integrate(&ones).unwrap(), 2.0 * PI, max_relative = 1e-12);
        assert_eq!(d.integrate(&vec![0.0; d.len()]).unwrap(), 0.0);

        let r = build_domain(&DomainSpec::radial(2, 1.0, 64)).unwrap();
        // 2^2 2! * π^2 / 2!
        assert_relative_eq!(
            r.integrate(&vec![1.0; r.len()]).unwrap(),
            4.0 * PI * PI,
            max_relative = 1e-12
        );
        let r3 = build_domain(&DomainSpec::radial(3, 0.7, 200)).unwrap();
        let exact = volume_form_constant(3) * PI.powi(3) * 0.7f64.powi(6) / 6.0;
        assert_relative_eq!(
            r3.integrate(&vec![1.0; r3.len()]).unwrap(),
            exact,
            max_relative = 1e-4
        );
    }

    #[test]
    fn integrate_rejects_nan() {
        let d = build_domain(&DomainSpec::radial(1, 1.0, 64)).unwrap();
        let mut v = vec![1.0; d.len()];
        v[3] = f64::NAN;
        assert!(matches!(
            d.integrate(&v),
            Err(Error::NonFinite { node: 3, .. })
        ));
        assert!(d.integrate(&[1.0]).is_err());
    }

    #[test]
    fn integrate_paraboloid() {
        // ∫ (1 - |z|^2) dV over the unit disk = 2 * 2π * (1/2 - 1/4) = π
        for spec in [
            DomainSpec::full_grid(1.0, 129),
            DomainSpec::radial(1, 1.0, 257),
        ] {
            let d = build_domain(&spec).unwrap();
            let g: Vec<f64> = (0..d.len()).map(|i| 1.0 - d.node_s(i)).collect();
            assert_relative_eq!(d.integrate(&g).unwrap(), PI, max_relative = 1e-4);
        }
    }

    #[test]
    fn radial_and_grid_integration_agree() {
        let grid = build_domain(&DomainSpec::full_grid(1.0, 129)).unwrap();
        let rad = build_domain(&DomainSpec::radial(1, 1.0, 400)).unwrap();
        let f = |s: f64| (1.0 - s).powi(2) * (1.0 + 3.0 * s);
        let a = grid
            .integrate(
                &(0..grid.len())
                    .map(|i| f(grid.node_s(i)))
                    .collect::<Vec<_>>(),
            )
            .unwrap();
        let b = rad
            .integrate(&(0..rad.len()).map(|i| f(rad.node_s(i))).collect::<Vec<_>>())
            .unwrap();
        let h = 2.0 / 129.0;
        assert!((a - b).abs() <= 4.0 * (h * h + 1.0 / (400.0 * 400.0)) * b.abs());
    }
}
