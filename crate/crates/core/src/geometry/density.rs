use serde::{Deserialize, Serialize};

use super::{Domain, DomainSpec, Mode};
use crate::error::{Error, Result};

const POSITIVITY_SAMPLES: usize = 4097;

/// The strictly positive density `f` in `μ = f dV`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DensitySpec {
    Constant(f64),
    /// `f(s) = Σ_j coeffs[j] s^j` with `s = |z|^2`.
    RadialPolynomial(Vec<f64>),
    /// `base + amplitude · exp(-|z - center|^2 / (2 width^2))`, full-grid only.
    GaussianBump {
        base: f64,
        amplitude: f64,
        center: [f64; 2],
        width: f64,
    },
}

impl DensitySpec {
    pub fn is_radial(&self) -> bool {
        !matches!(self, DensitySpec::GaussianBump { .. })
    }

    /// Checks `inf f > 0` on the closed ball and mode compatibility.
    pub fn validate(&self, spec: &DomainSpec) -> Result<()> {
        let r2 = spec.radius * spec.radius;
        match self {
            DensitySpec::Constant(c) => {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(Error::InvalidDensity(format!(
                        "constant must be positive, got {c}"
                    )));
                }
            }
            DensitySpec::RadialPolynomial(coeffs) => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidDensity(
                        "polynomial needs finite coefficients".into(),
                    ));
                }
                let min = (0..POSITIVITY_SAMPLES)
                    .map(|k| self.eval_s(r2 * k as f64 / (POSITIVITY_SAMPLES - 1) as f64))
                    .fold(f64::INFINITY, f64::min);
                if min <= 0.0 {
                    return Err(Error::InvalidDensity(format!(
                        "polynomial density is not positive on [0, R^2] (min sample {min})"
                    )));
                }
            }
            DensitySpec::GaussianBump {
                base,
                amplitude,
                center,
                width,
            } => {
                if spec.mode != Mode::FullGrid {
                    return Err(Error::InvalidDensity(
                        "gaussian bump density is only available in full-grid mode".into(),
                    ));
                }
                if !(base.is_finite() && *base > 0.0) {
                    return Err(Error::InvalidDensity(format!(
                        "bump base must be positive, got {base}"
                    )));
                }
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    return Err(Error::InvalidDensity(format!(
                        "bump amplitude must be nonnegative, got {amplitude}"
                    )));
                }
                if !(width.is_finite() && *width > 0.0) || center.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidDensity(
                        "bump center/width must be finite, width > 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Value at `s = |z|^2` for radial kinds.
    pub fn eval_s(&self, s: f64) -> f64 {
        match self {
            DensitySpec::Constant(c) => *c,
            DensitySpec::RadialPolynomial(coeffs) => {
                coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
            }
            DensitySpec::GaussianBump { .. } => panic!("gaussian bump density is not radial"),
        }
    }

    pub fn eval_xy(&self, x: f64, y: f64) -> f64 {
        match self {
            DensitySpec::GaussianBump {
                base,
                amplitude,
                center,
                width,
            } => {
                let d2 = (x - center[0]).powi(2) + (y - center[1]).powi(2);
                base + amplitude * (-d2 / (2.0 * width * width)).exp()
            }
            _ => self.eval_s(x * x + y * y),
        }
    }

    /// Nodal values on a discretized domain.
    pub fn eval_on(&self, domain: &Domain) -> Result<Vec<f64>> {
        self.validate(domain.spec())?;
        Ok(match domain {
            Domain::Grid(g) => g.nodes.iter().map(|p| self.eval_xy(p.x, p.y)).collect(),
            Domain::Radial(r) => r.s.iter().map(|&s| self.eval_s(s)).collect(),
        })
    }

    /// An upper bound for `sup f` on the closed ball.
    pub fn sup(&self, spec: &DomainSpec) -> f64 {
        match self {
            DensitySpec::Constant(c) => *c,
            DensitySpec::GaussianBump {
                base, amplitude, ..
            } => base + amplitude,
            DensitySpec::RadialPolynomial(_) => {
                let r2 = spec.radius * spec.radius;
                (0..POSITIVITY_SAMPLES)
                    .map(|k| self.eval_s(r2 * k as f64 / (POSITIVITY_SAMPLES - 1) as f64))
                    .fold(f64::NEG_INFINITY, f64::max)
            }
        }
    }

    /// Polynomial coefficients in `s`, for radial kinds.
    pub fn radial_coefficients(&self) -> Option<Vec<f64>> {
        match self {
            DensitySpec::Constant(c) => Some(vec![*c]),
            DensitySpec::RadialPolynomial(c) => Some(c.clone()),
            DensitySpec::GaussianBump { .. } => None,
        }
    }

    /// The same density multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            DensitySpec::Constant(c) => DensitySpec::Constant(c * factor),
            DensitySpec::RadialPolynomial(c) => {
                DensitySpec::RadialPolynomial(c.iter().map(|a| a * factor).collect())
            }
            DensitySpec::GaussianBump {
                base,
                amplitude,
                center,
                width,
            } => DensitySpec::GaussianBump {
                base: base * factor,
                amplitude: amplitude * factor,
                center: *center,
                width: *width,
            },
        }
    }
}
