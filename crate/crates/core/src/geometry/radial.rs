use super::{volume_form_constant, DomainSpec};

/// Uniform grid in `s = |z|^2` on `[0, R^2]`.
///
/// Integrals use `∫ g dV = c_n (π^n / n!) n ∫_0^{R^2} s^{n-1} g(s) ds`
/// with the trapezoidal rule in `s`.
#[derive(Debug)]
pub struct RadialDomain {
    pub spec: DomainSpec,
    pub s: Vec<f64>,
    pub ds: f64,
    pub weights: Vec<f64>,
}

impl RadialDomain {
    pub(super) fn new(spec: DomainSpec) -> Self {
        let m = spec.radial_res.expect("validated radial spec");
        let r2 = spec.radius * spec.radius;
        let ds = r2 / (m - 1) as f64;
        let s: Vec<f64> = (0..m)
            .map(|i| if i + 1 == m { r2 } else { i as f64 * ds })
            .collect();
        let n = spec.n;
        let factorial: f64 = (1..=n).map(|k| k as f64).product();
        let polar =
            volume_form_constant(n) * std::f64::consts::PI.powi(n as i32) / factorial * n as f64;
        let weights = s
            .iter()
            .enumerate()
            .map(|(i, &si)| {
                let trap = if i == 0 || i + 1 == m { 0.5 * ds } else { ds };
                polar * trap * si.powi(n as i32 - 1)
            })
            .collect();
        Self {
            spec,
            s,
            ds,
            weights,
        }
    }

    pub fn last(&self) -> usize {
        self.s.len() - 1
    }
}

#[cfg(test)]
mod tests {
    use crate::geometry::{build_domain, DomainSpec};

    #[test]
    fn uniform_partition() {
        let d = build_domain(&DomainSpec::radial(2, 1.0, 64)).unwrap();
        let r = d.as_radial().unwrap();
        assert_eq!(r.s.len(), 64);
        assert_eq!(r.s[0], 0.0);
        assert_eq!(r.s[63], 1.0);
        for (i, &s) in r.s.iter().enumerate() {
            assert!((s - i as f64 / 63.0).abs() < 1e-15);
        }
    }
}
