//! Ground truth that does not go through the iteration or its solvers.
//!
//! * `n = 1`, constant `f = c`: `Δu = -4λc u` on the disk, so
//!   `λ_1 = j_{0,1}^2 / (4 c R^2)` with `j_{0,1}` the first zero of `J_0`.
//! * radial `f`, any `n`: shooting on
//!   `s^{1-n} (s^n (v')^n)' / n = λ^n (-v)^n f(s)`, `v(0) = -1`, bisecting on
//!   `λ` until `v(R^2) = 0`. The start near the regular singular point
//!   `s = 0` uses the power series of the solution; from there a fixed-step
//!   RK4 integrates `(v, s^n (v')^n)` outward.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dirichlet_solver::{solve_ma, SolverConfig};
use crate::error::{Error, Result};
use crate::geometry::{build_domain, DensitySpec, Domain, DomainSpec, Field, Mode};

const SERIES_TERMS: usize = 40;
const SCAN_POINTS: usize = 60;
const MISMATCH_TOL: f64 = 1e-10;

/// First eigenvalue for `n = 2`, unit ball, `f = 1`.
///
/// Regression value from [`shooting_eigenpair`] with `ode_res` 8000 to
/// 32000; the runs agree to about 1e-14.
pub const BALL2_LAMBDA1: f64 = 1.686_593_625_39;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleMethod {
    Bessel,
    Shooting,
}

impl OracleMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleMethod::Bessel => "bessel",
            OracleMethod::Shooting => "shooting",
        }
    }
}

/// First eigenpair of a radial problem. The profile is a function of `s`
/// with `v(0) = -1`, `v(R^2) = 0` and sup norm 1.
#[derive(Debug, Clone)]
pub struct OracleEigenpair {
    pub lambda1: f64,
    pub profile: Field,
    pub method: OracleMethod,
    /// RK4 steps used by the shooting oracle.
    pub ode_res: Option<usize>,
}

impl OracleEigenpair {
    /// Profile value at `s` by local cubic interpolation.
    pub fn eval(&self, s: f64) -> f64 {
        let r = self
            .profile
            .domain()
            .as_radial()
            .expect("oracle profiles are radial");
        let v = self.profile.values();
        let last = r.last();
        if s >= r.s[last] {
            return v[last];
        }
        if s <= 0.0 {
            return v[0];
        }
        let x = s / r.ds;
        let k = (x.floor() as usize).min(last - 1);
        if x == k as f64 {
            return v[k];
        }
        let start = k.saturating_sub(1).min(last - 3);
        let mut acc = 0.0;
        for (a, va) in v.iter().enumerate().skip(start).take(4) {
            let mut basis = 1.0;
            for b in start..start + 4 {
                if a != b {
                    basis *= (x - b as f64) / (a as f64 - b as f64);
                }
            }
            acc += basis * va;
        }
        acc
    }

    /// The eigenfunction sampled on `domain`, rescaled to sup norm `sup`.
    pub fn field_on(&self, domain: &Arc<Domain>, sup: f64) -> Result<Field> {
        let values = (0..domain.len())
            .map(|i| sup * self.eval(domain.node_s(i)))
            .collect();
        Field::new(domain.clone(), values)
    }
}

/// `J_0(x)` from its power series; accurate for moderate `x`.
pub fn bessel_j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / (k as f64 * k as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// First positive zero of `J_0` by bisection on `[2, 3]`.
pub fn j0_first_zero() -> f64 {
    let (mut lo, mut hi) = (2.0f64, 3.0f64);
    let flo = bessel_j0(lo);
    debug_assert!(flo > 0.0 && bessel_j0(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if bessel_j0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `λ_1` of the disk of radius `radius` with constant density `c`.
pub fn bessel_lambda1(radius: f64, c: f64) -> f64 {
    let j = j0_first_zero();
    j * j / (4.0 * c * radius * radius)
}

/// Bessel eigenpair sampled on a radial grid of `profile_res` nodes.
pub fn bessel_eigenpair(radius: f64, c: f64, profile_res: usize) -> Result<OracleEigenpair> {
    let domain = build_domain(&DomainSpec::radial(1, radius, profile_res))?;
    let j = j0_first_zero();
    let mut values: Vec<f64> = (0..domain.len())
        .map(|i| -bessel_j0(j * domain.node_s(i).sqrt() / radius))
        .collect();
    let last = values.len() - 1;
    values[last] = 0.0;
    Ok(OracleEigenpair {
        lambda1: bessel_lambda1(radius, c),
        profile: Field::new(domain, values)?,
        method: OracleMethod::Bessel,
        ode_res: None,
    })
}

struct Shooter {
    n: usize,
    r2: f64,
    coeffs: Vec<f64>,
    ode_res: usize,
}

/// Nodes of one shot: `(s, v, v')`.
struct Trajectory {
    s0: f64,
    series_v: Vec<f64>,
    nodes: Vec<(f64, f64, f64)>,
}

fn poly_mul(a: &[f64], b: &[f64], degree: usize) -> Vec<f64> {
    let mut out = vec![0.0; degree + 1];
    for (i, &x) in a.iter().enumerate().take(degree + 1) {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(degree + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_pow(a: &[f64], n: usize, degree: usize) -> Vec<f64> {
    let mut out = vec![0.0; degree + 1];
    out[0] = 1.0;
    for _ in 0..n {
        out = poly_mul(&out, a, degree);
    }
    out
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn signed_root(p: f64, n: usize) -> f64 {
    if n == 1 {
        p
    } else {
        p.signum() * p.abs().powf(1.0 / n as f64)
    }
}

impl Shooter {
    /// Taylor coefficients of `v` and `w = v'` at `s = 0`.
    fn series(&self, lambda: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let k_max = SERIES_TERMS;
        let ln = lambda.powi(n as i32);
        let mut v = vec![0.0; k_max + 1];
        let mut w = vec![0.0; k_max];
        v[0] = -1.0;
        w[0] = lambda * self.coeffs[0].powf(1.0 / n as f64);
        let lead = n as f64 * w[0].powi(n as i32 - 1);
        for k in 1..k_max {
            v[k] = w[k - 1] / k as f64;
            let neg_v: Vec<f64> = v[..=k].iter().map(|x| -x).collect();
            let rhs = poly_mul(&poly_pow(&neg_v, n, k), &self.coeffs, k)[k] * ln;
            let rest = poly_pow(&w[..k], n, k)[k];
            w[k] = (n as f64 / (k + n) as f64 * rhs - rest) / lead;
        }
        v[k_max] = w[k_max - 1] / k_max as f64;
        (v, w)
    }

    fn rhs(&self, lambda_n: f64, s: f64, v: f64, p: f64) -> (f64, f64) {
        let n = self.n;
        let dv = signed_root(p, n) / s;
        let dp = n as f64
            * s.powi(n as i32 - 1)
            * lambda_n
            * (-v).powi(n as i32)
            * horner(&self.coeffs, s);
        (dv, dp)
    }

    fn shoot(&self, lambda: f64, keep: bool) -> Trajectory {
        let (series_v, series_w) = self.series(lambda);
        // Start where the series tail is negligible.
        let mut s0 = self.r2 / 16.0;
        for _ in 0..40 {
            let tail = (series_v[SERIES_TERMS] * s0.powi(SERIES_TERMS as i32)).abs()
                + (series_v[SERIES_TERMS - 1] * s0.powi(SERIES_TERMS as i32 - 1)).abs();
            if tail < 1e-17 {
                break;
            }
            s0 *= 0.5;
        }
        let n = self.n;
        let lambda_n = lambda.powi(n as i32);
        let mut v = horner(&series_v, s0);
        let w0 = horner(&series_w, s0);
        let mut p = (s0 * w0).powi(n as i32);
        let h = (self.r2 - s0) / self.ode_res as f64;
        let mut nodes = Vec::with_capacity(if keep { self.ode_res + 1 } else { 1 });
        if keep {
            nodes.push((s0, v, w0));
        }
        for step in 0..self.ode_res {
            let s = s0 + step as f64 * h;
            let (a1, b1) = self.rhs(lambda_n, s, v, p);
            let (a2, b2) = self.rhs(lambda_n, s + 0.5 * h, v + 0.5 * h * a1, p + 0.5 * h * b1);
            let (a3, b3) = self.rhs(lambda_n, s + 0.5 * h, v + 0.5 * h * a2, p + 0.5 * h * b2);
            let (a4, b4) = self.rhs(lambda_n, s + h, v + h * a3, p + h * b3);
            v += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
            p += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
            if keep {
                let s_next = if step + 1 == self.ode_res {
                    self.r2
                } else {
                    s + h
                };
                nodes.push((s_next, v, signed_root(p, n) / s_next));
            }
        }
        if !keep {
            nodes.push((self.r2, v, signed_root(p, n) / self.r2));
        }
        Trajectory {
            s0,
            series_v,
            nodes,
        }
    }

    fn mismatch(&self, lambda: f64) -> f64 {
        self.shoot(lambda, false).nodes[0].1
    }
}

impl Trajectory {
    fn eval(&self, s: f64) -> f64 {
        if s <= self.s0 {
            return horner(&self.series_v, s);
        }
        let nodes = &self.nodes;
        let h = nodes[1].0 - nodes[0].0;
        let k = (((s - self.s0) / h).floor() as usize).min(nodes.len() - 2);
        let (sa, va, da) = nodes[k];
        let (sb, vb, db) = nodes[k + 1];
        let width = sb - sa;
        let t = (s - sa) / width;
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * va
            + (t3 - 2.0 * t2 + t) * width * da
            + (-2.0 * t3 + 3.0 * t2) * vb
            + (t3 - t2) * width * db
    }
}

/// Shooting eigenpair on the radial grid of `spec`.
///
/// The default bracket is `[0.1 g, 10 g]` with `g` the Bessel value for the
/// disk of the same radius and constant density `f(0)`. The bracket is
/// scanned from below; the first sign change of `v(R^2; λ)` is bisected.
pub fn shooting_eigenpair(
    spec: &DomainSpec,
    f: &DensitySpec,
    ode_res: usize,
    bracket: Option<(f64, f64)>,
) -> Result<OracleEigenpair> {
    if spec.mode != Mode::Radial {
        return Err(Error::UnsupportedMode("a radial domain"));
    }
    let domain = build_domain(spec)?;
    let coeffs = f
        .radial_coefficients()
        .ok_or_else(|| Error::UnsupportedOracle("density is not radial".into()))?;
    f.validate(spec)?;
    let radial_res = spec.radial_res.expect("validated radial spec");
    if ode_res < 4 * radial_res {
        return Err(Error::InvalidParameter(format!(
            "ode_res must be at least 4 * radial_res = {}, got {ode_res}",
            4 * radial_res
        )));
    }
    let shooter = Shooter {
        n: spec.n,
        r2: spec.radius * spec.radius,
        coeffs,
        ode_res,
    };
    let (lo, hi) = bracket.unwrap_or_else(|| {
        let guess = bessel_lambda1(spec.radius, f.eval_s(0.0));
        (0.1 * guess, 10.0 * guess)
    });
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameter(format!("bad bracket [{lo}, {hi}]")));
    }

    let ratio = (hi / lo).powf(1.0 / (SCAN_POINTS - 1) as f64);
    let mut prev_lambda = lo;
    let mut prev = shooter.mismatch(lo);
    let mut found = None;
    for k in 1..SCAN_POINTS {
        let lambda = if k + 1 == SCAN_POINTS {
            hi
        } else {
            lo * ratio.powi(k as i32)
        };
        let m = shooter.mismatch(lambda);
        if m.is_nan() || m <= prev {
            return Err(Error::NonMonotoneMismatch { lambda });
        }
        if prev < 0.0 && m >= 0.0 {
            found = Some((prev_lambda, lambda));
            break;
        }
        prev_lambda = lambda;
        prev = m;
    }
    let (mut a, mut b) = found.ok_or(Error::BracketNoSignChange { lo, hi })?;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if shooter.mismatch(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let lambda1 = 0.5 * (a + b);
    let traj = shooter.shoot(lambda1, true);
    let end = traj.nodes.last().expect("nonempty trajectory").1;
    if end.abs() > MISMATCH_TOL {
        return Err(Error::NonMonotoneMismatch { lambda: lambda1 });
    }

    let mut values: Vec<f64> = (0..domain.len())
        .map(|i| traj.eval(domain.node_s(i)))
        .collect();
    let last = values.len() - 1;
    values[last] = 0.0;
    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for v in &mut values {
        *v /= sup;
    }
    Ok(OracleEigenpair {
        lambda1,
        profile: Field::new(domain, values)?,
        method: OracleMethod::Shooting,
        ode_res: Some(ode_res),
    })
}

/// Picks the oracle for `(spec, f)`: Bessel for the disk with constant
/// density, shooting otherwise. The profile lives on its own radial grid of
/// `profile_res` nodes.
pub fn oracle_for(
    spec: &DomainSpec,
    f: &DensitySpec,
    profile_res: usize,
) -> Result<OracleEigenpair> {
    if !f.is_radial() {
        return Err(Error::UnsupportedOracle(
            "no independent ground truth exists for a non-radial density".into(),
        ));
    }
    f.validate(spec)?;
    match (spec.n, f) {
        (1, DensitySpec::Constant(c)) => bessel_eigenpair(spec.radius, *c, profile_res),
        _ => {
            let radial = DomainSpec::radial(spec.n, spec.radius, profile_res);
            shooting_eigenpair(&radial, f, 4 * profile_res, None)
        }
    }
}

/// Solves both Dirichlet problems and counts nodes with `ψ_1 > ψ_2 + tol_cmp`.
pub fn comparison_principle_probe(
    g1: &[f64],
    g2: &[f64],
    domain: &Arc<Domain>,
    config: &SolverConfig,
    tol_cmp: f64,
) -> Result<usize> {
    if let Some(node) = g1.iter().zip(g2).position(|(a, b)| a < b) {
        return Err(Error::InvalidParameter(format!("g1 < g2 at node {node}")));
    }
    let psi1 = solve_ma(g1, domain, config)?;
    let psi2 = solve_ma(g2, domain, config)?;
    Ok(psi1
        .values()
        .iter()
        .zip(psi2.values())
        .filter(|(a, b)| **a > **b + tol_cmp)
        .count())
}
