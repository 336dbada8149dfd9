//! Inverse iteration `u_{k+1} = T(u_k)` for the first eigenpair.
//!
//! Along the sequence `m_k = R(u_k) ‖u_k‖^n_{L^{n+1}(μ)}` is nonincreasing.
//! The discrete scheme keeps that property exactly as long as the Dirichlet
//! solve reproduces its data, so any increase beyond `tol_mono` aborts the
//! run.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dirichlet_solver::{solve_ma, t_data, SolverConfig};
use crate::error::{Error, Result};
use crate::geometry::{norm_lnp1_mu, DensitySpec, Domain, Field};
use crate::oracles::{oracle_for, OracleEigenpair};
use crate::pluripotential::{ma_density, TOL_ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InitStrategy {
    /// `u_0 = A ρ` with `A = (1 + margin) (sup f)^{1/n}`.
    ScaledRho { margin: f64 },
    /// `u_0` solves `(dd^c u_0)^n = f dV` with zero boundary values.
    MaOfF,
}

impl Default for InitStrategy {
    fn default() -> Self {
        InitStrategy::ScaledRho { margin: 0.01 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationConfig {
    pub tol_r: f64,
    pub tol_u: f64,
    pub max_iters: usize,
    /// Relative slack allowed in `m_{k+1} ≤ m_k`.
    pub tol_mono: f64,
    /// Rescale every iterate to sup norm 1. Off by default.
    pub normalize_each_step: bool,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            tol_r: 1e-6,
            tol_u: 1e-6,
            max_iters: 200,
            tol_mono: 1e-8,
            normalize_each_step: false,
        }
    }
}

impl IterationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_r > 0.0 && self.tol_u > 0.0 && self.tol_mono >= 0.0) {
            return Err(Error::InvalidParameter(
                "iteration tolerances must be positive".into(),
            ));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter(
                "max_iters must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    /// `R(u_k)`.
    pub rayleigh: f64,
    /// `R(u_k)^{1/n}`.
    pub lambda_est: f64,
    pub sup_norm: f64,
    /// `‖u_k‖_{L^{n+1}(μ)}`.
    pub norm_mu: f64,
    /// `m_k = R(u_k) ‖u_k‖^n_{L^{n+1}(μ)}`.
    pub monotone_product: f64,
    /// `‖MA(u_k) - R(u_{k-1}) (-u_{k-1})^n f‖_∞`, zero for `k = 0`.
    pub residual: f64,
    pub wall_time: f64,
}

impl IterationRecord {
    /// Equality ignoring the wall clock.
    pub fn same_numbers(&self, other: &Self) -> bool {
        self.k == other.k
            && self.rayleigh.to_bits() == other.rayleigh.to_bits()
            && self.lambda_est.to_bits() == other.lambda_est.to_bits()
            && self.sup_norm.to_bits() == other.sup_norm.to_bits()
            && self.norm_mu.to_bits() == other.norm_mu.to_bits()
            && self.monotone_product.to_bits() == other.monotone_product.to_bits()
            && self.residual.to_bits() == other.residual.to_bits()
    }
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub lambda1_est: f64,
    pub eigenfunction: Field,
    pub history: Vec<IterationRecord>,
    pub converged: bool,
    pub iterations_used: usize,
    /// Aitken Δ² extrapolation of the last three λ estimates; advisory only.
    pub lambda1_extrapolated: Option<f64>,
}

impl EigenResult {
    pub fn final_rayleigh(&self) -> f64 {
        self.history.last().map(|r| r.rayleigh).unwrap_or(f64::NAN)
    }
}

pub fn init_u0(
    domain: &Arc<Domain>,
    f: &DensitySpec,
    strategy: InitStrategy,
    config: &SolverConfig,
) -> Result<Field> {
    f.validate(domain.spec())?;
    let r2 = domain.radius() * domain.radius();
    match strategy {
        InitStrategy::ScaledRho { margin } => {
            if !(margin >= 0.0 && margin.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "margin must be nonnegative, got {margin}"
                )));
            }
            let a = (1.0 + margin) * f.sup(domain.spec()).powf(1.0 / domain.n() as f64);
            Field::from_radial_fn(domain.clone(), |s| a * (s - r2))
        }
        InitStrategy::MaOfF => {
            let g = f.eval_on(domain)?;
            solve_ma(&g, domain, config)
        }
    }
}

fn sup_abs(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0f64, |m, v| m.max(v.abs()))
}

fn aitken(history: &[IterationRecord]) -> Option<f64> {
    let k = history.len();
    if k < 3 {
        return None;
    }
    let (a, b, c) = (
        history[k - 3].lambda_est,
        history[k - 2].lambda_est,
        history[k - 1].lambda_est,
    );
    let denom = c - 2.0 * b + a;
    if denom.abs() <= 1e-14 * c.abs() {
        return Some(c);
    }
    let x = c - (c - b) * (c - b) / denom;
    x.is_finite().then_some(x)
}

/// Runs `u_{k+1} = T(u_k)` from `u0`.
///
/// Stops when both the relative change of `R` and the relative sup-norm
/// step fall below their tolerances, or after `max_iters` steps with
/// `converged = false`.
pub fn iterate(
    u0: Field,
    f: &DensitySpec,
    solver: &SolverConfig,
    config: &IterationConfig,
) -> Result<EigenResult> {
    iterate_observed(u0, f, solver, config, |_, _| {})
}

/// [`iterate`] with a callback receiving `(k, u_k)` for every iterate,
/// including `u_0`, before any normalization.
pub fn iterate_observed(
    u0: Field,
    f: &DensitySpec,
    solver: &SolverConfig,
    config: &IterationConfig,
    mut observer: impl FnMut(usize, &Field),
) -> Result<EigenResult> {
    solver.validate()?;
    config.validate()?;
    let start = Instant::now();
    let domain = u0.domain().clone();
    let n = domain.n() as i32;

    let sup0 = u0.sup_norm();
    if sup0 <= TOL_ZERO {
        return Err(Error::DegenerateIterate { k: 0, sup: sup0 });
    }
    observer(0, &u0);
    let mut u = u0;
    let (mut r, mut data) = t_data(&u, f)?;
    let norm = norm_lnp1_mu(&u, f)?;
    let mut history = vec![IterationRecord {
        k: 0,
        rayleigh: r,
        lambda_est: r.powf(1.0 / n as f64),
        sup_norm: sup0,
        norm_mu: norm,
        monotone_product: r * norm.powi(n),
        residual: 0.0,
        wall_time: start.elapsed().as_secs_f64(),
    }];
    let mut m_current = history[0].monotone_product;
    let mut converged = false;

    for k in 1..=config.max_iters {
        let next = solve_ma(&data, &domain, solver)?;
        let sup = next.sup_norm();
        if sup <= TOL_ZERO {
            return Err(Error::DegenerateIterate { k, sup });
        }
        observer(k, &next);
        let density = ma_density(&next);
        let residual = sup_abs(density.values.iter().zip(&data).map(|(a, b)| a - b));
        let (r_next, data_next) = t_data(&next, f)?;
        let norm = norm_lnp1_mu(&next, f)?;
        let m_next = r_next * norm.powi(n);
        let m_prev = m_current;
        history.push(IterationRecord {
            k,
            rayleigh: r_next,
            lambda_est: r_next.powf(1.0 / n as f64),
            sup_norm: sup,
            norm_mu: norm,
            monotone_product: m_next,
            residual,
            wall_time: start.elapsed().as_secs_f64(),
        });
        if m_next > m_prev * (1.0 + config.tol_mono) {
            return Err(Error::MonotoneProductViolated {
                k: k - 1,
                previous: m_prev,
                next: m_next,
                history,
            });
        }

        let step = next.sup_distance(&u)? / u.sup_norm();
        let r_change = (r_next - r).abs() / r;
        converged = r_change <= config.tol_r && step <= config.tol_u;

        if config.normalize_each_step {
            let c = 1.0 / sup;
            u = next.scale(c);
            data = data_next.iter().map(|g| g * c.powi(n)).collect();
            m_current = m_next * c.powi(n);
        } else {
            u = next;
            data = data_next;
            m_current = m_next;
        }
        r = r_next;
        if converged {
            break;
        }
    }

    let iterations_used = history.len() - 1;
    Ok(EigenResult {
        lambda1_est: r.powf(1.0 / n as f64),
        eigenfunction: u,
        lambda1_extrapolated: aitken(&history),
        history,
        converged,
        iterations_used,
    })
}

/// `‖MA(u) - λ^n (-u)^n f‖_∞ / (1 + λ^n ‖(-u)^n f‖_∞)`.
pub fn residual_check(u: &Field, lambda: f64, f: &DensitySpec) -> Result<f64> {
    let domain = u.domain();
    let n = domain.n() as i32;
    let fv = f.eval_on(domain)?;
    let density = ma_density(u);
    let ln = lambda.powi(n);
    let rhs: Vec<f64> = u
        .values()
        .iter()
        .zip(&fv)
        .map(|(&v, &fi)| (-v).max(0.0).powi(n) * fi)
        .collect();
    let diff = sup_abs(density.values.iter().zip(&rhs).map(|(a, b)| a - ln * b));
    Ok(diff / (1.0 + ln * sup_abs(rhs.iter().copied())))
}

/// Counts nodes where `u > w + tol_cmp`.
pub fn ordering_violations(u: &Field, w: &Field, tol_cmp: f64) -> Result<usize> {
    u.check_same_domain(w)?;
    Ok(u.values()
        .iter()
        .zip(w.values())
        .filter(|(a, b)| **a > **b + tol_cmp)
        .count())
}

#[derive(Debug, Clone)]
pub struct OpenQuestionReport {
    pub lambda1_est: f64,
    pub lambda1_oracle: f64,
    pub lambda_rel_error: f64,
    /// `‖φ - w‖_∞ / ‖w‖_∞`.
    pub rel_sup_distance: f64,
    pub ordering_violations: usize,
    pub tol_cmp: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Limit of the iteration started from `(dd^c u_0)^n = f dV`.
    pub phi: Field,
    /// Oracle eigenfunction with `‖w‖_∞ = 1/λ_1`.
    pub w: Field,
}

/// Oracle profile resolution used when comparing against an iterate.
pub const ORACLE_PROFILE_RES: usize = 4001;

/// The iteration started from `(dd^c u_0)^n = f dV`, compared with the
/// normalized oracle eigenfunction.
pub fn open_question_experiment(
    domain: &Arc<Domain>,
    f: &DensitySpec,
    solver: &SolverConfig,
    config: &IterationConfig,
    tol_cmp: f64,
) -> Result<OpenQuestionReport> {
    let oracle = oracle_for(domain.spec(), f, ORACLE_PROFILE_RES)?;
    let u0 = init_u0(domain, f, InitStrategy::MaOfF, solver)?;
    let result = iterate(u0, f, solver, config)?;
    open_question_report(&result, &oracle, tol_cmp)
}

pub fn open_question_report(
    result: &EigenResult,
    oracle: &OracleEigenpair,
    tol_cmp: f64,
) -> Result<OpenQuestionReport> {
    let phi = result.eigenfunction.clone();
    let w = oracle.field_on(phi.domain(), 1.0 / oracle.lambda1)?;
    Ok(OpenQuestionReport {
        lambda1_est: result.lambda1_est,
        lambda1_oracle: oracle.lambda1,
        lambda_rel_error: (result.lambda1_est - oracle.lambda1).abs() / oracle.lambda1,
        rel_sup_distance: phi.sup_distance(&w)? / w.sup_norm(),
        ordering_violations: ordering_violations(&phi, &w, tol_cmp)?,
        tol_cmp,
        converged: result.converged,
        iterations: result.iterations_used,
        phi,
        w,
    })
}
