//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use mongeampere::dirichlet_solver::{apply_t, SolverConfig};
use mongeampere::eigen_iteration::{
    init_u0, iterate_observed, open_question_experiment, residual_check, EigenResult, InitStrategy,
    IterationConfig, OpenQuestionReport, ORACLE_PROFILE_RES,
};
use mongeampere::geometry::{build_domain, DensitySpec, Domain, DomainSpec, Field};
use mongeampere::oracles::{
    bessel_lambda1, comparison_principle_probe, oracle_for, shooting_eigenpair, OracleEigenpair,
};
use mongeampere::pluripotential::{energy, energy_directional_derivative};

/// Pointwise slack for ordering and comparison checks.
const TOL_CMP: f64 = 1e-6;

struct Run {
    label: &'static str,
    domain: Arc<Domain>,
    f: DensitySpec,
    result: EigenResult,
    oracle: OracleEigenpair,
    seconds: f64,
    /// Largest `u_k - w` over all nodes and iterates.
    worst_ordering: f64,
    ordering_violations: usize,
}

fn run(label: &'static str, spec: DomainSpec, f: DensitySpec) -> Run {
    let solver = SolverConfig::default();
    let config = IterationConfig::default();
    let start = Instant::now();
    let domain = build_domain(&spec).expect("domain");
    let u0 = init_u0(&domain, &f, InitStrategy::default(), &solver).expect("init");
    let oracle = oracle_for(&spec, &f, ORACLE_PROFILE_RES).expect("oracle");
    let w = oracle.field_on(&domain, 1.0 / oracle.lambda1).expect("w");
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    let result = iterate_observed(u0, &f, &solver, &config, |_, u| {
        for (a, b) in u.values().iter().zip(w.values()) {
            worst = worst.max(a - b);
            if *a > *b + TOL_CMP {
                violations += 1;
            }
        }
    });
    let seconds = start.elapsed().as_secs_f64();
    let result = match result {
        Ok(r) => r,
        Err(e) => panic!("{label}: iteration failed: {e}"),
    };
    Run {
        label,
        domain,
        f,
        result,
        oracle,
        seconds,
        worst_ordering: worst,
        ordering_violations: violations,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[derive(Default)]
struct Suite {
    failed: usize,
}

impl Suite {
    fn check(&mut self, id: u32, name: &str, ok: bool, detail: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        if !ok {
            self.failed += 1;
        }
        println!("{tag} [{id:>2}] {name}: {detail}");
    }
}

fn monotone_ok(r: &Run) -> (bool, f64) {
    let worst = r
        .result
        .history
        .windows(2)
        .map(|w| w[1].monotone_product / w[0].monotone_product - 1.0)
        .fold(f64::NEG_INFINITY, f64::max);
    (worst <= 1e-8, worst)
}

fn rayleigh_floor(r: &Run) -> (bool, f64) {
    let n = r.domain.n() as i32;
    let floor = r.oracle.lambda1.powi(n);
    let min = r
        .result
        .history
        .iter()
        .map(|h| h.rayleigh)
        .fold(f64::INFINITY, f64::min);
    (min >= floor * 0.98, min / floor)
}

fn segment_checks(suite: &mut Suite, domain: &Arc<Domain>, what: &str) {
    let phi = Field::from_radial_fn(domain.clone(), |s| s - 1.0).unwrap();
    let psi = Field::from_radial_fn(domain.clone(), |s| 0.5 * (s * s - 1.0) + (s - 1.0)).unwrap();
    let e = |t: f64| energy(&phi.lerp(&psi, t).unwrap()).unwrap();

    let t = 0.4;
    let exact = energy_directional_derivative(&phi, &psi, t).unwrap();
    let mut worst = 0.0f64;
    for eps in [1e-3, 1e-4, 1e-5] {
        let fd = (e(t + eps) - e(t - eps)) / (2.0 * eps);
        worst = worst.max(rel(fd, exact));
    }
    suite.check(
        9,
        &format!("energy derivative ({what})"),
        worst <= 0.01,
        format!("max relative error {worst:.3e} over eps in {{1e-3, 1e-4, 1e-5}}"),
    );

    let mut min_gap = f64::INFINITY;
    for i in 1..=9 {
        let t = i as f64 / 10.0;
        let d = 0.1f64.min(t).min(1.0 - t);
        let gap = 0.5 * (e(t - d) + e(t + d)) - e(t);
        min_gap = min_gap.min(gap);
    }
    suite.check(
        9,
        &format!("midpoint convexity ({what})"),
        min_gap >= -1e-10,
        format!("min (E(t-d)+E(t+d))/2 - E(t) = {min_gap:.3e}"),
    );
}

fn homogeneity(domain: &Arc<Domain>, iterate: &Field, f: &DensitySpec) -> f64 {
    let cfg = SolverConfig::default();
    let rho = Field::from_radial_fn(domain.clone(), |s| s - 1.0).unwrap();
    [rho, iterate.clone()]
        .iter()
        .map(|phi| {
            let a = apply_t(&phi.scale(2.0), f, &cfg).unwrap();
            let b = apply_t(phi, f, &cfg).unwrap().scale(2.0);
            a.sup_distance(&b).unwrap()
        })
        .fold(0.0, f64::max)
}

fn probe_pairs(domain: &Arc<Domain>) -> Vec<(&'static str, usize)> {
    let cfg = SolverConfig::default();
    let len = domain.len();
    let s: Vec<f64> = (0..len).map(|i| domain.node_s(i)).collect();
    let quartic: Vec<f64> = s.iter().map(|s| 8.0 * s * s).collect();
    let varying: Vec<f64> = s.iter().map(|s| 1.0 + (3.0 * s).sin().abs()).collect();
    let pairs: Vec<(&'static str, Vec<f64>, Vec<f64>)> = vec![
        ("2 vs 1", vec![2.0; len], vec![1.0; len]),
        ("g vs g", varying.clone(), varying),
        ("8s^2 vs 0", quartic, vec![0.0; len]),
    ];
    pairs
        .into_iter()
        .map(|(name, g1, g2)| {
            let count = comparison_principle_probe(&g1, &g2, domain, &cfg, TOL_CMP).unwrap();
            (name, count)
        })
        .collect()
}

fn same_report(a: &OpenQuestionReport, b: &OpenQuestionReport) -> bool {
    a.lambda1_est.to_bits() == b.lambda1_est.to_bits()
        && a.rel_sup_distance.to_bits() == b.rel_sup_distance.to_bits()
        && a.ordering_violations == b.ordering_violations
        && a.iterations == b.iterations
        && a.phi.values() == b.phi.values()
        && a.w.values() == b.w.values()
}

fn main() -> ExitCode {
    let mut suite = Suite::default();
    let one = DensitySpec::Constant(1.0);

    let run1 = run(
        "disk grid 129",
        DomainSpec::full_grid(1.0, 129),
        one.clone(),
    );
    let run1b = run(
        "disk grid 257",
        DomainSpec::full_grid(1.0, 257),
        one.clone(),
    );
    let run2 = run(
        "disk grid 129, f=4",
        DomainSpec::full_grid(1.0, 129),
        DensitySpec::Constant(4.0),
    );
    let run3 = run(
        "ball n=2 radial 2000",
        DomainSpec::radial(2, 1.0, 2000),
        one.clone(),
    );
    let run4 = run(
        "disk radial 2000",
        DomainSpec::radial(1, 1.0, 2000),
        one.clone(),
    );
    let runs = [&run1, &run1b, &run2, &run3, &run4];

    // 1
    let exact = bessel_lambda1(1.0, 1.0);
    let e129 = rel(run1.result.lambda1_est, exact);
    let e257 = rel(run1b.result.lambda1_est, exact);
    suite.check(
        1,
        "disk eigenvalue",
        e129 <= 0.01 && run1.result.converged,
        format!(
            "lambda1 = {:.7} vs {exact:.7}, relative error {e129:.3e}",
            run1.result.lambda1_est
        ),
    );
    suite.check(
        1,
        "disk runtime",
        run1.seconds <= 60.0,
        format!("{:.2} s", run1.seconds),
    );
    suite.check(
        1,
        "disk refinement",
        e257 <= 0.35 * e129,
        format!("error ratio 257/129 = {:.3}", e257 / e129),
    );

    // 2
    let e2 = rel(run2.result.lambda1_est, 0.361_449_1);
    suite.check(
        2,
        "density scaling",
        e2 <= 0.01 && run2.result.converged,
        format!(
            "lambda1 = {:.7}, relative error {e2:.3e}",
            run2.result.lambda1_est
        ),
    );

    // 3
    let e3 = rel(run3.result.lambda1_est, run3.oracle.lambda1);
    suite.check(
        3,
        "radial n=2 eigenvalue",
        e3 <= 0.005 && run3.result.converged,
        format!(
            "lambda1 = {:.7} vs shooting {:.10}, relative error {e3:.3e}",
            run3.result.lambda1_est, run3.oracle.lambda1
        ),
    );
    let coarse = DomainSpec::radial(2, 1.0, 64);
    let lam: Vec<f64> = [256, 512, 1024]
        .iter()
        .map(|&res| {
            shooting_eigenpair(&coarse, &one, res, None)
                .unwrap()
                .lambda1
        })
        .collect();
    let ratio = (lam[2] - lam[1]).abs() / (lam[1] - lam[0]).abs();
    suite.check(
        3,
        "shooting Richardson ratio",
        ratio <= 1.0 / 16.0,
        format!("|dl(1024)|/|dl(512)| = {ratio:.6} (limit 0.0625)"),
    );
    suite.check(
        3,
        "radial runtime",
        run3.seconds <= 10.0,
        format!("{:.2} s", run3.seconds),
    );

    // 4
    let e4 = rel(run4.result.lambda1_est, run1.result.lambda1_est);
    suite.check(
        4,
        "cross-mode agreement",
        e4 <= 0.01,
        format!(
            "radial {:.7} vs grid {:.7}, relative difference {e4:.3e}",
            run4.result.lambda1_est, run1.result.lambda1_est
        ),
    );

    // 5
    for r in runs {
        let (ok, worst) = monotone_ok(r);
        suite.check(
            5,
            &format!("monotone product ({})", r.label),
            ok,
            format!("max m_(k+1)/m_k - 1 = {worst:.3e}"),
        );
    }

    // 6
    for r in [&run1, &run2, &run3] {
        let (ok, ratio) = rayleigh_floor(r);
        suite.check(
            6,
            &format!("Rayleigh floor ({})", r.label),
            ok,
            format!("min R(u_k) / lambda1^n = {ratio:.6}"),
        );
    }

    // 7
    let grid129 = run1.domain.clone();
    let rho = Field::from_radial_fn(grid129.clone(), |s| s - 1.0).unwrap();
    let r_rho = mongeampere::pluripotential::rayleigh(&rho, &one).unwrap();
    suite.check(
        7,
        "closed-form Rayleigh value",
        rel(r_rho, 1.5) <= 0.005,
        format!("R(|z|^2 - 1) = {r_rho:.9}"),
    );

    // 8
    let tol_solver = SolverConfig::default().tol_solver;
    for r in [&run1, &run3] {
        let d = homogeneity(&r.domain, &r.result.eigenfunction, &r.f);
        suite.check(
            8,
            &format!("homogeneity of T ({})", r.label),
            d <= 10.0 * tol_solver,
            format!("max |T(2 phi) - 2 T(phi)| = {d:.3e}"),
        );
    }

    // 9
    segment_checks(&mut suite, &grid129, "grid 129");
    segment_checks(&mut suite, &run3.domain, "radial n=2");

    // 10
    let ball = run3.domain.clone();
    for (domain, what) in [(&grid129, "grid 129"), (&ball, "radial n=2")] {
        let counts = probe_pairs(domain);
        let total: usize = counts.iter().map(|c| c.1).sum();
        let detail = counts
            .iter()
            .map(|(name, c)| format!("{name}: {c}"))
            .collect::<Vec<_>>()
            .join(", ");
        suite.check(
            10,
            &format!("comparison principle ({what})"),
            total == 0,
            detail,
        );
    }

    // 11
    let res1 = residual_check(&run1.result.eigenfunction, run1.result.lambda1_est, &one).unwrap();
    let res3 = residual_check(&run3.result.eigenfunction, run3.result.lambda1_est, &one).unwrap();
    suite.check(
        11,
        "residual (grid 129)",
        res1 <= 1e-3,
        format!("{res1:.3e}"),
    );
    suite.check(
        11,
        "residual (radial 2000)",
        res3 <= 1e-4,
        format!("{res3:.3e}"),
    );

    // 12
    for r in [&run1, &run3] {
        suite.check(
            12,
            &format!("ordering u_k <= w + tol ({})", r.label),
            r.ordering_violations == 0,
            format!(
                "{} violations, max u_k - w = {:.3e}, tol {TOL_CMP:.0e}",
                r.ordering_violations, r.worst_ordering
            ),
        );
    }

    // 13
    let solver = SolverConfig::default();
    let config = IterationConfig::default();
    for r in [&run1, &run3] {
        let a = open_question_experiment(&r.domain, &one, &solver, &config, TOL_CMP);
        let b = open_question_experiment(&r.domain, &one, &solver, &config, TOL_CMP);
        let (ok, detail) = match (a, b) {
            (Ok(a), Ok(b)) => (
                same_report(&a, &b),
                format!(
                    "rel sup distance {:.3e}, lambda error {:.3e}, {} ordering violations",
                    a.rel_sup_distance, a.lambda_rel_error, a.ordering_violations
                ),
            ),
            (Err(e), _) | (_, Err(e)) => (false, e.to_string()),
        };
        suite.check(
            13,
            &format!("open-question determinism ({})", r.label),
            ok,
            detail,
        );
    }

    if suite.failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} check(s) failed", suite.failed);
        ExitCode::FAILURE
    }
}
