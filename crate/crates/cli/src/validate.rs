//! `validate`: hard invariant checks plus the consistency findings.

use std::f64::consts::PI;

use num_complex::Complex64;
use polyzeta::bk_model::{boundary_residual, eigenfunction, spectrum, PolymerScale, SelfAdjointDomain, Wavefunction};
use polyzeta::consistency::{all_findings, Finding};
use polyzeta::phase_space::{n_bk, n_bk_integral, xp_polymer_discrepancy, PhaseSpaceCuts};
use polyzeta::riemann::{
    find_zeros, find_zeros_with, fluctuation_sum_with, smooth_count, z_function, ZRoute,
};
use polyzeta::sierra_model::{
    sierra_boundary_residual_with, sierra_eigenfunction, sierra_spectrum, SierraParams,
};
use polyzeta::specfun::{gamma_ratio_phase, log_gamma, primes_up_to, primes_up_to_segmented, riemann_siegel_theta};
use polyzeta::exec::Exec;
use polyzeta::verify_numeric::{apply_hamiltonian_fd, shoot_spectrum, ModelSpec};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::commands::sierra_weight_for;
use crate::config::{Model, RunConfig, DEFAULT_VALIDATE_M2_FRACTION, DEFAULT_SIERRA_M2};
use crate::error::CliResult;
use crate::table::{fmt_g, Cell, Table};

/// Zeros below this ordinate take part in the zero checks.
const ZERO_WINDOW: f64 = 100.0;
const LEVELS: usize = 10;
const FD_POINTS: usize = 10_000;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: &'static str,
    pub passed: bool,
    /// Worst measured value.
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct FindingReport {
    pub id: &'static str,
    pub summary: String,
    pub measurements: Map<String, Value>,
}

impl From<Finding> for FindingReport {
    fn from(f: Finding) -> Self {
        let measurements = f
            .measurements
            .iter()
            .map(|m| (m.name.to_string(), number(m.value)))
            .collect();
        Self { id: f.id, summary: f.summary, measurements }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub meta: RunConfig,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub findings: Vec<FindingReport>,
}

fn number(x: f64) -> Value {
    if x.is_finite() {
        serde_json::from_str(&fmt_g(x)).expect("%.15g output is valid JSON")
    } else {
        Value::String(fmt_g(x))
    }
}

/// `value < tolerance`, with errors and NaN counting as failures.
fn below(id: &'static str, tolerance: f64, measured: polyzeta::Result<f64>, detail: &str) -> Check {
    match measured {
        Ok(value) => Check { id, passed: value < tolerance, value, tolerance, detail: detail.to_string() },
        Err(e) => Check { id, passed: false, value: f64::NAN, tolerance, detail: format!("{detail}: {e}") },
    }
}

fn max_of(values: impl IntoIterator<Item = polyzeta::Result<f64>>) -> polyzeta::Result<f64> {
    let mut worst = 0.0f64;
    for v in values {
        let v = v?;
        if v.is_nan() {
            return Ok(f64::NAN);
        }
        worst = worst.max(v);
    }
    Ok(worst)
}

fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { b } else { a + i as f64 * h }).collect()
}

fn zero_checks(cfg: &RunConfig) -> Vec<Check> {
    let auto = find_zeros(ZERO_WINDOW);
    let routes = auto.clone().and_then(|a| {
        let em = find_zeros_with(ZERO_WINDOW, ZRoute::EulerMaclaurin, Exec::default())?;
        if em.len() != a.len() {
            return Ok(f64::INFINITY);
        }
        Ok(a.zeros.iter().zip(&em.zeros).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
    });
    // sign changes of Z on a grid four times finer than the scan
    let recount = auto.clone().and_then(|a| {
        let grid = uniform_grid(2.0, ZERO_WINDOW, 7841);
        let z = Exec::default().map_slice(&grid, |&t| z_function(t)).into_iter().collect::<polyzeta::Result<Vec<_>>>()?;
        let flips = z.windows(2).filter(|w| (w[0] < 0.0) != (w[1] < 0.0)).count();
        Ok((flips as f64 - a.len() as f64).abs())
    });
    let tracking = auto.and_then(|a| {
        let primes = primes_up_to(cfg.prime_limit)?;
        let mids: Vec<f64> = a.zeros.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        max_of(mids.iter().enumerate().map(|(i, &e)| {
            let approx = smooth_count(e)? + fluctuation_sum_with(e, &primes, cfg.n_max)?;
            Ok((approx - (i + 1) as f64).abs())
        }))
    });
    vec![
        below("zero-routes-agree", 1e-6, routes, "max |t_RS - t_EM| over zeros below 100"),
        below("zero-recount", 0.5, recount, "|sign changes on a 0.0125 grid - zeros found| below 100"),
        below(
            "formula-tracks-staircase",
            0.5,
            tracking,
            "max |smooth + fluctuation - N| at midpoints between zeros below 100",
        ),
    ]
}

fn specfun_checks() -> Vec<Check> {
    // reflection Γ(z)Γ(1−z) = π/sin(πz) on a fixed lattice off the real axis
    let reflection = max_of((0..10).flat_map(|i| (0..10).map(move |j| (i, j))).map(|(i, j)| {
        let z = Complex64::new(-4.5 + i as f64, if j % 2 == 0 { 0.3 } else { -0.3 } * (1 + j) as f64);
        let lhs = (log_gamma(z)? + log_gamma(1.0 - z)?).exp();
        let rhs = PI / (PI * z).sin();
        Ok((lhs - rhs).norm() / rhs.norm())
    }));
    let theta = max_of((0..96).map(|k| {
        let t = 50.0 + 10.0 * k as f64;
        let asym = 0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0 + 1.0 / (48.0 * t);
        Ok((riemann_siegel_theta(t)? - asym).abs())
    }));
    let unimodular = max_of((0..200).map(|k| Ok((gamma_ratio_phase(-100.0 + k as f64)?.norm() - 1.0).abs())));
    let sieve = primes_up_to_segmented(1_000_000, 1 << 12)
        .and_then(|a| Ok((a.len() as f64 - 78_498.0).abs() + (primes_up_to(1_000_000)?.len() as f64 - 78_498.0).abs()));
    vec![
        below("log-gamma-reflection", 1e-10, reflection, "relative error of the reflection formula"),
        below("theta-asymptotic", 1e-6, theta, "|theta - asymptotic| for t in [50, 1000]"),
        below("gamma-ratio-unimodular", 1e-12, unimodular, "||Gamma ratio| - 1| for E in [-100, 100)"),
        below("prime-count", 0.5, sieve, "|pi(10^6) - 78498| over two segment sizes"),
    ]
}

fn count_checks(cfg: &RunConfig) -> Vec<Check> {
    let grid = cfg.energy_grid();
    let cuts = PhaseSpaceCuts::new(cfg.lx, cfg.lp);
    let forms = cuts.clone().and_then(|c| {
        max_of(grid.iter().map(|&e| Ok((n_bk(e, &c)? - n_bk_integral(e, &c)?).abs())))
    });
    let decomposition = cuts.and_then(|c| {
        max_of(grid.iter().map(|&e| Ok(xp_polymer_discrepancy(e, &c, cfg.mu0)?.unexplained())))
    });
    vec![
        below("bk-count-forms-agree", 1e-10, forms, "closed vs integral BK count on the energy grid"),
        below(
            "poly-count-gap-explained",
            1e-8,
            decomposition,
            "area oracle - closed count - corner cell - contour tail on the energy grid",
        ),
    ]
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn fd_error<F: Fn(f64) -> polyzeta::Result<Complex64>>(model: &ModelSpec, e: f64, psi: F) -> polyzeta::Result<f64> {
    let (a, b) = if model.m1 < model.m2 { (model.m1, model.m2) } else { (model.m2, model.m1) };
    let w = Wavefunction::sample(uniform_grid(a, b, FD_POINTS), e, psi)?;
    let h = apply_hamiltonian_fd(&model.kind, &w)?;
    Ok(h.values
        .iter()
        .zip(&w.values[2..FD_POINTS - 2])
        .map(|(hv, v)| (hv - e * v).norm() / (e * v).norm())
        .fold(0.0, f64::max))
}

fn bk_checks(cfg: &RunConfig) -> Vec<Check> {
    let m2 = match cfg.model {
        Model::Bk => cfg.m2,
        Model::Sierra => DEFAULT_VALIDATE_M2_FRACTION * PI * cfg.hbar / cfg.mu0,
    };
    let setup = PolymerScale::new(cfg.mu0, cfg.hbar).and_then(|s| {
        let d = SelfAdjointDomain::new(m2, cfg.theta, &s)?;
        let closed = (0..LEVELS as u32).map(|n| spectrum(n, &d, &s)).collect::<polyzeta::Result<Vec<_>>>()?;
        Ok((s, d, closed))
    });
    let Ok((s, d, closed)) = setup else {
        let e = setup.expect_err("error branch");
        return ["bk-shooting-matches-closed", "bk-boundary-residual", "bk-fd-eigenvalue"]
            .into_iter()
            .map(|id| below(id, 0.0, Err(e.clone()), "bk setup"))
            .collect();
    };
    let shot = ModelSpec::bk(s, &d).and_then(|m| {
        let shot = shoot_spectrum(&m, LEVELS)?;
        Ok(shot.levels.iter().zip(&closed).map(|(a, b)| relative(*a, *b)).fold(0.0, f64::max))
    });
    let residual = max_of(closed.iter().map(|&e| boundary_residual(e, &d, &s)));
    let fd = ModelSpec::bk(s, &d).and_then(|m| {
        let e = closed[LEVELS / 2];
        fd_error(&m, e, |p| eigenfunction(p, e, &s))
    });
    vec![
        below("bk-shooting-matches-closed", 1e-8, shot, "max relative level error, first 10 levels"),
        below("bk-boundary-residual", 1e-10, residual, "boundary residual at the closed levels"),
        below("bk-fd-eigenvalue", 1e-6, fd, "relative |H psi - E psi| on a 10^4-point grid"),
    ]
}

fn sierra_checks(cfg: &RunConfig) -> Vec<Check> {
    let m2 = match cfg.model {
        Model::Sierra => cfg.m2,
        Model::Bk => DEFAULT_SIERRA_M2,
    };
    let convention = cfg.sierra_convention.convention();
    let weight = sierra_weight_for(convention);
    let setup = SierraParams::new(cfg.lp, cfg.mu0).and_then(|p| {
        let closed =
            (0..LEVELS as u32).map(|n| sierra_spectrum(n, cfg.theta, m2, &p)).collect::<polyzeta::Result<Vec<_>>>()?;
        let model = ModelSpec::sierra(p, m2, cfg.theta, convention, weight)?;
        Ok((p, model, closed))
    });
    let Ok((p, model, closed)) = setup else {
        let e = setup.expect_err("error branch");
        return ["sierra-shooting-matches-closed", "sierra-boundary-residual", "sierra-fd-eigenvalue"]
            .into_iter()
            .map(|id| below(id, 0.0, Err(e.clone()), "sierra setup"))
            .collect();
    };
    let shot = shoot_spectrum(&model, LEVELS)
        .map(|shot| shot.levels.iter().zip(&closed).map(|(a, b)| relative(*a, *b)).fold(0.0, f64::max));
    let residual = max_of(
        closed.iter().map(|&e| sierra_boundary_residual_with(e, m2, cfg.theta, &p, convention, weight)),
    );
    let e = closed[LEVELS / 2];
    let fd = fd_error(&model, e, |q| sierra_eigenfunction(q, e, &p));
    let detail = format!("{} reading of m2", convention.label());
    vec![
        below("sierra-shooting-matches-closed", 1e-8, shot, &format!("max relative level error, first 10 levels, {detail}")),
        below("sierra-boundary-residual", 1e-10, residual, &format!("boundary residual at the closed levels, {detail}")),
        below("sierra-fd-eigenvalue", 1e-6, fd, "relative |H psi - E psi| on a 10^4-point grid"),
    ]
}

/// Runs every check and collects the findings. A finding that cannot be
/// computed is an invariant failure.
pub fn run_validation(cfg: &RunConfig) -> CliResult<Report> {
    let mut checks = zero_checks(cfg);
    checks.extend(specfun_checks());
    checks.extend(count_checks(cfg));
    checks.extend(bk_checks(cfg));
    checks.extend(sierra_checks(cfg));
    let findings = all_findings()?.into_iter().map(FindingReport::from).collect();
    let passed = checks.iter().all(|c| c.passed);
    Ok(Report { meta: cfg.clone(), passed, checks, findings })
}

pub fn report_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("serializable");
    s.push('\n');
    s
}

/// Flat CSV view: one row per check, then one row per finding measurement.
pub fn report_table(report: &Report) -> Table {
    let mut t = Table::new(vec!["kind", "id", "status", "name", "value", "tolerance"]);
    for c in &report.checks {
        t.push(vec![
            Cell::Text("check".into()),
            Cell::Text(c.id.into()),
            Cell::Text(if c.passed { "pass" } else { "fail" }.into()),
            Cell::Text(c.detail.clone()),
            Cell::Num(c.value),
            Cell::Num(c.tolerance),
        ]);
    }
    for f in &report.findings {
        for (name, value) in &f.measurements {
            let value = match value {
                Value::Number(n) => Cell::Num(n.as_f64().unwrap_or(f64::NAN)),
                other => Cell::Text(other.to_string()),
            };
            t.push(vec![
                Cell::Text("finding".into()),
                Cell::Text(f.id.into()),
                Cell::Text("info".into()),
                Cell::Text(name.clone()),
                value,
                Cell::Empty,
            ]);
        }
    }
    t
}
