use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use polyzeta::bk_model::{eigenfunction, spectrum, PolymerScale, SelfAdjointDomain, Wavefunction};
use polyzeta::exec::Exec;
use polyzeta::sierra_model::{
    sierra_eigenfunction, sierra_spectrum, SierraConvention, SierraParams, SierraWeight,
};
use polyzeta::verify_numeric::{
    apply_hamiltonian_fd, integrate_eigen_ode, quantization_mismatch, shoot_spectrum,
    shoot_spectrum_with, ModelKind, ModelSpec,
};
use polyzeta::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bk_model(mu0: f64, angle2: f64, theta: f64) -> (PolymerScale, SelfAdjointDomain, ModelSpec) {
    let s = PolymerScale::unit(mu0).unwrap();
    let d = SelfAdjointDomain::new(angle2 / mu0, theta, &s).unwrap();
    let m = ModelSpec::bk(s, &d).unwrap();
    (s, d, m)
}

fn sierra_model(l_p: f64, mu0: f64, m2: f64, theta: f64) -> (SierraParams, ModelSpec) {
    let p = SierraParams::new(l_p, mu0).unwrap();
    let m = ModelSpec::sierra(p, m2, theta, SierraConvention::ScaledAngle, SierraWeight::ModulusMatched)
        .unwrap();
    (p, m)
}

fn bk_example() -> (PolymerScale, SelfAdjointDomain, ModelSpec) {
    bk_model(0.05, 2.0 * (FRAC_PI_4 - 0.3), PI)
}

fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { b } else { a + i as f64 * h }).collect()
}

/// Max relative deviation of `H ψ` from `E ψ` on the stencil interior.
fn fd_error<F: Fn(f64) -> polyzeta::Result<Complex64>>(kind: &ModelKind, a: f64, b: f64, n: usize, e: f64, psi: F) -> f64 {
    let w = Wavefunction::sample(uniform_grid(a, b, n), e, psi).unwrap();
    let h = apply_hamiltonian_fd(kind, &w).unwrap();
    h.values
        .iter()
        .zip(&w.values[2..n - 2])
        .map(|(hv, v)| (hv - e * v).norm() / (e * v).norm())
        .fold(0.0, f64::max)
}

/// Max deviation of the integrated solution from the closed form matched at m₁.
fn ode_error<F: Fn(f64) -> Complex64>(model: &ModelSpec, e: f64, n: usize, closed: F) -> f64 {
    let w = integrate_eigen_ode(model, e, n).unwrap();
    let scale = 1.0 / closed(model.m1);
    w.grid
        .iter()
        .zip(&w.values)
        .map(|(&p, v)| (v - closed(p) * scale).norm())
        .fold(0.0, f64::max)
}

#[test]
fn ode_matches_closed_eigenfunctions() {
    let (s, d, m) = bk_example();
    let e = spectrum(3, &d, &s).unwrap();
    let err = ode_error(&m, e, 100_000, |p| eigenfunction(p, e, &s).unwrap());
    assert!(err < 1e-8, "bk {err}");

    let (p, m) = sierra_model(1.0, 0.05, 2.0, PI);
    let e = sierra_spectrum(2, PI, 2.0, &p).unwrap();
    let err = ode_error(&m, e, 100_000, |q| sierra_eigenfunction(q, e, &p).unwrap());
    assert!(err < 1e-8, "sierra {err}");
}

#[test]
fn zero_energy_solution_keeps_its_modulus_profile() {
    let (s, _, m) = bk_model(0.01, 0.9 * PI, 0.0);
    let w = integrate_eigen_ode(&m, 0.0, 10_000).unwrap();
    for (p, v) in w.grid.iter().zip(&w.values) {
        let q = v.norm() * s.angle(*p).sin().sqrt();
        assert!((q - 1.0).abs() < 1e-10);
    }
}

#[test]
fn ode_converges_at_fourth_order() {
    let (s, d, m) = bk_example();
    let e = spectrum(5, &d, &s).unwrap();
    let closed = |p: f64| eigenfunction(p, e, &s).unwrap();
    let ratio = ode_error(&m, e, 1000, closed) / ode_error(&m, e, 2000, closed);
    assert!((ratio / 16.0 - 1.0).abs() < 0.2, "bk ratio {ratio}");

    let (p, m) = sierra_model(1.0, 0.05, 2.0, PI);
    let e = sierra_spectrum(4, PI, 2.0, &p).unwrap();
    let closed = |q: f64| sierra_eigenfunction(q, e, &p).unwrap();
    let ratio = ode_error(&m, e, 1000, closed) / ode_error(&m, e, 2000, closed);
    assert!((ratio / 16.0 - 1.0).abs() < 0.2, "sierra ratio {ratio}");
}

#[test]
fn ode_rejects_short_runs_and_bad_endpoints() {
    let (_, _, m) = bk_example();
    assert!(integrate_eigen_ode(&m, 1.0, 999).is_err());
    let s = PolymerScale::unit(0.1).unwrap();
    let kind = ModelKind::BkPolymer(s);
    assert!(matches!(ModelSpec::new(kind, 15.0, 40.0, 0.0, 1.0), Err(Error::Branch(_))));
}

#[test]
fn mismatch_separates_levels_from_gaps() {
    let (s, d, m) = bk_example();
    let m = m.with_steps(100_000);
    let gap = polyzeta::bk_model::level_spacing(&d, &s).unwrap();
    for n in [0, 3, 7] {
        let e = spectrum(n, &d, &s).unwrap();
        let on = quantization_mismatch(&m, e).unwrap();
        let off = quantization_mismatch(&m, e + 0.5 * gap).unwrap();
        assert!(on < 1e-7, "on-level {on}");
        assert!(off > 1e3 * on && off > 10.0 * on);
        let shifted = ModelSpec { theta: m.theta + 2.0 * PI, ..m };
        assert!((quantization_mismatch(&shifted, e).unwrap() - on).abs() < 1e-12);
    }

    let (p, m) = sierra_model(1.0, 0.05, 2.0, PI);
    let m = m.with_steps(100_000);
    let gap = sierra_spectrum(1, 0.0, 2.0, &p).unwrap();
    for n in [0, 2, 5] {
        let e = sierra_spectrum(n, PI, 2.0, &p).unwrap();
        let on = quantization_mismatch(&m, e).unwrap();
        let off = quantization_mismatch(&m, e + 0.5 * gap).unwrap();
        assert!(on < 1e-7, "on-level {on}");
        assert!(off > 1e3 * on);
    }
}

#[test]
fn shooting_reproduces_the_examples() {
    let (s, d, m) = bk_example();
    let shot = shoot_spectrum(&m, 4).unwrap();
    let closed = spectrum(3, &d, &s).unwrap();
    assert!((shot.levels[3] - closed).abs() < 1e-8 * (1.0 + closed.abs()));

    let (p, m) = sierra_model(1.0, 0.05, 2.0, PI);
    let shot = shoot_spectrum(&m, 3).unwrap();
    let closed = sierra_spectrum(2, PI, 2.0, &p).unwrap();
    assert!((shot.levels[2] - closed).abs() < 1e-8 * (1.0 + closed.abs()));

    let (_, _, m) = bk_model(0.01, 0.9 * PI, 0.0);
    assert_eq!(shoot_spectrum(&m, 1).unwrap().levels, vec![0.0]);
    let (_, m) = sierra_model(1.0, 0.05, 2.0, 0.0);
    assert_eq!(shoot_spectrum(&m, 1).unwrap().levels, vec![0.0]);
}

#[test]
fn shooting_agrees_with_closed_forms_on_random_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..3 {
        let mu0 = rng.gen_range(0.01..0.1);
        let angle = rng.gen_range(FRAC_PI_2 + 0.15..PI - 0.15);
        let theta = rng.gen_range(0.0..2.0 * PI);
        let (s, d, m) = bk_model(mu0, angle, theta);
        let shot = shoot_spectrum(&m, 10).unwrap();
        for (n, &level) in shot.levels.iter().enumerate() {
            let closed = spectrum(n as u32, &d, &s).unwrap();
            assert!((level - closed).abs() < 1e-8 * (1.0 + closed.abs()), "bk n = {n}: {level} vs {closed}");
        }

        let l_p = rng.gen_range(0.5..2.0);
        let mu0 = rng.gen_range(0.01..0.1);
        let m2 = loop {
            let a = rng.gen_range(0.3..PI - 0.3);
            if (a - FRAC_PI_2).abs() > 0.2 {
                break a;
            }
        };
        let theta = rng.gen_range(0.0..2.0 * PI);
        let (p, m) = sierra_model(l_p, mu0, m2, theta);
        let shot = shoot_spectrum(&m, 10).unwrap();
        for (n, &level) in shot.levels.iter().enumerate() {
            let closed = sierra_spectrum(n as u32, theta, m2, &p).unwrap();
            assert!((level - closed).abs() < 1e-8 * (1.0 + closed.abs()), "sierra n = {n}: {level} vs {closed}");
        }
    }
}

#[test]
fn sequential_and_parallel_shooting_agree() {
    let (_, _, m) = bk_example();
    let a = shoot_spectrum_with(&m, 5, Exec::Sequential).unwrap();
    let b = shoot_spectrum_with(&m, 5, Exec::Parallel).unwrap();
    assert_eq!(a, b);
}

#[test]
fn finite_differences_reproduce_the_eigenvalue() {
    let (s, d, m) = bk_model(0.01, 0.9 * PI, 0.7);
    let e = spectrum(4, &d, &s).unwrap();
    let err = fd_error(&m.kind, d.m1, d.m2, 10_000, e, |p| eigenfunction(p, e, &s));
    assert!(err < 1e-6, "bk {err}");

    let (p, m) = sierra_model(1.0, 0.05, 2.0, PI);
    let e = sierra_spectrum(3, PI, 2.0, &p).unwrap();
    let err = fd_error(&m.kind, m.m1, m.m2, 10_000, e, |q| sierra_eigenfunction(q, e, &p));
    assert!(err < 1e-6, "sierra {err}");
}

#[test]
fn finite_differences_converge_at_fourth_order() {
    let (s, d, m) = bk_model(0.01, 0.9 * PI, 0.7);
    let e = spectrum(4, &d, &s).unwrap();
    let psi = |p| eigenfunction(p, e, &s);
    // grids 1000 → 1999 halve the spacing exactly
    let ratio = fd_error(&m.kind, d.m1, d.m2, 1000, e, psi) / fd_error(&m.kind, d.m1, d.m2, 1999, e, psi);
    assert!((ratio / 16.0 - 1.0).abs() < 0.3, "bk ratio {ratio}");

    let (p, m) = sierra_model(1.0, 0.05, 2.0, PI);
    let e = sierra_spectrum(3, PI, 2.0, &p).unwrap();
    let psi = |q| sierra_eigenfunction(q, e, &p);
    let ratio = fd_error(&m.kind, m.m1, m.m2, 1000, e, psi) / fd_error(&m.kind, m.m1, m.m2, 1999, e, psi);
    assert!((ratio / 16.0 - 1.0).abs() < 0.3, "sierra ratio {ratio}");
}

#[test]
fn finite_differences_need_a_uniform_grid() {
    let (s, d, m) = bk_model(0.01, 0.9 * PI, 0.0);
    let mut grid = uniform_grid(d.m1, d.m2, 2000);
    grid[1000] += 1e-3 * (grid[1] - grid[0]);
    let w = Wavefunction::sample(grid, 1.0, |p| eigenfunction(p, 1.0, &s)).unwrap();
    assert!(matches!(apply_hamiltonian_fd(&m.kind, &w), Err(Error::Grid(_))));
    let short = Wavefunction::sample(uniform_grid(d.m1, d.m2, 999), 1.0, |p| eigenfunction(p, 1.0, &s)).unwrap();
    assert!(matches!(apply_hamiltonian_fd(&m.kind, &short), Err(Error::Grid(_))));
}
