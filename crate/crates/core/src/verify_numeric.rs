//! Numerical oracles for the polymer models: RK4 integration of the
//! first-order eigen-equation, shooting on the boundary condition, and a
//! finite-difference application of the symmetric operator.
//!
//! Both operators have the form `iħ √f d/dp (√f φ)`, so `Hφ = Eφ` reads
//! `φ' = −(iE/(ħf) + f'/(2f)) φ`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bk_model::{PolymerScale, SelfAdjointDomain, Wavefunction};
use crate::error::{ensure, Error, Result};
use crate::exec::Exec;
use crate::sierra_model::{sierra_weight, SierraConvention, SierraParams, SierraWeight};

pub const MIN_STEPS: usize = 1000;
pub const MIN_FD_POINTS: usize = 1000;
/// RK4 steps used by [`quantization_mismatch`] and the shooting routines.
pub const DEFAULT_STEPS: usize = 20_000;
/// Absolute bisection tolerance on shot energies.
pub const LEVEL_TOL: f64 = 1e-10;
const GRID_UNIFORMITY_TOL: f64 = 1e-8;

/// Generator `f` of a symmetric operator `iħ √f d/dp √f`.
pub trait Generator {
    fn hbar(&self) -> f64;
    fn f(&self, p: f64) -> f64;
    fn df(&self, p: f64) -> f64;

    /// `(f(p), f'(p))`; override when the two share work.
    fn f_df(&self, p: f64) -> (f64, f64) {
        (self.f(p), self.df(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    BkPolymer(PolymerScale),
    SierraPolymer(SierraParams),
}

impl ModelKind {
    pub fn label(&self) -> &'static str {
        match self {
            ModelKind::BkPolymer(_) => "bk-polymer",
            ModelKind::SierraPolymer(_) => "sierra-polymer",
        }
    }

    fn angle(&self, p: f64) -> f64 {
        match self {
            ModelKind::BkPolymer(s) => s.angle(p),
            ModelKind::SierraPolymer(s) => s.mu0 * p,
        }
    }
}

impl Generator for ModelKind {
    fn hbar(&self) -> f64 {
        match self {
            ModelKind::BkPolymer(s) => s.hbar,
            ModelKind::SierraPolymer(_) => 1.0,
        }
    }

    fn f(&self, p: f64) -> f64 {
        match self {
            ModelKind::BkPolymer(s) => s.hbar / s.mu0 * s.angle(p).sin(),
            ModelKind::SierraPolymer(s) => {
                let u = s.mu0 * p;
                s.base(u) / (s.mu0 * u.sin())
            }
        }
    }

    fn df(&self, p: f64) -> f64 {
        self.f_df(p).1
    }

    fn f_df(&self, p: f64) -> (f64, f64) {
        match self {
            ModelKind::BkPolymer(s) => {
                let (sin, cos) = s.angle(p).sin_cos();
                (s.hbar / s.mu0 * sin, cos)
            }
            ModelKind::SierraPolymer(s) => {
                let u = s.mu0 * p;
                let (sin, cos) = u.sin_cos();
                let half = (0.5 * u).sin();
                let b = s.epsilon() + 4.0 * half * half;
                (b / (s.mu0 * sin), 2.0 - b * cos / (sin * sin))
            }
        }
    }
}

/// Boundary-value problem `e^{iθ}φ(m₁) = w φ(m₂)` for one model.
///
/// `m1` and `m2` are momenta; `m2` may lie on either side of `m1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub m1: f64,
    pub m2: f64,
    pub theta: f64,
    pub weight: f64,
    pub n_steps: usize,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, m1: f64, m2: f64, theta: f64, weight: f64) -> Result<Self> {
        ensure(theta.is_finite(), || format!("theta must be finite, got {theta}"))?;
        ensure(weight != 0.0 && weight.is_finite(), || {
            format!("boundary weight must be finite and nonzero, got {weight}")
        })?;
        ensure(m1 != m2, || "empty momentum interval".to_string())?;
        for p in [m1, m2] {
            let u = kind.angle(p);
            if !(u > 0.0 && u < PI) {
                return Err(Error::Branch(format!(
                    "endpoint p = {p} (angle {u}) outside the branch (0, pi)"
                )));
            }
        }
        Ok(Self { kind, m1, m2, theta, weight, n_steps: DEFAULT_STEPS })
    }

    /// Berry–Keating extension with weight `√sin(μ₀m₂/ħ)`.
    pub fn bk(scale: PolymerScale, domain: &SelfAdjointDomain) -> Result<Self> {
        let w = scale.angle(domain.m2).sin().sqrt();
        Self::new(ModelKind::BkPolymer(scale), domain.m1, domain.m2, domain.theta, w)
    }

    /// Sierra extension; `m2` is read according to `convention` for the
    /// endpoint and enters the weight as a bare angle.
    pub fn sierra(
        params: SierraParams,
        m2: f64,
        theta: f64,
        convention: SierraConvention,
        weight: SierraWeight,
    ) -> Result<Self> {
        let w = sierra_weight(m2, &params, weight)?;
        let p2 = convention.endpoint_momentum(m2, &params);
        Self::new(ModelKind::SierraPolymer(params), params.m1(), p2, theta, w)
    }

    pub fn with_steps(mut self, n_steps: usize) -> Self {
        self.n_steps = n_steps;
        self
    }

    /// `∫_{m₁}^{m₂} dp/f` in closed form.
    pub fn phase_integral(&self) -> f64 {
        match self.kind {
            ModelKind::BkPolymer(s) => {
                let ln_tan_half = |p: f64| (0.5 * s.angle(p)).tan().ln();
                ln_tan_half(self.m2) - ln_tan_half(self.m1)
            }
            ModelKind::SierraPolymer(s) => {
                0.5 * (s.base(s.mu0 * self.m2).ln() - s.base(s.mu0 * self.m1).ln())
            }
        }
    }

    /// Closed-form level spacing `−2πħ / ∫dp/f`.
    pub fn spacing(&self) -> Result<f64> {
        let j = self.phase_integral();
        if j.abs() <= 1e-14 || !j.is_finite() {
            return Err(Error::Degenerate(format!("phase integral {j}; spacing undefined")));
        }
        Ok(-2.0 * PI * self.kind.hbar() / j)
    }

    /// Fractional level offset `(θ − arg w)/2π` reduced to `[0, 1)`.
    pub fn level_offset(&self) -> f64 {
        let arg_w = if self.weight < 0.0 { PI } else { 0.0 };
        ((self.theta - arg_w) / (2.0 * PI)).rem_euclid(1.0)
    }
}

/// Logarithmic derivative `φ'/φ` at `p`, or `None` where `f ≤ 0`.
fn log_derivative<G: Generator>(g: &G, e_over_hbar: f64, p: f64) -> Option<Complex64> {
    let (f, df) = g.f_df(p);
    (f > 0.0 && f.is_finite()).then(|| Complex64::new(-0.5 * df / f, -e_over_hbar / f))
}

fn check_positive<G: Generator>(g: &G, p: f64) -> Result<()> {
    let f = g.f(p);
    if f > 0.0 && f.is_finite() {
        Ok(())
    } else {
        Err(Error::Branch(format!("generator f({p}) = {f} is not positive")))
    }
}

/// Runs RK4 from `a` (value 1) to `b`, reporting every state to `visit`.
fn rk4<G: Generator, V: FnMut(f64, Complex64)>(
    g: &G,
    e: f64,
    a: f64,
    b: f64,
    n_steps: usize,
    mut visit: V,
) -> Result<Complex64> {
    ensure(n_steps >= MIN_STEPS, || format!("need at least {MIN_STEPS} steps, got {n_steps}"))?;
    let h = (b - a) / n_steps as f64;
    let x = e / g.hbar();
    let coeff = |p: f64| {
        log_derivative(g, x, p)
            .ok_or_else(|| Error::Branch(format!("generator f({p}) = {} is not positive", g.f(p))))
    };
    let mut y = Complex64::new(1.0, 0.0);
    let mut c_start = coeff(a)?;
    visit(a, y);
    for i in 0..n_steps {
        let p = a + i as f64 * h;
        let p_next = if i + 1 == n_steps { b } else { a + (i + 1) as f64 * h };
        // the equation is linear, so the three distinct nodes are shared
        let c_mid = coeff(p + 0.5 * h)?;
        let c_end = coeff(p_next)?;
        let k1 = c_start * y;
        let k2 = c_mid * (y + k1 * (0.5 * h));
        let k3 = c_mid * (y + k2 * (0.5 * h));
        let k4 = c_end * (y + k3 * h);
        y += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
        visit(p_next, y);
        c_start = c_end;
    }
    Ok(y)
}

/// Solves the eigen-equation from `m₁` with `φ(m₁) = 1` on a uniform grid of
/// `n_steps` steps. The returned grid is ascending, whichever side of `m₁`
/// the endpoint `m₂` lies on.
pub fn integrate_eigen_ode(model: &ModelSpec, e: f64, n_steps: usize) -> Result<Wavefunction> {
    let mut grid = Vec::with_capacity(n_steps + 1);
    let mut values = Vec::with_capacity(n_steps + 1);
    rk4(&model.kind, e, model.m1, model.m2, n_steps, |p, y| {
        grid.push(p);
        values.push(y);
    })?;
    if model.m2 < model.m1 {
        grid.reverse();
        values.reverse();
    }
    Ok(Wavefunction {
        grid,
        values,
        energy: e,
        normalization: crate::bk_model::Normalization::UnitConstant,
    })
}

fn endpoint(model: &ModelSpec, e: f64) -> Result<Complex64> {
    rk4(&model.kind, e, model.m1, model.m2, model.n_steps, |_, _| {})
}

/// Complex defect `w φ(m₂) − e^{iθ} φ(m₁)` of the integrated solution.
pub fn boundary_defect(model: &ModelSpec, e: f64) -> Result<Complex64> {
    Ok(model.weight * endpoint(model, e)? - Complex64::from_polar(1.0, model.theta))
}

/// `|e^{iθ}φ(m₁) − w φ(m₂)|` from the integrated solution.
pub fn quantization_mismatch(model: &ModelSpec, e: f64) -> Result<f64> {
    Ok(boundary_defect(model, e)?.norm())
}

/// Phase of `w φ(m₂) e^{−iθ}`; zero exactly when the phases of the boundary
/// condition match.
pub fn quantization_phase(model: &ModelSpec, e: f64) -> Result<f64> {
    let z = model.weight * endpoint(model, e)? * Complex64::from_polar(1.0, -model.theta);
    Ok(z.arg())
}

/// Shot spectrum in level-index order.
///
/// Levels are `E_n` for `n = 0, 1, …`; when the spacing is negative they
/// descend in energy.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotSpectrum {
    pub levels: Vec<f64>,
    /// `|quantization_phase|` at each level.
    pub residuals: Vec<f64>,
    /// `quantization_mismatch` at each level.
    pub mismatches: Vec<f64>,
    /// Energy width of the scan brackets, a quarter spacing.
    pub bracket_width: f64,
    /// Closed-form spacing used to lay out the scan.
    pub spacing: f64,
}

pub fn shoot_spectrum(model: &ModelSpec, n_levels: usize) -> Result<ShotSpectrum> {
    shoot_spectrum_with(model, n_levels, Exec::default())
}

/// Finds the first `n_levels` roots of [`quantization_phase`] in
/// `x = E/spacing ≥ 0`, scanning `x` in quarter steps and bisecting each
/// bracket to [`LEVEL_TOL`] in energy.
pub fn shoot_spectrum_with(model: &ModelSpec, n_levels: usize, exec: Exec) -> Result<ShotSpectrum> {
    ensure(n_levels >= 1, || "n_levels must be >= 1".to_string())?;
    let s = model.spacing()?;
    let x_max = n_levels as f64 - 1.0 + model.level_offset() + 0.5;
    let x0 = -0.125;
    let n_nodes = ((x_max - x0) / 0.25).ceil() as usize + 2;
    let xs: Vec<f64> = (0..n_nodes).map(|k| x0 + 0.25 * k as f64).collect();
    let phases = exec
        .map_slice(&xs, |&x| quantization_phase(model, x * s))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let mut brackets = Vec::new();
    for k in 0..n_nodes - 1 {
        let (da, db) = (phases[k], phases[k + 1]);
        if da == 0.0 {
            brackets.push((xs[k], xs[k]));
        } else if (da < 0.0) != (db < 0.0) && db != 0.0 && da.abs() + db.abs() < PI {
            brackets.push((xs[k], xs[k + 1]));
        }
    }
    let roots = exec
        .map_slice(&brackets, |&(a, b)| bisect_phase(model, s, a, b))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let roots: Vec<f64> = roots
        .into_iter()
        .filter(|&x| x >= -1e-9 && x <= x_max)
        .map(|x| x.max(0.0))
        .collect();
    if roots.len() != n_levels {
        return Err(Error::MissedLevel { expected: n_levels, found: roots.len() });
    }
    let levels: Vec<f64> = roots.iter().map(|x| x * s).collect();
    let checks = exec
        .map_slice(&levels, |&e| -> Result<(f64, f64)> {
            Ok((quantization_phase(model, e)?.abs(), quantization_mismatch(model, e)?))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let (residuals, mismatches) = checks.into_iter().unzip();
    Ok(ShotSpectrum { levels, residuals, mismatches, bracket_width: 0.25 * s.abs(), spacing: s })
}

fn bisect_phase(model: &ModelSpec, s: f64, mut a: f64, mut b: f64) -> Result<f64> {
    if a == b {
        return Ok(a);
    }
    let mut da = quantization_phase(model, a * s)?;
    let x_tol = LEVEL_TOL / s.abs();
    while b - a > x_tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let dm = quantization_phase(model, m * s)?;
        if dm == 0.0 {
            return Ok(m);
        }
        if (dm < 0.0) == (da < 0.0) {
            a = m;
            da = dm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Applies `iħ √f d/dp (√f ψ)` with the 5-point central stencil.
///
/// The first and last two grid points are dropped from the result.
pub fn apply_hamiltonian_fd<G: Generator>(g: &G, psi: &Wavefunction) -> Result<Wavefunction> {
    let n = psi.grid.len();
    if n < MIN_FD_POINTS || psi.values.len() != n {
        return Err(Error::Grid(format!(
            "need at least {MIN_FD_POINTS} samples with matching values, got {n} points and {} values",
            psi.values.len()
        )));
    }
    let h = (psi.grid[n - 1] - psi.grid[0]) / (n - 1) as f64;
    for (i, w) in psi.grid.windows(2).enumerate() {
        if ((w[1] - w[0]) - h).abs() > GRID_UNIFORMITY_TOL * h.abs() {
            return Err(Error::Grid(format!("non-uniform spacing at index {i}")));
        }
    }
    ensure(h > 0.0, || "grid must be ascending".to_string())?;
    let mut sqrt_f = Vec::with_capacity(n);
    for &p in &psi.grid {
        check_positive(g, p)?;
        sqrt_f.push(g.f(p).sqrt());
    }
    let u: Vec<Complex64> = psi.values.iter().zip(&sqrt_f).map(|(v, s)| v * s).collect();
    let ih = Complex64::new(0.0, g.hbar());
    let mut grid = Vec::with_capacity(n - 4);
    let mut values = Vec::with_capacity(n - 4);
    for i in 2..n - 2 {
        let du = (-u[i + 2] + 8.0 * u[i + 1] - 8.0 * u[i - 1] + u[i - 2]) / (12.0 * h);
        grid.push(psi.grid[i]);
        values.push(ih * sqrt_f[i] * du);
    }
    Ok(Wavefunction { grid, values, energy: psi.energy, normalization: psi.normalization })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bk_model::{eigenfunction, spectrum};
    use approx::assert_abs_diff_eq;

    struct Flat;

    impl Generator for Flat {
        fn hbar(&self) -> f64 {
            1.0
        }
        fn f(&self, _: f64) -> f64 {
            2.0
        }
        fn df(&self, _: f64) -> f64 {
            0.0
        }
    }

    fn bk_model(mu0: f64, m2: f64, theta: f64) -> ModelSpec {
        let scale = PolymerScale::unit(mu0).unwrap();
        ModelSpec::bk(scale, &SelfAdjointDomain::new(m2, theta, &scale).unwrap()).unwrap()
    }

    #[test]
    fn spacing_matches_closed_form() {
        let m = bk_model(0.05, 50.0, 0.0);
        let scale = PolymerScale::unit(0.05).unwrap();
        let d = SelfAdjointDomain::new(50.0, 0.0, &scale).unwrap();
        assert_abs_diff_eq!(
            m.spacing().unwrap(),
            crate::bk_model::level_spacing(&d, &scale).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn model_rejects_out_of_branch() {
        let scale = PolymerScale::unit(0.05).unwrap();
        let k = ModelKind::BkPolymer(scale);
        assert!(matches!(ModelSpec::new(k, 31.4, 70.0, 0.0, 1.0), Err(Error::Branch(_))));
        assert!(ModelSpec::new(k, 31.4, 50.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn ode_matches_closed_form() {
        let m = bk_model(0.05, 50.0, 0.0);
        let scale = PolymerScale::unit(0.05).unwrap();
        let wf = integrate_eigen_ode(&m, 4.0, 20_000).unwrap();
        for (p, v) in wf.grid.iter().zip(&wf.values).step_by(997) {
            let exact = eigenfunction(*p, 4.0, &scale).unwrap();
            assert!((v - exact).norm() < 1e-9, "p = {p}");
        }
        assert!(integrate_eigen_ode(&m, 4.0, 10).is_err());
    }

    #[test]
    fn mismatch_small_on_level() {
        let m = bk_model(0.05, 50.0, 1.0);
        let scale = PolymerScale::unit(0.05).unwrap();
        let d = SelfAdjointDomain::new(50.0, 1.0, &scale).unwrap();
        let e = spectrum(2, &d, &scale).unwrap();
        assert!(quantization_mismatch(&m, e).unwrap() < 1e-7);
        let shifted = ModelSpec { theta: 1.0 + 2.0 * PI, ..m };
        assert_abs_diff_eq!(
            quantization_mismatch(&m, e + 1.0).unwrap(),
            quantization_mismatch(&shifted, e + 1.0).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn shooting_finds_zero_level() {
        let m = bk_model(0.05, 50.0, 0.0);
        let shot = shoot_spectrum(&m, 1).unwrap();
        assert_eq!(shot.levels.len(), 1);
        assert!(shot.levels[0].abs() < 1e-10);
        assert!(shoot_spectrum(&m, 0).is_err());
    }

    #[test]
    fn fd_constant_generator_annihilates_constants() {
        let grid: Vec<f64> = (0..1200).map(|i| 1.0 + 0.001 * i as f64).collect();
        let psi = Wavefunction::sample(grid, 0.0, |_| Ok(Complex64::new(1.0, 0.0))).unwrap();
        let out = apply_hamiltonian_fd(&Flat, &psi).unwrap();
        assert_eq!(out.grid.len(), 1196);
        assert!(out.values.iter().all(|v| v.norm() < 1e-9));
    }

    #[test]
    fn fd_rejects_bad_grids() {
        let short: Vec<f64> = (0..10).map(f64::from).collect();
        let psi = Wavefunction::sample(short, 0.0, |_| Ok(Complex64::new(1.0, 0.0))).unwrap();
        assert!(matches!(apply_hamiltonian_fd(&Flat, &psi), Err(Error::Grid(_))));
        let mut grid: Vec<f64> = (0..1200).map(|i| i as f64).collect();
        grid[600] += 0.3;
        let psi = Wavefunction::sample(grid, 0.0, |_| Ok(Complex64::new(1.0, 0.0))).unwrap();
        assert!(matches!(apply_hamiltonian_fd(&Flat, &psi), Err(Error::Grid(_))));
    }
}
