//! Polymer-quantized Berry–Keating model in the momentum representation.
//!
//! The symmetric operator is `iħ √f d/dp √f` with
//! `f(p) = (ħ/μ₀) sin(μ₀p/ħ)` on the branch `0 < μ₀p/ħ < π`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{ensure, Error, Result};
use crate::specfun::gamma_ratio_phase;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolymerScale {
    pub mu0: f64,
    pub hbar: f64,
}

impl PolymerScale {
    pub fn new(mu0: f64, hbar: f64) -> Result<Self> {
        ensure(mu0 > 0.0 && mu0.is_finite(), || {
            format!("polymer scale mu0 must be > 0, got {mu0}")
        })?;
        ensure(hbar > 0.0 && hbar.is_finite(), || format!("hbar must be > 0, got {hbar}"))?;
        Ok(Self { mu0, hbar })
    }

    /// Scale with ħ = 1.
    pub fn unit(mu0: f64) -> Result<Self> {
        Self::new(mu0, 1.0)
    }

    /// Dimensionless angle `μ₀p/ħ`.
    pub fn angle(&self, p: f64) -> f64 {
        self.mu0 * p / self.hbar
    }

    /// Upper edge `πħ/μ₀` of the momentum branch.
    pub fn branch_end(&self) -> f64 {
        PI * self.hbar / self.mu0
    }

    /// Midpoint `πħ/(2μ₀)` of the branch, where the domain starts.
    pub fn branch_mid(&self) -> f64 {
        0.5 * self.branch_end()
    }

    fn check_branch(&self, p: f64) -> Result<f64> {
        let u = self.angle(p);
        if u > 0.0 && u < PI {
            Ok(u)
        } else {
            Err(Error::Branch(format!(
                "mu0*p/hbar = {u} outside the branch (0, pi)"
            )))
        }
    }
}

/// Self-adjoint extension `e^{iθ}φ(m₁) = √sin(μ₀m₂/ħ) φ(m₂)` with
/// `m₁ = πħ/(2μ₀)`.
///
/// `m₂` may lie on either side of `m₁`; the closed forms only need it inside
/// the branch. `θ` is kept as given, so shifting it by 2π shifts the level
/// index by one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfAdjointDomain {
    pub m1: f64,
    pub m2: f64,
    pub theta: f64,
}

impl SelfAdjointDomain {
    pub fn new(m2: f64, theta: f64, scale: &PolymerScale) -> Result<Self> {
        ensure(theta.is_finite(), || format!("theta must be finite, got {theta}"))?;
        scale.check_branch(m2)?;
        let m1 = scale.branch_mid();
        ensure(m2 != m1, || "m2 coincides with m1 = pi*hbar/(2 mu0)".to_string())?;
        Ok(Self { m1, m2, theta })
    }

    /// Whether `m₁ < m₂`, the ordering the extension is stated for.
    pub fn is_ordered(&self) -> bool {
        self.m1 < self.m2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Integration constant set to one.
    UnitConstant,
    /// Unit L² norm on the sampled grid.
    UnitNorm,
}

impl Normalization {
    pub fn label(self) -> &'static str {
        match self {
            Normalization::UnitConstant => "C=1",
            Normalization::UnitNorm => "unit-norm",
        }
    }
}

/// Wavefunction sampled on an ascending momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub energy: f64,
    pub normalization: Normalization,
}

impl Wavefunction {
    /// Samples `f` on `grid`, which must be strictly ascending.
    pub fn sample<F>(grid: Vec<f64>, energy: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<Complex64>,
    {
        ensure(grid.windows(2).all(|w| w[0] < w[1]), || {
            "wavefunction grid must be strictly ascending".to_string()
        })?;
        let values = grid.iter().map(|&p| f(p)).collect::<Result<Vec<_>>>()?;
        Ok(Self { grid, values, energy, normalization: Normalization::UnitConstant })
    }

    /// Rescaled to unit trapezoidal L² norm.
    pub fn normalized(&self) -> Result<Self> {
        let norm_sq: f64 = self
            .grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(g, v)| 0.5 * (g[1] - g[0]) * (v[0].norm_sqr() + v[1].norm_sqr()))
            .sum();
        if !(norm_sq > 0.0 && norm_sq.is_finite()) {
            return Err(Error::Degenerate(format!("cannot normalize, norm^2 = {norm_sq}")));
        }
        let k = norm_sq.sqrt().recip();
        Ok(Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * k).collect(),
            energy: self.energy,
            normalization: Normalization::UnitNorm,
        })
    }
}

/// `(ħ/μ₀) sin(μ₀p/ħ)`.
pub fn regulated_momentum(p: f64, scale: &PolymerScale) -> f64 {
    scale.hbar / scale.mu0 * scale.angle(p).sin()
}

fn ln_cot_half(u: f64) -> f64 {
    (0.5 * u).tan().recip().ln()
}

/// `φ_E(p) = cot(μ₀p/2ħ)^{iE/ħ} / √sin(μ₀p/ħ)`, integration constant 1.
///
/// On the branch the half angle stays in (0, π/2), so `cot` is positive
/// and the real logarithm defines the power.
pub fn eigenfunction(p: f64, e: f64, scale: &PolymerScale) -> Result<Complex64> {
    let u = scale.check_branch(p)?;
    Ok(Complex64::from_polar(u.sin().sqrt().recip(), e / scale.hbar * ln_cot_half(u)))
}

/// Small-μ₀ leading term `p^{−1/2 − iE/ħ} Γ(1/4 + iE/2ħ)/Γ(1/4 − iE/2ħ)`.
pub fn eigenfunction_asymptotic(p: f64, e: f64, hbar: f64) -> Result<Complex64> {
    ensure(p > 0.0, || format!("asymptotic eigenfunction needs p > 0, got {p}"))?;
    ensure(hbar > 0.0, || format!("hbar must be > 0, got {hbar}"))?;
    let x = e / hbar;
    Ok(Complex64::from_polar(p.sqrt().recip(), -x * p.ln()) * gamma_ratio_phase(x)?)
}

/// Constant relating the two normalizations:
/// `eigenfunction ≈ K · eigenfunction_asymptotic` as μ₀ → 0, with
/// `K = (2ħ/μ₀)^{iE/ħ} (ħ/μ₀)^{1/2} / R(E)` and `R` the Γ ratio.
pub fn asymptotic_matching_constant(e: f64, scale: &PolymerScale) -> Result<Complex64> {
    let x = e / scale.hbar;
    let k = Complex64::from_polar(
        (scale.hbar / scale.mu0).sqrt(),
        x * (2.0 * scale.hbar / scale.mu0).ln(),
    );
    Ok(k / gamma_ratio_phase(x)?)
}

/// Logs this close to zero are rounding noise around `μ₀m₂/2ħ = π/4`.
const DEGENERATE_LOG: f64 = 1e-14;

/// `ln cot(μ₀m₂/2ħ)`, failing where it vanishes.
fn spectrum_log(domain: &SelfAdjointDomain, scale: &PolymerScale) -> Result<f64> {
    let u = scale.check_branch(domain.m2)?;
    let l = ln_cot_half(u);
    if l.abs() <= DEGENERATE_LOG || !l.is_finite() {
        return Err(Error::Degenerate(format!(
            "ln cot(mu0*m2/2hbar) = {l}; level spacing undefined"
        )));
    }
    Ok(l)
}

/// Level spacing `2πħ / ln cot(μ₀m₂/2ħ)`; negative when `m₂ > m₁`.
pub fn level_spacing(domain: &SelfAdjointDomain, scale: &PolymerScale) -> Result<f64> {
    Ok(2.0 * PI * scale.hbar / spectrum_log(domain, scale)?)
}

/// `E_n = 2πħ/ln cot(μ₀m₂/2ħ) · (n + θ/2π)`, sign as it comes.
pub fn spectrum(n: u32, domain: &SelfAdjointDomain, scale: &PolymerScale) -> Result<f64> {
    Ok(level_spacing(domain, scale)? * (f64::from(n) + domain.theta / (2.0 * PI)))
}

fn expansion_with_log(
    n: u32,
    domain: &SelfAdjointDomain,
    scale: &PolymerScale,
    log: f64,
) -> Result<f64> {
    if !(log > 0.0) {
        return Err(Error::Argument(format!("expansion log must be > 0, got {log}")));
    }
    let h = scale.hbar;
    let lead = 2.0 * PI * h / log * (f64::from(n) + domain.theta / (2.0 * PI));
    let corr = (domain.m2 * scale.mu0 / h).powi(2) / (12.0 * log);
    Ok(lead * (1.0 + corr))
}

/// Two-factor small-μ₀ truncation with the printed log `ln(2ħ/m₂)`.
pub fn spectrum_expansion(n: u32, domain: &SelfAdjointDomain, scale: &PolymerScale) -> Result<f64> {
    expansion_with_log(n, domain, scale, (2.0 * scale.hbar / domain.m2).ln())
}

/// Same truncation with `ln(2ħ/(μ₀m₂))`, the small-angle expansion of
/// `ln cot(μ₀m₂/2ħ)`.
pub fn spectrum_expansion_scaled(
    n: u32,
    domain: &SelfAdjointDomain,
    scale: &PolymerScale,
) -> Result<f64> {
    expansion_with_log(n, domain, scale, (2.0 * scale.hbar / (scale.mu0 * domain.m2)).ln())
}

/// `|e^{iθ}φ_E(m₁) − √sin(μ₀m₂/ħ) φ_E(m₂)|`.
pub fn boundary_residual(e: f64, domain: &SelfAdjointDomain, scale: &PolymerScale) -> Result<f64> {
    let left = Complex64::from_polar(1.0, domain.theta) * eigenfunction(domain.m1, e, scale)?;
    let w = scale.check_branch(domain.m2)?.sin().sqrt();
    let right = w * eigenfunction(domain.m2, e, scale)?;
    Ok((left - right).norm())
}
