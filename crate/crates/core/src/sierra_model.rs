//! Polymer-quantized Sierra–Rodríguez-Laguna model (ħ = 1).
//!
//! The symmetrized operator is `i √F d/dp √F` with
//! `F(p) = ((2 − 2cos μ₀p)/μ₀² + l_p²) μ₀ / sin(μ₀p)`.
//!
//! The boundary constant Δ and the weight `csc(m₂)/Δ` take `m₂` as a bare
//! trigonometric argument while the eigenfunction takes `μ₀p`. The two
//! readings of `m₂` are kept apart by [`SierraConvention`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bk_model::PolymerScale;
use crate::error::{ensure, Error, Result};

const DEGENERATE_LOG: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SierraParams {
    pub l_p: f64,
    pub mu0: f64,
}

impl SierraParams {
    pub fn new(l_p: f64, mu0: f64) -> Result<Self> {
        ensure(l_p > 0.0 && l_p.is_finite(), || format!("l_p must be > 0, got {l_p}"))?;
        PolymerScale::unit(mu0)?;
        Ok(Self { l_p, mu0 })
    }

    pub fn scale(&self) -> PolymerScale {
        PolymerScale { mu0: self.mu0, hbar: 1.0 }
    }

    /// `μ₀² l_p²`.
    pub fn epsilon(&self) -> f64 {
        (self.mu0 * self.l_p).powi(2)
    }

    /// `Λ = 2 + μ₀² l_p²`.
    pub fn lambda(&self) -> f64 {
        2.0 + self.epsilon()
    }

    /// `m₁ = π/(2μ₀)`.
    pub fn m1(&self) -> f64 {
        PI / (2.0 * self.mu0)
    }

    /// `2 + μ₀²l_p² − 2cos(a)`, written without cancellation.
    pub fn base(&self, a: f64) -> f64 {
        self.epsilon() + 4.0 * (0.5 * a).sin().powi(2)
    }
}

/// How the boundary momentum `m₂` enters the eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SierraConvention {
    /// `m₂` is a momentum: ψ is evaluated at `p = m₂`.
    Printed,
    /// `m₂` is the angle `μ₀p₂`: ψ is evaluated at `p = m₂/μ₀`, the reading
    /// under which Δ and the spectrum follow from the eigenfunction.
    #[default]
    ScaledAngle,
}

impl SierraConvention {
    pub fn endpoint_momentum(self, m2: f64, params: &SierraParams) -> f64 {
        match self {
            SierraConvention::Printed => m2,
            SierraConvention::ScaledAngle => m2 / params.mu0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SierraConvention::Printed => "printed",
            SierraConvention::ScaledAngle => "scaled-angle",
        }
    }
}

/// Real weight multiplying `ψ(m₂)` in the boundary condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SierraWeight {
    /// `csc(m₂)/Δ`.
    #[default]
    Printed,
    /// `1/(Δ √sin m₂)`, the modulus the eigenfunction actually requires.
    ModulusMatched,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaConstant {
    pub value: f64,
}

impl DeltaConstant {
    pub fn gives_positive_spacing(&self) -> bool {
        self.value > 1.0
    }
}

/// `ψ_E(p) = sin(μ₀p)^{1/2} / (2 + μ₀²l_p² − 2cos μ₀p)^{1/2 + iE/2}`, N = 1.
pub fn sierra_eigenfunction(p: f64, e: f64, params: &SierraParams) -> Result<Complex64> {
    let u = params.mu0 * p;
    if !(u > 0.0 && u < PI) {
        return Err(Error::Branch(format!("mu0*p = {u} outside the branch (0, pi)")));
    }
    let b = params.base(u);
    Ok(Complex64::from_polar((u.sin() / b).sqrt(), -0.5 * e * b.ln()))
}

/// Small-μ₀ form `(p² + l_p²)^{−iE/2} √(p/(p² + l_p²))`, N = 1.
pub fn sierra_eigenfunction_expansion(p: f64, e: f64, l_p: f64) -> Result<Complex64> {
    ensure(p > 0.0, || format!("expansion needs p > 0, got {p}"))?;
    let q = p * p + l_p * l_p;
    Ok(Complex64::from_polar((p / q).sqrt(), -0.5 * e * q.ln()))
}

/// `μ₀^{−1/2 − iE}`: `sierra_eigenfunction ≈ K · sierra_eigenfunction_expansion`.
pub fn sierra_expansion_matching_constant(e: f64, mu0: f64) -> Complex64 {
    Complex64::from_polar(mu0.sqrt().recip(), -e * mu0.ln())
}

/// `Δ = √((2 + μ₀²l_p²)/(2 + μ₀²l_p² − 2cos m₂))`, `m₂` as a bare angle.
pub fn delta_constant(m2: f64, params: &SierraParams) -> Result<DeltaConstant> {
    ensure(m2.is_finite(), || format!("m2 must be finite, got {m2}"))?;
    let den = params.base(m2);
    ensure(den > 0.0, || format!("Delta denominator vanishes at m2 = {m2}"))?;
    Ok(DeltaConstant { value: (params.lambda() / den).sqrt() })
}

/// Level spacing `2π / ln Δ`.
pub fn sierra_level_spacing(m2: f64, params: &SierraParams) -> Result<f64> {
    let l = delta_constant(m2, params)?.value.ln();
    if l.abs() <= DEGENERATE_LOG {
        return Err(Error::Degenerate(format!("ln Delta = {l} at m2 = {m2}")));
    }
    Ok(2.0 * PI / l)
}

/// `E_n = (2π/ln Δ)(n + θ/2π)`.
pub fn sierra_spectrum(n: u32, theta: f64, m2: f64, params: &SierraParams) -> Result<f64> {
    Ok(sierra_level_spacing(m2, params)? * (f64::from(n) + theta / (2.0 * PI)))
}

fn expansion_parts(m2: f64) -> Result<(f64, f64)> {
    let c = m2.cos();
    let one_minus = 2.0 * (0.5 * m2).sin().powi(2);
    ensure(one_minus > 0.0, || format!("1 - cos(m2) vanishes at m2 = {m2}"))?;
    let log = -one_minus.ln();
    ensure(log.abs() > DEGENERATE_LOG, || format!("ln(1/(1 - cos m2)) vanishes at m2 = {m2}"))?;
    Ok((c / one_minus, log))
}

fn sierra_expansion_with(
    n: u32,
    theta: f64,
    m2: f64,
    params: &SierraParams,
    coefficient_scale: f64,
) -> Result<f64> {
    let (ratio, log) = expansion_parts(m2)?;
    let lead = 4.0 * PI / log * (f64::from(n) + theta / (2.0 * PI));
    Ok(lead * (1.0 + coefficient_scale * params.epsilon() * ratio / log))
}

/// Printed truncation
/// `(4π/L)(n + θ/2π)(1 + l_p²μ₀² cos m₂ / ((1 − cos m₂) L))`, `L = ln(1/(1 − cos m₂))`.
pub fn sierra_spectrum_expansion(n: u32, theta: f64, m2: f64, params: &SierraParams) -> Result<f64> {
    sierra_expansion_with(n, theta, m2, params, 1.0)
}

/// First-order series of `2π/ln Δ` in `μ₀²l_p²`; its correction is half the
/// printed one.
pub fn sierra_spectrum_expansion_series(
    n: u32,
    theta: f64,
    m2: f64,
    params: &SierraParams,
) -> Result<f64> {
    sierra_expansion_with(n, theta, m2, params, 0.5)
}

pub fn sierra_weight(m2: f64, params: &SierraParams, weight: SierraWeight) -> Result<f64> {
    let s = m2.sin();
    ensure(s != 0.0, || format!("csc(m2) undefined at m2 = {m2}"))?;
    let delta = delta_constant(m2, params)?.value;
    match weight {
        SierraWeight::Printed => Ok(1.0 / (s * delta)),
        SierraWeight::ModulusMatched => {
            ensure(s > 0.0, || format!("sin(m2) = {s} has no real square root"))?;
            Ok(1.0 / (s.sqrt() * delta))
        }
    }
}

/// `|e^{iθ}ψ_E(m₁) − (csc(m₂)/Δ) ψ_E(m₂)|` with `ψ` evaluated at momentum `m₂`.
pub fn sierra_boundary_residual(e: f64, m2: f64, theta: f64, params: &SierraParams) -> Result<f64> {
    sierra_boundary_residual_with(e, m2, theta, params, SierraConvention::Printed, SierraWeight::Printed)
}

pub fn sierra_boundary_residual_with(
    e: f64,
    m2: f64,
    theta: f64,
    params: &SierraParams,
    convention: SierraConvention,
    weight: SierraWeight,
) -> Result<f64> {
    let w = sierra_weight(m2, params, weight)?;
    let left = Complex64::from_polar(1.0, theta) * sierra_eigenfunction(params.m1(), e, params)?;
    let p2 = convention.endpoint_momentum(m2, params);
    let right = w * sierra_eigenfunction(p2, e, params)?;
    Ok((left - right).norm())
}
