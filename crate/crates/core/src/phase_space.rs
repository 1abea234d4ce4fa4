//! Semiclassical state counting.
//!
//! All four classical Hamiltonians are linear in `x`, `H(x, p) = x·g(p)`, so
//! the energy contour is `x_E(p) = E / g(p)` in closed form. The counting
//! oracle integrates `x_E(p) − l_x` over the momentum range where the contour
//! lies above the position cut (ħ = 1, first quadrant).

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{ensure, Error, Result};
use crate::quad::adaptive_simpson;

/// Absolute tolerance of the phase-space area quadrature.
pub const AREA_TOL: f64 = 1e-10;
/// Allowed deviation of `l_x·l_p` from 2π for [`n_bk`].
pub const PLANCK_CELL_TOL: f64 = 1e-9;

/// Position and momentum regulators bounding the counting region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceCuts {
    pub l_x: f64,
    pub l_p: f64,
}

impl PhaseSpaceCuts {
    pub fn new(l_x: f64, l_p: f64) -> Result<Self> {
        ensure(l_x > 0.0 && l_p > 0.0 && l_x.is_finite() && l_p.is_finite(), || {
            format!("cuts must be positive, got l_x = {l_x}, l_p = {l_p}")
        })?;
        Ok(Self { l_x, l_p })
    }

    /// Cuts spanning one Planck cell, `l_x = 2π / l_p`.
    pub fn planck(l_p: f64) -> Result<Self> {
        Self::new(2.0 * PI / l_p, l_p)
    }

    /// The symmetric Planck cell `l_x = l_p = √(2π)`.
    pub fn symmetric_planck() -> Self {
        let l = (2.0 * PI).sqrt();
        Self { l_x: l, l_p: l }
    }

    pub fn planck_cell(&self) -> f64 {
        self.l_x * self.l_p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianKind {
    /// `H = xp`
    Xp,
    /// `H = x sin(μ₀p)/μ₀`
    XpPolymer,
    /// `H = x(p + l_p²/p)`
    Sierra,
    /// `H = x(P² + l_p²)/P` with `P = sin(μ₀p)/μ₀`, `P² → (2 − 2cos μ₀p)/μ₀²`
    SierraPolymer,
}

impl HamiltonianKind {
    pub fn label(self) -> &'static str {
        match self {
            HamiltonianKind::Xp => "xp",
            HamiltonianKind::XpPolymer => "xp-polymer",
            HamiltonianKind::Sierra => "sierra",
            HamiltonianKind::SierraPolymer => "sierra-polymer",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalHamiltonian {
    pub kind: HamiltonianKind,
    /// Polymer scale; zero reduces a polymer kind to its classical parent.
    pub mu0: f64,
    /// Momentum scale of the Sierra kinds.
    pub l_p: f64,
}

impl ClassicalHamiltonian {
    pub fn xp() -> Self {
        Self { kind: HamiltonianKind::Xp, mu0: 0.0, l_p: 0.0 }
    }

    pub fn xp_polymer(mu0: f64) -> Self {
        Self { kind: HamiltonianKind::XpPolymer, mu0, l_p: 0.0 }
    }

    pub fn sierra(l_p: f64) -> Self {
        Self { kind: HamiltonianKind::Sierra, mu0: 0.0, l_p }
    }

    pub fn sierra_polymer(mu0: f64, l_p: f64) -> Self {
        Self { kind: HamiltonianKind::SierraPolymer, mu0, l_p }
    }

    fn is_polymer(&self) -> bool {
        matches!(self.kind, HamiltonianKind::XpPolymer | HamiltonianKind::SierraPolymer)
            && self.mu0 > 0.0
    }

    fn is_sierra(&self) -> bool {
        matches!(self.kind, HamiltonianKind::Sierra | HamiltonianKind::SierraPolymer)
    }

    fn validate(&self) -> Result<()> {
        ensure(self.mu0 >= 0.0 && self.mu0.is_finite(), || {
            format!("mu0 must be finite and >= 0, got {}", self.mu0)
        })?;
        if self.is_sierra() {
            ensure(self.l_p > 0.0, || format!("sierra l_p must be > 0, got {}", self.l_p))?;
        }
        Ok(())
    }

    /// Upper end of the momentum branch (exclusive).
    fn branch_end(&self) -> f64 {
        if self.is_polymer() {
            PI / self.mu0
        } else {
            f64::INFINITY
        }
    }

    /// `g(p) = H(1, p)`.
    fn momentum_factor(&self, p: f64) -> Result<f64> {
        if self.is_polymer() {
            let a = self.mu0 * p;
            if !(a > 0.0 && a < PI) {
                return Err(Error::Domain(format!(
                    "mu0*p = {a} outside the principal branch (0, pi)"
                )));
            }
        }
        let mu = self.mu0;
        Ok(match (self.kind, self.is_polymer()) {
            (HamiltonianKind::Xp, _) | (HamiltonianKind::XpPolymer, false) => p,
            (HamiltonianKind::XpPolymer, true) => (mu * p).sin() / mu,
            (HamiltonianKind::Sierra, _) | (HamiltonianKind::SierraPolymer, false) => {
                if p == 0.0 {
                    return Err(Error::Domain("sierra Hamiltonian is singular at p = 0".into()));
                }
                p + self.l_p * self.l_p / p
            }
            (HamiltonianKind::SierraPolymer, true) => {
                let a = mu * p;
                let big_p = a.sin() / mu;
                let p_sq = (2.0 * (0.5 * a).sin() / mu).powi(2); // (2 − 2cos a)/μ₀²
                (p_sq + self.l_p * self.l_p) / big_p
            }
        })
    }
}

/// Value of the classical Hamiltonian at `(x, p)`.
pub fn h_eval(h: &ClassicalHamiltonian, x: f64, p: f64) -> Result<f64> {
    h.validate()?;
    Ok(x * h.momentum_factor(p)?)
}

/// Phase-space area below the energy contour, divided by 2π.
///
/// For the xp kinds the region is `{x ≥ l_x, p ≥ l_p, H ≤ E}` restricted to
/// the monotone branch `μ₀p ≤ π/2`. For the Sierra kinds the momentum scale
/// lives in the Hamiltonian itself, so the region is `{x ≥ l_x, p > 0,
/// H ≤ E}` (inside `μ₀p < π` when polymer) and `cuts.l_p` is not used.
pub fn area_count_oracle(h: &ClassicalHamiltonian, e: f64, cuts: &PhaseSpaceCuts) -> Result<f64> {
    h.validate()?;
    ensure(e.is_finite(), || format!("energy must be finite, got {e}"))?;
    let (lo, hi) = if h.is_sierra() {
        sierra_momentum_range(h, e, cuts)?
    } else {
        xp_momentum_range(h, e, cuts)?
    };
    if hi <= lo {
        return Ok(0.0);
    }
    let l_x = cuts.l_x;
    let area = adaptive_simpson(
        |p| match h.momentum_factor(p) {
            Ok(g) => e / g - l_x,
            Err(_) => f64::NAN,
        },
        lo,
        hi,
        AREA_TOL,
    )?;
    Ok(area / (2.0 * PI))
}

fn xp_momentum_range(h: &ClassicalHamiltonian, e: f64, cuts: &PhaseSpaceCuts) -> Result<(f64, f64)> {
    let l_p = cuts.l_p;
    if h.is_polymer() && h.mu0 * l_p >= FRAC_PI_2 {
        return Err(Error::NonMonotone(format!(
            "mu0*l_p = {} lies past the monotone branch",
            h.mu0 * l_p
        )));
    }
    let corner = cuts.l_x * h.momentum_factor(l_p)?;
    if e < corner {
        return Err(Error::EmptyRegion { energy: e, corner });
    }
    if e == corner {
        return Ok((l_p, l_p));
    }
    let target = e / cuts.l_x; // g(p_max) = E / l_x
    let p_max = if h.is_polymer() {
        let s = h.mu0 * target;
        if s >= 1.0 {
            return Err(Error::NonMonotone(format!(
                "contour x = {} stays above l_x across the whole monotone branch (mu0*E/l_x = {s})",
                cuts.l_x
            )));
        }
        s.asin() / h.mu0
    } else {
        target
    };
    Ok((l_p, p_max))
}

fn sierra_momentum_range(
    h: &ClassicalHamiltonian,
    e: f64,
    cuts: &PhaseSpaceCuts,
) -> Result<(f64, f64)> {
    let target = e / cuts.l_x; // g(p) ≤ E / l_x inside the region
    let l = h.l_p;
    if !h.is_polymer() {
        let corner = cuts.l_x * 2.0 * l;
        if e < corner {
            return Err(Error::EmptyRegion { energy: e, corner });
        }
        let disc = (target * target - 4.0 * l * l).max(0.0).sqrt();
        // p₊ p₋ = l², computed without cancellation
        let p_plus = 0.5 * (target + disc);
        return Ok((l * l / p_plus, p_plus));
    }
    let end = h.branch_end();
    let g = |p: f64| h.momentum_factor(p);
    let p_min = golden_min(|p| g(p).unwrap_or(f64::INFINITY), 0.0, end);
    let g_min = g(p_min)?;
    let corner = cuts.l_x * g_min;
    if e < corner {
        return Err(Error::EmptyRegion { energy: e, corner });
    }
    let eps = 1e-12 * end;
    let p_lo = bisect_monotone(|p| g(p).unwrap_or(f64::INFINITY) - target, eps, p_min)?;
    let p_hi = bisect_monotone(|p| g(p).unwrap_or(f64::INFINITY) - target, p_min, end - eps)?;
    Ok((p_lo, p_hi))
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 * (a.abs() + b.abs()) {
            break;
        }
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    0.5 * (a + b)
}

fn bisect_monotone<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if (fa < 0.0) == (fb < 0.0) {
        return Err(Error::NonMonotone(format!(
            "no single contour crossing in [{a}, {b}]"
        )));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Closed-form xp count (E/2π)(ln(E/2π) − 1) + 1, valid for `l_x l_p = 2π`.
pub fn n_bk(e: f64, cuts: &PhaseSpaceCuts) -> Result<f64> {
    ensure(e > 0.0, || format!("n_bk needs E > 0, got {e}"))?;
    ensure((cuts.planck_cell() - 2.0 * PI).abs() <= PLANCK_CELL_TOL, || {
        format!(
            "n_bk assumes l_x*l_p = 2pi, got {}",
            cuts.planck_cell()
        )
    })?;
    let x = e / (2.0 * PI);
    Ok(x * (x.ln() - 1.0) + 1.0)
}

/// Integral form `[E ∫_{l_p}^{E/l_x} dp/p − l_x(E/l_x − l_p)] / 2π`,
/// evaluated by quadrature. Valid for any cuts.
pub fn n_bk_integral(e: f64, cuts: &PhaseSpaceCuts) -> Result<f64> {
    ensure(e > 0.0, || format!("n_bk_integral needs E > 0, got {e}"))?;
    let upper = e / cuts.l_x;
    let log_int = adaptive_simpson(|p| 1.0 / p, cuts.l_p, upper, 1e-13)?;
    Ok((e * log_int - cuts.l_x * (upper - cuts.l_p)) / (2.0 * PI))
}

/// Polymer xp count
/// (E/2π)(ln tan(Eμ₀/2l_x) − ln tan(μ₀l_p/2) − 1).
pub fn n_poly_closed(e: f64, cuts: &PhaseSpaceCuts, mu0: f64) -> Result<f64> {
    let lower = mu0 * cuts.l_p;
    let upper = e * mu0 / cuts.l_x;
    if !(lower > 0.0 && lower <= upper && upper < PI) {
        return Err(Error::Branch(format!(
            "need 0 < mu0*l_p <= E*mu0/l_x < pi, got {lower} and {upper}"
        )));
    }
    let v = e / (2.0 * PI) * ((0.5 * upper).tan().ln() - (0.5 * lower).tan().ln() - 1.0);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("n_poly_closed"))
    }
}

/// μ₀ → 0 limit of [`n_poly_closed`]: (E/2π)(ln(E/(l_x l_p)) − 1).
pub fn n_poly_limit(e: f64, cuts: &PhaseSpaceCuts) -> Result<f64> {
    ensure(e > 0.0, || format!("n_poly_limit needs E > 0, got {e}"))?;
    Ok(e / (2.0 * PI) * ((e / cuts.planck_cell()).ln() - 1.0))
}

/// Three-term small-μ₀ polymer count.
pub fn n_poly_asymptotic(e: f64, l_p: f64, mu0: f64) -> Result<f64> {
    ensure(e > 0.0, || format!("n_poly_asymptotic needs E > 0, got {e}"))?;
    let x = e / (2.0 * PI);
    let s = (l_p * mu0).powi(2);
    Ok(x * (x.ln() - 1.0) - x * s / 12.0 - x * 7.0 / 1440.0 * s * s)
}

/// Two-term small-μ₀ polymer count of the Sierra model.
pub fn n_sierra_poly_asymptotic(e: f64, l_p: f64, mu0: f64) -> Result<f64> {
    ensure(e > 0.0, || format!("n_sierra_poly_asymptotic needs E > 0, got {e}"))?;
    let x = e / (2.0 * PI);
    Ok(x * (x.ln() - 1.0) - x * (mu0 * l_p).powi(2) / 12.0)
}

/// Breakdown of the polymer xp area against the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyCountDiscrepancy {
    pub closed: f64,
    pub oracle: f64,
    /// `l_x l_p / 2π`, the corner cell the closed form leaves out.
    pub corner_cell: f64,
    /// Area between `p = E/l_x` and the true contour endpoint, over 2π.
    pub contour_tail: f64,
}

impl PolyCountDiscrepancy {
    /// `oracle − closed − corner_cell − contour_tail`; zero up to quadrature error.
    pub fn unexplained(&self) -> f64 {
        self.oracle - self.closed - self.corner_cell - self.contour_tail
    }

    pub fn relative_gap(&self) -> f64 {
        ((self.oracle - self.closed) / self.closed).abs()
    }
}

/// Compares [`n_poly_closed`] with [`area_count_oracle`] and splits the gap
/// into the omitted corner cell and the contour tail beyond `p = E/l_x`.
pub fn xp_polymer_discrepancy(e: f64, cuts: &PhaseSpaceCuts, mu0: f64) -> Result<PolyCountDiscrepancy> {
    let h = ClassicalHamiltonian::xp_polymer(mu0);
    let closed = n_poly_closed(e, cuts, mu0)?;
    let oracle = area_count_oracle(&h, e, cuts)?;
    let (_, p_max) = xp_momentum_range(&h, e, cuts)?;
    let l_x = cuts.l_x;
    let tail = adaptive_simpson(
        |p| mu0 * e / (mu0 * p).sin() - l_x,
        e / l_x,
        p_max,
        AREA_TOL,
    )?;
    Ok(PolyCountDiscrepancy {
        closed,
        oracle,
        corner_cell: cuts.planck_cell() / (2.0 * PI),
        contour_tail: tail / (2.0 * PI),
    })
}
