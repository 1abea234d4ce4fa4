//! Measured consistency between the closed forms, their small-μ₀
//! expansions and the boundary conditions they are derived from.
//!
//! Each check returns a [`Finding`]: named measurements plus a one-line
//! summary. Nothing here asserts; callers decide what is a failure.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bk_model::{
    asymptotic_matching_constant, eigenfunction, eigenfunction_asymptotic, spectrum,
    spectrum_expansion, spectrum_expansion_scaled, PolymerScale, SelfAdjointDomain,
};
use crate::error::Result;
use crate::fit::{log_log_slope, log_space};
use crate::phase_space::{
    area_count_oracle, n_bk, n_bk_integral, n_poly_closed, n_poly_limit, n_sierra_poly_asymptotic,
    xp_polymer_discrepancy, ClassicalHamiltonian, PhaseSpaceCuts,
};
use crate::sierra_model::{
    sierra_boundary_residual_with, sierra_eigenfunction, sierra_eigenfunction_expansion,
    sierra_expansion_matching_constant, sierra_spectrum, sierra_spectrum_expansion,
    sierra_spectrum_expansion_series, SierraConvention, SierraParams, SierraWeight,
};
use crate::verify_numeric::{shoot_spectrum, ModelSpec};

/// μ₀ range of the convergence-order fits.
pub const ORDER_MU0_MIN: f64 = 1e-3;
pub const ORDER_MU0_MAX: f64 = 1e-1;
pub const ORDER_POINTS: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub id: &'static str,
    pub summary: String,
    pub measurements: Vec<Measurement>,
}

impl Finding {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.measurements.iter().find(|m| m.name == name).map(|m| m.value)
    }
}

fn m(name: &'static str, value: f64) -> Measurement {
    Measurement { name, value }
}

/// Residuals `r(μ₀)` on the standard μ₀ grid and their log-log slope.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderFit {
    pub mu0: Vec<f64>,
    pub residual: Vec<f64>,
    pub slope: f64,
}

pub fn order_fit<F: Fn(f64) -> Result<f64>>(residual: F) -> Result<OrderFit> {
    let mu0 = log_space(ORDER_MU0_MIN, ORDER_MU0_MAX, ORDER_POINTS);
    let residual = mu0.iter().map(|&x| residual(x)).collect::<Result<Vec<_>>>()?;
    let slope = log_log_slope(&mu0, &residual);
    Ok(OrderFit { mu0, residual, slope })
}

/// Compares the integral and closed forms of the xp count on a Planck cell.
pub fn bk_count_constant(energies: &[f64]) -> Result<Finding> {
    let cuts = PhaseSpaceCuts::symmetric_planck();
    let mut worst: f64 = 0.0;
    for &e in energies {
        worst = worst.max((n_bk_integral(e, &cuts)? - n_bk(e, &cuts)?).abs());
    }
    let summary = if worst < 1e-9 {
        "area with l_x*l_p = 2pi reproduces the +1 constant of the closed count".to_string()
    } else {
        format!("integral and closed xp counts differ by up to {worst:.3e}")
    };
    Ok(Finding {
        id: "bk-count-constant",
        summary,
        measurements: vec![m("max_abs_difference", worst), m("constant", 1.0)],
    })
}

/// Splits the gap between the polymer closed count and the area oracle.
pub fn poly_count_corner_cell(energies: &[f64], mu0: f64) -> Result<Finding> {
    let cuts = PhaseSpaceCuts::symmetric_planck();
    let (mut gap, mut tail, mut unexplained): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for &e in energies {
        let d = xp_polymer_discrepancy(e, &cuts, mu0)?;
        gap = gap.max(d.relative_gap());
        tail = tail.max(d.contour_tail);
        unexplained = unexplained.max(d.unexplained().abs());
    }
    Ok(Finding {
        id: "poly-count-corner-cell",
        summary: format!(
            "polymer closed count omits the corner cell l_x*l_p/2pi and the contour tail past p = E/l_x; \
             max relative gap to the area oracle {gap:.3e}"
        ),
        measurements: vec![
            m("mu0", mu0),
            m("max_relative_gap", gap),
            m("corner_cell", cuts.planck_cell() / (2.0 * PI)),
            m("max_contour_tail", tail),
            m("max_unexplained", unexplained),
        ],
    })
}

/// Three-level Richardson extraction of the μ₀² coefficient of `count`
/// from samples at `μ₀`, `μ₀/2`, `μ₀/4`.
pub fn richardson_mu0_squared_of<F: Fn(f64) -> Result<f64>>(count: F, mu0: f64) -> Result<f64> {
    // N(μ) = N₀ + a μ² + b μ⁴
    let n1 = count(mu0)?;
    let n2 = count(0.5 * mu0)?;
    let n4 = count(0.25 * mu0)?;
    let h = mu0 * mu0;
    let a12 = (n1 - n2) / (h * (1.0 - 0.25));
    let a24 = (n2 - n4) / (h * (0.25 - 0.0625));
    // a12 = a + b h (1 + 1/4), a24 = a + b h (1/4 + 1/16)
    let b = (a12 - a24) / (h * (1.25 - 0.3125));
    Ok(a12 - b * h * 1.25)
}

/// μ₀² coefficient of [`n_poly_closed`], normalized by `E l_p²/2π`.
pub fn richardson_mu0_squared(e: f64, cuts: &PhaseSpaceCuts, mu0: f64) -> Result<f64> {
    let a = richardson_mu0_squared_of(|mu| n_poly_closed(e, cuts, mu), mu0)?;
    Ok(a / (e * cuts.l_p * cuts.l_p / (2.0 * PI)))
}

/// Small-angle coefficient `((E/(l_x l_p))² − 1)/12` of the closed count.
pub fn closed_count_mu0_squared(e: f64, cuts: &PhaseSpaceCuts) -> f64 {
    ((e / cuts.planck_cell()).powi(2) - 1.0) / 12.0
}

pub const RICHARDSON_ENERGY: f64 = 200.0;
pub const RICHARDSON_MU0: f64 = 0.005;
pub const PRINTED_MU0_SQUARED: f64 = -1.0 / 12.0;

pub fn poly_mu0_squared_coefficient() -> Result<Finding> {
    let cuts = PhaseSpaceCuts::symmetric_planck();
    let extracted = richardson_mu0_squared(RICHARDSON_ENERGY, &cuts, RICHARDSON_MU0)?;
    let analytic = closed_count_mu0_squared(RICHARDSON_ENERGY, &cuts);
    Ok(Finding {
        id: "poly-mu0-squared-coefficient",
        summary: format!(
            "closed polymer count has mu0^2 coefficient {extracted:.6} (per E*l_p^2/2pi), \
             ((E/(l_x l_p))^2 - 1)/12 = {analytic:.6}, not -1/12"
        ),
        measurements: vec![
            m("energy", RICHARDSON_ENERGY),
            m("extracted", extracted),
            m("small_angle_coefficient", analytic),
            m("relative_difference", ((extracted - analytic) / analytic).abs()),
            m("asymptotic_coefficient", PRINTED_MU0_SQUARED),
        ],
    })
}

/// Energy low enough that `μ₀ = 0.1` stays on the tangent branch.
pub const QUARTIC_ENERGY: f64 = 20.0;

/// Residual of [`n_poly_closed`] after its μ₀ → 0 limit and a μ₀² term
/// with coefficient `coeff` (per `E l_p²/2π`) are removed.
pub fn poly_residual_after_mu0_squared(e: f64, mu0: f64, coeff: f64) -> Result<f64> {
    let cuts = PhaseSpaceCuts::symmetric_planck();
    let limit = n_poly_limit(e, &cuts)?;
    let scale = e * cuts.l_p * cuts.l_p / (2.0 * PI);
    Ok((n_poly_closed(e, &cuts, mu0)? - limit - coeff * scale * mu0 * mu0).abs())
}

/// Scaling of what is left once the μ₀² term is removed, with the small-angle
/// coefficient and with the asymptotic `−1/12`.
pub fn poly_quartic_residual() -> Result<Finding> {
    let cuts = PhaseSpaceCuts::symmetric_planck();
    let e = QUARTIC_ENERGY;
    let analytic = closed_count_mu0_squared(e, &cuts);
    let slope_between = |coeff: f64| -> Result<f64> {
        let r1 = poly_residual_after_mu0_squared(e, 0.05, coeff)?;
        let r2 = poly_residual_after_mu0_squared(e, 0.1, coeff)?;
        Ok((r2 / r1).ln() / 2f64.ln())
    };
    let analytic_slope = slope_between(analytic)?;
    let printed_slope = slope_between(PRINTED_MU0_SQUARED)?;
    Ok(Finding {
        id: "poly-quartic-residual",
        summary: format!(
            "removing the small-angle mu0^2 term leaves a residual of slope {analytic_slope:.3} between \
             mu0 = 0.05 and 0.1; removing -1/12 leaves slope {printed_slope:.3}"
        ),
        measurements: vec![
            m("energy", e),
            m("small_angle_slope", analytic_slope),
            m("asymptotic_coefficient_slope", printed_slope),
        ],
    })
}

pub const SIERRA_COUNT_ENERGY: f64 = 200.0;
pub const SIERRA_COUNT_MU0: f64 = 0.01;

/// Area count of the sierra-polymer symbol against its two-term expansion.
pub fn sierra_count_coefficient() -> Result<Finding> {
    let cuts = PhaseSpaceCuts::symmetric_planck();
    let (e, l) = (SIERRA_COUNT_ENERGY, cuts.l_p);
    let area = |mu: f64| {
        let h = if mu == 0.0 {
            ClassicalHamiltonian::sierra(l)
        } else {
            ClassicalHamiltonian::sierra_polymer(mu, l)
        };
        area_count_oracle(&h, e, &cuts)
    };
    let oracle = area(SIERRA_COUNT_MU0)?;
    let asymptotic = n_sierra_poly_asymptotic(e, l, SIERRA_COUNT_MU0)?;
    let extracted = richardson_mu0_squared_of(area, 2.0 * SIERRA_COUNT_MU0)? / (e * l * l / (2.0 * PI));
    let limit_gap = area(0.0)? - n_sierra_poly_asymptotic(e, l, 0.0)?;
    let quartic = e / (2.0 * PI) * 7.0 / 1440.0 * (l * SIERRA_COUNT_MU0).powi(4);
    Ok(Finding {
        id: "sierra-count-coefficient",
        summary: format!(
            "sierra-polymer area minus the two-term count is {:.6} at E = {e}, mu0 = {SIERRA_COUNT_MU0} \
             (quartic scale {quartic:.3e}); its mu0^2 coefficient is {extracted:.4} per E*l_p^2/2pi, not -1/12",
            oracle - asymptotic
        ),
        measurements: vec![
            m("energy", e),
            m("mu0", SIERRA_COUNT_MU0),
            m("oracle_minus_asymptotic", oracle - asymptotic),
            m("quartic_term", quartic),
            m("extracted_mu0_squared", extracted),
            m("non_polymer_gap", limit_gap),
        ],
    })
}

/// Level and momentum used by the expansion-order fits.
const ORDER_LEVEL: u32 = 3;
const ORDER_M2: f64 = 1.0;

pub fn bk_expansion_fit(scaled_log: bool) -> Result<OrderFit> {
    order_fit(|mu0| {
        let scale = PolymerScale::unit(mu0)?;
        let d = SelfAdjointDomain::new(ORDER_M2, 0.0, &scale)?;
        let closed = spectrum(ORDER_LEVEL, &d, &scale)?;
        let approx = if scaled_log {
            spectrum_expansion_scaled(ORDER_LEVEL, &d, &scale)?
        } else {
            spectrum_expansion(ORDER_LEVEL, &d, &scale)?
        };
        Ok((approx - closed).abs())
    })
}

pub fn sierra_expansion_fit(series: bool) -> Result<OrderFit> {
    order_fit(|mu0| {
        let p = SierraParams::new(1.0, mu0)?;
        let closed = sierra_spectrum(ORDER_LEVEL, 0.0, ORDER_M2, &p)?;
        let approx = if series {
            sierra_spectrum_expansion_series(ORDER_LEVEL, 0.0, ORDER_M2, &p)?
        } else {
            sierra_spectrum_expansion(ORDER_LEVEL, 0.0, ORDER_M2, &p)?
        };
        Ok((approx - closed).abs())
    })
}

/// Residual orders of the two spectrum expansions against their closed forms.
pub fn expansion_orders() -> Result<Finding> {
    let bk_printed = bk_expansion_fit(false)?;
    let bk_scaled = bk_expansion_fit(true)?;
    let s_printed = sierra_expansion_fit(false)?;
    let s_series = sierra_expansion_fit(true)?;
    Ok(Finding {
        id: "expansion-orders",
        summary: format!(
            "bk expansion with ln(2/m2) does not converge (slope {:.2}); with ln(2/(mu0 m2)) slope {:.2}. \
             sierra expansion slope {:.2}; halving its correction gives slope {:.2}",
            bk_printed.slope, bk_scaled.slope, s_printed.slope, s_series.slope
        ),
        measurements: vec![
            m("bk_printed_slope", bk_printed.slope),
            m("bk_printed_residual_at_min_mu0", bk_printed.residual[0]),
            m("bk_scaled_log_slope", bk_scaled.slope),
            m("sierra_printed_slope", s_printed.slope),
            m("sierra_half_correction_slope", s_series.slope),
        ],
    })
}

pub const BK_PROBE: (f64, f64) = (2.0, 5.0);
pub const SIERRA_PROBE: (f64, f64, f64) = (3.0, 4.0, 1.0);

/// Relative distance of the bk eigenfunction from its rescaled small-μ₀ form.
pub fn bk_eigenfunction_fit() -> Result<OrderFit> {
    let (p, e) = BK_PROBE;
    order_fit(|mu0| {
        let scale = PolymerScale::unit(mu0)?;
        let approx = asymptotic_matching_constant(e, &scale)? * eigenfunction_asymptotic(p, e, 1.0)?;
        Ok((eigenfunction(p, e, &scale)? - approx).norm() / approx.norm())
    })
}

/// Same for the Sierra eigenfunction.
pub fn sierra_eigenfunction_fit() -> Result<OrderFit> {
    let (p, e, l_p) = SIERRA_PROBE;
    order_fit(|mu0| {
        let params = SierraParams::new(l_p, mu0)?;
        let approx: Complex64 =
            sierra_expansion_matching_constant(e, mu0) * sierra_eigenfunction_expansion(p, e, l_p)?;
        Ok((sierra_eigenfunction(p, e, &params)? - approx).norm() / approx.norm())
    })
}

pub fn eigenfunction_orders() -> Result<Finding> {
    let bk = bk_eigenfunction_fit()?;
    let sierra = sierra_eigenfunction_fit()?;
    Ok(Finding {
        id: "eigenfunction-expansion-orders",
        summary: format!(
            "closed eigenfunctions approach their expansions (after a mu0-dependent constant) \
             with slope {:.2} (bk) and {:.2} (sierra)",
            bk.slope, sierra.slope
        ),
        measurements: vec![m("bk_slope", bk.slope), m("sierra_slope", sierra.slope)],
    })
}

pub const CONVENTION_MU0: f64 = 0.05;
pub const CONVENTION_M2: f64 = 2.0;
pub const CONVENTION_THETA: f64 = PI;

/// Boundary residuals and shot spacings under both readings of `m₂`.
pub fn sierra_argument_convention() -> Result<Finding> {
    let params = SierraParams::new(1.0, CONVENTION_MU0)?;
    let (m2, theta) = (CONVENTION_M2, CONVENTION_THETA);
    let residual = |e, conv, w| sierra_boundary_residual_with(e, m2, theta, &params, conv, w);
    let (mut printed, mut scaled_printed_w, mut scaled_matched_w): (f64, f64, f64) =
        (f64::INFINITY, 0.0, 0.0);
    for n in 0..6 {
        let e = sierra_spectrum(n, theta, m2, &params)?;
        printed = printed.min(residual(e, SierraConvention::Printed, SierraWeight::Printed)?);
        scaled_printed_w =
            scaled_printed_w.max(residual(e, SierraConvention::ScaledAngle, SierraWeight::Printed)?);
        scaled_matched_w = scaled_matched_w
            .max(residual(e, SierraConvention::ScaledAngle, SierraWeight::ModulusMatched)?);
    }
    let closed_spacing = crate::sierra_model::sierra_level_spacing(m2, &params)?;
    let printed_model =
        ModelSpec::sierra(params, m2, theta, SierraConvention::Printed, SierraWeight::Printed)?;
    let shot = shoot_spectrum(&printed_model, 2)?;
    let shot_spacing = shot.levels[1] - shot.levels[0];
    Ok(Finding {
        id: "sierra-argument-convention",
        summary: format!(
            "Delta and the spectrum follow from the eigenfunction only when m2 is the angle mu0*p2; \
             with m2 as a momentum the closed levels miss the boundary condition (min residual {printed:.3e}, \
             shot spacing {shot_spacing:.6} vs {closed_spacing:.6}). The weight csc(m2)/Delta has the \
             wrong modulus (residual {scaled_printed_w:.3e}); 1/(Delta sqrt(sin m2)) gives {scaled_matched_w:.3e}"
        ),
        measurements: vec![
            m("printed_min_residual", printed),
            m("scaled_angle_printed_weight_residual", scaled_printed_w),
            m("scaled_angle_matched_weight_residual", scaled_matched_w),
            m("closed_spacing", closed_spacing),
            m("printed_reading_shot_spacing", shot_spacing),
        ],
    })
}

/// Every documented consistency check, in a fixed order.
pub fn all_findings() -> Result<Vec<Finding>> {
    let energies: Vec<f64> = (0..9).map(|i| 20.0 + 10.0 * f64::from(i)).collect();
    Ok(vec![
        bk_count_constant(&energies)?,
        poly_count_corner_cell(&energies, 0.01)?,
        poly_mu0_squared_coefficient()?,
        poly_quartic_residual()?,
        sierra_count_coefficient()?,
        expansion_orders()?,
        eigenfunction_orders()?,
        sierra_argument_convention()?,
    ])
}
