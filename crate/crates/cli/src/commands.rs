//! Table-producing subcommands.

use polyzeta::bk_model::{
    boundary_residual, level_spacing, spectrum, spectrum_expansion, PolymerScale, SelfAdjointDomain,
};
use polyzeta::exec::Exec;
use polyzeta::phase_space::{
    area_count_oracle, n_bk, n_poly_asymptotic, n_poly_closed, n_poly_limit, n_sierra_poly_asymptotic,
    ClassicalHamiltonian, PhaseSpaceCuts,
};
use polyzeta::riemann::{
    find_zeros, fluctuation_sum_with, smooth_count, z_function, ZeroList, T_MAX_SUPPORTED, ZERO_TOL,
};
use polyzeta::sierra_model::{
    sierra_boundary_residual_with, sierra_level_spacing, sierra_spectrum, sierra_spectrum_expansion,
    SierraConvention, SierraParams, SierraWeight,
};
use polyzeta::specfun::primes_up_to;
use polyzeta::verify_numeric::{shoot_spectrum, ModelSpec};

use crate::config::{Model, RunConfig};
use crate::error::CliResult;
use crate::table::{Cell, Table};

pub const ZEROS_COLUMNS: [&str; 3] = ["index", "ordinate", "residual"];
pub const COUNT_COLUMNS: [&str; 9] = [
    "E",
    "N_exact",
    "N_smooth",
    "N_smooth_plus_fl",
    "N_bk",
    "N_poly_closed",
    "N_poly_asym",
    "N_sierra_asym",
    "N_oracle_xp_poly",
];
pub const SPECTRUM_COLUMNS: [&str; 5] = ["n", "E_closed", "E_expansion", "E_shot", "residual_boundary"];

/// Zeros below `e_max` with `|Z|` at each refined ordinate.
pub fn cmd_zeros(cfg: &RunConfig) -> CliResult<Table> {
    let zeros = find_zeros(cfg.e_max)?;
    let residuals: Vec<polyzeta::Result<f64>> =
        Exec::default().map_slice(&zeros.zeros, |&t| z_function(t).map(f64::abs));
    let mut table = Table::new(ZEROS_COLUMNS.to_vec());
    for (i, (t, r)) in zeros.zeros.iter().zip(residuals).enumerate() {
        table.push(vec![Cell::Int(i as i64 + 1), Cell::Num(*t), Cell::Num(r?)]);
    }
    Ok(table)
}

/// `Ok` becomes a number; an error becomes an empty cell plus a footer note.
fn cell(column: &str, value: polyzeta::Result<f64>, notes: &mut Vec<String>) -> Cell {
    match value {
        Ok(v) => Cell::Num(v),
        Err(e) => {
            notes.push(format!("{column} undefined where {e}"));
            Cell::Empty
        }
    }
}

fn count_row(
    e: f64,
    cfg: &RunConfig,
    zeros: Option<&ZeroList>,
    primes: &polyzeta::specfun::PrimeList,
) -> (Vec<Cell>, Vec<String>) {
    let mut notes = Vec::new();
    let cuts = PhaseSpaceCuts { l_x: cfg.lx, l_p: cfg.lp };
    let exact = match zeros {
        Some(z) => match z.count_below(e) {
            Ok(n) => Cell::Int(n as i64),
            Err(err) => {
                notes.push(format!("N_exact undefined where {err}"));
                Cell::Empty
            }
        },
        None => {
            notes.push(format!("N_exact is only available for E <= {T_MAX_SUPPORTED}"));
            Cell::Empty
        }
    };
    let smooth = smooth_count(e);
    let with_fl = smooth
        .clone()
        .and_then(|s| Ok(s + fluctuation_sum_with(e, primes, cfg.n_max)?));
    let poly_closed = if cfg.mu0 == 0.0 { n_poly_limit(e, &cuts) } else { n_poly_closed(e, &cuts, cfg.mu0) };
    let oracle = area_count_oracle(&ClassicalHamiltonian::xp_polymer(cfg.mu0), e, &cuts);
    let row = vec![
        Cell::Num(e),
        exact,
        cell("N_smooth", smooth, &mut notes),
        cell("N_smooth_plus_fl", with_fl, &mut notes),
        cell("N_bk", n_bk(e, &cuts), &mut notes),
        cell("N_poly_closed", poly_closed, &mut notes),
        cell("N_poly_asym", n_poly_asymptotic(e, cfg.lp, cfg.mu0), &mut notes),
        cell("N_sierra_asym", n_sierra_poly_asymptotic(e, cfg.lp, cfg.mu0), &mut notes),
        cell("N_oracle_xp_poly", oracle, &mut notes),
    ];
    (row, notes)
}

/// All counting curves on the energy grid. Cells outside a formula's domain
/// are left empty and explained in the footer.
pub fn cmd_count(cfg: &RunConfig) -> CliResult<Table> {
    let grid = cfg.energy_grid();
    let top = grid.iter().copied().fold(f64::MIN, f64::max);
    let zeros = if top <= T_MAX_SUPPORTED {
        Some(find_zeros((top + 2.0 * ZERO_TOL).min(T_MAX_SUPPORTED))?)
    } else {
        None
    };
    let primes = primes_up_to(cfg.prime_limit)?;
    let rows = Exec::default().map_slice(&grid, |&e| count_row(e, cfg, zeros.as_ref(), &primes));
    let mut table = Table::new(COUNT_COLUMNS.to_vec());
    for (row, notes) in rows {
        table.push(row);
        for n in notes {
            table.note(n);
        }
    }
    Ok(table)
}

/// Sierra boundary weight that goes with each reading of `m₂`.
pub fn sierra_weight_for(convention: SierraConvention) -> SierraWeight {
    match convention {
        SierraConvention::Printed => SierraWeight::Printed,
        SierraConvention::ScaledAngle => SierraWeight::ModulusMatched,
    }
}

/// Levels `n = 0..npoints-1`: closed form, printed expansion, shooting, and
/// the closed-form boundary residual.
pub fn cmd_spectrum(cfg: &RunConfig) -> CliResult<Table> {
    let n_levels = cfg.n_points;
    let mut table = Table::new(SPECTRUM_COLUMNS.to_vec());
    let mut notes = Vec::new();
    match cfg.model {
        Model::Bk => {
            let scale = PolymerScale::new(cfg.mu0, cfg.hbar)?;
            let domain = SelfAdjointDomain::new(cfg.m2, cfg.theta, &scale)?;
            level_spacing(&domain, &scale)?;
            let shot = shoot_spectrum(&ModelSpec::bk(scale, &domain)?, n_levels)?;
            for (n, e_shot) in (0u32..).zip(&shot.levels) {
                let closed = spectrum(n, &domain, &scale)?;
                table.push(vec![
                    Cell::Int(i64::from(n)),
                    Cell::Num(closed),
                    cell("E_expansion", spectrum_expansion(n, &domain, &scale), &mut notes),
                    Cell::Num(*e_shot),
                    cell("residual_boundary", boundary_residual(closed, &domain, &scale), &mut notes),
                ]);
            }
        }
        Model::Sierra => {
            let params = SierraParams::new(cfg.lp, cfg.mu0)?;
            let convention = cfg.sierra_convention.convention();
            let weight = sierra_weight_for(convention);
            sierra_level_spacing(cfg.m2, &params)?;
            let model = ModelSpec::sierra(params, cfg.m2, cfg.theta, convention, weight)?;
            let shot = shoot_spectrum(&model, n_levels)?;
            for (n, e_shot) in (0u32..).zip(&shot.levels) {
                let closed = sierra_spectrum(n, cfg.theta, cfg.m2, &params)?;
                let residual =
                    sierra_boundary_residual_with(closed, cfg.m2, cfg.theta, &params, convention, weight);
                table.push(vec![
                    Cell::Int(i64::from(n)),
                    Cell::Num(closed),
                    cell("E_expansion", sierra_spectrum_expansion(n, cfg.theta, cfg.m2, &params), &mut notes),
                    Cell::Num(*e_shot),
                    cell("residual_boundary", residual, &mut notes),
                ]);
            }
        }
    }
    for n in notes {
        table.note(n);
    }
    Ok(table)
}
