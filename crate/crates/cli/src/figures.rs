use rayon::prelude::*;

use phasedetect_core::analytic::{cat_false_positive_product, cat_parity};
use phasedetect_core::fock::{recommend_dim, FockSpace, PhotonStatistics, PureState, DEFAULT_TAIL_TOL};
use phasedetect_core::loss::validate_eta;
use phasedetect_core::protocol::minimize_cat_parity;

use crate::args::FigureArgs;
use crate::error::CliError;
use crate::output::{linspace, num, CsvOut};

pub const FIG3_ALPHAS: [f64; 2] = [1.5, 3.0];
pub const FIG3_STEPS: usize = 500;
pub const ALPHA_RANGE: (f64, f64) = (0.5, 4.0);
pub const ALPHA_STEPS: usize = 200;
pub const DEFAULT_ETAS: [f64; 5] = [0.8, 0.9, 0.95, 0.98, 1.0];
const FIG2_MAX_N: usize = 10;

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn run(args: &FigureArgs) -> Result<(), CliError> {
    let table = build(args)?;
    let mut out = CsvOut::open(args.out.out.as_deref())?;
    out.header(&table.header)?;
    for row in &table.rows {
        out.row(row)?;
    }
    out.finish()
}

pub fn build(args: &FigureArgs) -> Result<Table, CliError> {
    if matches!(args.steps, Some(s) if s < 2) {
        return Err(CliError::invalid("--steps must be at least 2"));
    }
    validate_eta(args.eta)?;
    let etas = args.etas.clone().unwrap_or_else(|| DEFAULT_ETAS.to_vec());
    if etas.is_empty() {
        return Err(CliError::invalid("--etas must not be empty"));
    }
    for &eta in &etas {
        validate_eta(eta)?;
    }
    let alphas = linspace(ALPHA_RANGE.0, ALPHA_RANGE.1, args.steps.unwrap_or(ALPHA_STEPS));
    match args.id {
        2 => photon_numbers(),
        3 => Ok(parity_curves(args.eta, args.steps.unwrap_or(FIG3_STEPS))),
        4 => Ok(even_odd(&alphas, args.eta)),
        5 => Ok(per_eta(&alphas, &etas, "p_fp", cat_false_positive_product)),
        6 => Ok(per_eta(&alphas, &etas, "p_fn", optimized_false_negative)),
        id => Err(CliError::invalid(format!("unknown figure {id}; expected 2 to 6"))),
    }
}

fn photon_numbers() -> Result<Table, CliError> {
    let space = FockSpace::new(recommend_dim(0.0, 1.0, DEFAULT_TAIL_TOL) + 1, DEFAULT_TAIL_TOL)?;
    let one = PureState::fock(space, 1)?;
    let bare = one.photon_distribution();
    let shifted = one.displaced(1.0)?.photon_distribution();
    let rows = (0..=FIG2_MAX_N).map(|n| vec![n.to_string(), num(bare[n]), num(shifted[n])]).collect();
    Ok(Table { header: strings(&["n", "p_fock", "p_displaced"]), rows })
}

fn parity_curves(eta: f64, steps: usize) -> Table {
    let mut header = vec!["delta".to_string()];
    header.extend(FIG3_ALPHAS.iter().map(|a| format!("parity_alpha_{a}")));
    let rows = linspace(0.0, 2.5, steps)
        .into_iter()
        .map(|delta| {
            let mut row = vec![num(delta)];
            row.extend(FIG3_ALPHAS.iter().map(|&a| num(cat_parity(a, delta, eta))));
            row
        })
        .collect();
    Table { header, rows }
}

fn even_odd(alphas: &[f64], eta: f64) -> Table {
    let rows = alphas
        .par_iter()
        .map(|&alpha| {
            let delta = minimize_cat_parity(alpha, eta) / eta.sqrt();
            let parity = cat_parity(alpha, delta, eta);
            vec![num(alpha), num(delta), num(0.5 * (1.0 + parity)), num(0.5 * (1.0 - parity))]
        })
        .collect();
    Table { header: strings(&["alpha", "delta", "p_even", "p_odd"]), rows }
}

fn optimized_false_negative(alpha: f64, eta: f64) -> f64 {
    let delta = minimize_cat_parity(alpha, eta) / eta.sqrt();
    0.5 * (1.0 + cat_parity(alpha, delta, eta))
}

fn per_eta(alphas: &[f64], etas: &[f64], label: &str, f: fn(f64, f64) -> f64) -> Table {
    let mut header = vec!["alpha".to_string()];
    header.extend(etas.iter().map(|e| format!("{label}_eta_{e}")));
    let rows = alphas
        .par_iter()
        .map(|&alpha| {
            let mut row = vec![num(alpha)];
            row.extend(etas.iter().map(|&eta| num(f(alpha, eta))));
            row
        })
        .collect();
    Table { header, rows }
}

fn strings(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}
