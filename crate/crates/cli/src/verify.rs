//! Oracle-equivalence suite: each check measures the largest deviation of a
//! closed form from its numeric oracle (or from an exact invariant) over a
//! parameter grid and compares it with a tolerance.

use core::f64::consts::E;

use rayon::prelude::*;

use phasedetect_core::analytic::*;
use phasedetect_core::fock::{recommend_dim, DensityOperator, FockSpace, LinearOperator, PhotonStatistics, PureState};
use phasedetect_core::loss::LossChannel;
use phasedetect_core::protocol::{
    analytic_rates, cat_asymptotic_point, cat_overlap_zero_point, evaluate_at_delta, numeric_rates,
    optimize_delta, NumericConfig, SweepAxis, SweepResult,
};
use phasedetect_core::Result as CoreResult;

use crate::args::{GridSize, VerifyArgs};
use crate::error::CliError;
use crate::output::{num, CsvOut};
use crate::sweep::parallel_sweep;

const TAIL_TOL: f64 = 1e-12;

/// Largest deviation seen and the number of grid points visited.
#[derive(Debug, Clone, Copy, Default)]
pub struct Measured {
    pub value: f64,
    pub points: usize,
}

impl Measured {
    fn push(&mut self, deviation: f64) {
        // NaN must surface as a failure
        self.value = if deviation.is_nan() { f64::NAN } else { self.value.max(deviation) };
        self.points += 1;
    }
}

pub struct CheckSpec {
    pub name: &'static str,
    pub tolerance: f64,
    run: fn(GridSize) -> CoreResult<Measured>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub points: usize,
    pub error: Option<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.value <= self.tolerance
    }
}

pub const CHECKS: &[CheckSpec] = &[
    CheckSpec { name: "fock_orthogonality", tolerance: 1e-8, run: fock_orthogonality },
    CheckSpec { name: "fock1_lossy_closed_form", tolerance: 1e-12, run: fock1_lossy_closed_form },
    CheckSpec { name: "fock1_lossy_numeric", tolerance: 1e-8, run: fock1_lossy_numeric },
    CheckSpec { name: "cat_overlap_zero_analytic", tolerance: 1e-12, run: cat_zero_analytic },
    CheckSpec { name: "cat_overlap_zero_numeric", tolerance: 1e-8, run: cat_zero_numeric },
    CheckSpec { name: "lossy_cat_parity", tolerance: 1e-8, run: lossy_cat_parity },
    CheckSpec { name: "lossy_cat_distribution", tolerance: 1e-8, run: lossy_cat_distribution },
    CheckSpec { name: "false_positive_product", tolerance: 1e-12, run: false_positive_product },
    CheckSpec { name: "threshold_phase_ratios", tolerance: 1e-12, run: threshold_ratios },
    CheckSpec { name: "cat_false_negative_bound", tolerance: 1e-2, run: cat_false_negative_bound },
    CheckSpec { name: "cat_optimizer_vs_grid", tolerance: 1e-6, run: cat_optimizer_vs_grid },
    CheckSpec { name: "optimizer_improves_closed_points", tolerance: 1e-12, run: optimizer_improves },
    CheckSpec { name: "sweep_oracle_equivalence", tolerance: 1e-6, run: sweep_equivalence },
    CheckSpec { name: "rates_are_probabilities", tolerance: 0.0, run: rates_are_probabilities },
    CheckSpec { name: "fock1_false_positive_delta_free", tolerance: 0.0, run: fock1_fp_delta_free },
    CheckSpec { name: "lossless_cat_false_positive", tolerance: 0.0, run: lossless_cat_fp },
    CheckSpec { name: "helstrom_zero_at_overlap_zero", tolerance: 1e-12, run: helstrom_zero },
    CheckSpec { name: "cat_parity_bounds", tolerance: 0.0, run: cat_parity_bounds },
    CheckSpec { name: "cat_odd_amplitudes", tolerance: 0.0, run: cat_odd_amplitudes },
    CheckSpec { name: "displacement_unitarity", tolerance: 1e-8, run: displacement_unitarity },
    CheckSpec { name: "kraus_trace", tolerance: 1e-10, run: kraus_trace },
    CheckSpec { name: "kraus_positivity", tolerance: 1e-9, run: kraus_positivity },
];

pub fn run_checks(grid: GridSize, tolerance: Option<f64>) -> Vec<Outcome> {
    CHECKS
        .par_iter()
        .map(|check| {
            let tolerance = tolerance.unwrap_or(check.tolerance);
            match (check.run)(grid) {
                Ok(m) => Outcome { name: check.name, value: m.value, tolerance, points: m.points, error: None },
                Err(e) => Outcome { name: check.name, value: f64::NAN, tolerance, points: 0, error: Some(e.to_string()) },
            }
        })
        .collect()
}

pub fn run(args: &VerifyArgs) -> Result<(), CliError> {
    if matches!(args.tolerance, Some(t) if !(t.is_finite() && t >= 0.0)) {
        return Err(CliError::invalid("--tolerance must be finite and non-negative"));
    }
    let outcomes = run_checks(args.grid, args.tolerance);
    let mut out = CsvOut::open(args.out.out.as_deref())?;
    out.header(&["check", "status", "max_discrepancy", "tolerance", "points"])?;
    for o in &outcomes {
        let status = if o.passed() { "pass" } else { "fail" };
        out.row(&[o.name.to_string(), status.to_string(), num(o.value), num(o.tolerance), o.points.to_string()])?;
        if let Some(e) = &o.error {
            eprintln!("{}: {e}", o.name);
        }
    }
    out.finish()?;
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    if failed > 0 {
        return Err(CliError::Verification { failed, total: outcomes.len() });
    }
    Ok(())
}

fn pick<T: Copy>(grid: GridSize, full: &[T], small: &[T]) -> Vec<T> {
    match grid {
        GridSize::Full => full.to_vec(),
        GridSize::Small => small.to_vec(),
    }
}

fn etas(grid: GridSize) -> Vec<f64> {
    pick(grid, &[0.5, 0.8, 0.9, 0.95, 0.98, 1.0], &[0.9, 1.0])
}

fn fock_orthogonality(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    let top = if grid == GridSize::Full { 10 } else { 4 };
    for n in 1..=top {
        let delta = laguerre_first_root(n)?.sqrt();
        let space = FockSpace::new(recommend_dim(0.0, delta, TAIL_TOL) + n as usize, TAIL_TOL)?;
        let d = LinearOperator::displacement(space, delta)?;
        m.push(d.element(n as usize, n as usize).norm());
    }
    Ok(m)
}

fn fock1_lossy_closed_form(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for eta in pick(grid, &[0.8, 0.9, 0.98], &[0.9]) {
        let r = analytic_rates(&ProtocolParams::fock(1).with_eta(eta), 1.0 / eta.sqrt())?;
        m.push((r.p_fp - (1.0 - eta)).abs().max((r.p_fn - (1.0 - eta) / E).abs()));
    }
    Ok(m)
}

fn fock1_lossy_numeric(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    let cfg = NumericConfig::default();
    for eta in pick(grid, &[0.8, 0.9, 0.98], &[0.9]) {
        for delta_det in pick(grid, &[0.3, 1.0, 1.7], &[1.0]) {
            let params = ProtocolParams::fock(1).with_eta(eta);
            let delta = delta_det / eta.sqrt();
            m.push(analytic_rates(&params, delta)?.max_abs_diff(&numeric_rates(&params, delta, &cfg)?));
        }
    }
    Ok(m)
}

fn cat_zero_points(grid: GridSize) -> Vec<(f64, u32)> {
    let alphas = pick(grid, &[1.5, 2.0, 3.0], &[1.5]);
    alphas.iter().flat_map(|&a| [(a, 0), (a, 1)]).collect()
}

fn cat_zero_analytic(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for (alpha, k) in cat_zero_points(grid) {
        m.push(cat_overlap(alpha, cat_overlap_zero(alpha, k)).abs());
    }
    Ok(m)
}

fn cat_zero_numeric(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for (alpha, k) in cat_zero_points(grid) {
        let delta = cat_overlap_zero(alpha, k);
        let cat = PureState::cat(FockSpace::recommended(alpha, delta, TAIL_TOL)?, alpha)?;
        m.push(cat.overlap(&cat.displaced(delta)?)?.norm());
    }
    Ok(m)
}

/// `(α, δ, η)` grid for the lossy cat checks.
fn lossy_cat_grid(grid: GridSize) -> Vec<(f64, f64, f64)> {
    let alphas = pick(grid, &[1.0, 2.0, 3.0], &[1.0, 2.0]);
    let deltas = pick(grid, &[0.1, 0.4, 0.8], &[0.4]);
    let etas = pick(grid, &[0.5, 0.9, 0.98], &[0.9]);
    let mut out = Vec::new();
    for &a in &alphas {
        for &d in &deltas {
            for &e in &etas {
                out.push((a, d, e));
            }
        }
    }
    out
}

fn lossy_cat_state(alpha: f64, delta: f64, eta: f64) -> CoreResult<DensityOperator> {
    let space = FockSpace::recommended(alpha, delta, TAIL_TOL)?;
    let shifted = PureState::cat(space, alpha)?.displaced(delta)?;
    LossChannel::new(space, eta)?.apply_pure(&shifted)
}

fn lossy_cat_parity(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for (alpha, delta, eta) in lossy_cat_grid(grid) {
        let rho = lossy_cat_state(alpha, delta, eta)?;
        m.push((rho.parity_expectation() - cat_parity(alpha, delta, eta)).abs());
    }
    Ok(m)
}

fn lossy_cat_distribution(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for (alpha, delta, eta) in lossy_cat_grid(grid) {
        let p = lossy_cat_state(alpha, delta, eta)?.photon_distribution();
        let worst = p
            .iter()
            .enumerate()
            .map(|(n, pn)| (pn - cat_pn(alpha, delta, eta, n as u32)).abs())
            .fold(0.0, f64::max);
        m.push(worst);
    }
    Ok(m)
}

fn false_positive_product(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for alpha in pick(grid, &[1.0, 2.0, 3.0], &[1.0, 2.0]) {
        for eta in pick(grid, &[0.5, 0.9, 0.98], &[0.9]) {
            let direct = 0.5 * (1.0 - cat_parity_no_signal(alpha, eta));
            m.push((direct - cat_false_positive_product(alpha, eta)).abs());
        }
    }
    Ok(m)
}

fn threshold_ratios(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for photons in pick(grid, &[1e2, 1e4, 1e6], &[1e6]) {
        let base = ProtocolParams::fock(1).with_photons(photons);
        let phi0 = threshold_phase(&base)?;
        let (snl, _) = baseline_phase_errors(photons, 0.0);
        m.push((phi0 / snl - 2.0).abs());
        for r in pick(grid, &[0.1, 0.5, 1.0, 2.0], &[0.5]) {
            let squeezed = threshold_phase(&base.with_squeeze(r))?;
            m.push((squeezed / phi0 - (-r).exp()).abs());
        }
    }
    Ok(m)
}

fn grid_scan_false_negative(alpha: f64) -> f64 {
    const POINTS: usize = 100_000;
    let upper = core::f64::consts::PI / (2.0 * alpha);
    (1..POINTS)
        .map(|i| 0.5 * (1.0 + cat_parity(alpha, upper * i as f64 / POINTS as f64, 1.0)))
        .fold(f64::INFINITY, f64::min)
}

fn cat_false_negative_bound(_: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for (alpha, bound) in [(2.0, 0.14), (2.5, 0.10)] {
        m.push((grid_scan_false_negative(alpha) - bound).max(0.0));
    }
    Ok(m)
}

fn cat_optimizer_vs_grid(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for alpha in pick(grid, &[1.0, 1.5, 2.0, 2.5, 3.0], &[2.0]) {
        let op = optimize_delta(&ProtocolParams::cat(alpha))?;
        let p_fn = cat_error_rates(alpha, op.delta, 1.0)?.p_fn;
        m.push((p_fn - grid_scan_false_negative(alpha)).abs());
    }
    Ok(m)
}

fn optimizer_improves(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for alpha in pick(grid, &[0.8, 1.5, 2.0, 3.0], &[2.0]) {
        for eta in etas(grid) {
            let params = ProtocolParams::cat(alpha).with_eta(eta);
            let p_fn = |delta: f64| evaluate_at_delta(&params, delta, None).map(|e| e.rates().p_fn);
            let best = p_fn(optimize_delta(&params)?.delta)?;
            let zero = p_fn(cat_overlap_zero_point(&params)?.delta)?;
            let approx = p_fn(cat_asymptotic_point(&params)?.delta)?;
            m.push((best - zero.min(approx)).max(0.0));
        }
    }
    Ok(m)
}

/// Oracle-on sweeps over every axis that has a closed form on both paths.
fn oracle_sweeps(grid: GridSize) -> CoreResult<Vec<SweepResult>> {
    let cfg = NumericConfig::default();
    let cases: Vec<(ProtocolParams, SweepAxis, Vec<f64>)> = vec![
        (ProtocolParams::cat(1.0).with_eta(0.9), SweepAxis::Alpha, pick(grid, &[0.5, 1.0, 1.5, 2.0, 2.5, 3.0], &[1.0, 2.0])),
        (ProtocolParams::cat(2.0), SweepAxis::Eta, etas(grid)),
        (ProtocolParams::cat(1.5).with_eta(0.95), SweepAxis::Delta, pick(grid, &[0.1, 0.5, 1.0, 2.0], &[0.5])),
        (ProtocolParams::fock(1), SweepAxis::Eta, etas(grid)),
        (ProtocolParams::fock(1).with_eta(0.9), SweepAxis::Delta, pick(grid, &[0.1, 0.5, 1.0, 2.0], &[1.0])),
        (ProtocolParams::fock(1), SweepAxis::N, pick(grid, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0], &[1.0, 3.0])),
        (ProtocolParams::fock(3), SweepAxis::Delta, pick(grid, &[0.1, 0.5, 1.0, 2.0], &[0.5])),
        (ProtocolParams::cat(2.0).with_eta(0.9), SweepAxis::Squeeze, pick(grid, &[0.0, 0.5, 1.0], &[0.5])),
    ];
    cases.into_iter().map(|(p, axis, values)| parallel_sweep(&p, axis, &values, Some(&cfg))).collect()
}

fn sweep_equivalence(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for result in oracle_sweeps(grid)? {
        for point in &result.points {
            m.push(point.evaluation.discrepancy().unwrap_or(f64::NAN));
        }
    }
    Ok(m)
}

fn excursion(x: f64) -> f64 {
    if x.is_nan() {
        f64::NAN
    } else {
        (-x).max(x - 1.0).max(0.0)
    }
}

fn rates_are_probabilities(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for result in oracle_sweeps(grid)? {
        for point in &result.points {
            let ev = &point.evaluation;
            for r in ev.analytic.iter().chain(ev.numeric.iter()) {
                m.push(excursion(r.p_fp).max(excursion(r.p_fn)).max(excursion(r.helstrom)));
            }
        }
    }
    Ok(m)
}

fn fock1_fp_delta_free(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for eta in etas(grid) {
        let reference = fock1_error_rates(0.0, eta)?.p_fp;
        for delta in pick(grid, &[0.1, 0.5, 1.0, 1.5, 2.0, 3.0], &[1.0]) {
            m.push((fock1_error_rates(delta, eta)?.p_fp - reference).abs());
        }
    }
    Ok(m)
}

fn lossless_cat_fp(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for alpha in pick(grid, &[0.5, 1.0, 2.0, 3.0, 4.0], &[2.0]) {
        let delta = optimize_delta(&ProtocolParams::cat(alpha))?.delta;
        m.push(cat_error_rates(alpha, delta, 1.0)?.p_fp.abs());
    }
    Ok(m)
}

fn helstrom_zero(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for (alpha, k) in cat_zero_points(grid) {
        let params = ProtocolParams::cat(alpha);
        let zero = cat_overlap_zero(alpha, k);
        m.push(evaluate_at_delta(&params, zero, None)?.rates().helstrom);
        // away from the zero the bound must be strictly positive
        let off = evaluate_at_delta(&params, 0.9 * zero, None)?.rates().helstrom;
        m.push(if off > 1e-6 { 0.0 } else { f64::INFINITY });
    }
    for n in 1..=4 {
        let zero = laguerre_first_root(n)?.sqrt();
        m.push(evaluate_at_delta(&ProtocolParams::fock(n), zero, None)?.rates().helstrom);
    }
    Ok(m)
}

fn cat_parity_bounds(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for alpha in pick(grid, &[0.1, 0.5, 1.0, 2.0, 3.0], &[1.0]) {
        for eta in etas(grid) {
            for i in 0..=40 {
                m.push((cat_parity(alpha, 0.05 * i as f64, eta).abs() - 1.0).max(0.0));
            }
        }
    }
    Ok(m)
}

fn cat_odd_amplitudes(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for alpha in pick(grid, &[0.1, 0.5, 1.0, 2.0, 3.0], &[1.0]) {
        let cat = PureState::cat(FockSpace::recommended(alpha, 0.0, TAIL_TOL)?, alpha)?;
        m.push(cat.amplitudes().iter().skip(1).step_by(2).map(|a| a.norm()).fold(0.0, f64::max));
    }
    Ok(m)
}

fn displacement_unitarity(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for delta in pick(grid, &[0.1, 0.5, 1.0, 2.0, 3.0], &[1.0]) {
        let space = FockSpace::recommended(0.0, delta, TAIL_TOL)?;
        m.push(LinearOperator::displacement(space, delta)?.unitarity_defect(space.dim() / 2));
    }
    Ok(m)
}

fn kraus_outputs(grid: GridSize) -> CoreResult<Vec<DensityOperator>> {
    lossy_cat_grid(grid).into_iter().map(|(a, d, e)| lossy_cat_state(a, d, e)).collect()
}

fn kraus_trace(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for rho in kraus_outputs(grid)? {
        m.push((rho.trace() - 1.0).abs());
    }
    Ok(m)
}

fn kraus_positivity(grid: GridSize) -> CoreResult<Measured> {
    let mut m = Measured::default();
    for rho in kraus_outputs(grid)? {
        m.push((-rho.min_eigenvalue()).max(0.0));
    }
    Ok(m)
}
