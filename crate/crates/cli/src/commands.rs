use rayon::prelude::*;

use phasedetect_core::analytic::{cat_parity, threshold_phase, ErrorRates, StateFamily};
use phasedetect_core::fock::{PhotonStatistics, PureState};
use phasedetect_core::loss::LossChannel;
use phasedetect_core::protocol::{
    cat_asymptotic_point, cat_overlap_zero_point, evaluate_at_delta, lossless_overlap, optimize_delta,
    sweep_point, Evaluation, OperatingPointSource, SweepAxis,
};
use phasedetect_core::Result as CoreResult;

use crate::args::{EvaluateArgs, GridArgs, OptimizeArgs, PointKind, SweepArgs};
use crate::error::CliError;
use crate::output::{num, opt, CsvOut};
use crate::sweep::parallel_sweep;

const RATE_COLUMNS: [&str; 7] =
    ["p_fp", "p_fn", "helstrom", "numeric_p_fp", "numeric_p_fn", "numeric_helstrom", "discrepancy"];

fn rate_fields(ev: &Evaluation) -> Vec<String> {
    let split = |r: Option<ErrorRates>| [r.map(|r| r.p_fp), r.map(|r| r.p_fn), r.map(|r| r.helstrom)];
    split(ev.analytic)
        .into_iter()
        .chain(split(ev.numeric))
        .chain([ev.discrepancy()])
        .map(opt)
        .collect()
}

fn collect_rows(rows: Vec<CoreResult<Vec<String>>>) -> Result<Vec<Vec<String>>, CliError> {
    Ok(rows.into_iter().collect::<CoreResult<Vec<_>>>()?)
}

fn write_table<S: AsRef<str>>(out: &mut CsvOut, header: &[S], rows: &[Vec<String>]) -> Result<(), CliError> {
    out.header(header)?;
    for row in rows {
        out.row(row)?;
    }
    Ok(())
}

pub fn overlap(args: &GridArgs) -> Result<(), CliError> {
    let params = args.scenario.params()?;
    let cfg = args.scenario.numeric.config()?;
    let deltas = args.deltas()?;
    let max_delta = deltas.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let space = cfg.space_for(&params, max_delta)?;
    let probe = match params.family {
        StateFamily::Fock { n } => PureState::fock(space, n as usize)?,
        StateFamily::Cat { alpha } => PureState::cat(space, alpha)?,
    };
    let rows: Vec<_> = deltas
        .par_iter()
        .map(|&delta| {
            let analytic = lossless_overlap(&params, delta);
            let numeric = probe.overlap(&probe.displaced(delta)?)?;
            Ok(vec![num(delta), num(analytic), num(numeric.re), num((numeric - analytic).norm())])
        })
        .collect();
    let mut out = CsvOut::open(args.out.out.as_deref())?;
    write_table(&mut out, &["delta", "analytic", "numeric", "abs_diff"], &collect_rows(rows)?)?;
    out.finish()
}

pub fn parity(args: &GridArgs) -> Result<(), CliError> {
    let params = args.scenario.params()?;
    let StateFamily::Cat { alpha } = params.family else {
        return Err(CliError::invalid("parity takes --family cat"));
    };
    let cfg = args.scenario.numeric.config()?;
    let deltas = args.deltas()?;
    let max_delta = deltas.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let space = cfg.space_for(&params, max_delta)?;
    let probe = PureState::cat(space, alpha)?;
    let channel = LossChannel::new(space, params.eta)?;
    let rows: Vec<_> = deltas
        .par_iter()
        .map(|&delta| {
            let analytic = cat_parity(alpha, delta, params.eta);
            let numeric = channel.apply_pure(&probe.displaced(delta)?)?.parity_expectation();
            Ok(vec![num(delta), num(analytic), num(numeric), num((numeric - analytic).abs())])
        })
        .collect();
    let mut out = CsvOut::open(args.out.out.as_deref())?;
    write_table(&mut out, &["delta", "analytic", "numeric", "abs_diff"], &collect_rows(rows)?)?;
    out.finish()
}

pub fn evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let params = args.scenario.params()?;
    let oracle = args.scenario.numeric.oracle()?;
    let ev = match (args.delta, args.phi) {
        (Some(delta), _) => evaluate_at_delta(&params, delta, oracle.as_ref())?,
        (None, Some(phi)) => evaluate_at_delta(&params, params.delta_for_phase(phi), oracle.as_ref())?,
        (None, None) => sweep_point(&params, SweepAxis::Eta, params.eta, oracle.as_ref())?.evaluation,
    };
    let mut header = vec!["phi", "delta", "delta_detected"];
    header.extend(RATE_COLUMNS);
    let mut row = vec![num(ev.phi), num(ev.delta), num(ev.delta_detected)];
    row.extend(rate_fields(&ev));
    let mut out = CsvOut::open(args.out.out.as_deref())?;
    write_table(&mut out, &header, &[row])?;
    out.finish()
}

fn source_name(s: OperatingPointSource) -> &'static str {
    match s {
        OperatingPointSource::AnalyticThreshold => "analytic-threshold",
        OperatingPointSource::ParityMinimized => "parity-minimized",
        OperatingPointSource::Asymptotic => "asymptotic",
    }
}

pub fn optimize(args: &OptimizeArgs) -> Result<(), CliError> {
    let params = args.scenario.params()?;
    let oracle = args.scenario.numeric.oracle()?;
    let point = match args.point {
        PointKind::Canonical => optimize_delta(&params)?,
        PointKind::OverlapZero => cat_overlap_zero_point(&params)?,
        PointKind::Asymptotic => cat_asymptotic_point(&params)?,
    };
    let ev = evaluate_at_delta(&params, point.delta, oracle.as_ref())?;
    let mut header = vec!["phi0", "delta", "delta_detected", "source", "threshold_phase"];
    header.extend(RATE_COLUMNS);
    let mut row = vec![
        num(point.phi0),
        num(point.delta),
        num(point.delta_detected),
        source_name(point.source).to_string(),
        num(threshold_phase(&params)?),
    ];
    row.extend(rate_fields(&ev));
    let mut out = CsvOut::open(args.out.out.as_deref())?;
    write_table(&mut out, &header, &[row])?;
    out.finish()
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let axis = SweepAxis::from(args.axis);
    let template = args.scenario.params_for(Some(axis))?;
    let oracle = args.scenario.numeric.oracle()?;
    let values = args.grid()?;
    let result = parallel_sweep(&template, axis, &values, oracle.as_ref())?;
    let mut header = vec![axis.name(), "phi", "delta", "delta_detected"];
    header.extend(RATE_COLUMNS);
    let rows: Vec<Vec<String>> = result
        .points
        .iter()
        .map(|p| {
            let ev = &p.evaluation;
            let mut row = vec![num(p.value), num(ev.phi), num(ev.delta), num(ev.delta_detected)];
            row.extend(rate_fields(ev));
            row
        })
        .collect();
    let mut out = CsvOut::open(args.out.out.as_deref())?;
    write_table(&mut out, &header, &rows)?;
    out.finish()?;
    if let Some(d) = result.max_discrepancy {
        eprintln!("max_discrepancy {}", num(d));
    }
    Ok(())
}
