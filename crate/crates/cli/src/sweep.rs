use rayon::prelude::*;

use phasedetect_core::analytic::ProtocolParams;
use phasedetect_core::protocol::{sweep_point, NumericConfig, SweepAxis, SweepResult};
use phasedetect_core::{Error, Result};

/// Evaluates the sweep points concurrently. Output order follows `values`,
/// and the reported failure is the lowest failing index.
pub fn parallel_sweep(
    template: &ProtocolParams,
    axis: SweepAxis,
    values: &[f64],
    oracle: Option<&NumericConfig>,
) -> Result<SweepResult> {
    let results: Vec<_> = values.par_iter().map(|&v| sweep_point(template, axis, v, oracle)).collect();
    let points = results
        .into_iter()
        .enumerate()
        .map(|(index, r)| r.map_err(|e| Error::AtPoint { index, source: Box::new(e) }))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::from_points(axis, points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use phasedetect_core::protocol::sweep;

    #[test]
    fn matches_sequential_sweep() {
        let template = ProtocolParams::cat(1.0).with_eta(0.9);
        let values: Vec<f64> = (1..=12).map(|i| 0.25 * i as f64).collect();
        let cfg = NumericConfig::default();
        let par = parallel_sweep(&template, SweepAxis::Alpha, &values, Some(&cfg)).unwrap();
        let seq = sweep(&template, SweepAxis::Alpha, &values, Some(&cfg)).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn reports_lowest_failing_index() {
        let template = ProtocolParams::cat(1.0);
        let err = parallel_sweep(&template, SweepAxis::Eta, &[0.5, -1.0, 2.0], None).unwrap_err();
        assert!(matches!(err, Error::AtPoint { index: 1, .. }));
    }
}
