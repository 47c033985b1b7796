//! End-to-end detection scenarios.
//!
//! A phase shift `φ` becomes the displacement `δ = sqrt(N) φ e^r` of the
//! dark-port probe, and the detector sees `δ' = sqrt(η) δ`. Fock probes use
//! the counting strategy (exactly `n` counts means no signal); cat probes use
//! the even/odd strategy (an odd count means signal).
//!
//! Every evaluation can run two independent paths: the closed forms of
//! [`crate::analytic`] and a numeric oracle that builds the probe in a
//! truncated Fock space, displaces it by matrix exponential, applies the
//! Kraus loss channel and reads the error rates off the photon statistics.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::analytic::{
    cat_error_rates, cat_overlap, cat_overlap_zero, cat_overlap_zero_approx, cat_parity,
    fock1_error_rates, fock_overlap, helstrom, laguerre_first_root, ErrorRates, ProtocolParams,
    StateFamily,
};
use crate::error::{Error, Result};
use crate::fock::{recommend_dim, FockSpace, PhotonStatistics, PureState, DEFAULT_TAIL_TOL};
use crate::loss::LossChannel;
use crate::solve::golden_section_min;

/// Truncation settings for the numeric oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericConfig {
    /// Fixed basis size; `None` sizes the space per point with [`recommend_dim`].
    pub dim: Option<usize>,
    pub tail_tol: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self { dim: None, tail_tol: DEFAULT_TAIL_TOL }
    }
}

impl NumericConfig {
    /// Basis for `params` displaced by up to `delta`.
    pub fn space_for(&self, params: &ProtocolParams, delta: f64) -> Result<FockSpace> {
        if !(self.tail_tol > 0.0) {
            return Err(Error::InvalidSpace { dim: self.dim.unwrap_or(0), tail_tol: self.tail_tol });
        }
        let dim = match (self.dim, params.family) {
            (Some(dim), _) => dim,
            (None, StateFamily::Fock { n }) => recommend_dim(0.0, delta, self.tail_tol) + n as usize,
            (None, StateFamily::Cat { alpha }) => recommend_dim(alpha, delta, self.tail_tol),
        };
        FockSpace::new(dim, self.tail_tol)
    }
}

/// Error rates of one scenario at one displacement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub phi: f64,
    /// `δ = sqrt(N) φ e^r`
    pub delta: f64,
    /// `δ' = sqrt(η) δ`
    pub delta_detected: f64,
    /// Closed-form rates, when a closed form exists.
    pub analytic: Option<ErrorRates>,
    /// Numeric-oracle rates, when requested.
    pub numeric: Option<ErrorRates>,
}

impl Evaluation {
    /// Analytic rates if available, numeric otherwise.
    pub fn rates(&self) -> ErrorRates {
        self.analytic.or(self.numeric).expect("evaluation carries at least one path")
    }

    /// `max |analytic - numeric|` over all three rates.
    pub fn discrepancy(&self) -> Option<f64> {
        match (&self.analytic, &self.numeric) {
            (Some(a), Some(n)) => Some(a.max_abs_diff(n)),
            _ => None,
        }
    }
}

/// Evaluates the scenario at phase `phi`.
pub fn evaluate(params: &ProtocolParams, phi: f64, oracle: Option<&NumericConfig>) -> Result<Evaluation> {
    params.validate()?;
    evaluate_at_delta(params, params.delta_for_phase(phi), oracle)
}

/// Evaluates the scenario at displacement `delta`.
///
/// Lossy Fock probes with `n != 1` have no closed form; they are evaluated
/// numerically when `oracle` is given and rejected otherwise.
pub fn evaluate_at_delta(
    params: &ProtocolParams,
    delta: f64,
    oracle: Option<&NumericConfig>,
) -> Result<Evaluation> {
    params.validate()?;
    if !delta.is_finite() {
        return Err(Error::InvalidArgument { name: "delta", value: delta });
    }
    let analytic = match analytic_rates(params, delta) {
        Ok(rates) => Some(rates),
        Err(Error::AnalyticUnavailable { .. }) if oracle.is_some() => None,
        Err(e) => return Err(e),
    };
    let numeric = oracle.map(|cfg| numeric_rates(params, delta, cfg)).transpose()?;
    Ok(Evaluation {
        phi: params.phase_for_delta(delta),
        delta,
        delta_detected: libm::sqrt(params.eta) * delta,
        analytic,
        numeric,
    })
}

/// Lossless overlap `⟨Ψ₀|Ψ_δ⟩` of the probe with its displaced copy.
pub fn lossless_overlap(params: &ProtocolParams, delta: f64) -> f64 {
    match params.family {
        StateFamily::Fock { n } => fock_overlap(n, delta),
        StateFamily::Cat { alpha } => cat_overlap(alpha, delta),
    }
}

/// Closed-form error rates; `helstrom` uses the lossless overlap and the
/// scenario's priors.
pub fn analytic_rates(params: &ProtocolParams, delta: f64) -> Result<ErrorRates> {
    params.validate()?;
    let ov = lossless_overlap(params, delta);
    let bound = helstrom(params.p0, params.p_delta, ov * ov)?;
    let rates = match params.family {
        StateFamily::Fock { n: 1 } => fock1_error_rates(delta, params.eta)?,
        StateFamily::Fock { .. } if params.eta == 1.0 => ErrorRates::new(0.0, ov * ov, bound)?,
        StateFamily::Fock { n } => return Err(Error::AnalyticUnavailable { n, eta: params.eta }),
        StateFamily::Cat { alpha } => cat_error_rates(alpha, delta, params.eta)?,
    };
    Ok(ErrorRates { helstrom: bound, ..rates })
}

/// Error rates from the truncated-basis simulation: probe state, matrix
/// exponential displacement, Kraus loss, photon statistics.
pub fn numeric_rates(params: &ProtocolParams, delta: f64, cfg: &NumericConfig) -> Result<ErrorRates> {
    params.validate()?;
    let space = cfg.space_for(params, delta)?;
    let channel = LossChannel::new(space, params.eta)?;
    let (p_fp, p_fn, overlap) = match params.family {
        StateFamily::Fock { n } => {
            let n = n as usize;
            let probe = PureState::fock(space, n)?;
            let shifted = probe.displaced(delta)?;
            let rho0 = channel.apply_pure(&probe)?;
            let rho_delta = channel.apply_pure(&shifted)?;
            (1.0 - rho0.element(n, n).re, rho_delta.element(n, n).re, probe.overlap(&shifted)?)
        }
        StateFamily::Cat { alpha } => {
            let probe = PureState::cat(space, alpha)?;
            let shifted = probe.displaced(delta)?;
            let rho0 = channel.apply_pure(&probe)?;
            let rho_delta = channel.apply_pure(&shifted)?;
            (
                0.5 * (1.0 - rho0.parity_expectation()),
                0.5 * (1.0 + rho_delta.parity_expectation()),
                probe.overlap(&shifted)?,
            )
        }
    };
    ErrorRates::new(p_fp, p_fn, helstrom(params.p0, params.p_delta, overlap.norm_sqr())?)
}

/// How an operating point was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatingPointSource {
    /// Closed-form threshold: orthogonality for Fock probes and the cat
    /// overlap zero `δ₀`, or the `δ'² = 1` optimum for lossy single photons.
    AnalyticThreshold,
    /// Numerical minimum of the cat parity.
    ParityMinimized,
    /// Large-amplitude approximation `δ' = π / (4α)` of the cat overlap zero.
    Asymptotic,
}

/// Phase to detect and the displacements it produces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub phi0: f64,
    /// `δ = sqrt(N) φ₀ e^r`
    pub delta: f64,
    /// `δ' = sqrt(η) δ`
    pub delta_detected: f64,
    pub source: OperatingPointSource,
}

impl OperatingPoint {
    fn from_detected(params: &ProtocolParams, delta_detected: f64, source: OperatingPointSource) -> Self {
        let delta = delta_detected / libm::sqrt(params.eta);
        Self { phi0: params.phase_for_delta(delta), delta, delta_detected, source }
    }
}

/// Canonical operating point.
///
/// Fock `n = 1`: `δ'² = 1`, which minimizes the false-negative rate at any
/// efficiency. Lossless Fock `n > 1`: `δ'² = R_n`. Cat: the minimum of the
/// lossy parity over `δ' ∈ (0, π/(2α'))`.
pub fn optimize_delta(params: &ProtocolParams) -> Result<OperatingPoint> {
    params.validate()?;
    match params.family {
        StateFamily::Fock { n: 1 } => {
            Ok(OperatingPoint::from_detected(params, 1.0, OperatingPointSource::AnalyticThreshold))
        }
        StateFamily::Fock { n } if params.eta == 1.0 => {
            let root = laguerre_first_root(n)?;
            Ok(OperatingPoint::from_detected(params, libm::sqrt(root), OperatingPointSource::AnalyticThreshold))
        }
        StateFamily::Fock { n } => Err(Error::AnalyticUnavailable { n, eta: params.eta }),
        StateFamily::Cat { alpha } => {
            let delta_det = minimize_cat_parity(alpha, params.eta);
            Ok(OperatingPoint::from_detected(params, delta_det, OperatingPointSource::ParityMinimized))
        }
    }
}

/// Minimizer `δ'` of the lossy cat parity on `(0, π/(2α'))`.
///
/// A coarse grid locates the basin and golden-section search refines it to
/// `1e-10`.
pub fn minimize_cat_parity(alpha: f64, eta: f64) -> f64 {
    const GRID: usize = 256;
    let sqrt_eta = libm::sqrt(eta);
    let alpha_det = sqrt_eta * alpha;
    let upper = PI / (2.0 * alpha_det);
    let parity_at = |delta_det: f64| cat_parity(alpha, delta_det / sqrt_eta, eta);
    let step = upper / GRID as f64;
    let best = (1..GRID)
        .map(|i| i as f64 * step)
        .min_by(|a, b| parity_at(*a).total_cmp(&parity_at(*b)))
        .expect("non-empty grid");
    let lo = (best - step).max(0.0);
    let hi = (best + step).min(upper);
    golden_section_min(parity_at, lo, hi, 1e-10).0
}

/// Cat operating point at the first overlap zero, `δ' = δ₀(α)`.
pub fn cat_overlap_zero_point(params: &ProtocolParams) -> Result<OperatingPoint> {
    params.validate()?;
    match params.family {
        StateFamily::Cat { alpha } => Ok(OperatingPoint::from_detected(
            params,
            cat_overlap_zero(alpha, 0),
            OperatingPointSource::AnalyticThreshold,
        )),
        StateFamily::Fock { .. } => Err(Error::InvalidParams("overlap-zero point is defined for cat probes")),
    }
}

/// Cat operating point at `δ' = π / (4α)`.
pub fn cat_asymptotic_point(params: &ProtocolParams) -> Result<OperatingPoint> {
    params.validate()?;
    match params.family {
        StateFamily::Cat { alpha } => Ok(OperatingPoint::from_detected(
            params,
            cat_overlap_zero_approx(alpha),
            OperatingPointSource::Asymptotic,
        )),
        StateFamily::Fock { .. } => Err(Error::InvalidParams("asymptotic point is defined for cat probes")),
    }
}

/// Parameter varied by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Cat amplitude `α`.
    Alpha,
    /// Detector efficiency `η`.
    Eta,
    /// Fock photon number `n`.
    N,
    /// Displacement `δ`, evaluated as given rather than optimized.
    Delta,
    /// Squeeze factor `r`.
    Squeeze,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Alpha => "alpha",
            SweepAxis::Eta => "eta",
            SweepAxis::N => "n",
            SweepAxis::Delta => "delta",
            SweepAxis::Squeeze => "r",
        }
    }

    /// `template` with this axis set to `value`. The delta axis leaves the
    /// template unchanged.
    pub fn apply(&self, template: &ProtocolParams, value: f64) -> Result<ProtocolParams> {
        let mut p = *template;
        match self {
            SweepAxis::Alpha => match p.family {
                StateFamily::Cat { .. } => p.family = StateFamily::Cat { alpha: value },
                StateFamily::Fock { .. } => return Err(Error::InvalidParams("alpha axis needs a cat probe")),
            },
            SweepAxis::N => {
                if !matches!(p.family, StateFamily::Fock { .. }) {
                    return Err(Error::InvalidParams("n axis needs a Fock probe"));
                }
                if !(value >= 1.0 && libm::trunc(value) == value && value <= u32::MAX as f64) {
                    return Err(Error::InvalidArgument { name: "photon number n", value });
                }
                p.family = StateFamily::Fock { n: value as u32 };
            }
            SweepAxis::Eta => p.eta = value,
            SweepAxis::Squeeze => p.squeeze = value,
            SweepAxis::Delta => {}
        }
        p.validate()?;
        Ok(p)
    }
}

/// One sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub params: ProtocolParams,
    pub evaluation: Evaluation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub points: Vec<SweepPoint>,
    /// Largest analytic/numeric difference over points where both exist.
    pub max_discrepancy: Option<f64>,
}

impl SweepResult {
    /// Assembles points that are already in input order.
    pub fn from_points(axis: SweepAxis, points: Vec<SweepPoint>) -> Self {
        let max_discrepancy = points
            .iter()
            .filter_map(|p| p.evaluation.discrepancy())
            .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))));
        Self { axis, values: points.iter().map(|p| p.value).collect(), points, max_discrepancy }
    }
}

/// Evaluates a single sweep point. Off the delta axis the operating point
/// comes from [`optimize_delta`]; lossy Fock probes with `n > 1` fall back to
/// the lossless threshold when the numeric oracle is on.
pub fn sweep_point(
    template: &ProtocolParams,
    axis: SweepAxis,
    value: f64,
    oracle: Option<&NumericConfig>,
) -> Result<SweepPoint> {
    if !value.is_finite() {
        return Err(Error::InvalidArgument { name: "sweep value", value });
    }
    let params = axis.apply(template, value)?;
    let delta = match axis {
        SweepAxis::Delta => value,
        _ => match optimize_delta(&params) {
            Ok(point) => point.delta,
            Err(Error::AnalyticUnavailable { n, .. }) if oracle.is_some() => {
                libm::sqrt(laguerre_first_root(n)?) / libm::sqrt(params.eta)
            }
            Err(e) => return Err(e),
        },
    };
    let evaluation = evaluate_at_delta(&params, delta, oracle)?;
    Ok(SweepPoint { value, params, evaluation })
}

/// Evaluates every value in order. A failing point aborts the sweep with
/// [`Error::AtPoint`].
pub fn sweep(
    template: &ProtocolParams,
    axis: SweepAxis,
    values: &[f64],
    oracle: Option<&NumericConfig>,
) -> Result<SweepResult> {
    let points = values
        .iter()
        .enumerate()
        .map(|(index, &v)| {
            sweep_point(template, axis, v, oracle)
                .map_err(|e| Error::AtPoint { index, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::from_points(axis, points))
}
