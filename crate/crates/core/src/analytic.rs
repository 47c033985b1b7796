//! Closed-form overlaps, parities, thresholds and error probabilities.
//!
//! Notation: `δ` is the effective displacement `sqrt(N) φ e^r` produced by
//! the interferometer, `η` the detector efficiency, and primed quantities
//! are rescaled by the loss, `α' = sqrt(η) α`, `δ' = sqrt(η) δ`,
//! `ε = sqrt((1-η)/η)`. Note that `ε² α'² = (1-η) α²`.

use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::cat_normalization;
use crate::loss::validate_eta;
use crate::solve::{bisect, scan_sign_change};
use crate::special::ln_factorial;

/// Probe state injected into the dark port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateFamily {
    /// Number state `|n⟩`.
    Fock { n: u32 },
    /// Even cat state of real amplitude `alpha`.
    Cat { alpha: f64 },
}

/// One detection scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    pub family: StateFamily,
    /// Detector quantum efficiency, `(0, 1]`.
    pub eta: f64,
    /// Logarithmic squeeze factor `r >= 0`.
    pub squeeze: f64,
    /// Photon number `N` at the phase object.
    pub photons: f64,
    /// Prior probability of no phase shift.
    pub p0: f64,
    /// Prior probability of the phase shift.
    pub p_delta: f64,
}

impl ProtocolParams {
    /// Lossless, unsqueezed, `N = 10⁶`, equal priors.
    pub fn new(family: StateFamily) -> Self {
        Self { family, eta: 1.0, squeeze: 0.0, photons: 1e6, p0: 0.5, p_delta: 0.5 }
    }

    pub fn fock(n: u32) -> Self {
        Self::new(StateFamily::Fock { n })
    }

    pub fn cat(alpha: f64) -> Self {
        Self::new(StateFamily::Cat { alpha })
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_squeeze(mut self, r: f64) -> Self {
        self.squeeze = r;
        self
    }

    pub fn with_photons(mut self, photons: f64) -> Self {
        self.photons = photons;
        self
    }

    pub fn with_priors(mut self, p0: f64, p_delta: f64) -> Self {
        self.p0 = p0;
        self.p_delta = p_delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            StateFamily::Fock { n: 0 } => {
                return Err(Error::InvalidParams("Fock probe needs n >= 1"));
            }
            StateFamily::Cat { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                return Err(Error::InvalidParams("cat amplitude alpha must be positive and finite"));
            }
            _ => {}
        }
        validate_eta(self.eta)?;
        if !(self.squeeze >= 0.0 && self.squeeze.is_finite()) {
            return Err(Error::InvalidParams("squeeze factor r must be finite and >= 0"));
        }
        if !(self.photons > 0.0 && self.photons.is_finite()) {
            return Err(Error::InvalidParams("photon number N must be positive and finite"));
        }
        validate_priors(self.p0, self.p_delta)
    }

    /// `δ = sqrt(N) φ e^r`
    pub fn delta_for_phase(&self, phi: f64) -> f64 {
        libm::sqrt(self.photons) * phi * libm::exp(self.squeeze)
    }

    /// Inverse of [`delta_for_phase`](Self::delta_for_phase).
    pub fn phase_for_delta(&self, delta: f64) -> f64 {
        delta * libm::exp(-self.squeeze) / libm::sqrt(self.photons)
    }
}

fn validate_priors(p0: f64, p_delta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p0) || !(0.0..=1.0).contains(&p_delta) {
        return Err(Error::InvalidParams("priors must lie in [0, 1]"));
    }
    if (p0 + p_delta - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParams("priors must sum to 1"));
    }
    Ok(())
}

/// False-positive, false-negative and Helstrom error probabilities.
///
/// `p_fp` is conditioned on no phase shift and `p_fn` on its presence; the
/// priors only enter `helstrom`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRates {
    pub p_fp: f64,
    pub p_fn: f64,
    pub helstrom: f64,
}

impl ErrorRates {
    /// Rounding excursions of up to `1e-12` outside the valid ranges are
    /// clamped; anything larger is an error.
    pub fn new(p_fp: f64, p_fn: f64, helstrom: f64) -> Result<Self> {
        Ok(Self {
            p_fp: clamp_probability("p_fp", p_fp, 1.0)?,
            p_fn: clamp_probability("p_fn", p_fn, 1.0)?,
            helstrom: clamp_probability("helstrom", helstrom, 0.5)?,
        })
    }

    /// Largest componentwise difference.
    pub fn max_abs_diff(&self, other: &ErrorRates) -> f64 {
        (self.p_fp - other.p_fp)
            .abs()
            .max((self.p_fn - other.p_fn).abs())
            .max((self.helstrom - other.helstrom).abs())
    }
}

fn clamp_probability(name: &'static str, value: f64, upper: f64) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if !(value >= -SLACK && value <= upper + SLACK) {
        return Err(Error::InvalidArgument { name, value });
    }
    Ok(value.clamp(0.0, upper))
}

/// Laguerre polynomial `L_n(x)` by the three-term recurrence
/// `(k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}`.
pub fn laguerre(n: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Smallest positive root `R_n` of `L_n`.
///
/// The roots of `L_n` are spaced by more than `1/n` near the origin and the
/// first one never exceeds `R_1 = 1`, so a scan with step `1/n` brackets it.
pub fn laguerre_first_root(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument { name: "Laguerre order (L_0 has no root)", value: 0.0 });
    }
    let step = 1.0 / n as f64;
    let (lo, hi) = scan_sign_change(|x| laguerre(n, x), 0.0, 1.0 + step, step)?;
    bisect(|x| laguerre(n, x), lo, hi, 1e-12)
}

/// `⟨n|D(δ)|n⟩ = L_n(δ²) e^{-δ²/2}`
pub fn fock_overlap(n: u32, delta: f64) -> f64 {
    let x = delta * delta;
    laguerre(n, x) * libm::exp(-0.5 * x)
}

/// Lossless cat overlap `⟨Ψ₀|Ψ_δ⟩ = (2 e^{-δ²/2} / K)(cos 2αδ + e^{-2α²})`.
pub fn cat_overlap(alpha: f64, delta: f64) -> f64 {
    2.0 * libm::exp(-0.5 * delta * delta) / cat_normalization(alpha)
        * (libm::cos(2.0 * alpha * delta) + libm::exp(-2.0 * alpha * alpha))
}

/// Zeros of [`cat_overlap`]: `δ_k = (arccos(-e^{-2α²}) + 2πk) / (2α)`.
pub fn cat_overlap_zero(alpha: f64, k: u32) -> f64 {
    (libm::acos(-libm::exp(-2.0 * alpha * alpha)) + 2.0 * PI * k as f64) / (2.0 * alpha)
}

/// Large-`α` limit of the first overlap zero, `π / (4α)`.
pub fn cat_overlap_zero_approx(alpha: f64) -> f64 {
    FRAC_PI_2 / (2.0 * alpha)
}

/// Smallest phase shift that the probe distinguishes without error:
/// `sqrt(R_n) e^{-r} / sqrt(ηN)` for Fock probes and
/// `δ₀(α) e^{-r} / sqrt(ηN)` for cats.
pub fn threshold_phase(params: &ProtocolParams) -> Result<f64> {
    params.validate()?;
    let delta_det = match params.family {
        StateFamily::Fock { n } => libm::sqrt(laguerre_first_root(n)?),
        StateFamily::Cat { alpha } => cat_overlap_zero(alpha, 0),
    };
    Ok(delta_det * libm::exp(-params.squeeze) / libm::sqrt(params.eta * params.photons))
}

/// Minimum binary discrimination error
/// `½(1 - sqrt(1 - 4 p₀ p_δ |⟨Ψ₀|Ψ_δ⟩|²))`.
pub fn helstrom(p0: f64, p_delta: f64, overlap_sq: f64) -> Result<f64> {
    validate_priors(p0, p_delta)?;
    let discriminant = 1.0 - 4.0 * p0 * p_delta * overlap_sq;
    if discriminant < -1e-12 || !discriminant.is_finite() {
        return Err(Error::InconsistentOverlap { discriminant });
    }
    Ok(0.5 * (1.0 - libm::sqrt(discriminant.max(0.0))))
}

/// False-negative probability of the single-photon counting strategy,
/// `[η(1-δ'²)² + (1-η)δ'²] e^{-δ'²}`, as a function of `x = δ'²`.
pub fn fock1_false_negative(x: f64, eta: f64) -> f64 {
    (eta * (1.0 - x) * (1.0 - x) + (1.0 - eta) * x) * libm::exp(-x)
}

/// Single-photon probe, "one count means no signal":
/// `p_fp = 1 - η`, `p_fn = [η(1-δ'²)² + (1-η)δ'²] e^{-δ'²}`.
/// `helstrom` uses the lossless overlap and equal priors.
///
/// Requires `0 < eta <= 1`.
pub fn fock1_error_rates(delta: f64, eta: f64) -> Result<ErrorRates> {
    validate_eta(eta)?;
    let x = eta * delta * delta;
    let ov = fock_overlap(1, delta);
    ErrorRates::new(1.0 - eta, fock1_false_negative(x, eta), helstrom(0.5, 0.5, ov * ov)?)
}

/// Parity of the lossy displaced cat,
/// `(2 e^{-2δ'²} / K)(e^{-2ε²α'²} cos 4α'δ' + e^{-2α'²})`.
/// At `η = 1` this is `e^{-2δ²}(cos 4αδ + e^{-2α²}) / (1 + e^{-2α²})`.
pub fn cat_parity(alpha: f64, delta: f64, eta: f64) -> f64 {
    let sqrt_eta = libm::sqrt(eta);
    let (a, d) = (sqrt_eta * alpha, sqrt_eta * delta);
    let coherence = libm::exp(-2.0 * (1.0 - eta) * alpha * alpha);
    2.0 * libm::exp(-2.0 * d * d) / cat_normalization(alpha)
        * (coherence * libm::cos(4.0 * a * d) + libm::exp(-2.0 * a * a))
}

/// Parity without signal, `(2/K)(e^{-2ε²α'²} + e^{-2α'²})`.
pub fn cat_parity_no_signal(alpha: f64, eta: f64) -> f64 {
    let coherence = libm::exp(-2.0 * (1.0 - eta) * alpha * alpha);
    2.0 / cat_normalization(alpha) * (coherence + libm::exp(-2.0 * eta * alpha * alpha))
}

/// Product form of the cat false-positive probability,
/// `(1/K)(1 - e^{-2ε²α'²})(1 - e^{-2α'²})`.
pub fn cat_false_positive_product(alpha: f64, eta: f64) -> f64 {
    // 1 - e^{-x} via expm1 keeps precision for eta -> 1
    let coherence_loss = -libm::expm1(-2.0 * (1.0 - eta) * alpha * alpha);
    let vacuum_gap = -libm::expm1(-2.0 * eta * alpha * alpha);
    coherence_loss * vacuum_gap / cat_normalization(alpha)
}

/// Even/odd strategy for cats, "odd count means signal":
/// `p_fp = (1 - P₀)/2`, `p_fn = (1 + P_δ)/2`. `helstrom` uses the lossless
/// overlap and equal priors.
pub fn cat_error_rates(alpha: f64, delta: f64, eta: f64) -> Result<ErrorRates> {
    validate_eta(eta)?;
    let ov = cat_overlap(alpha, delta);
    ErrorRates::new(
        0.5 * (1.0 - cat_parity_no_signal(alpha, eta)),
        0.5 * (1.0 + cat_parity(alpha, delta, eta)),
        helstrom(0.5, 0.5, ov * ov)?,
    )
}

/// Coherent-state and squeezed phase-estimation baselines
/// `(1 / (2 sqrt N), e^{-r} / (2 sqrt N))`.
pub fn baseline_phase_errors(photons: f64, r: f64) -> (f64, f64) {
    let snl = 0.5 / libm::sqrt(photons);
    (snl, snl * libm::exp(-r))
}

/// Photon-number distribution of the lossy displaced cat,
///
/// `p_n = (2 e^{-α'²-δ'²} / (K n!)) ((α'²+δ'²)^n + e^{-2ε²α'²} Re{e^{2iα'δ'} [-(α'+iδ')²]^n})`.
///
/// Evaluated in log space. Writing `α'+iδ' = ρ e^{iθ}` the bracket becomes
/// `ρ^{2n}(1 + e^{-2ε²α'²} cos(2α'δ' + n(π + 2θ)))`.
pub fn cat_pn(alpha: f64, delta: f64, eta: f64, n: u32) -> f64 {
    let sqrt_eta = libm::sqrt(eta);
    let amp = Complex64::new(sqrt_eta * alpha, sqrt_eta * delta);
    let rho_sq = amp.norm_sqr();
    let coherence = libm::exp(-2.0 * (1.0 - eta) * alpha * alpha);
    let theta = libm::atan2(amp.im, amp.re);
    let nf = n as f64;
    let interference = if n.is_multiple_of(2) && delta == 0.0 {
        // θ = 0: cos(2α'δ' + nπ) = ±1 exactly
        1.0 + coherence
    } else if delta == 0.0 {
        1.0 - coherence
    } else {
        1.0 + coherence * libm::cos(2.0 * amp.re * amp.im + nf * (PI + 2.0 * theta))
    };
    if interference == 0.0 {
        return 0.0;
    }
    let ln_power = if n == 0 { 0.0 } else { nf * libm::log(rho_sq) };
    let ln_prefactor = libm::log(2.0 / cat_normalization(alpha)) - rho_sq - ln_factorial(n as u64);
    libm::exp(ln_prefactor + ln_power) * interference
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{E, LN_2, SQRT_2};

    #[test]
    fn laguerre_low_orders() {
        for &x in &[-1.0, 0.0, 0.3, 2.5] {
            assert_eq!(laguerre(0, x), 1.0);
            assert_eq!(laguerre(1, x), 1.0 - x);
            let l2 = 1.0 - 2.0 * x + 0.5 * x * x;
            assert!((laguerre(2, x) - l2).abs() < 1e-14);
        }
        assert_eq!(laguerre(1, 1.0), 0.0);
        assert!(laguerre(2, 2.0 - SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn first_roots() {
        assert!((laguerre_first_root(1).unwrap() - 1.0).abs() < 1e-12);
        assert!((laguerre_first_root(2).unwrap() - (2.0 - SQRT_2)).abs() < 1e-10);
        assert!(laguerre_first_root(0).is_err());
        let roots: alloc::vec::Vec<f64> = (1..=10).map(|n| laguerre_first_root(n).unwrap()).collect();
        assert!(roots.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn fock_overlap_values() {
        for n in 0..5 {
            assert_eq!(fock_overlap(n, 0.0), 1.0);
        }
        assert_eq!(fock_overlap(1, 1.0), 0.0);
    }

    #[test]
    fn cat_overlap_zeros() {
        assert!((cat_overlap(1.5, 0.0) - 1.0).abs() < 1e-15);
        for &alpha in &[0.7, 1.5, 2.0, 3.0] {
            for k in 0..3 {
                assert!(cat_overlap(alpha, cat_overlap_zero(alpha, k)).abs() < 1e-12);
            }
            let spacing = cat_overlap_zero(alpha, 1) - cat_overlap_zero(alpha, 0);
            assert!((spacing - PI / alpha).abs() < 1e-14);
        }
        let expected = libm::acos(-libm::exp(-4.5)) / 3.0;
        assert_eq!(cat_overlap_zero(1.5, 0), expected);
    }

    #[test]
    fn cat_zero_approaches_quarter_pi_over_alpha() {
        for &alpha in &[1.51, 2.0, 3.0, 5.0] {
            let rel = cat_overlap_zero(alpha, 0) / cat_overlap_zero_approx(alpha) - 1.0;
            assert!(rel.abs() < 0.01, "alpha {alpha}: {rel}");
        }
    }

    #[test]
    fn thresholds() {
        let phi = threshold_phase(&ProtocolParams::fock(1)).unwrap();
        assert!((phi - 1e-3).abs() < 1e-15);
        let phi = threshold_phase(&ProtocolParams::fock(1).with_eta(0.98)).unwrap();
        assert!((phi - 1.0 / libm::sqrt(0.98e6)).abs() < 1e-15);
        let phi = threshold_phase(&ProtocolParams::cat(3.0).with_squeeze(1.0)).unwrap();
        let approx = PI * libm::exp(-1.0) / (4.0 * 3.0 * 1e3);
        assert!((phi / approx - 1.0).abs() < 0.01);
        assert!(threshold_phase(&ProtocolParams::fock(0)).is_err());
        assert!(threshold_phase(&ProtocolParams::cat(-1.0)).is_err());
    }

    #[test]
    fn helstrom_values() {
        assert_eq!(helstrom(0.5, 0.5, 0.0).unwrap(), 0.0);
        assert_eq!(helstrom(0.5, 0.5, 1.0).unwrap(), 0.5);
        assert!((helstrom(0.5, 0.5, 0.5).unwrap() - 0.146_446_609_406_726_24).abs() < 1e-15);
        assert!(matches!(helstrom(0.5, 0.5, 1.5), Err(Error::InconsistentOverlap { .. })));
        assert!(helstrom(0.7, 0.7, 0.1).is_err());
    }

    #[test]
    fn fock1_rates() {
        let r = fock1_error_rates(1.0, 1.0).unwrap();
        assert_eq!((r.p_fp, r.p_fn), (0.0, 0.0));
        let eta = 0.98;
        let r = fock1_error_rates(1.0 / libm::sqrt(eta), eta).unwrap();
        assert!((r.p_fp - 0.02).abs() < 1e-12);
        assert!((r.p_fn - 0.02 / E).abs() < 1e-12);
        assert!((r.p_fn - 0.007_357_588_823_428_847).abs() < 1e-12);
    }

    #[test]
    fn fock1_false_negative_is_stationary_at_one() {
        for &eta in &[0.5, 0.8, 0.9, 0.98] {
            let h = 1e-5;
            let deriv = (fock1_false_negative(1.0 + h, eta) - fock1_false_negative(1.0 - h, eta)) / (2.0 * h);
            assert!(deriv.abs() < 1e-8, "eta {eta}: {deriv}");
        }
    }

    #[test]
    fn cat_parity_limits() {
        assert!((cat_parity(2.0, 0.0, 1.0) - 1.0).abs() < 1e-15);
        let eta = 0.9;
        let alpha: f64 = 1.7;
        let eps_sq = (1.0 - eta) / eta;
        let a_det_sq = eta * alpha * alpha;
        let eq41 = 2.0 / cat_normalization(alpha)
            * (libm::exp(-2.0 * eps_sq * a_det_sq) + libm::exp(-2.0 * a_det_sq));
        assert!((cat_parity(alpha, 0.0, eta) - eq41).abs() < 1e-15);
        assert!((cat_parity_no_signal(alpha, eta) - eq41).abs() < 1e-15);
        let lossless = libm::exp(-2.0 * 0.09) * (libm::cos(4.0 * 1.5 * 0.3) + libm::exp(-4.5))
            / (1.0 + libm::exp(-4.5));
        assert!((cat_parity(1.5, 0.3, 1.0) - lossless).abs() < 1e-15);
    }

    #[test]
    fn cat_false_positive_identity() {
        for &alpha in &[1.0, 2.0, 3.0] {
            for &eta in &[0.5, 0.9, 0.98] {
                let r = cat_error_rates(alpha, 0.3, eta).unwrap();
                assert!((r.p_fp - cat_false_positive_product(alpha, eta)).abs() < 1e-12);
            }
            assert_eq!(cat_error_rates(alpha, 0.4, 1.0).unwrap().p_fp, 0.0);
        }
    }

    #[test]
    fn baselines() {
        let (snl, sqz) = baseline_phase_errors(1e6, 0.0);
        assert_eq!((snl, sqz), (5e-4, 5e-4));
        let (snl, sqz) = baseline_phase_errors(1e6, LN_2);
        assert!((sqz - snl / 2.0).abs() < 1e-18);
        let phi = threshold_phase(&ProtocolParams::fock(1)).unwrap();
        assert!((snl / phi - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cat_pn_sums() {
        let (alpha, delta, eta) = (1.5, 0.4, 0.9);
        let p: alloc::vec::Vec<f64> = (0..=80).map(|n| cat_pn(alpha, delta, eta, n)).collect();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let parity: f64 = p.iter().enumerate().map(|(n, x)| if n % 2 == 0 { *x } else { -*x }).sum();
        assert!((parity - cat_parity(alpha, delta, eta)).abs() < 1e-10);
    }

    #[test]
    fn cat_pn_lossless_odd_vanish() {
        for n in (1..40).step_by(2) {
            assert_eq!(cat_pn(2.0, 0.0, 1.0, n), 0.0);
        }
        assert!(cat_pn(2.0, 0.0, 1.0, 2) > 0.0);
    }

    #[test]
    fn cat_pn_large_n_is_finite() {
        let p = cat_pn(3.0, 0.5, 0.9, 400);
        assert!((0.0..1e-100).contains(&p));
    }

    #[test]
    fn params_validation() {
        assert!(ProtocolParams::fock(1).validate().is_ok());
        assert!(ProtocolParams::fock(1).with_eta(0.0).validate().is_err());
        assert!(ProtocolParams::fock(1).with_priors(0.3, 0.6).validate().is_err());
        assert!(ProtocolParams::cat(2.0).with_squeeze(-0.1).validate().is_err());
        assert!(ProtocolParams::cat(2.0).with_photons(0.0).validate().is_err());
        let p = ProtocolParams::cat(2.0).with_squeeze(0.5).with_photons(4e4);
        assert!((p.phase_for_delta(p.delta_for_phase(1e-3)) - 1e-3).abs() < 1e-18);
    }
}
