//! Detector inefficiency as an imaginary beamsplitter of power transmissivity
//! `η` that mixes the signal mode with a vacuum bath mode.
//!
//! Two equivalent forms are provided. The Kraus form is
//! `ρ ↦ Σ_k E_k ρ E_k†` with `E_k = sqrt((1-η)^k / k!) η^{n̂/2} â^k`. The
//! purified form applies a two-mode beamsplitter unitary to `|ψ⟩|0⟩_B` and
//! traces out the bath. The closed-form lossy states used by the detection
//! protocols are built here as well.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{cat_normalization, coherent_coefficients, DensityOperator, FockSpace, LinearOperator, PureState};
use crate::linalg::CMatrix;
use crate::special::{ln_binomial, poisson_upper_tail};

/// Cutoff on the discarded Kraus weight, independent of the space tolerance,
/// so that channel outputs keep unit trace to well within `TRACE_TOL`.
const KRAUS_WEIGHT_TOL: f64 = 1e-14;

/// Photon loss with quantum efficiency `eta ∈ (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossChannel {
    eta: f64,
    space: FockSpace,
}

impl LossChannel {
    pub fn new(space: FockSpace, eta: f64) -> Result<Self> {
        validate_eta(eta)?;
        Ok(Self { eta, space })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    /// `ε = sqrt((1-η)/η)`
    pub fn epsilon(&self) -> f64 {
        libm::sqrt((1.0 - self.eta) / self.eta)
    }

    pub fn is_identity(&self) -> bool {
        self.eta == 1.0
    }

    /// `|⟨n-k|E_k|n⟩|² = C(n,k) (1-η)^k η^{n-k}`
    fn kraus_weight(&self, n: usize, k: usize) -> f64 {
        if k > n {
            return 0.0;
        }
        if self.is_identity() {
            return if k == 0 { 1.0 } else { 0.0 };
        }
        libm::exp(
            ln_binomial(n as u64, k as u64)
                + k as f64 * libm::log(1.0 - self.eta)
                + (n - k) as f64 * libm::log(self.eta),
        )
    }

    /// Kraus operators `E_0 .. E_{dim-1}` as explicit matrices. The set is
    /// complete on the truncated space because `â^k = 0` there for `k >= dim`.
    pub fn kraus_operators(&self) -> Vec<LinearOperator> {
        let dim = self.space.dim();
        let a = LinearOperator::annihilation(self.space);
        let damping: Vec<Complex64> = (0..dim)
            .map(|n| Complex64::new(libm::pow(self.eta, 0.5 * n as f64), 0.0))
            .collect();
        let damping = LinearOperator::from_matrix(self.space, CMatrix::from_diagonal(&damping))
            .expect("same dimension");
        let mut a_power = LinearOperator::identity(self.space);
        let mut ops = Vec::with_capacity(dim);
        let mut k_factorial = 1.0;
        for k in 0..dim {
            if k > 0 {
                a_power = a.compose(&a_power).expect("same space");
                k_factorial *= k as f64;
            }
            let prefactor = libm::sqrt(libm::pow(1.0 - self.eta, k as f64) / k_factorial);
            let e_k = damping.compose(&a_power).expect("same space");
            let scaled = e_k.matrix().scale(Complex64::new(prefactor, 0.0));
            ops.push(LinearOperator::from_matrix(self.space, scaled).expect("same dimension"));
        }
        ops
    }

    /// `ρ' = Σ_k E_k ρ E_k†`, summing Kraus terms in order of `k` until the
    /// weight of the remaining ones drops below the cutoff.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.space().dim() != self.space.dim() {
            return Err(Error::SpaceMismatch { left: self.space.dim(), right: rho.space().dim() });
        }
        if self.is_identity() {
            return Ok(rho.clone());
        }
        let dim = self.space.dim();
        let populations: Vec<f64> = (0..dim).map(|n| rho.element(n, n).re).collect();
        let term_weights: Vec<f64> = (0..dim)
            .map(|k| (k..dim).map(|n| populations[n] * self.kraus_weight(n, k)).sum())
            .collect();
        // smallest k_max whose discarded suffix weight is below the cutoff
        let mut suffix = 0.0;
        let mut k_max = dim - 1;
        for k in (0..dim).rev() {
            suffix += term_weights[k].abs();
            if suffix >= KRAUS_WEIGHT_TOL {
                k_max = k;
                break;
            }
        }
        let amplitude: Vec<Vec<f64>> = (0..=k_max)
            .map(|k| (0..dim).map(|n| libm::sqrt(self.kraus_weight(n, k))).collect())
            .collect();
        let mut out = CMatrix::zeros(dim);
        for (k, w) in amplitude.iter().enumerate() {
            for m in 0..dim - k {
                for mp in 0..dim - k {
                    out[(m, mp)] += rho.element(m + k, mp + k) * (w[m + k] * w[mp + k]);
                }
            }
        }
        DensityOperator::from_channel_output(self.space, out)
    }

    pub fn apply_pure(&self, state: &PureState) -> Result<DensityOperator> {
        self.apply(&state.to_density())
    }

    /// Loss through the two-mode purification: `U_BS (|ψ⟩ ⊗ |0⟩_B)` with
    /// `U_BS = exp(θ(â b̂† - â† b̂))`, `cos θ = sqrt(η)`, followed by the
    /// partial trace over the bath. Both modes use the same truncation; the
    /// beamsplitter conserves total photon number, so the sector reached
    /// from `|ψ⟩|0⟩` is represented exactly. Cost grows as `dim^6`; meant for
    /// small spaces.
    pub fn apply_purified(&self, state: &PureState) -> Result<DensityOperator> {
        if state.space().dim() != self.space.dim() {
            return Err(Error::SpaceMismatch { left: self.space.dim(), right: state.space().dim() });
        }
        let d = self.space.dim();
        let theta = libm::acos(libm::sqrt(self.eta));
        let idx = |signal: usize, bath: usize| signal * d + bath;
        let mut generator = CMatrix::zeros(d * d);
        for ns in 0..d {
            for nb in 0..d {
                // â b̂†
                if ns >= 1 && nb + 1 < d {
                    generator[(idx(ns - 1, nb + 1), idx(ns, nb))] +=
                        theta * libm::sqrt((ns * (nb + 1)) as f64);
                }
                // -â† b̂
                if ns + 1 < d && nb >= 1 {
                    generator[(idx(ns + 1, nb - 1), idx(ns, nb))] -=
                        theta * libm::sqrt(((ns + 1) * nb) as f64);
                }
            }
        }
        let unitary = generator.expm()?;
        let mut joint = alloc::vec![Complex64::new(0.0, 0.0); d * d];
        for (n, amp) in state.amplitudes().iter().enumerate() {
            if *amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let col = idx(n, 0);
            for (row, slot) in joint.iter_mut().enumerate() {
                *slot += unitary[(row, col)] * amp;
            }
        }
        let rho = CMatrix::from_fn(d, |m, mp| {
            (0..d).map(|b| joint[idx(m, b)] * joint[idx(mp, b)].conj()).sum()
        });
        DensityOperator::from_channel_output(self.space, rho)
    }
}

/// Accepts `0 < η <= 1`.
pub fn validate_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidEfficiency(eta));
    }
    Ok(())
}

/// Lossy single-photon probe after displacement:
/// `η D(δ')|1⟩⟨1|D†(δ') + (1-η) D(δ')|0⟩⟨0|D†(δ')`, `δ' = δ sqrt(η)`.
pub fn lossy_displaced_fock1(space: FockSpace, delta: f64, eta: f64) -> Result<DensityOperator> {
    validate_eta(eta)?;
    let delta_det = delta * libm::sqrt(eta);
    let d = LinearOperator::displacement(space, delta_det)?;
    let v0 = d.matrix().column(0);
    let v1 = d.matrix().column(1);
    let mut rho = CMatrix::outer(&v1, &v1).scale(Complex64::new(eta, 0.0));
    rho.add_scaled(&CMatrix::outer(&v0, &v0), Complex64::new(1.0 - eta, 0.0));
    DensityOperator::from_channel_output(space, rho)
}

/// Lossy displaced even cat in closed form:
///
/// `ρ = (1/K)(|A⟩⟨A| + |B⟩⟨B| + e^{-2ε²α'²}[e^{2iα'δ'}|A⟩⟨B| + h.c.])`
///
/// with `A = α' + iδ'`, `B = -α' + iδ'`, `α' = sqrt(η) α`, `δ' = sqrt(η) δ`.
/// The truncated operator is rescaled to unit trace; the discarded mass is
/// bounded by the space's `tail_tol`.
pub fn lossy_displaced_cat(space: FockSpace, alpha: f64, delta: f64, eta: f64) -> Result<DensityOperator> {
    validate_eta(eta)?;
    let sqrt_eta = libm::sqrt(eta);
    let (alpha_det, delta_det) = (sqrt_eta * alpha, sqrt_eta * delta);
    let a = Complex64::new(alpha_det, delta_det);
    let b = Complex64::new(-alpha_det, delta_det);
    let leakage = poisson_upper_tail(a.norm_sqr(), space.dim() as u64);
    if leakage > space.tail_tol() {
        return Err(Error::Leakage { leakage, tail_tol: space.tail_tol() });
    }
    let (ket_a, _) = coherent_coefficients(a, space.dim());
    let (ket_b, _) = coherent_coefficients(b, space.dim());
    let coherence = libm::exp(-2.0 * (1.0 - eta) * alpha * alpha);
    let phase = Complex64::from_polar(1.0, 2.0 * alpha_det * delta_det);
    let mut rho = CMatrix::outer(&ket_a, &ket_a);
    rho.add_scaled(&CMatrix::outer(&ket_b, &ket_b), Complex64::new(1.0, 0.0));
    rho.add_scaled(&CMatrix::outer(&ket_a, &ket_b), phase * coherence);
    rho.add_scaled(&CMatrix::outer(&ket_b, &ket_a), phase.conj() * coherence);
    let rho = rho.scale(Complex64::new(1.0 / cat_normalization(alpha), 0.0));
    let trace = rho.trace().re;
    DensityOperator::from_channel_output(space, rho.scale(Complex64::new(1.0 / trace, 0.0)))
}
