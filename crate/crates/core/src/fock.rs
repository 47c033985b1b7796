//! Truncated single-mode Fock space: states, density operators and the
//! bosonic operators acting on them.
//!
//! Every state remembers its *leakage*, the probability mass that the
//! untruncated state would carry at levels `n >= dim`. Constructors refuse to
//! build states whose leakage exceeds the space's `tail_tol`.
//!
//! Operator generators are truncated before exponentiation. A truncated
//! Hermitian generator exponentiates to an exactly unitary matrix, so the
//! truncation only corrupts the top of the basis. [`recommend_dim`] adds
//! [`DIM_MARGIN`] levels above the physically populated ones to keep that
//! corruption away from the amplitudes that matter.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{inner, vec_norm, CMatrix};
use crate::special::poisson_upper_tail;

pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Extra levels kept above the populated part of the basis.
pub const DIM_MARGIN: usize = 20;

/// Tolerance on `‖ψ‖ = 1` for [`PureState`].
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance on `Tr ρ = 1` for [`DensityOperator`].
pub const TRACE_TOL: f64 = 1e-10;
/// Tolerance on `ρ = ρ†` for [`DensityOperator`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Most negative eigenvalue accepted by [`DensityOperator::new`].
pub const EIGENVALUE_TOL: f64 = 1e-10;

/// Basis `|0⟩ .. |dim-1⟩` plus the leakage tolerance for states built in it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockSpace {
    dim: usize,
    tail_tol: f64,
}

impl FockSpace {
    pub fn new(dim: usize, tail_tol: f64) -> Result<Self> {
        if dim < 2 || !(tail_tol > 0.0) {
            return Err(Error::InvalidSpace { dim, tail_tol });
        }
        Ok(Self { dim, tail_tol })
    }

    pub fn with_dim(dim: usize) -> Result<Self> {
        Self::new(dim, DEFAULT_TAIL_TOL)
    }

    /// Space sized by [`recommend_dim`].
    pub fn recommended(max_alpha: f64, max_delta: f64, tail_tol: f64) -> Result<Self> {
        if !(tail_tol > 0.0) {
            return Err(Error::InvalidSpace { dim: 0, tail_tol });
        }
        Self::new(recommend_dim(max_alpha, max_delta, tail_tol), tail_tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    fn ensure_same(&self, other: &FockSpace) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::SpaceMismatch { left: self.dim, right: other.dim });
        }
        Ok(())
    }

    fn check_leakage(&self, leakage: f64) -> Result<()> {
        if leakage > self.tail_tol {
            return Err(Error::Leakage { leakage, tail_tol: self.tail_tol });
        }
        Ok(())
    }
}

/// Basis size for states whose photon statistics are no wider than those of
/// a coherent state of amplitude `sqrt(max_alpha² + max_delta²)`.
///
/// Returns the smallest `M` with Poisson tail `P(n >= M) < tail_tol`, plus
/// [`DIM_MARGIN`]. Non-decreasing in `|max_alpha|`, `|max_delta|` and
/// `1 / tail_tol`.
///
/// # Panics
///
/// If `tail_tol` is not positive or an amplitude is not finite.
pub fn recommend_dim(max_alpha: f64, max_delta: f64, tail_tol: f64) -> usize {
    assert!(tail_tol > 0.0, "tail_tol must be positive");
    assert!(max_alpha.is_finite() && max_delta.is_finite(), "amplitudes must be finite");
    let mean = max_alpha * max_alpha + max_delta * max_delta;
    let mut m = 0u64;
    while poisson_upper_tail(mean, m) >= tail_tol {
        m += 1;
    }
    (m as usize + DIM_MARGIN).max(2)
}

/// Photon-number statistics shared by pure and mixed states.
pub trait PhotonStatistics {
    /// `p_n`, `n = 0 .. dim-1`.
    fn photon_distribution(&self) -> Vec<f64>;

    /// `⟨(-1)^n̂⟩ = Σ (-1)^n p_n`
    fn parity_expectation(&self) -> f64 {
        self.photon_distribution()
            .iter()
            .enumerate()
            .map(|(n, p)| if n % 2 == 0 { *p } else { -*p })
            .sum()
    }

    fn mean_photon_number(&self) -> f64 {
        self.photon_distribution().iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }
}

/// Unit-norm state vector over the truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    space: FockSpace,
    amplitudes: Vec<Complex64>,
    leakage: f64,
}

impl PureState {
    /// Wraps amplitudes that already have unit norm.
    pub fn new(space: FockSpace, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != space.dim {
            return Err(Error::SpaceMismatch { left: space.dim, right: amplitudes.len() });
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NormNotPreserved { norm });
        }
        Ok(Self { space, amplitudes, leakage: 0.0 })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(space: FockSpace, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != space.dim {
            return Err(Error::SpaceMismatch { left: space.dim, right: amplitudes.len() });
        }
        let norm = vec_norm(&amplitudes);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidArgument { name: "state norm", value: norm });
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { space, amplitudes, leakage: 0.0 })
    }

    /// Number state `|n⟩`.
    pub fn fock(space: FockSpace, n: usize) -> Result<Self> {
        if n >= space.dim {
            return Err(Error::LevelOutOfRange { level: n, dim: space.dim });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); space.dim];
        amplitudes[n] = Complex64::new(1.0, 0.0);
        Ok(Self { space, amplitudes, leakage: 0.0 })
    }

    pub fn vacuum(space: FockSpace) -> Self {
        Self::fock(space, 0).expect("dim >= 2")
    }

    /// Coherent state `|α⟩`, truncated and renormalized.
    pub fn coherent(space: FockSpace, alpha: Complex64) -> Result<Self> {
        let (coeffs, leakage) = coherent_coefficients(alpha, space.dim);
        space.check_leakage(leakage)?;
        let mut state = Self::normalized(space, coeffs)?;
        state.leakage = leakage;
        Ok(state)
    }

    /// Even cat state `(|α⟩ + |-α⟩) / sqrt(K)` with `K = 2(1 + e^{-2α²})`.
    /// Odd amplitudes are exactly zero.
    pub fn cat(space: FockSpace, alpha: f64) -> Result<Self> {
        let k_norm = cat_normalization(alpha);
        let (coeffs, _) = coherent_coefficients(Complex64::new(alpha, 0.0), space.dim);
        let amplitudes: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| if n % 2 == 0 { *c * 2.0 } else { Complex64::new(0.0, 0.0) })
            .collect();
        // mass of the even coherent terms above the cut
        let leakage = coherent_tail_terms(Complex64::new(alpha, 0.0), space.dim)
            .filter(|(n, _)| n % 2 == 0)
            .map(|(_, c)| 4.0 * c.norm_sqr())
            .sum::<f64>()
            / k_norm;
        space.check_leakage(leakage)?;
        let mut state = Self::normalized(space, amplitudes)?;
        state.leakage = leakage;
        Ok(state)
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Estimated probability mass lost to the truncation.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`
    pub fn overlap(&self, other: &PureState) -> Result<Complex64> {
        self.space.ensure_same(&other.space)?;
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// Probability in the top `levels` basis states.
    pub fn edge_mass(&self, levels: usize) -> f64 {
        let from = self.space.dim.saturating_sub(levels);
        self.amplitudes[from..].iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            space: self.space,
            matrix: CMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    /// `D(δ)|ψ⟩`
    pub fn displaced(&self, delta: f64) -> Result<Self> {
        let d = LinearOperator::displacement(self.space, delta)?;
        Ok(d.apply(self, Normalization::Preserve)?.state)
    }
}

impl PhotonStatistics for PureState {
    fn photon_distribution(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// `K = 2(1 + e^{-2α²})`
pub(crate) fn cat_normalization(alpha: f64) -> f64 {
    2.0 * (1.0 + libm::exp(-2.0 * alpha * alpha))
}

/// `⟨n|α⟩` for `n < dim`, and the Poisson mass at `n >= dim`.
pub(crate) fn coherent_coefficients(alpha: Complex64, dim: usize) -> (Vec<Complex64>, f64) {
    let mut coeffs = Vec::with_capacity(dim);
    let mut c = Complex64::new(libm::exp(-0.5 * alpha.norm_sqr()), 0.0);
    for n in 0..dim {
        if n > 0 {
            c = c * alpha / libm::sqrt(n as f64);
        }
        coeffs.push(c);
    }
    let tail = poisson_upper_tail(alpha.norm_sqr(), dim as u64);
    (coeffs, tail)
}

/// `(n, ⟨n|α⟩)` for `n >= dim` until the terms stop mattering.
fn coherent_tail_terms(alpha: Complex64, dim: usize) -> impl Iterator<Item = (usize, Complex64)> {
    let mean = alpha.norm_sqr();
    let ln_abs = 0.5 * libm::log(mean);
    let phase = if mean > 0.0 { alpha / libm::sqrt(mean) } else { Complex64::new(1.0, 0.0) };
    (dim..)
        .map(move |n| {
            let modulus = if mean == 0.0 {
                0.0
            } else {
                libm::exp(
                    -0.5 * mean + n as f64 * ln_abs - 0.5 * crate::special::ln_factorial(n as u64),
                )
            };
            (n, phase.powu(n as u32) * modulus)
        })
        .take_while(move |(n, c)| (*n as f64) <= mean || c.norm_sqr() > 1e-40)
}

/// Whether [`LinearOperator::apply`] may rescale its output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Fail if the norm moves by more than [`NORM_TOL`].
    Preserve,
    /// Rescale to unit norm and report the change.
    Renormalize,
}

/// Result of applying an operator to a pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub state: PureState,
    /// `‖Aψ‖ - 1` before any renormalization.
    pub norm_change: f64,
}

/// Square matrix acting on a [`FockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    space: FockSpace,
    matrix: CMatrix,
}

impl LinearOperator {
    pub fn from_matrix(space: FockSpace, matrix: CMatrix) -> Result<Self> {
        if matrix.dim() != space.dim {
            return Err(Error::SpaceMismatch { left: space.dim, right: matrix.dim() });
        }
        Ok(Self { space, matrix })
    }

    pub fn identity(space: FockSpace) -> Self {
        Self { space, matrix: CMatrix::identity(space.dim) }
    }

    /// `â`, with `⟨n-1|â|n⟩ = sqrt(n)`.
    pub fn annihilation(space: FockSpace) -> Self {
        let matrix = CMatrix::from_fn(space.dim, |m, n| {
            if m + 1 == n {
                Complex64::new(libm::sqrt(n as f64), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self { space, matrix }
    }

    /// `â†`
    pub fn creation(space: FockSpace) -> Self {
        Self::annihilation(space).adjoint()
    }

    /// `n̂`
    pub fn number(space: FockSpace) -> Self {
        let diag: Vec<Complex64> =
            (0..space.dim).map(|n| Complex64::new(n as f64, 0.0)).collect();
        Self { space, matrix: CMatrix::from_diagonal(&diag) }
    }

    /// `(-1)^n̂`
    pub fn parity(space: FockSpace) -> Self {
        let diag: Vec<Complex64> = (0..space.dim)
            .map(|n| Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
            .collect();
        Self { space, matrix: CMatrix::from_diagonal(&diag) }
    }

    /// `D(δ) = exp(iδ(â + â†))` for real `δ`.
    pub fn displacement(space: FockSpace, delta: f64) -> Result<Self> {
        let generator = CMatrix::from_fn(space.dim, |m, n| {
            if m + 1 == n {
                Complex64::new(0.0, delta * libm::sqrt(n as f64))
            } else if n + 1 == m {
                Complex64::new(0.0, delta * libm::sqrt(m as f64))
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(Self { space, matrix: generator.expm()? })
    }

    /// `S(r) = exp((r/2)(â†² - â²))`, so that `S†(r) â S(r) = â cosh r + â† sinh r`.
    pub fn squeeze(space: FockSpace, r: f64) -> Result<Self> {
        let generator = CMatrix::from_fn(space.dim, |m, n| {
            if m == n + 2 {
                Complex64::new(0.5 * r * libm::sqrt(((n + 1) * (n + 2)) as f64), 0.0)
            } else if n == m + 2 {
                Complex64::new(-0.5 * r * libm::sqrt(((m + 1) * (m + 2)) as f64), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(Self { space, matrix: generator.expm()? })
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { space: self.space, matrix: self.matrix.adjoint() }
    }

    /// `self · other`
    pub fn compose(&self, other: &LinearOperator) -> Result<Self> {
        self.space.ensure_same(&other.space)?;
        Ok(Self { space: self.space, matrix: self.matrix.matmul(&other.matrix) })
    }

    /// `⟨m|A|n⟩`
    pub fn element(&self, m: usize, n: usize) -> Complex64 {
        self.matrix[(m, n)]
    }

    /// Matrix-vector product. With [`Normalization::Preserve`] a norm change
    /// beyond [`NORM_TOL`] is an error; otherwise the result is rescaled and
    /// the change is reported in [`Applied::norm_change`].
    pub fn apply(&self, state: &PureState, normalization: Normalization) -> Result<Applied> {
        self.space.ensure_same(&state.space)?;
        let mut amplitudes = self.matrix.mul_vec(&state.amplitudes);
        let norm = vec_norm(&amplitudes);
        let norm_change = norm - 1.0;
        match normalization {
            Normalization::Preserve if norm_change.abs() > NORM_TOL => {
                return Err(Error::NormNotPreserved { norm });
            }
            Normalization::Preserve => {}
            Normalization::Renormalize => {
                if !(norm > 0.0) {
                    return Err(Error::NormNotPreserved { norm });
                }
                amplitudes.iter_mut().for_each(|a| *a /= norm);
            }
        }
        let mut out = PureState { space: self.space, amplitudes, leakage: 0.0 };
        out.leakage = state.leakage + out.edge_mass(DIM_MARGIN.min(self.space.dim / 4));
        Ok(Applied { state: out, norm_change })
    }

    /// `U ρ U†`. The result must still be a unit-trace Hermitian operator.
    pub fn conjugate(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.space.ensure_same(&rho.space)?;
        let m = self.matrix.matmul(&rho.matrix).matmul(&self.matrix.adjoint());
        DensityOperator::from_channel_output(self.space, m)
    }

    /// `‖A†A - I‖_max` restricted to the lowest `block` levels.
    pub fn unitarity_defect(&self, block: usize) -> f64 {
        let block = block.min(self.space.dim);
        let product = self.matrix.adjoint().matmul(&self.matrix).leading_block(block);
        product.sub(&CMatrix::identity(block)).max_abs()
    }
}

/// Unit-trace positive Hermitian matrix over the truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    space: FockSpace,
    matrix: CMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(space: FockSpace, matrix: CMatrix) -> Result<Self> {
        let rho = Self::from_channel_output(space, matrix)?;
        let min_eig = rho.min_eigenvalue();
        if min_eig < -EIGENVALUE_TOL {
            return Err(Error::NotADensityOperator {
                reason: "negative eigenvalue",
                deviation: -min_eig,
            });
        }
        Ok(rho)
    }

    /// For outputs of completely positive maps: checks shape, Hermiticity
    /// and trace, then drops the anti-Hermitian rounding residue.
    pub(crate) fn from_channel_output(space: FockSpace, matrix: CMatrix) -> Result<Self> {
        if matrix.dim() != space.dim {
            return Err(Error::SpaceMismatch { left: space.dim, right: matrix.dim() });
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotADensityOperator { reason: "not Hermitian", deviation: defect });
        }
        let trace = matrix.trace();
        let trace_err = (trace - Complex64::new(1.0, 0.0)).norm();
        if trace_err > TRACE_TOL {
            return Err(Error::NotADensityOperator { reason: "trace differs from 1", deviation: trace_err });
        }
        Ok(Self { space, matrix: matrix.hermitian_part() })
    }

    pub fn from_pure(state: &PureState) -> Self {
        state.to_density()
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn element(&self, m: usize, n: usize) -> Complex64 {
        self.matrix[(m, n)]
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.matrix.hermitian_eigenvalues()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `½ ‖ρ - σ‖₁`
    pub fn trace_distance(&self, other: &DensityOperator) -> Result<f64> {
        self.space.ensure_same(&other.space)?;
        let diff = self.matrix.sub(&other.matrix);
        Ok(0.5 * diff.hermitian_eigenvalues().iter().map(|x| x.abs()).sum::<f64>())
    }

    /// `⟨ψ|ρ|ψ⟩`
    pub fn fidelity_with_pure(&self, state: &PureState) -> Result<f64> {
        self.space.ensure_same(&state.space)?;
        Ok(inner(&state.amplitudes, &self.matrix.mul_vec(&state.amplitudes)).re)
    }

    /// `Tr(ρ A)`
    pub fn expectation(&self, op: &LinearOperator) -> Result<Complex64> {
        self.space.ensure_same(&op.space)?;
        Ok(self.matrix.matmul(&op.matrix).trace())
    }
}

impl PhotonStatistics for DensityOperator {
    fn photon_distribution(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{E, SQRT_2};

    fn space(dim: usize) -> FockSpace {
        FockSpace::with_dim(dim).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn space_validation() {
        assert!(FockSpace::new(1, 1e-12).is_err());
        assert!(FockSpace::new(2, 0.0).is_err());
        assert!(FockSpace::new(2, 1e-12).is_ok());
    }

    #[test]
    fn annihilation_dim_two() {
        let a = LinearOperator::annihilation(space(2));
        assert_eq!(a.element(0, 1), c(1.0, 0.0));
        assert_eq!(a.element(0, 0), c(0.0, 0.0));
        assert_eq!(a.element(1, 0), c(0.0, 0.0));
        assert_eq!(a.element(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn annihilation_entry_sqrt_two() {
        let a = LinearOperator::annihilation(space(3));
        assert_eq!(a.element(1, 2).re, SQRT_2);
    }

    #[test]
    fn number_operator_from_ladder() {
        let s = space(8);
        let a = LinearOperator::annihilation(s);
        let n_op = a.adjoint().compose(&a).unwrap();
        for n in 0..8 {
            let e_n = PureState::fock(s, n).unwrap();
            let out = n_op.matrix().mul_vec(e_n.amplitudes());
            for (m, z) in out.iter().enumerate() {
                let expected = if m == n { n as f64 } else { 0.0 };
                assert!((z - c(expected, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn displacement_zero_is_identity() {
        let d = LinearOperator::displacement(space(10), 0.0).unwrap();
        assert_eq!(d.matrix(), &CMatrix::identity(10));
    }

    #[test]
    fn displacement_vacuum_and_single_photon_elements() {
        let d = LinearOperator::displacement(space(32), 1.0).unwrap();
        assert!((d.element(0, 0) - c(libm::exp(-0.5), 0.0)).norm() < 1e-9);
        assert!(d.element(1, 1).norm() < 1e-9);
    }

    #[test]
    fn squeeze_zero_is_identity() {
        let s = LinearOperator::squeeze(space(12), 0.0).unwrap();
        assert_eq!(s.matrix(), &CMatrix::identity(12));
    }

    #[test]
    fn fock_state_validation() {
        let s = space(4);
        assert_eq!(PureState::fock(s, 4), Err(Error::LevelOutOfRange { level: 4, dim: 4 }));
        let one = PureState::fock(s, 1).unwrap();
        assert_eq!(one.amplitudes()[1], c(1.0, 0.0));
        assert_eq!(one.photon_distribution(), vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn fock_three_point_mass() {
        let p = PureState::fock(space(6), 3).unwrap().photon_distribution();
        assert_eq!(p, vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn coherent_zero_is_vacuum() {
        let s = space(6);
        assert_eq!(PureState::coherent(s, c(0.0, 0.0)).unwrap(), PureState::vacuum(s));
    }

    #[test]
    fn coherent_rejects_too_small_space() {
        let err = PureState::coherent(space(8), c(3.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Leakage { .. }));
    }

    #[test]
    fn coherent_mean_and_poisson_statistics() {
        let s = FockSpace::recommended(2.0, 0.0, 1e-12).unwrap();
        let st = PureState::coherent(s, c(2.0, 0.0)).unwrap();
        assert!((st.mean_photon_number() - 4.0).abs() < 1e-9);
        assert!(st.leakage() < 1e-12);

        let st1 = PureState::coherent(s, c(1.0, 0.0)).unwrap();
        let mut fact = 1.0;
        for (n, p) in st1.photon_distribution().iter().enumerate() {
            if n > 0 {
                fact *= n as f64;
            }
            assert!((p - libm::exp(-1.0) / fact).abs() < 1e-10);
        }
    }

    #[test]
    fn coherent_overlap_closed_form() {
        let (a, b) = (c(1.2, 0.0), c(-0.7, 0.0));
        let s = FockSpace::recommended(1.2, 0.7, 1e-14).unwrap();
        let ov = PureState::coherent(s, a)
            .unwrap()
            .overlap(&PureState::coherent(s, b).unwrap())
            .unwrap();
        let expected = (-0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + a.conj() * b).exp();
        assert!((ov - expected).norm() < 1e-10);
    }

    #[test]
    fn cat_has_exactly_zero_odd_amplitudes() {
        let s = FockSpace::recommended(2.5, 0.0, 1e-12).unwrap();
        for &alpha in &[0.3, 1.0, 1.5, 2.5] {
            let cat = PureState::cat(s, alpha).unwrap();
            assert!(cat.amplitudes().iter().skip(1).step_by(2).all(|a| *a == c(0.0, 0.0)));
            assert!((cat.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cat_parity_is_one() {
        let s = FockSpace::recommended(2.0, 0.0, 1e-12).unwrap();
        let cat = PureState::cat(s, 2.0).unwrap();
        assert!((cat.parity_expectation() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cat_rejects_leaky_space() {
        assert!(matches!(PureState::cat(space(10), 3.0), Err(Error::Leakage { .. })));
    }

    #[test]
    fn overlap_basics() {
        let s = space(5);
        let zero = PureState::fock(s, 0).unwrap();
        let one = PureState::fock(s, 1).unwrap();
        assert_eq!(zero.overlap(&zero).unwrap(), c(1.0, 0.0));
        assert_eq!(zero.overlap(&one).unwrap(), c(0.0, 0.0));
        let other = PureState::vacuum(space(6));
        assert_eq!(zero.overlap(&other), Err(Error::SpaceMismatch { left: 5, right: 6 }));
    }

    #[test]
    fn displaced_single_photon_distribution() {
        let s = space(40);
        let psi = PureState::fock(s, 1).unwrap().displaced(1.0).unwrap();
        let p = psi.photon_distribution();
        assert!(p[1] < 1e-9);
        assert!((p[0] - 1.0 / E).abs() < 1e-9);
        assert!((p[2] - 0.5 / E).abs() < 1e-9);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn parity_of_vacuum_and_single_photon() {
        let s = space(4);
        assert_eq!(PureState::vacuum(s).parity_expectation(), 1.0);
        assert_eq!(PureState::fock(s, 1).unwrap().parity_expectation(), -1.0);
    }

    #[test]
    fn apply_identity_and_inverse_displacement() {
        let s = FockSpace::recommended(1.0, 0.5, 1e-12).unwrap();
        let psi = PureState::coherent(s, c(0.6, 0.3)).unwrap();
        let same = LinearOperator::identity(s).apply(&psi, Normalization::Preserve).unwrap();
        assert_eq!(same.state.amplitudes(), psi.amplitudes());

        let plus = LinearOperator::displacement(s, 0.5).unwrap();
        let minus = LinearOperator::displacement(s, -0.5).unwrap();
        let back = plus
            .compose(&minus)
            .unwrap()
            .apply(&psi, Normalization::Preserve)
            .unwrap();
        assert!(back.norm_change.abs() < 1e-9);
        for (x, y) in back.state.amplitudes().iter().zip(psi.amplitudes()).take(s.dim() / 2) {
            assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn apply_non_unitary_requires_renormalization() {
        let s = space(6);
        let psi = PureState::fock(s, 2).unwrap();
        let a = LinearOperator::annihilation(s);
        assert!(matches!(
            a.apply(&psi, Normalization::Preserve),
            Err(Error::NormNotPreserved { .. })
        ));
        let out = a.apply(&psi, Normalization::Renormalize).unwrap();
        assert!((out.norm_change - (SQRT_2 - 1.0)).abs() < 1e-15);
        assert_eq!(out.state.amplitudes()[1], c(1.0, 0.0));
    }

    #[test]
    fn conjugate_by_displacement_keeps_trace() {
        let s = space(30);
        let rho = PureState::fock(s, 1).unwrap().to_density();
        let d = LinearOperator::displacement(s, 0.7).unwrap();
        let out = d.conjugate(&rho).unwrap();
        assert!((out.trace() - 1.0).abs() < 1e-12);
        let direct = PureState::fock(s, 1).unwrap().displaced(0.7).unwrap().to_density();
        assert!(out.matrix().sub(direct.matrix()).max_abs() < 1e-13);
    }

    #[test]
    fn density_validation() {
        let s = space(2);
        let bad_trace = CMatrix::from_diagonal(&[c(0.5, 0.0), c(0.4, 0.0)]);
        assert!(DensityOperator::new(s, bad_trace).is_err());
        let negative = CMatrix::from_diagonal(&[c(1.5, 0.0), c(-0.5, 0.0)]);
        assert!(matches!(
            DensityOperator::new(s, negative),
            Err(Error::NotADensityOperator { reason: "negative eigenvalue", .. })
        ));
        let mut non_herm = CMatrix::from_diagonal(&[c(0.5, 0.0), c(0.5, 0.0)]);
        non_herm[(0, 1)] = c(0.1, 0.0);
        assert!(DensityOperator::new(s, non_herm).is_err());
        let mixed = CMatrix::from_diagonal(&[c(0.25, 0.0), c(0.75, 0.0)]);
        let rho = DensityOperator::new(s, mixed).unwrap();
        assert_eq!(rho.photon_distribution(), vec![0.25, 0.75]);
        assert!((rho.parity_expectation() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states() {
        let s = space(3);
        let a = PureState::fock(s, 0).unwrap().to_density();
        let b = PureState::fock(s, 2).unwrap().to_density();
        assert!((a.trace_distance(&b).unwrap() - 1.0).abs() < 1e-14);
        assert!(a.trace_distance(&a).unwrap() < 1e-15);
    }

    #[test]
    fn recommend_dim_small_and_monotone() {
        let d0 = recommend_dim(0.0, 0.0, 1e-12);
        assert!((2..=DIM_MARGIN + 1).contains(&d0));
        let mut last = 0;
        for k in 0..8 {
            let d = recommend_dim(0.5 * k as f64, 1.0, 1e-12);
            assert!(d >= last);
            last = d;
        }
        let mut tol = 1e-16;
        let mut last = usize::MAX;
        while tol < 1e-2 {
            let d = recommend_dim(3.0, 1.0, tol);
            assert!(d <= last);
            last = d;
            tol *= 2.0;
        }
    }
}
