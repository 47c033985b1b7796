use alloc::boxed::Box;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Fock space with `dim < 2` or a non-positive tail tolerance.
    InvalidSpace { dim: usize, tail_tol: f64 },
    /// Fock level outside `0..dim`.
    LevelOutOfRange { level: usize, dim: usize },
    /// Probability mass above the truncation exceeds the space's tolerance.
    Leakage { leakage: f64, tail_tol: f64 },
    /// Operands live in Fock spaces of different dimension.
    SpaceMismatch { left: usize, right: usize },
    /// Taylor series of the scaled exponential did not converge.
    ExpmNoConvergence { terms: usize },
    /// A non-unitary application changed the norm and renormalization was not requested.
    NormNotPreserved { norm: f64 },
    /// Matrix does not satisfy the density operator invariants.
    NotADensityOperator { reason: &'static str, deviation: f64 },
    /// Quantum efficiency outside `(0, 1]`.
    InvalidEfficiency(f64),
    /// Helstrom discriminant `1 - 4 p0 p_delta |<a|b>|^2` is negative.
    InconsistentOverlap { discriminant: f64 },
    /// A scalar argument is outside its domain.
    InvalidArgument { name: &'static str, value: f64 },
    /// Scenario parameters are inconsistent with the state family.
    InvalidParams(&'static str),
    /// No closed form exists for this scenario (lossy Fock states with n != 1).
    AnalyticUnavailable { n: u32, eta: f64 },
    /// Bracketing scan did not find a sign change.
    NoBracket,
    /// A sweep point failed.
    AtPoint { index: usize, source: Box<Error> },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSpace { dim, tail_tol } => {
                write!(f, "invalid Fock space: dim={dim} (need >= 2), tail_tol={tail_tol:e} (need > 0)")
            }
            Error::LevelOutOfRange { level, dim } => {
                write!(f, "Fock level {level} out of range for dim {dim}")
            }
            Error::Leakage { leakage, tail_tol } => write!(
                f,
                "truncation leakage {leakage:e} exceeds tail tolerance {tail_tol:e}; increase dim"
            ),
            Error::SpaceMismatch { left, right } => {
                write!(f, "Fock space mismatch: dim {left} vs dim {right}")
            }
            Error::ExpmNoConvergence { terms } => {
                write!(f, "matrix exponential did not converge after {terms} Taylor terms")
            }
            Error::NormNotPreserved { norm } => {
                write!(f, "operator changed the state norm to {norm} (renormalization not requested)")
            }
            Error::NotADensityOperator { reason, deviation } => {
                write!(f, "not a density operator: {reason} (deviation {deviation:e})")
            }
            Error::InvalidEfficiency(eta) => {
                write!(f, "quantum efficiency must lie in (0, 1], got {eta}")
            }
            Error::InconsistentOverlap { discriminant } => write!(
                f,
                "inconsistent Helstrom inputs: discriminant {discriminant:e} is negative"
            ),
            Error::InvalidArgument { name, value } => write!(f, "invalid {name}: {value}"),
            Error::InvalidParams(msg) => write!(f, "invalid protocol parameters: {msg}"),
            Error::AnalyticUnavailable { n, eta } => write!(
                f,
                "no closed form for lossy Fock input n={n} at eta={eta}; enable the numeric oracle"
            ),
            Error::NoBracket => write!(f, "no sign change found while bracketing a root"),
            Error::AtPoint { index, source } => write!(f, "sweep point {index}: {source}"),
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::AtPoint { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}
