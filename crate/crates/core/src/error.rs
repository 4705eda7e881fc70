use thiserror::Error;

/// Errors raised by validation and by the bound/estimator operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M†| entry = {max_dev:.3e} exceeds {tol:.3e}")]
    NotHermitian { max_dev: f64, tol: f64 },

    #[error("matrix is not unitary: max |U†U - I| entry = {max_dev:.3e} exceeds {tol:.3e}")]
    NotUnitary { max_dev: f64, tol: f64 },

    #[error("matrix is not positive semi-definite: min eigenvalue = {min_eig:.3e}")]
    NotPsd { min_eig: f64 },

    #[error("trace is not one: Tr = {trace:.12}")]
    TraceNotOne { trace: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Bloch vector lies outside the unit ball: |r| = {norm:.12}")]
    BlochOutOfBall { norm: f64 },

    #[error("Kraus set is not complete: max |ΣE†E - I| entry = {max_dev:.3e}")]
    IncompleteKraus { max_dev: f64 },

    #[error("Hamiltonian schedule is empty")]
    EmptySchedule,

    #[error("sample times must be strictly increasing")]
    NonMonotonicSchedule,

    #[error("hbar must be positive, got {0}")]
    NonPositiveHbar(f64),

    #[error("mean energy is zero; Margolus-Levitin bound undefined")]
    ZeroMeanEnergy,

    #[error("energy distribution is degenerate (E_DE = {e_de:.3e}); improved Chau bound undefined")]
    DegenerateSpectrum { e_de: f64 },

    #[error("closed-form denominator is degenerate ({0:.3e})")]
    DegenerateDenominator(f64),

    #[error("fringe fit needs at least 4 settings spanning >= pi, got {settings} spanning {span:.3}")]
    InsufficientSettings { settings: usize, span: f64 },

    #[error("fringe design matrix is rank deficient; cannot fit")]
    DegenerateFit,

    #[error("ancilla index {index} out of range for dimension {dim}")]
    AncillaOutOfRange { index: usize, dim: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable name of the violated axiom or failure kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotUnitary { .. } => "NotUnitary",
            Error::NotPsd { .. } => "NotPSD",
            Error::TraceNotOne { .. } => "TraceNotOne",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::BlochOutOfBall { .. } => "BlochOutOfBall",
            Error::IncompleteKraus { .. } => "IncompleteKraus",
            Error::EmptySchedule => "EmptySchedule",
            Error::NonMonotonicSchedule => "NonMonotonicSchedule",
            Error::NonPositiveHbar(_) => "NonPositiveHbar",
            Error::ZeroMeanEnergy => "ZeroMeanEnergy",
            Error::DegenerateSpectrum { .. } => "DegenerateSpectrum",
            Error::DegenerateDenominator(_) => "DegenerateDenominator",
            Error::InsufficientSettings { .. } => "InsufficientSettings",
            Error::DegenerateFit => "DegenerateFit",
            Error::AncillaOutOfRange { .. } => "AncillaOutOfRange",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
