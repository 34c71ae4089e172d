use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the library.
///
/// Variants are grouped into classes by [`Error::class`]; the CLI maps each
/// class to a stable exit code.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("evaluation point {z} lies within {distance:e} of the pole of the factor with zero {zero}")]
    Domain {
        z: Complex64,
        zero: Complex64,
        distance: f64,
    },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("B is a power of z: psi_B'' vanishes identically, census undefined")]
    Monomial,

    #[error("census zeros {first} and {second} are closer than {min_separation:e}; increase the sampling density")]
    Resolution {
        first: f64,
        second: f64,
        min_separation: f64,
    },

    #[error("grid size {requested} exceeds the cap {cap} (achieved defect {defect:e})")]
    Resource { requested: usize, cap: usize, defect: f64 },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("insufficient data: need at least {needed} points, have {available}")]
    InsufficientData { needed: usize, available: usize },

    #[error("no epsilon in the grid leaves every shrunk interval nonempty")]
    BoundUnavailable,

    #[error("fit failed: best sup error {best_error:e} at degree {degree}, tolerance {tol:e}")]
    FitFailure { best_error: f64, degree: usize, tol: f64 },

    #[error("power index search exhausted n_cap = {n_cap}: majorant {last_majorant:e} still exceeds {bound:e}")]
    SearchFailure {
        n_cap: usize,
        bound: f64,
        last_majorant: f64,
        trace: Vec<(usize, f64)>,
    },

    #[error("certificate invalid: {0}")]
    CertificateInvalid(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("step `{step}` failed: {source}")]
    Step {
        step: &'static str,
        #[source]
        source: Box<Error>,
    },
}

/// Coarse error classes, stable across releases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Resource,
    Validation,
    CertificateInvalid,
    SearchOrFit,
    Internal,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Resource { .. } => ErrorClass::Resource,
            Error::Domain { .. }
            | Error::Validation(_)
            | Error::Monomial
            | Error::Resolution { .. }
            | Error::Configuration(_)
            | Error::InsufficientData { .. }
            | Error::BoundUnavailable => ErrorClass::Validation,
            Error::CertificateInvalid(_) => ErrorClass::CertificateInvalid,
            Error::FitFailure { .. } | Error::SearchFailure { .. } => ErrorClass::SearchOrFit,
            Error::Internal(_) => ErrorClass::Internal,
            Error::Step { source, .. } => source.class(),
        }
    }

    /// Innermost error, skipping pipeline step wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { source, .. } => source.root(),
            e => e,
        }
    }

    pub(crate) fn at_step(self, step: &'static str) -> Error {
        Error::Step {
            step,
            source: Box::new(self),
        }
    }
}

impl ErrorClass {
    /// Process exit code used by the command line tool.
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Resource | ErrorClass::Internal => 1,
            ErrorClass::Validation => 2,
            ErrorClass::CertificateInvalid => 3,
            ErrorClass::SearchOrFit => 4,
        }
    }
}
