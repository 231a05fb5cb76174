use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

/// Broad failure classes, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Input data violates a structural invariant.
    Validation,
    /// Input is valid but outside the numerical domain of an algorithm.
    NumericDomain,
    /// An iterative search did not meet its stopping criterion.
    NoConvergence,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(
        "NotPure: J*J + 1 has relative residual {residual:.3e}; only pure states are supported"
    )]
    NotPure { residual: f64 },

    #[error("SingularInput: {0} is not invertible")]
    SingularInput(&'static str),

    #[error("InvalidCovariance: {0}")]
    InvalidCovariance(String),

    #[error("InvalidSymplecticForm: {0}")]
    InvalidSymplecticForm(String),

    #[error("KindMismatch: operands mix bosonic and fermionic data")]
    KindMismatch,

    #[error("GroupViolation: group-membership residual {residual:.3e} exceeds tolerance")]
    GroupViolation { residual: f64 },

    #[error("NotInAlgebra: algebra-membership residual {residual:.3e} exceeds tolerance")]
    NotInAlgebra { residual: f64 },

    #[error("DimensionMismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("LengthMismatch: expected {expected} weights, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("FermionDisplacement: fermionic states and transformations carry no displacement")]
    FermionDisplacement,

    #[error("NonFinite: input contains NaN or infinite entries")]
    NonFinite,

    #[error("BranchCut: eigenvalue {re} + {im}i lies too close to the negative real axis")]
    BranchCut { re: f64, im: f64 },

    #[error("Singular: matrix has an eigenvalue at or near zero")]
    Singular,

    #[error("ResidualTooLarge: matrix-function residual {residual:.3e} exceeds tolerance")]
    ResidualTooLarge { residual: f64 },

    #[error(
        "DisplacementPresent: target has nonzero displacement; use the coherent-state routines"
    )]
    DisplacementPresent,

    #[error("NonFiniteFactor: conformal factor is not finite at r = {r}")]
    NonFiniteFactor { r: f64 },

    #[error("PotentialTooLarge: |A|_g = {norm} > 1 at sample {index}")]
    PotentialTooLarge { norm: f64, index: usize },

    #[error("ChartBoundary: trajectory reached r = 0 with angular velocity at s = {at_length}")]
    ChartBoundary { at_length: f64 },

    #[error("StepTooCoarse: speed drift {drift:.3e} exceeds tolerance")]
    StepTooCoarse { drift: f64 },

    #[error("NoConvergence: best length {best_length} with constraint residual {residual:.3e}")]
    NoConvergence { best_length: f64, residual: f64 },

    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable short name, e.g. `"NotPure"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotPure { .. } => "NotPure",
            Error::SingularInput(_) => "SingularInput",
            Error::InvalidCovariance(_) => "InvalidCovariance",
            Error::InvalidSymplecticForm(_) => "InvalidSymplecticForm",
            Error::KindMismatch => "KindMismatch",
            Error::GroupViolation { .. } => "GroupViolation",
            Error::NotInAlgebra { .. } => "NotInAlgebra",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::FermionDisplacement => "FermionDisplacement",
            Error::NonFinite => "NonFinite",
            Error::BranchCut { .. } => "BranchCut",
            Error::Singular => "Singular",
            Error::ResidualTooLarge { .. } => "ResidualTooLarge",
            Error::DisplacementPresent => "DisplacementPresent",
            Error::NonFiniteFactor { .. } => "NonFiniteFactor",
            Error::PotentialTooLarge { .. } => "PotentialTooLarge",
            Error::ChartBoundary { .. } => "ChartBoundary",
            Error::StepTooCoarse { .. } => "StepTooCoarse",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::BranchCut { .. }
            | Error::Singular
            | Error::ResidualTooLarge { .. }
            | Error::NonFiniteFactor { .. }
            | Error::PotentialTooLarge { .. }
            | Error::ChartBoundary { .. }
            | Error::StepTooCoarse { .. } => ErrorClass::NumericDomain,
            Error::NoConvergence { .. } => ErrorClass::NoConvergence,
            _ => ErrorClass::Validation,
        }
    }
}
