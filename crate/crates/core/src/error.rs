use thiserror::Error;

/// Every failure the engine can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("parse error at byte {offset}: expected one of [{}], found {found}", expected.join(", "))]
    Parse {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("non-finite value while evaluating `{0}`")]
    EvalSingularity(String),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operation needs a homogeneous argument: {0}")]
    NonHomogeneous(String),
    #[error("parity violation: {0}")]
    ParityViolation(String),
    #[error("metric is not symmetric at entry ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("metric is singular or not positive definite at {0:?}")]
    SingularMetric(Vec<f64>),
    #[error("frame is singular at {0:?}")]
    SingularFrame(Vec<f64>),
    #[error("expression grew to {size} nodes (cap {cap})")]
    ExpressionBlowup { size: usize, cap: usize },
    #[error("frame is not orthonormal (residual {0:e})")]
    FrameNotOrthonormal(f64),
    #[error("derivation is not in the requested distribution (residual {0:e})")]
    NotInDistribution(f64),
    #[error("distribution is not integrable (residual {0:e})")]
    NotIntegrable(f64),
    #[error("structure coefficients are not constant")]
    NonConstantStructure,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
}

impl GeomError {
    /// Short machine-readable tag used in reports.
    pub fn tag(&self) -> &'static str {
        match self {
            GeomError::Parse { .. } => "ParseError",
            GeomError::UnknownIdentifier(_) => "UnknownIdentifier",
            GeomError::EvalSingularity(_) => "EvalSingularity",
            GeomError::DimensionMismatch { .. } => "DimensionMismatch",
            GeomError::NonHomogeneous(_) => "NonHomogeneous",
            GeomError::ParityViolation(_) => "ParityViolation",
            GeomError::NotSymmetric(..) => "NotSymmetric",
            GeomError::SingularMetric(_) => "SingularMetric",
            GeomError::SingularFrame(_) => "SingularFrame",
            GeomError::ExpressionBlowup { .. } => "ExpressionBlowup",
            GeomError::FrameNotOrthonormal(_) => "FrameNotOrthonormal",
            GeomError::NotInDistribution(_) => "NotInDistribution",
            GeomError::NotIntegrable(_) => "NotIntegrable",
            GeomError::NonConstantStructure => "NonConstantStructure",
            GeomError::PreconditionViolated(_) => "PreconditionViolated",
            GeomError::IndexOutOfRange { .. } => "IndexOutOfRange",
        }
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;
