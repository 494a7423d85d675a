use alloc::string::String;

/// Everything that can go wrong inside the core crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    VariableCountMismatch { left: usize, right: usize },

    /// The divisor does not divide the dividend in the polynomial sense.
    /// Along a mutation run this means the Laurent phenomenon failed, which
    /// points at a bug or an unsupported quiver.
    #[error("division is not exact")]
    NonExactDivision,

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("input quiver has a self-loop at vertex {vertex}")]
    SelfLoopInInput { vertex: usize },

    #[error("vertex {vertex} is frozen and cannot be mutated")]
    FrozenVertexMutation { vertex: usize },

    #[error("vertex index {index} out of range (vertex count {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("mutation produced {count} arrow(s) between frozen vertices {from} and {to}")]
    FrozenToFrozenArrow { from: usize, to: usize, count: u64 },

    #[error("matrix is not unimodular (determinant {det})")]
    NotUnimodular { det: String },

    #[error("matrix shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("trace too short: {needed} comparable steps needed, {available} available")]
    InsufficientTrace { needed: usize, available: usize },

    #[error("invalid pyramid size {0}")]
    InvalidSize(usize),

    #[error("shape too large for exhaustive enumeration (more than {limit} configurations)")]
    ShapeTooLarge { limit: u64 },

    #[error("step {step}: label invariant violated: {detail}")]
    InvariantViolation { step: usize, detail: String },

    #[error("requested {requested} steps, cap is {cap}")]
    StepCapExceeded { requested: usize, cap: usize },

    #[error("degree window cannot be computed: {0}")]
    WindowUnsupported(String),

    #[error("arrow count from {from} to {to} overflows")]
    ArrowOverflow { from: usize, to: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = core::result::Result<T, Error>;
