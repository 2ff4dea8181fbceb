use thiserror::Error;

/// Errors raised by the simulator. Numeric payloads are reported as `f64`
/// regardless of the scalar type the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Fock cutoff {n_max} too small for |alpha| = {alpha_abs} (needs n_max >= {required})")]
    CutoffTooSmall {
        alpha_abs: f64,
        n_max: usize,
        required: usize,
    },
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: Vec<usize>,
        found: Vec<usize>,
    },
    #[error("state is not normalized (norm or weight sum {norm})")]
    NotNormalized { norm: f64 },
    #[error("operator is not hermitian (max defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("operator is not unitary (max defect {defect:e})")]
    NotUnitary { defect: f64 },
    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("basis is not orthonormal (max Gram defect {defect:e})")]
    BasisNotOrthonormal { defect: f64 },
    #[error(
        "pointer packets {first} and {second} interfere (overlap {overlap:.6}, separation {separation:.6}, width {width})"
    )]
    PacketsInterfere {
        first: usize,
        second: usize,
        overlap: f64,
        separation: f64,
        width: f64,
    },
    #[error("visibility never reaches {threshold} (minimum {min_visibility:.6})")]
    Unreachable { min_visibility: f64, threshold: f64 },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
