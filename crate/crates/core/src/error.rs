use thiserror::Error;

/// Errors raised while constructing or checking the pointwise geometry.
#[derive(Debug, Error)]
pub enum Error {
    #[error("operator is not symmetric: residual {residual:.3e} exceeds bound {bound:.3e}")]
    NotSymmetric { residual: f64, bound: f64 },
    #[error("operators do not commute: residual {residual:.3e} exceeds bound {bound:.3e}")]
    NotCommuting { residual: f64, bound: f64 },
    #[error("basis is not orthonormal: Gram residual {residual:.3e}")]
    NotOrthonormal { residual: f64 },
    #[error("symmetric eigendecomposition failed to converge")]
    EigenFailed,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("tolerances must be strictly positive and finite")]
    InvalidTolerance,
    #[error("m must be at least 3, got {m}")]
    InvalidM { m: usize },
    #[error("matrix is not a rotation: residual {residual:.3e}")]
    NotRotation { residual: f64 },
    #[error("normal vector must be unit length, got norm {norm}")]
    NotUnit { norm: f64 },
    #[error("spectrum leaks outside {{+1, -1}}: eigenvalue {value}")]
    SpectrumLeak { value: f64 },
    #[error("tube radius {r} lies outside the admissible open interval")]
    RadiusOutOfRange { r: f64 },
    #[error("degenerate eigenspace structure: {detail}")]
    DegenerateEigenspace { detail: String },
    #[error("hypothesis violated: {detail}")]
    HypothesisViolated { detail: String },
    #[error("unsupported coordinate convention: {found}")]
    BadConvention { found: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
