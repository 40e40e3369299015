use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid size {0} is not a power of two >= 16")]
    BadSize(usize),
    #[error("grid size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("poisson extension requires y < 0, got {0}")]
    NonNegativeHeight(f64),
}

/// Guard failures raised while evaluating the evolved system.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("degenerate Jacobian: min |Z_a'| = {min:.3e} below {threshold:.1e}")]
    Jacobian { min: f64, threshold: f64 },
    #[error("A1 violation: min A1 = {min:.17e} below 1 - 10*tol")]
    A1Violation { min: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("marker ordering violated at index {0}")]
    MarkerCollision(usize),
    #[error("time step must be positive, got {0}")]
    BadStep(f64),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("under-resolved: top-band spectral fraction {fraction:.3} of {what}")]
    UnderResolved { what: &'static str, fraction: f64 },
    #[error("holomorphicity residual {residual:.3e} exceeds {tol:.1e}")]
    Holomorphicity { residual: f64, tol: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InteriorError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("trace of {what} is not holomorphic: residual {residual:.3e} > {tol:.1e}")]
    Holomorphicity {
        what: &'static str,
        residual: f64,
        tol: f64,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}
