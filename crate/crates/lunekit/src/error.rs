use thiserror::Error;

/// Errors for geometric preconditions and numeric solver failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("curvature mismatch: {0} vs {1}")]
    CurvatureMismatch(f64, f64),
    #[error("curvature must be a finite real, got {0}")]
    InvalidCurvature(f64),
    #[error("points are antipodal on the sphere (distance within 1e-9 of pi/sqrt(kappa))")]
    AntipodalPoints,
    #[error("coincident points where distinct points are required")]
    CoincidentPoints,
    #[error("tangent vector is not unit / not tangent at its base point")]
    NotNormalized,
    #[error("parameter {name} = {value} outside valid range [{min}, {max}]")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("lambda must be positive, got {0}")]
    InvalidLambda(f64),
    #[error("boundary length {length} outside the lune domain [0, {upper}]")]
    LengthOutOfDomain { length: f64, upper: f64 },
    #[error("point does not satisfy the model-surface constraint (residual {0:.3e})")]
    OffSurface(f64),
    #[error("polyline has repeated consecutive points at index {0}")]
    RepeatedPoint(usize),
    #[error("polyline needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("domain boundary is not strictly convex (turn {turn:.3e} at vertex {vertex})")]
    NotConvex { vertex: usize, turn: f64 },
    #[error("root not bracketed: {0}")]
    RootNotBracketed(&'static str),
    #[error("solver did not converge: {0}")]
    NonConvergence(&'static str),
    #[error("domain generation failed: {0}")]
    GenerationFailed(&'static str),
    #[error("degenerate direction")]
    DegenerateDirection,
    #[error("projection {projection} is not valid for kappa = {kappa}")]
    ProjectionMismatch { projection: String, kappa: f64 },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
