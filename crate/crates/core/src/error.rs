use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid setup: {0}")]
    InvalidSetup(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("density {rho} lies on the boundary of [rho_-, rho_+]; use the K' predicates")]
    BoundaryDensity { rho: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("direction is not in the wave cone (sigma_min = {sigma_min:e})")]
    NotInCone { sigma_min: f64 },
    #[error("degenerate direction: kernel exists but (mu, m) = 0")]
    DegenerateDirection,
    #[error("input state is not in K")]
    NotInK,
    #[error("no admissible segment found within the search budget")]
    SearchBudgetExhausted,
    #[error("flux denominator is nonpositive at rho = {rho}")]
    DenominatorNonpositive { rho: f64 },
    #[error("flux is not uniformly convex: G'' = {value:e} at rho = {rho}")]
    ConvexityViolation { rho: f64, value: f64 },
    #[error("edge condition violated: e~({rho}) = {got}, expected {want}")]
    EdgeConditionViolated { rho: f64, got: f64, want: f64 },
    #[error("density ratio {r} does not exceed the critical ratio {r_star}")]
    RatioBelowThreshold { r: f64, r_star: f64 },
    #[error("perturbation search failed: {0}")]
    SearchFailed(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
