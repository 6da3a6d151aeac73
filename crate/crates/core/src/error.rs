use thiserror::Error;

/// Errors raised anywhere in the propagation stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DimerError {
    /// A driven scenario was requested for a sector whose transverse coupling vanishes.
    #[error("degenerate coupling: |Γ| = 0 freezes the engineered drive ({0})")]
    DegenerateCoupling(&'static str),

    #[error("cotangent singularity in the engineered field at t = {t}")]
    CotangentSingularity { t: f64 },

    #[error("quadrature failed to reach tolerance {tol:e} on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64, tol: f64 },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("sector propagators evaluated at different times ({plus} vs {minus})")]
    TimeMismatch { plus: f64, minus: f64 },

    #[error("invalid equal-omega schedule: the parity-minus engineered classes require ω₁(t) ≠ ω₂(t)")]
    InvalidEqualOmega,

    #[error("schedule infeasible: {0}")]
    Infeasible(String),

    #[error("g-factor must be non-zero")]
    ZeroGFactor,

    #[error("integrator exceeded the step limit of {max_steps} before t = {t_end}")]
    StepLimitExceeded { max_steps: usize, t_end: f64 },

    #[error("integrator step size underflowed at t = {t}")]
    ToleranceUnreachable { t: f64 },

    #[error("state has weight {weight:e} in the {sector} parity sector, which this schedule does not solve")]
    UnsolvedSector { sector: &'static str, weight: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, DimerError>;
