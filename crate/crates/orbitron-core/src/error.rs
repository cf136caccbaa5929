//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// `vee` was handed a matrix whose symmetric part exceeds tolerance.
    #[error("matrix is not antisymmetric (|M + M^T| = {defect:.3e})")]
    NotAntisymmetric { defect: f64 },

    /// Rotation matrix violates orthonormality / determinant invariants.
    #[error("matrix is not a rotation (|A^T A - I| = {ortho_defect:.3e}, det = {det})")]
    NotRotation { ortho_defect: f64, det: f64 },

    /// Field evaluation requested too close to a pole.
    #[error("field evaluated {distance:.3e} m from a pole (guard radius {guard:.3e} m)")]
    PoleSingularity { distance: f64, guard: f64 },

    /// A closed-form velocity formula has no real solution for these signs.
    #[error("sign constraint violated: {context} = {value:.6e} must be negative")]
    SignConstraint { context: &'static str, value: f64 },

    /// ξ₁ = 0 makes a ξ₁-dependent stability bound meaningless.
    #[error("degenerate velocity: xi1 = 0")]
    DegenerateVelocity,

    /// Linearization requested at a point that is not a critical point of h - J^xi.
    #[error("point is not critical for the augmented Hamiltonian (scaled residual {residual:.3e})")]
    NotCritical { residual: f64 },

    /// The stability space and its symplectic complement do not span the tangent space.
    #[error("stability space complement is degenerate (|det omega_W| = {det:.3e})")]
    ComplementDegenerate { det: f64 },

    /// Dense eigensolver did not converge.
    #[error("eigensolver failed to converge within {max_iter} iterations")]
    EigenFailure { max_iter: usize },

    /// A profile-only field was asked for data it cannot provide.
    #[error("field cannot evaluate this request: {0}")]
    FieldUnavailable(String),

    /// CSV is missing columns a plot script needs.
    #[error("csv is missing expected columns: {0}")]
    MissingColumns(String),

    /// Scenario failed validation.
    #[error("invalid scenario: {0}")]
    Validation(String),

    /// Numerical failure while running a scenario task.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
