//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by construction, evaluation, and minimization routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Q-tensor components do not lie on the uniaxial manifold
    /// (q11² + q12² must equal 1/8).
    #[error(
        "components ({q11}, {q12}) are off the uniaxial manifold: \
         |q11^2 + q12^2 - 1/8| = {defect:.3e} exceeds tolerance {tol:.1e}"
    )]
    OffManifold {
        q11: f64,
        q12: f64,
        defect: f64,
        tol: f64,
    },

    /// A parameter violated its admissible range.
    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// A radial profile failed a structural invariant.
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    /// Bisector directions are undefined when the two tensors coincide.
    #[error("bisectors are undefined for coinciding Q-tensors (every direction satisfies the jump condition)")]
    DegenerateJump,

    /// Directional limits were requested implicitly by evaluating on the jump curve.
    #[error("point at r = {r:.17e}, theta = {theta:.17e} lies on the jump curve; request directional limits instead")]
    PointOnJumpCurve { r: f64, theta: f64 },

    /// The line search could not produce an acceptable step even after the
    /// steepest-descent fallback.
    #[error("line search failed at iteration {iteration} (gradient inf-norm {grad_norm:.3e}): {message}")]
    LineSearchFailed {
        iteration: usize,
        grad_norm: f64,
        message: String,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}
