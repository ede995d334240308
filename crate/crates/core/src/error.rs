//! Error types shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building domains, meshing, solving,
/// or running the shape flow.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The polar radius r(θ) is not strictly positive on [0, 2π).
    #[error("boundary radius is not strictly positive (min r = {min_r:.6e})")]
    PositivityViolation { min_r: f64 },

    /// The mapped mesh produced a non-positive Jacobian; the curve is too
    /// distorted for the radial mesher.
    #[error("inverted element {element} (Jacobian {jacobian:.6e} <= 0)")]
    InvertedElement { element: usize, jacobian: f64 },

    /// The Robin system is numerically singular: -β sits within
    /// discretization error of a Steklov eigenvalue.
    #[error("singular system (β ≈ -μ_i, reciprocal condition {rcond:.3e})")]
    SingularSystem { rcond: f64 },

    /// An iterative solver stalled before reaching its tolerance.
    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// The operation needs quadratic elements.
    #[error("operation requires an order-2 mesh")]
    OrderTooLow,

    /// The dense symmetric eigensolver failed to converge.
    #[error("eigenvalue iteration did not converge")]
    EigenNonConvergence,

    /// The computed Steklov window does not cover |β|.
    #[error("Steklov window too small: |β| = {beta_abs:.4} ≥ μ_m = {mu_max:.4}")]
    WindowTooSmall { beta_abs: f64, mu_max: f64 },

    /// A point lies outside the ball of a radial case.
    #[error("point lies outside the ball (|x - z| = {distance:.6} > R = {radius:.6})")]
    OutsideBall { distance: f64, radius: f64 },

    /// β·R hits a Steklov resonance of the ball (β = -k/R).
    #[error("radial case is resonant: β·R = {beta_r:.6} is a negative integer")]
    ResonantRadialCase { beta_r: f64 },

    /// A shape-flow iterate crossed a Steklov resonance for β < 0.
    #[error("admissibility lost at flow iteration {iteration}")]
    AdmissibilityLost { iteration: usize },

    /// Backtracking line search exhausted without an acceptable step.
    #[error("step size control failed at flow iteration {iteration}")]
    StepFailure { iteration: usize },

    /// Invalid input that is not a numerical failure (bad parameters, etc.).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for failures of the numerics (as opposed to invalid input);
    /// the CLI maps these to exit code 2.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidInput(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
