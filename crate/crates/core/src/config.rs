use serde::{Deserialize, Serialize};

/// Tolerances used by the checks and assertions across the crate.
///
/// The defaults are the values the acceptance suite pins; callers may
/// tighten or loosen them (the CLI exposes each as a `--tol-*` flag).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Closed-form agreement, duality and maximality slack.
    pub exact: f64,
    /// Agreement between the two independent p-ball recursions.
    pub cross_path: f64,
    /// Isotropic identity residual, relative to φ; also the inequality slack.
    pub identity: f64,
    /// Relative finite-difference residual for the harness identities.
    pub finite_difference: f64,
    /// Absolute tolerance for profile quadrature.
    pub quadrature: f64,
    /// Rounding level under which a strict-monotonicity step counts as a tie.
    pub strict_rounding: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            exact: 1e-12,
            cross_path: 1e-10,
            identity: 1e-10,
            finite_difference: 1e-5,
            quadrature: 1e-11,
            strict_rounding: 1e-12,
        }
    }
}
