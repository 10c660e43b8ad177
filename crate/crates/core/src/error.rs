//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input that must be finite and in range was not.
    #[error("domain error in {context}: {message}")]
    Domain {
        context: &'static str,
        message: String,
    },

    /// Linearization requested at a time allocation at or below the floor.
    #[error("cannot expand around t = {t:.3e} s for user {user}: offload time must exceed {floor:.1e} s")]
    ExpansionFloor { user: usize, t: f64, floor: f64 },

    /// Phase-I could not find a strictly feasible point for the subproblem.
    #[error("subproblem infeasible: most violated row is {row} (violation {violation:.3e})")]
    SubproblemInfeasible { row: String, violation: f64 },

    /// The barrier solver ran out of iterations before reaching its target
    /// accuracy; carries the best iterate so callers can resume from it.
    #[error("subproblem did not converge within {iterations} iterations (kkt residual {kkt_residual:.3e})")]
    NoConvergence {
        iterations: usize,
        kkt_residual: f64,
        best: Box<crate::subproblem::SubproblemSolution>,
    },

    /// Backtracking in the multiplier update exhausted every candidate step.
    #[error(
        "multiplier update stalled: residual norm {norm_old:.6e} -> best candidate {norm_new:.6e}"
    )]
    Stalled { norm_old: f64, norm_new: f64 },

    /// No allocation can compute the required bits within the deadline and energy budget.
    #[error("instance infeasible for user {user}: requires {required:.3e} bits but at most {achievable:.3e} are reachable with full time and energy budget")]
    InfeasibleInstance {
        user: usize,
        required: f64,
        achievable: f64,
    },

    /// A user with zero total energy entered a computation that divides by it.
    #[error("degenerate user {user}: zero energy consumption (exclude idle users first)")]
    DegenerateUser { user: usize },

    /// Energy is zero while computed bits are positive; the model cannot produce this.
    #[error("internal inconsistency for user {user}: {bits:.3e} bits computed with zero energy")]
    Inconsistent { user: usize, bits: f64 },

    /// Configuration file rejected.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(context: &'static str, message: impl Into<String>) -> Self {
        Error::Domain {
            context,
            message: message.into(),
        }
    }
}
