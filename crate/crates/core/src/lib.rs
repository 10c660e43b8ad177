//! Secure computation-efficiency maximization for mobile-edge offloading.
//!
//! A multi-user MEC system shares one uplink and one deadline; an eavesdropper
//! listens on every transmission. Each user splits its task between secure
//! offloading and local computing, and the solver maximizes the weighted sum
//! of per-user computation efficiencies (bits per joule) by alternating a
//! sum-of-ratios multiplier update with a successive-convex-approximation
//! inner loop whose subproblems are solved by a log-barrier interior method.
//!
//! Layering, bottom up:
//! - [`model`]: secrecy rate, local computing, energy accounting, feasibility
//! - [`sca`]: the entropy function and its first-order expansion
//! - [`subproblem`]: assembly and barrier solution of the convex subproblem
//! - [`kkt`]: independent optimality certificates for subproblem solutions
//! - [`fractional`]: multiplier residual system and damped updates
//! - [`driver`]: end-to-end algorithm, baselines, brute-force oracle
//! - [`experiment`]: config ingestion, seeded channels, sweeps, CSV emission

mod barrier;
pub mod driver;
pub mod error;
pub mod experiment;
pub mod fractional;
pub mod kkt;
pub mod model;
pub mod options;
pub mod oracle;
pub mod sca;
pub mod subproblem;

pub use error::{Error, Result};
pub use model::{DecisionPoint, SystemParams, UserParams};
pub use options::{SolveOptions, Tolerances};
