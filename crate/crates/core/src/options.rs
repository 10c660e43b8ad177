//! Solver configuration. Every tolerance and switch the pipeline uses lives
//! here so runs are reproducible from a single value.

/// Outer/inner loop stopping rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Multiplier-residual norm tolerance, relative to the residual scale.
    pub residual_tol: f64,
    /// Inner-loop relative objective-change tolerance.
    pub inner_tol: f64,
    pub max_outer: usize,
    pub max_inner: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual_tol: 1e-6,
            inner_tol: 1e-7,
            max_outer: 50,
            max_inner: 50,
        }
    }
}

/// Backtracking rule for the damped multiplier update: try steps
/// `1, shrink, shrink^2, ...` and accept the first one whose re-evaluated
/// residual norm drops by at least the `sufficient_decrease` fraction of the step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BacktrackParams {
    pub sufficient_decrease: f64,
    pub shrink: f64,
    pub max_halvings: usize,
}

impl Default for BacktrackParams {
    fn default() -> Self {
        BacktrackParams {
            sufficient_decrease: 1e-4,
            shrink: 0.5,
            max_halvings: 8,
        }
    }
}

/// Interior-point settings for one subproblem solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubproblemTols {
    /// KKT stationarity target, relative to the objective magnitude.
    pub tol_kkt: f64,
    /// Feasibility target on equilibrated constraint rows.
    pub tol_feas: f64,
    /// Cap on total Newton iterations across the barrier path.
    pub max_iter: usize,
}

impl Default for SubproblemTols {
    fn default() -> Self {
        SubproblemTols {
            tol_kkt: 1e-8,
            tol_feas: 1e-9,
            max_iter: 200,
        }
    }
}

/// All knobs for one end-to-end solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub tolerances: Tolerances,
    pub backtrack: BacktrackParams,
    pub subproblem: SubproblemTols,
    /// Offload times are kept above this floor; the expansion divides by t.
    /// A user converging onto the floor is effectively local-only.
    pub t_floor: f64,
    /// Report rates in true (base-2) bits instead of nats-based units.
    /// Implemented by scaling the bandwidth by 1/ln 2 throughout the solve.
    pub log2_rates: bool,
    /// Use `lambda*E - 1` for the second residual block instead of the
    /// fixed-point-consistent `lambda*E - w`. Identical when all weights
    /// are 1.
    pub strict_paper_t: bool,
    /// Keep the legitimate entropy term concave in the subproblem and
    /// linearize only the eavesdropper term (the convex-concave split with a
    /// monotone-objective guarantee). Off: both terms are linearized.
    pub cccp_faithful: bool,
    /// Evaluate backtracking candidates at the frozen inner solution instead
    /// of re-solving per candidate. Cheaper, accepts the full step always.
    pub cheap_backtrack: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tolerances: Tolerances::default(),
            backtrack: BacktrackParams::default(),
            subproblem: SubproblemTols::default(),
            t_floor: 1e-9,
            log2_rates: false,
            strict_paper_t: false,
            cccp_faithful: false,
            cheap_backtrack: false,
        }
    }
}
