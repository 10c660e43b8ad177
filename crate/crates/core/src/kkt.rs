//! Independent optimality certificate for subproblem solutions.
//!
//! Rather than trusting the barrier solver's internal state, this check works
//! from the returned primal point alone: it identifies the active constraints
//! there, fits nonnegative multipliers by least squares, and reports the
//! stationarity, primal-feasibility, and complementary-slackness residuals of
//! the reconstructed KKT system. If the primal point is wrong, no multiplier
//! choice can make the stationarity residual small.

use crate::barrier;
use crate::model::DecisionPoint;
use crate::subproblem::SubproblemSpec;

/// Residuals of the reconstructed KKT system, all scale-normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    /// `|grad_obj + sum nu_i grad_g_i|_inf / (1 + |grad_obj|_inf)`.
    pub stationarity: f64,
    /// Worst positive equilibrated constraint value.
    pub primal: f64,
    /// `max_i |nu_i * g_i| / (1 + max_i nu_i)`.
    pub complementarity: f64,
    /// Fitted multiplier per constraint row (zero for inactive rows).
    pub multipliers: Vec<f64>,
    /// Names of the rows that carry a positive multiplier.
    pub active_rows: Vec<String>,
}

/// Activity threshold on equilibrated rows.
const ACTIVE_TOL: f64 = 1e-5;

/// Reconstructs KKT multipliers at `point` and reports the residuals.
/// Residuals are data: the caller decides what to accept.
pub fn verify_kkt(spec: &SubproblemSpec, point: &DecisionPoint) -> KktReport {
    let snap = barrier::snapshot(spec, point);
    let (nu, stationarity_abs) =
        barrier::fit_multipliers(&snap.grads, &snap.values, &snap.obj_grad, ACTIVE_TOL);

    let obj_scale = 1.0 + snap.obj_grad.amax();
    let stationarity = stationarity_abs / obj_scale;
    let primal = snap.values.iter().fold(0.0_f64, |acc, &v| acc.max(v));
    let nu_scale = 1.0 + nu.iter().fold(0.0_f64, |acc, &v| acc.max(v));
    let complementarity = nu
        .iter()
        .zip(snap.values.iter())
        .map(|(&multiplier, &g)| (multiplier * g).abs())
        .fold(0.0_f64, f64::max)
        / nu_scale;

    let active_rows = nu
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(i, _)| snap.kinds[i].name())
        .collect();

    KktReport {
        stationarity,
        primal,
        complementarity,
        multipliers: nu,
        active_rows,
    }
}
