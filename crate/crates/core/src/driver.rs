//! End-to-end solver: feasible initialization, the inner expansion loop, the
//! outer multiplier loop, and the baseline schemes.
//!
//! Users whose task is empty or whose eavesdropper channel dominates the
//! uplink are pinned to a closed-form local-only allocation up front and
//! excluded from the optimization and the residual system; everyone else is
//! solved jointly and the pinned allocations are merged back into the report.

use crate::error::{Error, Result};
use crate::fractional::{
    damped_aux_update, residual_vector, user_ratios, AuxMultipliers, Evaluation,
};
use crate::model::{
    ce_objective, check_feasibility, local_bits, secrecy_bits, DecisionPoint, EfficiencyReport,
    SystemParams, UserDecision, Violation,
};
use crate::options::SolveOptions;
use crate::sca::make_linearization;
use crate::subproblem::{assemble_subproblem, solve_subproblem};

pub use crate::options::Tolerances;

/// Why the outer loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ResidualConverged,
    MaxOuterIters,
    Infeasible,
    Stalled,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Termination::ResidualConverged => "ResidualConverged",
            Termination::MaxOuterIters => "MaxOuterIters",
            Termination::Infeasible => "Infeasible",
            Termination::Stalled => "Stalled",
        };
        f.write_str(s)
    }
}

/// One inner-loop iteration: subproblem objective and how far the iterate moved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerRecord {
    pub iteration: usize,
    pub objective: f64,
    pub max_displacement: f64,
}

/// One outer-loop iteration: residual state, multipliers, and the time
/// allocation snapshot (full user indexing, pinned users at zero).
#[derive(Debug, Clone, PartialEq)]
pub struct OuterRecord {
    pub iteration: usize,
    pub residual_norm: f64,
    pub residual_scale: f64,
    pub lambda: Vec<f64>,
    pub beta: Vec<f64>,
    pub objective: f64,
    pub offload_times: Vec<f64>,
    pub cpu_hzs: Vec<f64>,
    pub tx_energies: Vec<f64>,
}

/// Final allocation for one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserAllocation {
    pub offload_time: f64,
    pub cpu_hz: f64,
    pub offload_bits: f64,
    pub tx_energy: f64,
    /// Transmit power `tx_energy/offload_time`, zero when idle.
    pub tx_power: f64,
    pub efficiency: f64,
}

/// Everything a solve produces.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Weighted total efficiency, recomputed from the exact model.
    pub final_ce: f64,
    pub per_user: Vec<UserAllocation>,
    pub point: DecisionPoint,
    pub efficiency: EfficiencyReport,
    pub outer_trace: Vec<OuterRecord>,
    pub inner_traces: Vec<Vec<InnerRecord>>,
    pub termination: Termination,
    pub outer_iterations: usize,
    /// Constraint violations of the final point at 1e-7 relative tolerance
    /// (empty on any healthy run).
    pub violations: Vec<Violation>,
}

/// How each user enters the optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
enum UserRole {
    /// Jointly optimized.
    Active,
    /// Closed-form allocation fixed up front.
    Pinned(UserDecision),
}

/// Splits users into active and pinned sets, verifying pinned feasibility.
fn classify_users(params: &SystemParams) -> Result<Vec<UserRole>> {
    let mut roles = Vec::with_capacity(params.num_users());
    for (k, user) in params.users.iter().enumerate() {
        if user.task_bits <= 0.0 {
            roles.push(UserRole::Pinned(UserDecision::default()));
            continue;
        }
        if !user.can_offload_securely() {
            // Local-only closed form: the smallest frequency that finishes
            // the task is also the most efficient one.
            let f = user.cycles_per_bit * user.task_bits / params.deadline;
            let energy = user.cpu_energy_coeff * f.powi(3) * params.deadline;
            if f > user.max_cpu_hz || energy > user.energy_budget {
                let f_cap = user
                    .max_cpu_hz
                    .min((user.energy_budget / (user.cpu_energy_coeff * params.deadline)).cbrt());
                let achievable = params.deadline * f_cap / user.cycles_per_bit;
                return Err(Error::InfeasibleInstance {
                    user: k,
                    required: user.task_bits,
                    achievable,
                });
            }
            roles.push(UserRole::Pinned(UserDecision {
                cpu_hz: f,
                ..Default::default()
            }));
            continue;
        }
        roles.push(UserRole::Active);
    }
    Ok(roles)
}

fn reduced_params(params: &SystemParams, roles: &[UserRole]) -> SystemParams {
    SystemParams {
        bandwidth: params.bandwidth,
        deadline: params.deadline,
        circuit_power: params.circuit_power,
        users: params
            .users
            .iter()
            .zip(roles)
            .filter(|(_, r)| matches!(r, UserRole::Active))
            .map(|(u, _)| u.clone())
            .collect(),
    }
}

/// Merges a reduced-point solution back to full user indexing.
fn scatter_point(reduced: &DecisionPoint, roles: &[UserRole]) -> DecisionPoint {
    let mut users = Vec::with_capacity(roles.len());
    let mut it = reduced.users.iter();
    for role in roles {
        match role {
            UserRole::Active => users.push(*it.next().expect("reduced point too short")),
            UserRole::Pinned(dec) => users.push(*dec),
        }
    }
    DecisionPoint { users }
}

/// Total bits a user can reach at offload time `t` with everything else
/// pushed to its limit, maximized over the CPU frequency on a grid.
fn max_bits_at_time(
    user: &crate::model::UserParams,
    params: &SystemParams,
    t: f64,
    steps: usize,
) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..=steps {
        let f = user.max_cpu_hz * i as f64 / steps as f64;
        let local_energy = user.cpu_energy_coeff * f.powi(3) * params.deadline;
        let budget = user.energy_budget - local_energy - params.circuit_power * t;
        if budget < 0.0 {
            continue;
        }
        let secure = if t > 0.0 && user.can_offload_securely() {
            secrecy_bits(t, budget, user, params.bandwidth).unwrap_or(0.0)
        } else {
            0.0
        };
        let local = local_bits(f, params.deadline, user.cycles_per_bit).unwrap_or(0.0);
        best = best.max(secure + local);
    }
    best
}

/// Certificate bound: the most bits the user can reach with the full deadline
/// to itself (grid maximum, so a slight underestimate of the true optimum).
pub fn max_achievable_bits(user: &crate::model::UserParams, params: &SystemParams) -> f64 {
    let steps = 160;
    let mut best: f64 = 0.0;
    for i in 0..=steps {
        let t = params.deadline * i as f64 / steps as f64;
        best = best.max(max_bits_at_time(user, params, t, steps));
    }
    best
}

/// Builds a feasible starting allocation and the matching multipliers.
///
/// Start from an even time split at 90% of the deadline, local frequency
/// sized to the task, and half the remaining energy budget on transmission;
/// users short on bits first raise frequency, then transmission energy, then
/// claim the reserve time slack. Fails with a certificate when a task cannot
/// be reached even with the full deadline and budget.
pub fn initialize(
    params: &SystemParams,
    options: &SolveOptions,
) -> Result<(DecisionPoint, AuxMultipliers)> {
    let num = params.num_users();
    let slack_share = 0.9;
    let mut users = Vec::with_capacity(num);
    let mut shortfall = Vec::new();
    for (k, user) in params.users.iter().enumerate() {
        let t = (slack_share * params.deadline / num as f64).max(options.t_floor * 2.0);
        let dec = initial_user_decision(user, params, t, options)?;
        let bits = decision_bits(&dec, user, params)?;
        if bits + 1e-9 < user.task_bits {
            shortfall.push(k);
        }
        users.push(dec);
    }
    if !shortfall.is_empty() {
        // Hand the reserve slack to users that are still short.
        let reserve = (1.0 - slack_share) * params.deadline * 0.95;
        let extra = reserve / shortfall.len() as f64;
        for &k in &shortfall {
            let user = &params.users[k];
            let t = users[k].offload_time + extra;
            users[k] = initial_user_decision(user, params, t, options)?;
            let bits = decision_bits(&users[k], user, params)?;
            if bits + 1e-9 < user.task_bits {
                let achievable = max_achievable_bits(user, params);
                return Err(Error::InfeasibleInstance {
                    user: k,
                    required: user.task_bits,
                    achievable,
                });
            }
        }
    }
    let point = DecisionPoint { users };
    let ratios = user_ratios(&point, params)?;
    let aux = AuxMultipliers::fixed_point(&ratios)?;
    Ok((point, aux))
}

/// Bits computed by one user's decision under the exact model.
fn decision_bits(
    dec: &UserDecision,
    user: &crate::model::UserParams,
    params: &SystemParams,
) -> Result<f64> {
    Ok(
        secrecy_bits(dec.offload_time, dec.tx_energy, user, params.bandwidth)?
            + local_bits(dec.cpu_hz, params.deadline, user.cycles_per_bit)?,
    )
}

fn initial_user_decision(
    user: &crate::model::UserParams,
    params: &SystemParams,
    t: f64,
    options: &SolveOptions,
) -> Result<UserDecision> {
    let t = t.max(options.t_floor * 2.0);
    let energy_cap = |f: f64| {
        user.energy_budget
            - user.cpu_energy_coeff * f.powi(3) * params.deadline
            - params.circuit_power * t
    };

    // Frequency sized to the task, capped so local energy leaves the circuit
    // power affordable.
    let f_task = (user.cycles_per_bit * user.task_bits / params.deadline).min(user.max_cpu_hz);
    let f_energy_cap = ((user.energy_budget * 0.98 - params.circuit_power * t).max(0.0)
        / (user.cpu_energy_coeff * params.deadline))
        .cbrt();
    let mut f = f_task.min(f_energy_cap);
    let mut tx = 0.5 * energy_cap(f).max(0.0);

    let bits = |f: f64, tx: f64| -> Result<f64> {
        Ok(secrecy_bits(t, tx, user, params.bandwidth)?
            + local_bits(f, params.deadline, user.cycles_per_bit)?)
    };
    if bits(f, tx)? < user.task_bits {
        // Raise frequency toward its caps, then transmission energy toward
        // the remaining budget (bits are monotone in it when H > G).
        f = user.max_cpu_hz.min(f_energy_cap);
        let budget = energy_cap(f).max(0.0);
        if bits(f, budget)? >= user.task_bits {
            // Bisect for a little headroom above the requirement.
            let target = user.task_bits * 1.02;
            let (mut lo, mut hi) = (0.0, budget);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if bits(f, mid)? >= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            tx = hi;
        } else {
            tx = budget;
        }
    }
    Ok(UserDecision {
        offload_time: t,
        cpu_hz: f,
        offload_bits: (user.task_bits - local_bits(f, params.deadline, user.cycles_per_bit)?)
            .clamp(0.0, user.task_bits),
        tx_energy: tx,
        legit_aux: user.uplink_gain * tx,
        eve_aux: user.eavesdropper_gain * tx,
    })
}

/// Runs the expansion loop at fixed multipliers until the subproblem
/// objective and the iterate stop moving.
pub fn inner_sca(
    params: &SystemParams,
    aux: &AuxMultipliers,
    start: &DecisionPoint,
    options: &SolveOptions,
) -> Result<(DecisionPoint, Vec<InnerRecord>)> {
    inner_sca_tol(
        params,
        aux,
        start,
        options,
        options.tolerances.inner_tol.sqrt(),
    )
}

fn inner_sca_tol(
    params: &SystemParams,
    aux: &AuxMultipliers,
    start: &DecisionPoint,
    options: &SolveOptions,
    disp_tol: f64,
) -> Result<(DecisionPoint, Vec<InnerRecord>)> {
    let tols = &options.tolerances;
    // The fully linearized model is not a majorizer, so the raw expansion map
    // can two-cycle; relaxing the iterate and shrinking the step box per
    // iteration restores contraction without moving the fixed points. The
    // concave-legit mode majorizes on its own and runs undamped.
    let mut relaxation = if options.cccp_faithful { 1.0 } else { 0.5 };
    let radius_decay = if options.cccp_faithful { 1.0 } else { 0.85 };
    let mut radius_scale = 1.0;
    let mut prev_displacement = f64::INFINITY;

    let mut point = start.clone();
    let mut last_feasible = start.clone();
    let mut last_argmax: Option<DecisionPoint> = None;
    let mut prev_objective: Option<f64> = None;
    let mut trace = Vec::new();
    let mut recentered = false;
    let mut j = 0;
    while j < tols.max_inner {
        for dec in &mut point.users {
            dec.offload_time = dec.offload_time.max(options.t_floor * (1.0 + 1e-9));
        }
        let lin = make_linearization(&point, options.t_floor)?;
        let mut spec = assemble_subproblem(params, aux, &lin, options)?;
        if !options.cccp_faithful {
            spec.step_bounds = Some(step_bounds(params, &lin, radius_scale, options.t_floor));
        }
        if std::env::var("CEMAX_DEBUG").is_ok() {
            for (k, (e, dec)) in lin.users.iter().zip(&point.users).enumerate() {
                eprintln!("[inner j={j}] user{k}: t0={:.4e} N0={:.4e} tau0={:.4e} f={:.4e} tx={:.4e} | vmth={:.4e} dN={:.4e} dtau={:.4e} lam={:.4e} beta={:.4e}",
                    e.t, e.legit_aux, e.eve_aux, dec.cpu_hz, dec.tx_energy,
                    e.legit_dt - e.eve_dt, e.legit_dx, e.eve_dx, aux.lambda[k], aux.beta[k]);
            }
        }
        let sol = match solve_with_continuation(&spec, options, &point) {
            Ok(sol) => sol,
            Err(Error::SubproblemInfeasible { .. }) if !recentered => {
                // The affine bits model can cut the current iterate off; one
                // re-expansion at the last truly feasible iterate is allowed.
                recentered = true;
                point = last_feasible.clone();
                j += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let relaxed = relax_point(&point, &sol.point, relaxation, params);
        let displacement = max_displacement(&point, &relaxed, params.deadline);
        trace.push(InnerRecord {
            iteration: j,
            objective: sol.objective,
            max_displacement: displacement,
        });
        if !options.cccp_faithful && displacement > 0.7 * prev_displacement {
            // The relaxed map is still cycling; damp harder.
            relaxation = (0.5 * relaxation).max(0.1);
        }
        prev_displacement = displacement;

        let obj_settled = prev_objective
            .map(|p| (sol.objective - p).abs() <= tols.inner_tol * (1.0 + sol.objective.abs()))
            .unwrap_or(false);
        let settled = displacement <= disp_tol && (obj_settled || j == 0);
        last_argmax = Some(sol.point);
        if settled {
            break;
        }
        point = relaxed;
        if truly_feasible(&point, params) {
            last_feasible = point.clone();
        }
        prev_objective = Some(sol.objective);
        // The floor keeps the step box wide enough that its two walls stay
        // numerically distinguishable to the crossover refinement.
        radius_scale = (radius_scale * radius_decay).max(5e-4);
        j += 1;
    }
    let mut result = last_argmax.unwrap_or(point);
    if !options.cccp_faithful {
        // The step-bounded argmax can sit on a trust-region wall, which makes
        // it first-order sensitive to where the loop happened to stop. A few
        // majorizing passes (legitimate entropy kept concave) settle onto a
        // true stationary point of the fixed-multiplier problem, which also
        // restores exact feasibility of the bits requirement.
        // The polish runs to a much tighter displacement than the main loop:
        // when the shared-time row binds, the residual entries are first-order
        // sensitive to how the deadline is split between users, so the split
        // must be pinned well below the outer residual tolerance.
        let polish = SolveOptions {
            cccp_faithful: true,
            tolerances: crate::options::Tolerances {
                max_inner: 40,
                ..options.tolerances
            },
            ..options.clone()
        };
        let polish_disp = 10.0 * options.tolerances.inner_tol;
        let (polished, polish_trace) = inner_sca_tol(params, aux, &result, &polish, polish_disp)?;
        let offset = trace.len();
        trace.extend(polish_trace.into_iter().map(|r| InnerRecord {
            iteration: offset + r.iteration,
            ..r
        }));
        result = polished;
    }
    // The returned point is always a subproblem argmax; the relaxed blend is
    // only an expansion device.
    Ok((result, trace))
}

/// One subproblem solve with warm continuation: a barrier path that runs out
/// of budget mid-trek resumes from its best iterate a bounded number of
/// times before the failure is surfaced.
fn solve_with_continuation(
    spec: &crate::subproblem::SubproblemSpec,
    options: &SolveOptions,
    warm: &DecisionPoint,
) -> Result<crate::subproblem::SubproblemSolution> {
    let mut start = warm.clone();
    let mut last_err = None;
    for _ in 0..4 {
        match solve_subproblem(spec, &options.subproblem, Some(&start)) {
            Ok(sol) => return Ok(sol),
            Err(Error::NoConvergence {
                best,
                iterations,
                kkt_residual,
            }) => {
                start = best.point.clone();
                last_err = Some(Error::NoConvergence {
                    best,
                    iterations,
                    kkt_residual,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("loop ran at least once"))
}

/// Blend toward the subproblem argmax; the offloaded-bits split is recovered
/// from the blended frequency.
fn relax_point(
    from: &DecisionPoint,
    to: &DecisionPoint,
    eta: f64,
    params: &SystemParams,
) -> DecisionPoint {
    if eta >= 1.0 {
        return to.clone();
    }
    let users = from
        .users
        .iter()
        .zip(&to.users)
        .zip(&params.users)
        .map(|((a, b), user)| {
            let cpu_hz = a.cpu_hz + eta * (b.cpu_hz - a.cpu_hz);
            let local = params.deadline * cpu_hz / user.cycles_per_bit;
            UserDecision {
                offload_time: a.offload_time + eta * (b.offload_time - a.offload_time),
                cpu_hz,
                offload_bits: (user.task_bits - local).clamp(0.0, user.task_bits),
                tx_energy: a.tx_energy + eta * (b.tx_energy - a.tx_energy),
                legit_aux: a.legit_aux + eta * (b.legit_aux - a.legit_aux),
                eve_aux: a.eve_aux + eta * (b.eve_aux - a.eve_aux),
            }
        })
        .collect();
    DecisionPoint { users }
}

/// Per-iteration step box around the expansion point for the fully
/// linearized mode. The affine bits model is only trustworthy near its
/// center, so each inner iteration moves a bounded distance; downward moves
/// are damped multiplicatively so no coordinate collapses to zero in one
/// hop. The small width floors keep both walls numerically distinguishable
/// for the solver's crossover refinement even after heavy shrinking.
fn step_bounds(
    params: &SystemParams,
    lin: &crate::sca::Linearization,
    scale: f64,
    t_floor: f64,
) -> Vec<crate::subproblem::StepBounds> {
    let deadline = params.deadline;
    params
        .users
        .iter()
        .zip(&lin.users)
        .map(|(user, exp)| {
            let legit_scale = user.uplink_gain * user.energy_budget;
            let w_t_lo = (scale * (0.5 * exp.t).min(0.25 * deadline)).max(1e-5 * deadline);
            let w_t_hi = (scale * 0.25 * deadline).max(1e-5 * deadline);
            let w_n_lo = (scale * 0.6 * exp.legit_aux).max(1e-5 * legit_scale);
            let w_n_hi =
                (scale * (0.8 * exp.legit_aux + 0.15 * legit_scale)).max(1e-5 * legit_scale);
            crate::subproblem::StepBounds {
                t_lo: (exp.t - w_t_lo).max(t_floor),
                t_hi: (exp.t + w_t_hi).min(deadline),
                legit_lo: (exp.legit_aux - w_n_lo).max(0.0),
                legit_hi: exp.legit_aux + w_n_hi,
            }
        })
        .collect()
}

fn max_displacement(before: &DecisionPoint, after: &DecisionPoint, deadline: f64) -> f64 {
    before
        .users
        .iter()
        .zip(&after.users)
        .map(|(a, b)| {
            let dt = (a.offload_time - b.offload_time).abs() / deadline;
            let dn = (a.legit_aux - b.legit_aux).abs() / (1.0 + a.legit_aux.abs());
            let dtau = (a.eve_aux - b.eve_aux).abs() / (1.0 + a.eve_aux.abs());
            dt.max(dn).max(dtau)
        })
        .fold(0.0, f64::max)
}

fn truly_feasible(point: &DecisionPoint, params: &SystemParams) -> bool {
    point.users.iter().zip(&params.users).all(|(dec, user)| {
        let bits = secrecy_bits(dec.offload_time, dec.tx_energy, user, params.bandwidth)
            .unwrap_or(0.0)
            + local_bits(dec.cpu_hz, params.deadline, user.cycles_per_bit).unwrap_or(0.0);
        bits + 1e-9 >= user.task_bits
    })
}

/// Full solve: alternates the inner expansion loop with damped multiplier
/// updates until the residual system is below tolerance.
pub fn run_solver(params: &SystemParams, options: &SolveOptions) -> Result<SolveReport> {
    params.validate()?;
    let effective = if options.log2_rates {
        params.with_bandwidth_scale(1.0 / std::f64::consts::LN_2)
    } else {
        params.clone()
    };
    let roles = classify_users(&effective)?;
    let active = reduced_params(&effective, &roles);

    let mut outer_trace = Vec::new();
    let mut inner_traces = Vec::new();

    if active.users.is_empty() {
        let point = scatter_point(&DecisionPoint::default(), &roles);
        return finish_report(
            point,
            &effective,
            outer_trace,
            inner_traces,
            Termination::ResidualConverged,
        );
    }

    let (start, mut aux) = initialize(&active, options)?;
    let (mut point, first_trace) = inner_sca(&active, &aux, &start, options)?;
    let mut ratios = user_ratios(&point, &active)?;
    let mut residual = residual_vector(&point, &aux, &active, options.strict_paper_t)?;
    let mut objective = first_trace.last().map(|r| r.objective).unwrap_or(0.0);
    record_outer(
        &mut outer_trace,
        0,
        &residual,
        &aux,
        objective,
        &point,
        &roles,
    );
    inner_traces.push(first_trace);

    let mut termination = Termination::MaxOuterIters;
    for iter in 1..=options.tolerances.max_outer {
        if residual.norm <= options.tolerances.residual_tol * residual.scale {
            termination = Termination::ResidualConverged;
            break;
        }
        let update = if options.cheap_backtrack {
            let frozen = ratios.clone();
            damped_aux_update(
                &aux,
                &ratios,
                &options.backtrack,
                options.strict_paper_t,
                |_| {
                    Ok(Evaluation {
                        ratios: frozen.clone(),
                        carry: None,
                    })
                },
            )
        } else {
            let base = point.clone();
            damped_aux_update(
                &aux,
                &ratios,
                &options.backtrack,
                options.strict_paper_t,
                |cand| {
                    let (solved, trace) = inner_sca(&active, cand, &base, options)?;
                    let ratios = user_ratios(&solved, &active)?;
                    Ok(Evaluation {
                        ratios,
                        carry: Some((solved, trace)),
                    })
                },
            )
        };
        let update = match update {
            Ok(u) => u,
            Err(Error::Stalled { .. }) => {
                termination = Termination::Stalled;
                break;
            }
            Err(e) => return Err(e),
        };
        aux = update.aux;
        match update.evaluation.carry {
            Some((solved, trace)) => {
                point = solved;
                ratios = update.evaluation.ratios;
                residual = update.residual;
                objective = trace.last().map(|r| r.objective).unwrap_or(objective);
                inner_traces.push(trace);
            }
            None => {
                // Cheap backtracking judged the step on frozen ratios; the
                // inner problem is re-solved once at the accepted multipliers.
                let (solved, trace) = inner_sca(&active, &aux, &point, options)?;
                point = solved;
                ratios = user_ratios(&point, &active)?;
                residual = residual_vector(&point, &aux, &active, options.strict_paper_t)?;
                objective = trace.last().map(|r| r.objective).unwrap_or(objective);
                inner_traces.push(trace);
            }
        }
        record_outer(
            &mut outer_trace,
            iter,
            &residual,
            &aux,
            objective,
            &point,
            &roles,
        );
        if residual.norm <= options.tolerances.residual_tol * residual.scale {
            termination = Termination::ResidualConverged;
            break;
        }
    }

    let full_point = scatter_point(&point, &roles);
    finish_report(
        full_point,
        &effective,
        outer_trace,
        inner_traces,
        termination,
    )
}

fn record_outer(
    trace: &mut Vec<OuterRecord>,
    iteration: usize,
    residual: &crate::fractional::ResidualVector,
    aux: &AuxMultipliers,
    objective: f64,
    point: &DecisionPoint,
    roles: &[UserRole],
) {
    let full = scatter_point(point, roles);
    trace.push(OuterRecord {
        iteration,
        residual_norm: residual.norm,
        residual_scale: residual.scale,
        lambda: aux.lambda.clone(),
        beta: aux.beta.clone(),
        objective,
        offload_times: full.users.iter().map(|u| u.offload_time).collect(),
        cpu_hzs: full.users.iter().map(|u| u.cpu_hz).collect(),
        tx_energies: full.users.iter().map(|u| u.tx_energy).collect(),
    });
}

fn finish_report(
    point: DecisionPoint,
    params: &SystemParams,
    outer_trace: Vec<OuterRecord>,
    inner_traces: Vec<Vec<InnerRecord>>,
    termination: Termination,
) -> Result<SolveReport> {
    let efficiency = ce_objective(&point, params)?;
    let violations = check_feasibility(&point, params, 1e-7)?;
    let per_user = point
        .users
        .iter()
        .zip(&efficiency.per_user)
        .map(|(dec, eff)| UserAllocation {
            offload_time: dec.offload_time,
            cpu_hz: dec.cpu_hz,
            offload_bits: dec.offload_bits,
            tx_energy: dec.tx_energy,
            tx_power: dec.tx_power(),
            efficiency: eff.efficiency,
        })
        .collect();
    let outer_iterations = outer_trace.last().map(|r| r.iteration).unwrap_or(0);
    Ok(SolveReport {
        final_ce: efficiency.total,
        per_user,
        point,
        efficiency,
        outer_trace,
        inner_traces,
        termination,
        outer_iterations,
        violations,
    })
}

/// Per-user outcome of a baseline scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineUser {
    pub feasible: bool,
    pub efficiency: f64,
    pub cpu_hz: f64,
}

/// Local-only baseline: each user computes everything at the exact frequency
/// that finishes its task.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOnlyReport {
    pub per_user: Vec<BaselineUser>,
    /// Weighted total; `None` when any user is infeasible.
    pub total: Option<f64>,
}

pub fn baseline_local_only(params: &SystemParams) -> Result<LocalOnlyReport> {
    params.validate()?;
    let mut per_user = Vec::with_capacity(params.num_users());
    let mut total = 0.0;
    let mut all_feasible = true;
    for user in &params.users {
        if user.task_bits <= 0.0 {
            per_user.push(BaselineUser {
                feasible: true,
                efficiency: 0.0,
                cpu_hz: 0.0,
            });
            continue;
        }
        let f = user.cycles_per_bit * user.task_bits / params.deadline;
        let energy = user.cpu_energy_coeff * f.powi(3) * params.deadline;
        if f > user.max_cpu_hz || energy > user.energy_budget {
            per_user.push(BaselineUser {
                feasible: false,
                efficiency: 0.0,
                cpu_hz: f,
            });
            all_feasible = false;
            continue;
        }
        let ce = user.task_bits / energy;
        total += user.weight * ce;
        per_user.push(BaselineUser {
            feasible: true,
            efficiency: ce,
            cpu_hz: f,
        });
    }
    Ok(LocalOnlyReport {
        per_user,
        total: all_feasible.then_some(total),
    })
}

/// Offload-only baseline: the joint machinery with local computing disabled
/// (frequency capped at a vanishing 1 Hz, so every task bit must cross the
/// secure uplink).
pub fn baseline_offload_only(params: &SystemParams, options: &SolveOptions) -> Result<SolveReport> {
    params.validate()?;
    let mut capped = params.clone();
    for user in &mut capped.users {
        user.max_cpu_hz = 1.0;
    }
    run_solver(&capped, options)
}
