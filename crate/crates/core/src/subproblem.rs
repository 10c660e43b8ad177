//! Assembly and solution of the convexified per-iteration subproblem: for
//! fixed multipliers and a fixed expansion point, maximize the weighted
//! linear(ized) bit reward minus the energy penalty over the convex feasible
//! set. Solved with a log-barrier interior method (see `barrier`); optimality
//! is certified independently by `kkt::verify_kkt`.

use crate::barrier;
use crate::error::{Error, Result};
use crate::fractional::AuxMultipliers;
use crate::model::{DecisionPoint, SystemParams};
use crate::options::{SolveOptions, SubproblemTols};
use crate::sca::{entropy, Linearization, UserExpansion};

/// Objective pieces for one user, all in physical units. The objective is
/// `sum_k linear(x_k) - cubic_coeff*f^3 + entropy_weight*entropy(N, t) + constant`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserObjective {
    pub t_coeff: f64,
    pub f_coeff: f64,
    /// Coefficient on the legitimate auxiliary variable N.
    pub legit_coeff: f64,
    /// Coefficient on the eavesdropper auxiliary variable tau (nonpositive).
    pub eve_coeff: f64,
    /// Coefficient on the transmission energy (nonpositive).
    pub tx_coeff: f64,
    /// Coefficient on `f^3`, entering negatively (nonnegative).
    pub cubic_coeff: f64,
    /// Weight on the concave `entropy(N, t)` term; zero when both entropy
    /// terms are linearized.
    pub entropy_weight: f64,
    pub constant: f64,
}

/// Everything one user contributes to the subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct UserSpec {
    pub objective: UserObjective,
    pub expansion: UserExpansion,
    /// Constant inside the bits row: `B*(affine model) + T*f/C >= task_bits`.
    pub bits_const: f64,
    pub task_bits: f64,
    pub cycles_per_bit: f64,
    pub cpu_energy_coeff: f64,
    pub max_cpu_hz: f64,
    pub energy_budget: f64,
    pub uplink_gain: f64,
    pub eavesdropper_gain: f64,
    pub weight: f64,
    pub lambda: f64,
    pub beta: f64,
}

/// Per-user step limits around the expansion point, active in the fully
/// linearized mode. The affine bits model is only trustworthy near its
/// expansion point; without curvature to anchor the iterate, the subproblem
/// would chase phantom rewards to a far vertex. Bounding the move per inner
/// iteration leaves the fixed points of the expansion loop unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBounds {
    pub t_lo: f64,
    pub t_hi: f64,
    pub legit_lo: f64,
    pub legit_hi: f64,
}

/// One assembled instance of the convex subproblem. Immutable; a solver run
/// owns its own workspace, so distinct solves may share a spec freely.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemSpec {
    pub bandwidth: f64,
    pub deadline: f64,
    pub circuit_power: f64,
    pub t_floor: f64,
    /// Keep the legitimate entropy term concave instead of linearized.
    pub concave_legit: bool,
    /// Present exactly when both entropy terms are linearized.
    pub step_bounds: Option<Vec<StepBounds>>,
    pub users: Vec<UserSpec>,
}

impl SubproblemSpec {
    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    /// Objective value (maximization sense) at a physical decision point.
    pub fn objective_value(&self, point: &DecisionPoint) -> f64 {
        let mut total = 0.0;
        for (user, dec) in self.users.iter().zip(&point.users) {
            let o = &user.objective;
            total += o.t_coeff * dec.offload_time
                + o.f_coeff * dec.cpu_hz
                + o.legit_coeff * dec.legit_aux
                + o.eve_coeff * dec.eve_aux
                + o.tx_coeff * dec.tx_energy
                - o.cubic_coeff * dec.cpu_hz.powi(3)
                + o.constant;
            if o.entropy_weight != 0.0 {
                total += o.entropy_weight * entropy(dec.legit_aux, dec.offload_time).unwrap_or(0.0);
            }
        }
        total
    }

    /// Magnitude scale of the objective at `point`: the bit-reward and
    /// energy-penalty parts summed in absolute value. Near the multiplier
    /// fixed point the two parts cancel in the objective value itself, so
    /// tolerances scale against this instead.
    pub fn objective_magnitude(&self, point: &DecisionPoint) -> f64 {
        let mut total = 0.0;
        for (k, (user, dec)) in self.users.iter().zip(&point.users).enumerate() {
            let reward = user.lambda
                * user.weight
                * (self.bits_row_value(k, dec) - user.task_bits)
                    .abs()
                    .max(self.bits_row_value(k, dec).abs());
            let energy = user.lambda
                * user.beta
                * (user.cpu_energy_coeff * dec.cpu_hz.powi(3) * self.deadline
                    + dec.tx_energy
                    + self.circuit_power * dec.offload_time);
            total += reward.abs() + energy.abs();
        }
        total
    }

    /// Left-hand side of the total-bits row for one user (must be >= task_bits).
    pub fn bits_row_value(&self, k: usize, dec: &crate::model::UserDecision) -> f64 {
        let user = &self.users[k];
        let exp = &user.expansion;
        let local = self.deadline * dec.cpu_hz / user.cycles_per_bit;
        if self.concave_legit {
            let ent = entropy(dec.legit_aux.max(0.0), dec.offload_time.max(0.0)).unwrap_or(0.0);
            self.bandwidth
                * (ent - exp.eve_dt * dec.offload_time - exp.eve_dx * dec.eve_aux + user.bits_const)
                + local
        } else {
            self.bandwidth
                * ((exp.legit_dt - exp.eve_dt) * dec.offload_time + exp.legit_dx * dec.legit_aux
                    - exp.eve_dx * dec.eve_aux
                    + user.bits_const)
                + local
        }
    }
}

/// Builds the subproblem for the given multipliers and expansion state.
///
/// Coefficients per user (fully linearized mode):
/// t: `lambda*w*B*(v - theta) - lambda*beta*p_r`, N: `lambda*w*B*dN`,
/// tau: `-lambda*w*B*dtau`, f: `lambda*w*T/C`, tx: `-lambda*beta`,
/// cubic: `lambda*beta*eps*T`.
pub fn assemble_subproblem(
    params: &SystemParams,
    aux: &AuxMultipliers,
    lin: &Linearization,
    options: &SolveOptions,
) -> Result<SubproblemSpec> {
    if aux.lambda.len() != params.num_users() || lin.users.len() != params.num_users() {
        return Err(Error::domain(
            "assemble_subproblem",
            "multiplier/expansion length mismatch",
        ));
    }
    let b = params.bandwidth;
    let deadline = params.deadline;
    let mut users = Vec::with_capacity(params.num_users());
    for (k, user) in params.users.iter().enumerate() {
        let lambda = aux.lambda[k];
        let beta = aux.beta[k];
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::domain(
                "assemble_subproblem",
                format!("lambda[{k}] = {lambda} must be > 0"),
            ));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::domain(
                "assemble_subproblem",
                format!("beta[{k}] = {beta} must be finite and >= 0"),
            ));
        }
        let exp = lin.users[k];
        let lw = lambda * user.weight;
        let (objective, bits_const) = if options.cccp_faithful {
            // entropy(N, t) stays; only the eavesdropper term is affine.
            let eve_at_exp = entropy(exp.eve_aux, exp.t)?;
            let const_part = -eve_at_exp + exp.eve_dt * exp.t + exp.eve_dx * exp.eve_aux;
            (
                UserObjective {
                    t_coeff: -lw * b * exp.eve_dt - lambda * beta * params.circuit_power,
                    f_coeff: lw * deadline / user.cycles_per_bit,
                    legit_coeff: 0.0,
                    eve_coeff: -lw * b * exp.eve_dx,
                    tx_coeff: -lambda * beta,
                    cubic_coeff: lambda * beta * user.cpu_energy_coeff * deadline,
                    entropy_weight: lw * b,
                    constant: lw * b * const_part,
                },
                const_part,
            )
        } else {
            let aff = exp.affine_constant();
            (
                UserObjective {
                    t_coeff: lw * b * (exp.legit_dt - exp.eve_dt)
                        - lambda * beta * params.circuit_power,
                    f_coeff: lw * deadline / user.cycles_per_bit,
                    legit_coeff: lw * b * exp.legit_dx,
                    eve_coeff: -lw * b * exp.eve_dx,
                    tx_coeff: -lambda * beta,
                    cubic_coeff: lambda * beta * user.cpu_energy_coeff * deadline,
                    entropy_weight: 0.0,
                    constant: lw * b * aff,
                },
                aff,
            )
        };
        users.push(UserSpec {
            objective,
            expansion: exp,
            bits_const,
            task_bits: user.task_bits,
            cycles_per_bit: user.cycles_per_bit,
            cpu_energy_coeff: user.cpu_energy_coeff,
            max_cpu_hz: user.max_cpu_hz,
            energy_budget: user.energy_budget,
            uplink_gain: user.uplink_gain,
            eavesdropper_gain: user.eavesdropper_gain,
            weight: user.weight,
            lambda,
            beta,
        });
    }
    Ok(SubproblemSpec {
        bandwidth: b,
        deadline,
        circuit_power: params.circuit_power,
        t_floor: options.t_floor,
        concave_legit: options.cccp_faithful,
        step_bounds: None,
        users,
    })
}

/// Result of one subproblem solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemSolution {
    pub point: DecisionPoint,
    /// Objective value (maximization sense) at `point`.
    pub objective: f64,
    /// Scaled stationarity residual of the KKT system at `point`.
    pub kkt_residual: f64,
    /// Worst equilibrated constraint violation (nonnegative part).
    pub feas_residual: f64,
    /// Newton iterations spent across the barrier path.
    pub iterations: usize,
}

/// Solves the subproblem with a log-barrier method: a Phase-I pass finds a
/// strictly feasible point (unless the warm start already is one), then the
/// barrier path is followed until the duality gap certifies optimality.
pub fn solve_subproblem(
    spec: &SubproblemSpec,
    tols: &SubproblemTols,
    warm: Option<&DecisionPoint>,
) -> Result<SubproblemSolution> {
    barrier::solve(spec, tols, warm)
}
