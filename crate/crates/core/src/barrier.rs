//! Log-barrier interior method for the assembled subproblem.
//!
//! The only non-affine pieces are a separable cubic (energy), and in
//! concave-legit mode one 2x2 entropy block per user, so damped Newton steps
//! on the barrier function with a dense Cholesky factorization are cheap and
//! robust at the sizes this solver sees. Variables are diagonally rescaled to
//! O(1) and constraint rows are equilibrated once at assembly: the barrier is
//! invariant to row scaling, but Phase-I progress and feasibility reporting
//! are meaningful only on equilibrated rows.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{DecisionPoint, UserDecision};
use crate::options::SubproblemTols;
use crate::subproblem::{SubproblemSolution, SubproblemSpec};

const SLOTS: usize = 5;
const T_: usize = 0;
const F_: usize = 1;
const N_: usize = 2;
const TAU_: usize = 3;
const P_: usize = 4;

const BARRIER_GROWTH: f64 = 20.0;
const ARMIJO: f64 = 0.25;
const MAX_LINE_HALVINGS: usize = 60;
const PHASE1_MARGIN: f64 = 1e-7;

/// One inequality row `g(x) <= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RowKind {
    /// Total-bits requirement (negated): `L - bits_model(x) <= 0`.
    Bits(usize),
    /// Per-user energy budget.
    Energy(usize),
    /// Eavesdropper auxiliary lower bound `G*p - tau <= 0`.
    EveLower(usize),
    /// Legitimate auxiliary upper bound `N - H*p <= 0`.
    LegitUpper(usize),
    /// Shared offload-time budget.
    SharedTime,
    TimeFloor(usize),
    FreqLower(usize),
    FreqUpper(usize),
    TxLower(usize),
    LegitLower(usize),
    EveAuxLower(usize),
    /// Per-iteration step limits around the expansion point.
    TimeStepLo(usize),
    TimeStepHi(usize),
    LegitStepLo(usize),
    LegitStepHi(usize),
}

impl RowKind {
    /// Rows that couple variables; Phase-I relaxes exactly these.
    fn is_coupling(&self) -> bool {
        matches!(
            self,
            RowKind::Bits(_)
                | RowKind::Energy(_)
                | RowKind::EveLower(_)
                | RowKind::LegitUpper(_)
                | RowKind::SharedTime
        )
    }

    pub(crate) fn name(&self) -> String {
        match self {
            RowKind::Bits(k) => format!("total-bits row (user {k})"),
            RowKind::Energy(k) => format!("energy budget (user {k})"),
            RowKind::EveLower(k) => format!("eavesdropper transform row (user {k})"),
            RowKind::LegitUpper(k) => format!("legitimate transform row (user {k})"),
            RowKind::SharedTime => "shared time budget".to_string(),
            RowKind::TimeFloor(k) => format!("offload-time floor (user {k})"),
            RowKind::FreqLower(k) => format!("frequency lower bound (user {k})"),
            RowKind::FreqUpper(k) => format!("frequency upper bound (user {k})"),
            RowKind::TxLower(k) => format!("tx-energy lower bound (user {k})"),
            RowKind::LegitLower(k) => format!("legitimate aux lower bound (user {k})"),
            RowKind::EveAuxLower(k) => format!("eavesdropper aux lower bound (user {k})"),
            RowKind::TimeStepLo(k) => format!("offload-time step limit, low (user {k})"),
            RowKind::TimeStepHi(k) => format!("offload-time step limit, high (user {k})"),
            RowKind::LegitStepLo(k) => format!("legitimate aux step limit, low (user {k})"),
            RowKind::LegitStepHi(k) => format!("legitimate aux step limit, high (user {k})"),
        }
    }
}

/// Curvature contribution of one row (already equilibrated and in scaled vars).
#[derive(Debug, Clone, Copy)]
enum Curv {
    None,
    Diag {
        idx: usize,
        value: f64,
    },
    Block2 {
        i: usize,
        j: usize,
        mii: f64,
        mij: f64,
        mjj: f64,
    },
}

/// Scaled-variable view of a subproblem.
pub(crate) struct Geometry<'a> {
    spec: &'a SubproblemSpec,
    n: usize,
    scales: Vec<f64>,
    rows: Vec<RowKind>,
    row_scales: Vec<f64>,
}

impl<'a> Geometry<'a> {
    pub(crate) fn new(spec: &'a SubproblemSpec) -> Geometry<'a> {
        let num = spec.num_users();
        let n = SLOTS * num;
        let mut scales = vec![1.0; n];
        for (k, user) in spec.users.iter().enumerate() {
            let sn = (user.uplink_gain * user.energy_budget).max(1e-9);
            let stau = (user.eavesdropper_gain * user.energy_budget)
                .max(1e-3 * sn)
                .max(1e-9);
            scales[SLOTS * k + T_] = spec.deadline;
            scales[SLOTS * k + F_] = user.max_cpu_hz;
            scales[SLOTS * k + N_] = sn;
            scales[SLOTS * k + TAU_] = stau;
            scales[SLOTS * k + P_] = user.energy_budget;
        }
        let mut rows = Vec::with_capacity(14 * num + 1);
        for k in 0..num {
            rows.extend([
                RowKind::Bits(k),
                RowKind::Energy(k),
                RowKind::EveLower(k),
                RowKind::LegitUpper(k),
                RowKind::TimeFloor(k),
                RowKind::FreqLower(k),
                RowKind::FreqUpper(k),
                RowKind::TxLower(k),
                RowKind::LegitLower(k),
                RowKind::EveAuxLower(k),
            ]);
            if let Some(bounds) = spec.step_bounds.as_ref().map(|b| &b[k]) {
                if bounds.t_lo > spec.t_floor {
                    rows.push(RowKind::TimeStepLo(k));
                }
                if bounds.t_hi < spec.deadline {
                    rows.push(RowKind::TimeStepHi(k));
                }
                if bounds.legit_lo > 0.0 {
                    rows.push(RowKind::LegitStepLo(k));
                }
                rows.push(RowKind::LegitStepHi(k));
            }
        }
        rows.push(RowKind::SharedTime);

        let mut geom = Geometry {
            spec,
            n,
            scales,
            rows,
            row_scales: Vec::new(),
        };
        // Equilibrate at a mid-box reference so every row has O(1) gradient.
        let x_ref = geom.default_interior();
        geom.row_scales = vec![1.0; geom.rows.len()];
        let grads = geom.row_grads(&x_ref);
        geom.row_scales = (0..geom.rows.len())
            .map(|i| {
                grads
                    .row(i)
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt()
                    .max(1e-12)
            })
            .collect();
        geom
    }

    pub(crate) fn num_rows(&self) -> usize {
        self.rows.len()
    }

    fn user_vars(&self, x: &DVector<f64>, k: usize) -> (f64, f64, f64, f64, f64) {
        let i = SLOTS * k;
        (
            x[i + T_] * self.scales[i + T_],
            x[i + F_] * self.scales[i + F_],
            x[i + N_] * self.scales[i + N_],
            x[i + TAU_] * self.scales[i + TAU_],
            x[i + P_] * self.scales[i + P_],
        )
    }

    pub(crate) fn decision_point(&self, x: &DVector<f64>) -> DecisionPoint {
        let mut users = Vec::with_capacity(self.spec.num_users());
        for (k, user) in self.spec.users.iter().enumerate() {
            let (t, f, legit, eve, tx) = self.user_vars(x, k);
            let local = self.spec.deadline * f / user.cycles_per_bit;
            users.push(UserDecision {
                offload_time: t,
                cpu_hz: f,
                offload_bits: (user.task_bits - local).clamp(0.0, user.task_bits),
                tx_energy: tx,
                legit_aux: legit,
                eve_aux: eve,
            });
        }
        DecisionPoint { users }
    }

    pub(crate) fn scaled_from_point(&self, point: &DecisionPoint) -> DVector<f64> {
        let mut x = DVector::zeros(self.n);
        for (k, dec) in point.users.iter().enumerate() {
            let i = SLOTS * k;
            x[i + T_] = dec.offload_time / self.scales[i + T_];
            x[i + F_] = dec.cpu_hz / self.scales[i + F_];
            x[i + N_] = dec.legit_aux / self.scales[i + N_];
            x[i + TAU_] = dec.eve_aux / self.scales[i + TAU_];
            x[i + P_] = dec.tx_energy / self.scales[i + P_];
        }
        x
    }

    /// A point strictly inside every box (coupling rows may be violated).
    fn default_interior(&self) -> DVector<f64> {
        let num = self.spec.num_users();
        let mut x = DVector::zeros(self.n);
        for (k, user) in self.spec.users.iter().enumerate() {
            let i = SLOTS * k;
            let mut t = (0.5 * self.spec.deadline / num as f64).max(2.0 * self.spec.t_floor);
            let tx = 0.4 * user.energy_budget;
            let mut legit = 0.5 * user.uplink_gain * tx;
            if let Some(bounds) = self.spec.step_bounds.as_ref().map(|b| &b[k]) {
                let pad_t = 0.05 * (bounds.t_hi - bounds.t_lo).max(self.spec.t_floor);
                t = t.clamp(
                    bounds.t_lo + pad_t,
                    (bounds.t_hi - pad_t).max(bounds.t_lo + pad_t),
                );
                let pad_n = 0.05 * (bounds.legit_hi - bounds.legit_lo).max(1e-12);
                legit = legit.clamp(
                    bounds.legit_lo + pad_n,
                    (bounds.legit_hi - pad_n).max(bounds.legit_lo + pad_n),
                );
            }
            x[i + T_] = t / self.scales[i + T_];
            x[i + F_] = 0.4;
            x[i + P_] = tx / self.scales[i + P_];
            x[i + N_] = legit / self.scales[i + N_];
            x[i + TAU_] = (1.5 * user.eavesdropper_gain * tx + 0.1 * self.scales[i + TAU_])
                / self.scales[i + TAU_];
        }
        x
    }

    /// Equilibrated row values at `x`.
    pub(crate) fn row_values(&self, x: &DVector<f64>) -> Vec<f64> {
        let mut vals = Vec::with_capacity(self.rows.len());
        let t_sum: f64 = (0..self.spec.num_users())
            .map(|k| x[SLOTS * k + T_] * self.scales[SLOTS * k + T_])
            .sum();
        for (i, row) in self.rows.iter().enumerate() {
            let v = match *row {
                RowKind::Bits(k) => {
                    let dec = self.user_decision(x, k);
                    self.spec.users[k].task_bits - self.spec.bits_row_value(k, &dec)
                }
                RowKind::Energy(k) => {
                    let (t, f, _, _, tx) = self.user_vars(x, k);
                    let u = &self.spec.users[k];
                    u.cpu_energy_coeff * self.spec.deadline * f.powi(3)
                        + tx
                        + self.spec.circuit_power * t
                        - u.energy_budget
                }
                RowKind::EveLower(k) => {
                    let (_, _, _, eve, tx) = self.user_vars(x, k);
                    self.spec.users[k].eavesdropper_gain * tx - eve
                }
                RowKind::LegitUpper(k) => {
                    let (_, _, legit, _, tx) = self.user_vars(x, k);
                    legit - self.spec.users[k].uplink_gain * tx
                }
                RowKind::SharedTime => t_sum - self.spec.deadline,
                RowKind::TimeFloor(k) => self.spec.t_floor - self.user_vars(x, k).0,
                RowKind::FreqLower(k) => -self.user_vars(x, k).1,
                RowKind::FreqUpper(k) => self.user_vars(x, k).1 - self.spec.users[k].max_cpu_hz,
                RowKind::TxLower(k) => -self.user_vars(x, k).4,
                RowKind::LegitLower(k) => -self.user_vars(x, k).2,
                RowKind::EveAuxLower(k) => -self.user_vars(x, k).3,
                RowKind::TimeStepLo(k) => self.step_bound(k).t_lo - self.user_vars(x, k).0,
                RowKind::TimeStepHi(k) => self.user_vars(x, k).0 - self.step_bound(k).t_hi,
                RowKind::LegitStepLo(k) => self.step_bound(k).legit_lo - self.user_vars(x, k).2,
                RowKind::LegitStepHi(k) => self.user_vars(x, k).2 - self.step_bound(k).legit_hi,
            };
            vals.push(v / self.row_scales[i]);
        }
        vals
    }

    fn step_bound(&self, k: usize) -> &crate::subproblem::StepBounds {
        &self
            .spec
            .step_bounds
            .as_ref()
            .expect("step rows exist only with bounds")[k]
    }

    fn user_decision(&self, x: &DVector<f64>, k: usize) -> UserDecision {
        let (t, f, legit, eve, tx) = self.user_vars(x, k);
        UserDecision {
            offload_time: t,
            cpu_hz: f,
            offload_bits: 0.0,
            tx_energy: tx,
            legit_aux: legit,
            eve_aux: eve,
        }
    }

    /// Row gradients in scaled variables, one row per constraint.
    fn row_grads(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut grads = DMatrix::zeros(self.rows.len(), self.n);
        for (i, row) in self.rows.iter().enumerate() {
            let sigma = self.row_scales[i];
            match *row {
                RowKind::Bits(k) => {
                    let idx = SLOTS * k;
                    let u = &self.spec.users[k];
                    let exp = &u.expansion;
                    let b = self.spec.bandwidth;
                    let (t, _, legit, _, _) = self.user_vars(x, k);
                    // d(bits)/d(var), then negate: the row is L - bits.
                    let (d_t, d_n) = if self.spec.concave_legit {
                        let nn = legit.max(0.0);
                        let tt = t.max(self.spec.t_floor);
                        let dy = (1.0 + nn / tt).ln() - nn / (nn + tt);
                        let dx = tt / (nn + tt);
                        (b * (dy - exp.eve_dt), b * dx)
                    } else {
                        (b * (exp.legit_dt - exp.eve_dt), b * exp.legit_dx)
                    };
                    grads[(i, idx + T_)] = -d_t * self.scales[idx + T_] / sigma;
                    grads[(i, idx + N_)] = -d_n * self.scales[idx + N_] / sigma;
                    grads[(i, idx + TAU_)] = b * exp.eve_dx * self.scales[idx + TAU_] / sigma;
                    grads[(i, idx + F_)] =
                        -(self.spec.deadline / u.cycles_per_bit) * self.scales[idx + F_] / sigma;
                }
                RowKind::Energy(k) => {
                    let idx = SLOTS * k;
                    let u = &self.spec.users[k];
                    let (_, f, _, _, _) = self.user_vars(x, k);
                    grads[(i, idx + F_)] = 3.0
                        * u.cpu_energy_coeff
                        * self.spec.deadline
                        * f
                        * f
                        * self.scales[idx + F_]
                        / sigma;
                    grads[(i, idx + P_)] = self.scales[idx + P_] / sigma;
                    grads[(i, idx + T_)] = self.spec.circuit_power * self.scales[idx + T_] / sigma;
                }
                RowKind::EveLower(k) => {
                    let idx = SLOTS * k;
                    grads[(i, idx + P_)] =
                        self.spec.users[k].eavesdropper_gain * self.scales[idx + P_] / sigma;
                    grads[(i, idx + TAU_)] = -self.scales[idx + TAU_] / sigma;
                }
                RowKind::LegitUpper(k) => {
                    let idx = SLOTS * k;
                    grads[(i, idx + N_)] = self.scales[idx + N_] / sigma;
                    grads[(i, idx + P_)] =
                        -self.spec.users[k].uplink_gain * self.scales[idx + P_] / sigma;
                }
                RowKind::SharedTime => {
                    for k in 0..self.spec.num_users() {
                        let idx = SLOTS * k;
                        grads[(i, idx + T_)] = self.scales[idx + T_] / sigma;
                    }
                }
                RowKind::TimeFloor(k) => {
                    let idx = SLOTS * k;
                    grads[(i, idx + T_)] = -self.scales[idx + T_] / sigma;
                }
                RowKind::FreqLower(k) => {
                    let idx = SLOTS * k;
                    grads[(i, idx + F_)] = -self.scales[idx + F_] / sigma;
                }
                RowKind::FreqUpper(k) => {
                    let idx = SLOTS * k;
                    grads[(i, idx + F_)] = self.scales[idx + F_] / sigma;
                }
                RowKind::TxLower(k) => {
                    let idx = SLOTS * k;
                    grads[(i, idx + P_)] = -self.scales[idx + P_] / sigma;
                }
                RowKind::LegitLower(k) => {
                    let idx = SLOTS * k;
                    grads[(i, idx + N_)] = -self.scales[idx + N_] / sigma;
                }
                RowKind::EveAuxLower(k) => {
                    let idx = SLOTS * k;
                    grads[(i, idx + TAU_)] = -self.scales[idx + TAU_] / sigma;
                }
                RowKind::TimeStepLo(k) => {
                    let idx = SLOTS * k;
                    grads[(i, idx + T_)] = -self.scales[idx + T_] / sigma;
                }
                RowKind::TimeStepHi(k) => {
                    let idx = SLOTS * k;
                    grads[(i, idx + T_)] = self.scales[idx + T_] / sigma;
                }
                RowKind::LegitStepLo(k) => {
                    let idx = SLOTS * k;
                    grads[(i, idx + N_)] = -self.scales[idx + N_] / sigma;
                }
                RowKind::LegitStepHi(k) => {
                    let idx = SLOTS * k;
                    grads[(i, idx + N_)] = self.scales[idx + N_] / sigma;
                }
            }
        }
        grads
    }

    fn row_curvatures(&self, x: &DVector<f64>) -> Vec<Curv> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let sigma = self.row_scales[i];
                match *row {
                    RowKind::Energy(k) => {
                        let idx = SLOTS * k;
                        let u = &self.spec.users[k];
                        let (_, f, _, _, _) = self.user_vars(x, k);
                        Curv::Diag {
                            idx: idx + F_,
                            value: 6.0
                                * u.cpu_energy_coeff
                                * self.spec.deadline
                                * f
                                * self.scales[idx + F_]
                                * self.scales[idx + F_]
                                / sigma,
                        }
                    }
                    RowKind::Bits(k) if self.spec.concave_legit => {
                        let idx = SLOTS * k;
                        let (t, _, legit, _, _) = self.user_vars(x, k);
                        let nn = legit.max(1e-300);
                        let tt = t.max(self.spec.t_floor);
                        let b = self.spec.bandwidth;
                        let denom = (nn + tt) * (nn + tt);
                        // -B * Hess(entropy) is PSD rank one.
                        Curv::Block2 {
                            i: idx + N_,
                            j: idx + T_,
                            mii: b * tt / denom * self.scales[idx + N_] * self.scales[idx + N_]
                                / sigma,
                            mij: -b * nn / denom * self.scales[idx + N_] * self.scales[idx + T_]
                                / sigma,
                            mjj: b * nn * nn / (tt * denom)
                                * self.scales[idx + T_]
                                * self.scales[idx + T_]
                                / sigma,
                        }
                    }
                    _ => Curv::None,
                }
            })
            .collect()
    }

    /// Minimization objective `h = -F` and its gradient/Hessian in scaled vars.
    pub(crate) fn objective(&self, x: &DVector<f64>) -> f64 {
        -self.spec.objective_value(&self.decision_point(x))
    }

    pub(crate) fn objective_grad(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut grad = DVector::zeros(self.n);
        for (k, user) in self.spec.users.iter().enumerate() {
            let idx = SLOTS * k;
            let o = &user.objective;
            let (t, f, legit, _, _) = self.user_vars(x, k);
            let mut g_t = o.t_coeff;
            let mut g_n = o.legit_coeff;
            if o.entropy_weight != 0.0 {
                let nn = legit.max(0.0);
                let tt = t.max(self.spec.t_floor);
                g_t += o.entropy_weight * ((1.0 + nn / tt).ln() - nn / (nn + tt));
                g_n += o.entropy_weight * tt / (nn + tt);
            }
            grad[idx + T_] = -g_t * self.scales[idx + T_];
            grad[idx + F_] = -(o.f_coeff - 3.0 * o.cubic_coeff * f * f) * self.scales[idx + F_];
            grad[idx + N_] = -g_n * self.scales[idx + N_];
            grad[idx + TAU_] = -o.eve_coeff * self.scales[idx + TAU_];
            grad[idx + P_] = -o.tx_coeff * self.scales[idx + P_];
        }
        grad
    }

    fn objective_hess(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut hess = DMatrix::zeros(self.n, self.n);
        for (k, user) in self.spec.users.iter().enumerate() {
            let idx = SLOTS * k;
            let o = &user.objective;
            let (t, f, legit, _, _) = self.user_vars(x, k);
            hess[(idx + F_, idx + F_)] =
                6.0 * o.cubic_coeff * f * self.scales[idx + F_] * self.scales[idx + F_];
            if o.entropy_weight != 0.0 {
                let nn = legit.max(1e-300);
                let tt = t.max(self.spec.t_floor);
                let denom = (nn + tt) * (nn + tt);
                let w = o.entropy_weight;
                hess[(idx + N_, idx + N_)] +=
                    w * tt / denom * self.scales[idx + N_] * self.scales[idx + N_];
                let off = -w * nn / denom * self.scales[idx + N_] * self.scales[idx + T_];
                hess[(idx + N_, idx + T_)] += off;
                hess[(idx + T_, idx + N_)] += off;
                hess[(idx + T_, idx + T_)] +=
                    w * nn * nn / (tt * denom) * self.scales[idx + T_] * self.scales[idx + T_];
            }
        }
        hess
    }
}

/// Interface the Newton centering loop needs; implemented by both phases.
trait CenterProblem {
    /// Barrier value split into `s*objective` and `-sum ln(-row)` parts, or
    /// `None` when `x` is not strictly feasible.
    fn phi_parts(&self, x: &DVector<f64>, s: f64) -> Option<(f64, f64)>;
    fn grad_hess(&self, x: &DVector<f64>, s: f64) -> (DVector<f64>, DMatrix<f64>);
    /// First-order estimate of the largest step along `dir` that keeps every
    /// row strictly negative (exact for affine rows; the line search still
    /// re-checks candidates, so convex rows only need the estimate).
    fn boundary_step(&self, x: &DVector<f64>, dir: &DVector<f64>) -> f64;
}

struct Phase2<'a, 'b> {
    geom: &'b Geometry<'a>,
}

impl CenterProblem for Phase2<'_, '_> {
    fn boundary_step(&self, x: &DVector<f64>, dir: &DVector<f64>) -> f64 {
        let vals = self.geom.row_values(x);
        let grads = self.geom.row_grads(x);
        boundary_step_from(&vals, &grads, dir)
    }

    fn phi_parts(&self, x: &DVector<f64>, s: f64) -> Option<(f64, f64)> {
        let vals = self.geom.row_values(x);
        if vals.iter().any(|&v| v >= 0.0) {
            return None;
        }
        let bar: f64 = vals.iter().map(|&v| -(-v).ln()).sum();
        Some((s * self.geom.objective(x), bar))
    }

    fn grad_hess(&self, x: &DVector<f64>, s: f64) -> (DVector<f64>, DMatrix<f64>) {
        let vals = self.geom.row_values(x);
        let grads = self.geom.row_grads(x);
        let curvs = self.geom.row_curvatures(x);
        let mut grad = self.geom.objective_grad(x) * s;
        let mut hess = self.geom.objective_hess(x) * s;
        accumulate_barrier(&vals, &grads, &curvs, &mut grad, &mut hess, 0);
        (grad, hess)
    }
}

/// Phase-I: minimize the relaxation level `sv` over `(x, sv)` with coupling
/// rows relaxed to `g(x) - sv <= 0` and boxes kept exact.
struct Phase1<'a, 'b> {
    geom: &'b Geometry<'a>,
}

impl Phase1<'_, '_> {
    fn row_values(&self, z: &DVector<f64>) -> Vec<f64> {
        let n = self.geom.n;
        let x = z.rows(0, n).into_owned();
        let sv = z[n];
        self.geom
            .row_values(&x)
            .iter()
            .zip(self.geom.rows.iter())
            .map(|(&v, row)| if row.is_coupling() { v - sv } else { v })
            .collect()
    }
}

impl CenterProblem for Phase1<'_, '_> {
    fn boundary_step(&self, z: &DVector<f64>, dir: &DVector<f64>) -> f64 {
        let n = self.geom.n;
        let x = z.rows(0, n).into_owned();
        let vals = self.row_values(z);
        let x_grads = self.geom.row_grads(&x);
        let mut step = f64::INFINITY;
        for (i, row) in self.geom.rows.iter().enumerate() {
            let mut slope = 0.0;
            for j in 0..n {
                slope += x_grads[(i, j)] * dir[j];
            }
            if row.is_coupling() {
                slope -= dir[n];
            }
            if slope > 0.0 {
                step = step.min(-vals[i] / slope);
            }
        }
        step
    }

    fn phi_parts(&self, z: &DVector<f64>, s: f64) -> Option<(f64, f64)> {
        let vals = self.row_values(z);
        if vals.iter().any(|&v| v >= 0.0) {
            return None;
        }
        let bar: f64 = vals.iter().map(|&v| -(-v).ln()).sum();
        Some((s * z[self.geom.n], bar))
    }

    fn grad_hess(&self, z: &DVector<f64>, s: f64) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.geom.n;
        let x = z.rows(0, n).into_owned();
        let vals = self.row_values(z);
        let x_grads = self.geom.row_grads(&x);
        let curvs = self.geom.row_curvatures(&x);
        // Extend row gradients with the relaxation column.
        let mut grads = DMatrix::zeros(vals.len(), n + 1);
        for (i, row) in self.geom.rows.iter().enumerate() {
            for j in 0..n {
                grads[(i, j)] = x_grads[(i, j)];
            }
            if row.is_coupling() {
                grads[(i, n)] = -1.0;
            }
        }
        let mut grad = DVector::zeros(n + 1);
        grad[n] = s;
        let mut hess = DMatrix::zeros(n + 1, n + 1);
        accumulate_barrier(&vals, &grads, &curvs, &mut grad, &mut hess, 0);
        (grad, hess)
    }
}

fn accumulate_barrier(
    vals: &[f64],
    grads: &DMatrix<f64>,
    curvs: &[Curv],
    grad: &mut DVector<f64>,
    hess: &mut DMatrix<f64>,
    _offset: usize,
) {
    let n = grad.len();
    for (i, &v) in vals.iter().enumerate() {
        let inv = 1.0 / (-v);
        let gi = grads.row(i);
        for a in 0..n {
            let ga = gi[a];
            if ga == 0.0 {
                continue;
            }
            grad[a] += ga * inv;
            for b in a..n {
                let gb = gi[b];
                if gb == 0.0 {
                    continue;
                }
                let add = ga * gb * inv * inv;
                hess[(a, b)] += add;
                if a != b {
                    hess[(b, a)] += add;
                }
            }
        }
        match curvs.get(i).copied().unwrap_or(Curv::None) {
            Curv::None => {}
            Curv::Diag { idx, value } => hess[(idx, idx)] += value * inv,
            Curv::Block2 {
                i: a,
                j: b,
                mii,
                mij,
                mjj,
            } => {
                hess[(a, a)] += mii * inv;
                hess[(b, b)] += mjj * inv;
                hess[(a, b)] += mij * inv;
                hess[(b, a)] += mij * inv;
            }
        }
    }
}

fn boundary_step_from(vals: &[f64], grads: &DMatrix<f64>, dir: &DVector<f64>) -> f64 {
    let mut step = f64::INFINITY;
    for (i, &v) in vals.iter().enumerate() {
        let mut slope = 0.0;
        for j in 0..dir.len() {
            slope += grads[(i, j)] * dir[j];
        }
        if slope > 0.0 {
            step = step.min(-v / slope);
        }
    }
    step
}

/// Early-exit predicate checked between Newton steps.
type StopCheck<'a> = dyn Fn(&DVector<f64>) -> bool + 'a;

enum CenterStatus {
    GradTol,
    Stalled,
    EarlyExit,
    Budget,
}

/// Damped Newton descent on the barrier function at fixed `s`. Stops when the
/// gradient meets `grad_tol` or the Newton decrement falls under
/// `decrement_tol` (the latter is affine-invariant, so an absolute threshold
/// is meaningful at any `s`).
fn center<P: CenterProblem>(
    problem: &P,
    x: &mut DVector<f64>,
    s: f64,
    grad_tol: f64,
    decrement_tol: f64,
    budget: &mut usize,
    early_exit: Option<&StopCheck<'_>>,
) -> Result<CenterStatus> {
    loop {
        if let Some(check) = early_exit {
            if check(x) {
                return Ok(CenterStatus::EarlyExit);
            }
        }
        if *budget == 0 {
            return Ok(CenterStatus::Budget);
        }
        let (grad, hess) = problem.grad_hess(x, s);
        if grad.amax() <= grad_tol {
            return Ok(CenterStatus::GradTol);
        }
        let dir = match newton_direction(&hess, &grad) {
            Some(d) => d,
            None => return Ok(CenterStatus::Stalled),
        };
        let dirder = grad.dot(&dir);
        if dirder >= 0.0 {
            return Ok(CenterStatus::Stalled);
        }
        let decrement = -dirder;
        if 0.5 * decrement <= decrement_tol {
            return Ok(CenterStatus::GradTol);
        }
        let (obj0, bar0) = problem
            .phi_parts(x, s)
            .ok_or_else(|| Error::domain("barrier", "iterate left the strictly feasible region"))?;
        // The sufficient-decrease test carries an additive floor at the
        // rounding level of the barrier value, so steps near the center are
        // not rejected on pure cancellation noise in the s*objective part.
        let noise_floor = 1e-12 * (obj0.abs() + bar0.abs() + 1.0);
        let mut alpha = (0.995 * problem.boundary_step(x, &dir)).min(1.0);
        if !alpha.is_finite() || alpha <= 0.0 {
            return Ok(CenterStatus::Stalled);
        }
        let mut accepted = false;
        for _ in 0..MAX_LINE_HALVINGS {
            let cand = &*x + &dir * alpha;
            if let Some((obj_c, bar_c)) = problem.phi_parts(&cand, s) {
                // Difference formed per part to limit cancellation at large s.
                let delta = (obj_c - obj0) + (bar_c - bar0);
                if delta <= ARMIJO * alpha * dirder + noise_floor {
                    *x = cand;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        *budget -= 1;
        if std::env::var("CEMAX_DEBUG_CENTER").is_ok() {
            eprintln!("[center] s={s:.2e} dec={decrement:.3e} alpha={alpha:.2e} grad={:.3e} acc={accepted}", grad.amax());
        }
        if !accepted {
            return Ok(CenterStatus::Stalled);
        }
    }
}

fn newton_direction(hess: &DMatrix<f64>, grad: &DVector<f64>) -> Option<DVector<f64>> {
    let max_diag = (0..hess.nrows())
        .map(|i| hess[(i, i)].abs())
        .fold(0.0_f64, f64::max)
        .max(1e-300);
    let mut ridge = 0.0;
    for attempt in 0..10 {
        let mut h = hess.clone();
        if ridge > 0.0 {
            for i in 0..h.nrows() {
                h[(i, i)] += ridge;
            }
        }
        if let Some(chol) = h.cholesky() {
            let d = chol.solve(&(-grad));
            if d.iter().all(|v| v.is_finite()) {
                return Some(d);
            }
        }
        ridge = max_diag * 1e-14 * 10f64.powi(attempt + 1);
    }
    None
}

/// Pushes a point strictly inside every box row (coupling rows untouched).
fn project_into_boxes(geom: &Geometry<'_>, x: &mut DVector<f64>) {
    for (k, user) in geom.spec.users.iter().enumerate() {
        let i = SLOTS * k;
        let pad_t = 1e-6 * geom.spec.deadline / geom.scales[i + T_];
        let mut t_lo = geom.spec.t_floor / geom.scales[i + T_] + pad_t;
        let mut t_hi = f64::INFINITY;
        let mut n_lo: f64 = 1e-9;
        let mut n_hi = f64::INFINITY;
        if let Some(bounds) = geom.spec.step_bounds.as_ref().map(|b| &b[k]) {
            t_lo = t_lo.max(bounds.t_lo / geom.scales[i + T_] + pad_t);
            t_hi = bounds.t_hi / geom.scales[i + T_] - pad_t;
            let pad_n = 1e-6 * (bounds.legit_hi - bounds.legit_lo).max(1e-9) / geom.scales[i + N_];
            n_lo = n_lo.max(bounds.legit_lo / geom.scales[i + N_] + pad_n);
            n_hi = bounds.legit_hi / geom.scales[i + N_] - pad_n;
        }
        x[i + T_] = x[i + T_].clamp(t_lo, t_hi.max(t_lo));
        let f_hi = user.max_cpu_hz / geom.scales[i + F_];
        x[i + F_] = x[i + F_].clamp(1e-9 * f_hi, (1.0 - 1e-9) * f_hi);
        x[i + N_] = x[i + N_].clamp(n_lo, n_hi.max(n_lo));
        x[i + TAU_] = x[i + TAU_].max(1e-9);
        x[i + P_] = x[i + P_].max(1e-9);
    }
}

/// Finds a strictly feasible scaled point, or proves there is none.
fn phase1(geom: &Geometry<'_>, start: Option<DVector<f64>>) -> Result<DVector<f64>> {
    let n = geom.n;
    let mut x0 = start.unwrap_or_else(|| geom.default_interior());
    project_into_boxes(geom, &mut x0);
    let coupling_max = |x: &DVector<f64>| -> f64 {
        geom.row_values(x)
            .iter()
            .zip(geom.rows.iter())
            .filter(|(_, r)| r.is_coupling())
            .map(|(&v, _)| v)
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let mut z = DVector::zeros(n + 1);
    for i in 0..n {
        z[i] = x0[i];
    }
    z[n] = coupling_max(&x0).max(0.0) + 1.0;

    let problem = Phase1 { geom };
    let m = geom.num_rows() as f64;
    let mut s = 1.0;
    let mut budget = 600usize;
    let early = |z: &DVector<f64>| {
        let x = z.rows(0, n).into_owned();
        coupling_max(&x) <= -2.0 * PHASE1_MARGIN
    };
    loop {
        let status = center(&problem, &mut z, s, 0.0, 1e-9, &mut budget, Some(&early))?;
        if std::env::var("CEMAX_DEBUG").is_ok() {
            let x = z.rows(0, n).into_owned();
            let st = match status {
                CenterStatus::GradTol => "gradtol",
                CenterStatus::Stalled => "stalled",
                CenterStatus::Budget => "budget",
                CenterStatus::EarlyExit => "early",
            };
            eprintln!(
                "[phase1] s={s:.3e} sv={:.6e} coupling_max={:.6e} center={st} budget_left={budget}",
                z[n],
                coupling_max(&x)
            );
        }
        if matches!(status, CenterStatus::EarlyExit) {
            return Ok(z.rows(0, n).into_owned());
        }
        if m / s <= 0.25 * PHASE1_MARGIN || matches!(status, CenterStatus::Budget) {
            break;
        }
        s *= BARRIER_GROWTH;
    }
    let x = z.rows(0, n).into_owned();
    if coupling_max(&x) <= -PHASE1_MARGIN {
        return Ok(x);
    }
    // Infeasible: report the worst row at the relaxation optimum.
    let vals = geom.row_values(&x);
    let (worst, violation) = geom
        .rows
        .iter()
        .zip(vals.iter())
        .filter(|(r, _)| r.is_coupling())
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(r, &v)| (r.name(), v))
        .unwrap_or_else(|| ("unknown".to_string(), f64::NAN));
    Err(Error::SubproblemInfeasible {
        row: worst,
        violation,
    })
}

/// Strictly feasible scaled start from a warm point, if one can be nudged out of it.
fn warm_start(geom: &Geometry<'_>, warm: &DecisionPoint) -> Option<DVector<f64>> {
    let margin = 1e-8;
    let interior = geom.default_interior();
    let base = geom.scaled_from_point(warm);
    let strictly_ok = |x: &DVector<f64>| geom.row_values(x).iter().all(|&v| v < -margin);
    if strictly_ok(&base) {
        if std::env::var("CEMAX_DEBUG").is_ok() {
            eprintln!(
                "[warm] base accepted, min slack {:.3e}",
                geom.row_values(&base)
                    .iter()
                    .fold(f64::NEG_INFINITY, |a, &v| a.max(v))
            );
        }
        return Some(base);
    }
    for gamma in [0.01, 0.05, 0.2, 0.5] {
        let cand = &base * (1.0 - gamma) + &interior * gamma;
        if strictly_ok(&cand) {
            if std::env::var("CEMAX_DEBUG").is_ok() {
                eprintln!("[warm] blend gamma={gamma} accepted");
            }
            return Some(cand);
        }
    }
    if std::env::var("CEMAX_DEBUG").is_ok() {
        let vals = geom.row_values(&base);
        let worst = vals
            .iter()
            .zip(geom.rows.iter())
            .max_by(|a, b| a.0.total_cmp(b.0))
            .unwrap();
        eprintln!(
            "[warm] rejected, worst row {} = {:.3e}",
            worst.1.name(),
            worst.0
        );
    }
    None
}

/// Full barrier solve: Phase-I if needed, then path following until the
/// duality gap certifies the KKT point at the requested relative accuracy.
pub(crate) fn solve(
    spec: &SubproblemSpec,
    tols: &SubproblemTols,
    warm: Option<&DecisionPoint>,
) -> Result<SubproblemSolution> {
    let geom = Geometry::new(spec);
    let mut x = match warm.and_then(|w| warm_start(&geom, w)) {
        Some(x) => x,
        None => {
            let seed = warm.map(|w| geom.scaled_from_point(w));
            phase1(&geom, seed)?
        }
    };

    let debug = std::env::var("CEMAX_DEBUG").is_ok();
    let problem = Phase2 { geom: &geom };
    let m = geom.num_rows() as f64;
    let h0 = geom.objective(&x);
    let mut s = (m / (0.05 * (1.0 + h0.abs()))).max(1e-10);
    let mut budget = tols.max_iter;
    let mut iterations = 0usize;
    let mut best: Option<SubproblemSolution> = None;
    loop {
        let before = budget;
        // Moderate centering along the path; the gap/KKT checks below decide
        // when the path has gone far enough.
        let status = center(&problem, &mut x, s, 0.0, 1e-7, &mut budget, None)?;
        iterations += before - budget;
        let obj = -geom.objective(&x);
        let magnitude = geom.spec.objective_magnitude(&geom.decision_point(&x));
        let gap_ok = m / s <= tols.tol_kkt * (1.0 + obj.abs().max(magnitude));
        if debug {
            let st = match status {
                CenterStatus::GradTol => "gradtol",
                CenterStatus::Stalled => "stalled",
                CenterStatus::Budget => "budget",
                CenterStatus::EarlyExit => "early",
            };
            eprintln!(
                "[barrier] s={s:.3e} obj={obj:.6e} gap={:.3e} center={st} used={} left={budget}",
                m / s,
                before - budget
            );
        }
        if gap_ok || matches!(status, CenterStatus::Budget) || budget == 0 {
            // Crossover: let the active-set Newton polish finish the job the
            // barrier path cannot push through in double precision.
            let mut refined = x.clone();
            refine_active_set(&geom, &mut refined);
            let solution = extract_solution(&geom, &refined, iterations);
            if solution.kkt_residual <= tols.tol_kkt && solution.feas_residual <= tols.tol_feas {
                return Ok(solution);
            }
            if best
                .as_ref()
                .is_none_or(|b| solution.kkt_residual < b.kkt_residual)
            {
                best = Some(solution);
            }
            if matches!(status, CenterStatus::Budget) || budget == 0 {
                if debug {
                    let vals = geom.row_values(&x);
                    let mut idx: Vec<usize> = (0..vals.len()).collect();
                    idx.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
                    for &i in idx.iter().take(5) {
                        eprintln!("[stuck] row {} = {:.6e}", geom.rows[i].name(), vals[i]);
                    }
                    let dec = geom.decision_point(&x);
                    for (k, d) in dec.users.iter().enumerate() {
                        eprintln!(
                            "[stuck] user{k}: t={:.5e} f={:.5e} N={:.5e} tau={:.5e} tx={:.5e}",
                            d.offload_time, d.cpu_hz, d.legit_aux, d.eve_aux, d.tx_energy
                        );
                    }
                }
                break;
            }
        }
        s *= BARRIER_GROWTH;
    }

    let solution = best.unwrap_or_else(|| extract_solution(&geom, &x, iterations));
    Err(Error::NoConvergence {
        iterations,
        kkt_residual: solution.kkt_residual,
        best: Box::new(solution),
    })
}

fn extract_solution(
    geom: &Geometry<'_>,
    x: &DVector<f64>,
    iterations: usize,
) -> SubproblemSolution {
    let point = geom.decision_point(x);
    let objective = geom.spec.objective_value(&point);
    let vals = geom.row_values(x);
    let grads = geom.row_grads(x);
    let obj_grad = geom.objective_grad(x);

    let (_, stat, compl) = best_certificate(&grads, &vals, &obj_grad);
    let feas_residual = vals.iter().fold(0.0_f64, |acc, &v| acc.max(v));
    SubproblemSolution {
        point,
        objective,
        kkt_residual: stat.max(compl),
        feas_residual: feas_residual.max(0.0),
        iterations,
    }
}

/// Certificate search over activity tolerances: a degenerate corner admits
/// several valid multiplier bases, and the loosest activity set does not
/// always produce the one with clean complementary slackness. Returns the
/// multipliers with the smallest combined (stationarity, complementarity)
/// residual, both scale-normalized.
pub(crate) fn best_certificate(
    grads: &DMatrix<f64>,
    vals: &[f64],
    obj_grad: &DVector<f64>,
) -> (Vec<f64>, f64, f64) {
    let obj_scale = 1.0 + obj_grad.amax();
    let mut best: Option<(Vec<f64>, f64, f64)> = None;
    for active_tol in [1e-9, 1e-7, 1e-5, 1e-4] {
        let (nu, stat_abs) = fit_multipliers(grads, vals, obj_grad, active_tol);
        let stat = stat_abs / obj_scale;
        let nu_scale = 1.0 + nu.iter().fold(0.0_f64, |acc, &v| acc.max(v));
        let compl = nu
            .iter()
            .zip(vals.iter())
            .map(|(&multiplier, &g)| (multiplier * g).abs())
            .fold(0.0_f64, f64::max)
            / nu_scale;
        let score = stat.max(compl);
        if best.as_ref().is_none_or(|(_, s, c)| score < s.max(*c)) {
            best = Some((nu, stat, compl));
        }
    }
    best.expect("at least one tier evaluated")
}

/// Active-set Newton refinement: once the barrier path is close, solve the
/// stationarity-plus-activity equations directly. The system carries no
/// barrier terms, so the conditioning that limits the pure path near strongly
/// active rows disappears and the iterate converges quadratically to the
/// exact KKT point. Rows that block a step join the active set; rows whose
/// multiplier turns negative leave it. Falls back silently when the set
/// cannot be settled.
fn refine_active_set(geom: &Geometry<'_>, x: &mut DVector<f64>) {
    for _ in 0..6 {
        let vals = geom.row_values(x);
        let grads = geom.row_grads(x);
        let obj_grad = geom.objective_grad(x);
        let (nu, _) = fit_multipliers(&grads, &vals, &obj_grad, 1e-5);
        let mut active: Vec<usize> = (0..vals.len()).filter(|&i| nu[i] > 0.0).collect();
        if active.is_empty() {
            return;
        }
        let curvs = geom.row_curvatures(x);
        let mut moved = None;
        for _set_change in 0..4 {
            let Some((dx, dnu)) = solve_kkt_step(geom, x, &active, &nu, &grads, &obj_grad, &curvs)
            else {
                return;
            };
            // Rows whose multiplier went negative do not belong.
            let drop: Vec<usize> = active
                .iter()
                .enumerate()
                .filter(|&(col, &i)| nu[i] + dnu[col] < -1e-9 * (1.0 + nu[i].abs()))
                .map(|(col, _)| col)
                .collect();
            if !drop.is_empty() {
                for &col in drop.iter().rev() {
                    active.remove(col);
                }
                if active.is_empty() {
                    return;
                }
                continue;
            }
            let cand = &*x + &dx;
            let cand_vals = geom.row_values(&cand);
            let crossed: Vec<usize> = (0..cand_vals.len())
                .filter(|&i| !active.contains(&i) && cand_vals[i] > 0.0)
                .collect();
            if crossed.is_empty() {
                moved = Some((cand, dx.amax()));
                break;
            }
            active.extend(crossed);
        }
        let Some((cand, step)) = moved else { return };
        *x = cand;
        if step <= 1e-15 {
            return;
        }
    }
}

/// One Newton step of the equality KKT system on the given active set.
fn solve_kkt_step(
    geom: &Geometry<'_>,
    x: &DVector<f64>,
    active: &[usize],
    nu: &[f64],
    grads: &DMatrix<f64>,
    obj_grad: &DVector<f64>,
    curvs: &[Curv],
) -> Option<(DVector<f64>, DVector<f64>)> {
    let n = geom.n;
    let na = active.len();
    let vals = geom.row_values(x);

    let mut h = geom.objective_hess(x);
    for &i in active {
        match curvs[i] {
            Curv::None => {}
            Curv::Diag { idx, value } => h[(idx, idx)] += nu[i] * value,
            Curv::Block2 {
                i: a,
                j: b,
                mii,
                mij,
                mjj,
            } => {
                h[(a, a)] += nu[i] * mii;
                h[(b, b)] += nu[i] * mjj;
                h[(a, b)] += nu[i] * mij;
                h[(b, a)] += nu[i] * mij;
            }
        }
    }
    let reg = 1e-12 * (0..n).map(|i| h[(i, i)].abs()).fold(1.0_f64, f64::max);
    let mut kkt = DMatrix::zeros(n + na, n + na);
    for a in 0..n {
        for b in 0..n {
            kkt[(a, b)] = h[(a, b)];
        }
        kkt[(a, a)] += reg;
    }
    for (col, &i) in active.iter().enumerate() {
        for a in 0..n {
            kkt[(a, n + col)] = grads[(i, a)];
            kkt[(n + col, a)] = grads[(i, a)];
        }
        kkt[(n + col, n + col)] = -1e-14;
    }
    let mut rhs = DVector::zeros(n + na);
    for a in 0..n {
        let mut r = -obj_grad[a];
        for &i in active {
            r -= nu[i] * grads[(i, a)];
        }
        rhs[a] = r;
    }
    for (col, &i) in active.iter().enumerate() {
        rhs[n + col] = -vals[i];
    }
    let step = kkt.lu().solve(&rhs)?;
    let dx = step.rows(0, n).into_owned();
    if !dx.iter().all(|v| v.is_finite()) {
        return None;
    }
    let dnu = step.rows(n, na).into_owned();
    Some((dx, dnu))
}

/// Nonnegative least-squares multiplier fit over the near-active rows:
/// returns per-row multipliers (zero off the active set) and the infinity
/// norm of `obj_grad + grads^T nu`. Active-set pruning: fit, drop the most
/// negative multiplier, repeat.
pub(crate) fn fit_multipliers(
    grads: &DMatrix<f64>,
    values: &[f64],
    obj_grad: &DVector<f64>,
    active_tol: f64,
) -> (Vec<f64>, f64) {
    let n = obj_grad.len();
    let m = values.len();
    let mut active: Vec<usize> = (0..m).filter(|&i| values[i] >= -active_tol).collect();
    let mut nu = vec![0.0; m];
    loop {
        if active.is_empty() {
            break;
        }
        let mut a = DMatrix::zeros(n, active.len());
        for (col, &i) in active.iter().enumerate() {
            for j in 0..n {
                a[(j, col)] = grads[(i, j)];
            }
        }
        let rhs = -obj_grad;
        let svd = a.svd(true, true);
        let fit = svd
            .solve(&rhs, 1e-13)
            .unwrap_or_else(|_| DVector::zeros(active.len()));
        let (worst_col, worst_val) =
            fit.iter()
                .enumerate()
                .fold(
                    (usize::MAX, 0.0_f64),
                    |acc, (c, &v)| if v < acc.1 { (c, v) } else { acc },
                );
        if worst_col == usize::MAX || worst_val >= -1e-12 {
            for (col, &i) in active.iter().enumerate() {
                nu[i] = fit[col].max(0.0);
            }
            break;
        }
        active.remove(worst_col);
    }
    let mut res = obj_grad.clone();
    for (i, &multiplier) in nu.iter().enumerate() {
        if multiplier == 0.0 {
            continue;
        }
        for j in 0..n {
            res[j] += multiplier * grads[(i, j)];
        }
    }
    (nu, res.amax())
}

/// Multiplier estimates and row data shared with the independent KKT check.
pub(crate) struct RowSnapshot {
    pub kinds: Vec<RowKind>,
    pub values: Vec<f64>,
    pub grads: DMatrix<f64>,
    pub obj_grad: DVector<f64>,
}

pub(crate) fn snapshot(spec: &SubproblemSpec, point: &DecisionPoint) -> RowSnapshot {
    let geom = Geometry::new(spec);
    let x = geom.scaled_from_point(point);
    RowSnapshot {
        kinds: geom.rows.clone(),
        values: geom.row_values(&x),
        grads: geom.row_grads(&x),
        obj_grad: geom.objective_grad(&x),
    }
}
