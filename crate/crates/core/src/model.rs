//! Physical system model: secrecy rate, local computing, energy accounting,
//! the computation-efficiency objective, and feasibility checking.
//!
//! All rates use the natural logarithm so the Taylor coefficients in the SCA
//! layer hold without conversion factors; "bits" are then nats-based units
//! applied consistently to task sizes and rates. Callers that want base-2
//! reporting scale the bandwidth by `1/ln 2` (see `SolveOptions::log2_rates`).

use crate::error::{Error, Result};
use crate::sca::entropy;

/// Per-user scenario description.
#[derive(Debug, Clone, PartialEq)]
pub struct UserParams {
    /// Objective weight (dimensionless).
    pub weight: f64,
    /// Task size to compute within the deadline (bits).
    pub task_bits: f64,
    /// CPU cycles needed per bit (cycles/bit).
    pub cycles_per_bit: f64,
    /// CPU energy coefficient (J*s^2/cycle^3).
    pub cpu_energy_coeff: f64,
    /// Maximum CPU frequency (Hz).
    pub max_cpu_hz: f64,
    /// Energy budget for the whole block (J).
    pub energy_budget: f64,
    /// Normalized uplink channel gain h^2/sigma^2 (1/W).
    pub uplink_gain: f64,
    /// Normalized eavesdropper channel gain g^2/sigma_e^2 (1/W).
    pub eavesdropper_gain: f64,
}

impl UserParams {
    /// True when secure offloading can carry any bits at all.
    pub fn can_offload_securely(&self) -> bool {
        self.uplink_gain > self.eavesdropper_gain
    }

    pub fn validate(&self, user: usize) -> Result<()> {
        let fields = [
            ("weight", self.weight),
            ("task_bits", self.task_bits),
            ("cycles_per_bit", self.cycles_per_bit),
            ("cpu_energy_coeff", self.cpu_energy_coeff),
            ("max_cpu_hz", self.max_cpu_hz),
            ("energy_budget", self.energy_budget),
            ("uplink_gain", self.uplink_gain),
            ("eavesdropper_gain", self.eavesdropper_gain),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::domain(
                    "UserParams",
                    format!("user {user}: {name} = {value} is not finite"),
                ));
            }
        }
        if self.task_bits < 0.0 {
            return Err(Error::domain(
                "UserParams",
                format!("user {user}: task_bits < 0"),
            ));
        }
        for (name, value) in [
            ("weight", self.weight),
            ("cycles_per_bit", self.cycles_per_bit),
            ("cpu_energy_coeff", self.cpu_energy_coeff),
            ("max_cpu_hz", self.max_cpu_hz),
            ("energy_budget", self.energy_budget),
            ("uplink_gain", self.uplink_gain),
            ("eavesdropper_gain", self.eavesdropper_gain),
        ] {
            if value <= 0.0 {
                return Err(Error::domain(
                    "UserParams",
                    format!("user {user}: {name} = {value} must be strictly positive"),
                ));
            }
        }
        Ok(())
    }
}

/// Immutable scenario description shared by every solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Uplink bandwidth (Hz).
    pub bandwidth: f64,
    /// Shared deadline for offloading and local computing (s).
    pub deadline: f64,
    /// Constant circuit power drawn while transmitting (W).
    pub circuit_power: f64,
    /// Ordered users; index is the user id everywhere.
    pub users: Vec<UserParams>,
}

impl SystemParams {
    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return Err(Error::domain(
                "SystemParams",
                "bandwidth must be finite and > 0",
            ));
        }
        if !(self.deadline.is_finite() && self.deadline > 0.0) {
            return Err(Error::domain(
                "SystemParams",
                "deadline must be finite and > 0",
            ));
        }
        if !(self.circuit_power.is_finite() && self.circuit_power >= 0.0) {
            return Err(Error::domain(
                "SystemParams",
                "circuit_power must be finite and >= 0",
            ));
        }
        if self.users.is_empty() {
            return Err(Error::domain(
                "SystemParams",
                "at least one user is required",
            ));
        }
        for (k, u) in self.users.iter().enumerate() {
            u.validate(k)?;
        }
        Ok(())
    }

    /// Copy with the bandwidth multiplied by `scale` (used for base-2 rate reporting).
    pub fn with_bandwidth_scale(&self, scale: f64) -> SystemParams {
        let mut params = self.clone();
        params.bandwidth *= scale;
        params
    }
}

/// One user's slice of a candidate allocation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UserDecision {
    /// Offload transmission time t (s).
    pub offload_time: f64,
    /// Local CPU frequency f (Hz).
    pub cpu_hz: f64,
    /// Bits offloaded to the server m.
    pub offload_bits: f64,
    /// Transmission energy p*t (J).
    pub tx_energy: f64,
    /// Auxiliary legitimate-SNR*energy variable (upper-bounded by H*tx_energy).
    pub legit_aux: f64,
    /// Auxiliary eavesdropper-SNR*energy variable (lower-bounded by G*tx_energy).
    pub eve_aux: f64,
}

impl UserDecision {
    /// Transmit power p = tx_energy / offload_time, zero when idle.
    pub fn tx_power(&self) -> f64 {
        if self.offload_time > 0.0 {
            self.tx_energy / self.offload_time
        } else {
            0.0
        }
    }
}

/// A full candidate allocation, one entry per user.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DecisionPoint {
    pub users: Vec<UserDecision>,
}

impl DecisionPoint {
    pub fn zeros(num_users: usize) -> Self {
        DecisionPoint {
            users: vec![UserDecision::default(); num_users],
        }
    }

    pub fn total_offload_time(&self) -> f64 {
        self.users.iter().map(|u| u.offload_time).sum()
    }
}

/// Energy split for one user (or the aggregate over all users).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown {
    /// Transmission energy p*t (J).
    pub offload_tx: f64,
    /// Circuit energy p_r*t during transmission (J).
    pub offload_circuit: f64,
    /// CPU energy eps*f^3*T (J).
    pub local: f64,
    /// Sum of the three parts (J).
    pub total: f64,
}

impl EnergyBreakdown {
    fn add(&mut self, other: &EnergyBreakdown) {
        self.offload_tx += other.offload_tx;
        self.offload_circuit += other.offload_circuit;
        self.local += other.local;
        self.total += other.total;
    }
}

/// Securely offloaded bits over a transmission of `t` seconds with energy `tx_energy`:
/// `B * [f(H*e, t) - f(G*e, t)]+` where `f(x, y) = y*ln(1 + x/y)`.
///
/// Zero when the slot or the energy is zero, and never negative: a user whose
/// eavesdropper channel dominates gets no secure bits, not a debt.
pub fn secrecy_bits(t: f64, tx_energy: f64, user: &UserParams, bandwidth: f64) -> Result<f64> {
    for (name, v) in [("t", t), ("tx_energy", tx_energy), ("bandwidth", bandwidth)] {
        if !v.is_finite() {
            return Err(Error::domain(
                "secrecy_bits",
                format!("{name} = {v} is not finite"),
            ));
        }
        if v < 0.0 {
            return Err(Error::domain(
                "secrecy_bits",
                format!("{name} = {v} must be >= 0"),
            ));
        }
    }
    if t == 0.0 || tx_energy == 0.0 {
        return Ok(0.0);
    }
    let legit = entropy(user.uplink_gain * tx_energy, t)?;
    let eve = entropy(user.eavesdropper_gain * tx_energy, t)?;
    Ok((bandwidth * (legit - eve)).max(0.0))
}

/// Bits computed locally at frequency `f` over the whole block: `T*f/C`.
pub fn local_bits(f: f64, deadline: f64, cycles_per_bit: f64) -> Result<f64> {
    if !(f.is_finite() && f >= 0.0) {
        return Err(Error::domain(
            "local_bits",
            format!("f = {f} must be finite and >= 0"),
        ));
    }
    if !(cycles_per_bit.is_finite() && cycles_per_bit > 0.0) {
        return Err(Error::domain("local_bits", "cycles_per_bit must be > 0"));
    }
    if !(deadline.is_finite() && deadline > 0.0) {
        return Err(Error::domain("local_bits", "deadline must be > 0"));
    }
    Ok(deadline * f / cycles_per_bit)
}

/// Energy split for a single user's decision.
pub fn user_energy(
    dec: &UserDecision,
    user: &UserParams,
    params: &SystemParams,
) -> EnergyBreakdown {
    let offload_tx = dec.tx_energy;
    let offload_circuit = params.circuit_power * dec.offload_time;
    let local = user.cpu_energy_coeff * dec.cpu_hz.powi(3) * params.deadline;
    EnergyBreakdown {
        offload_tx,
        offload_circuit,
        local,
        total: offload_tx + offload_circuit + local,
    }
}

/// Aggregate energy split over all users.
pub fn total_energy(point: &DecisionPoint, params: &SystemParams) -> EnergyBreakdown {
    let mut acc = EnergyBreakdown::default();
    for (dec, user) in point.users.iter().zip(&params.users) {
        acc.add(&user_energy(dec, user, params));
    }
    acc
}

/// One user's contribution to the efficiency objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserEfficiency {
    /// Secure offloaded bits plus local bits.
    pub bits: f64,
    /// Total energy spent (J).
    pub energy: f64,
    /// bits/energy, with 0/0 defined as 0 (an idle user contributes nothing).
    pub efficiency: f64,
}

/// Weighted-sum computation efficiency and the per-user terms behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyReport {
    /// `sum_k w_k * bits_k / energy_k` (bits/J).
    pub total: f64,
    pub per_user: Vec<UserEfficiency>,
}

/// The objective of the whole problem: weighted sum over users of
/// (secure offloaded bits + local bits) / total energy.
pub fn ce_objective(point: &DecisionPoint, params: &SystemParams) -> Result<EfficiencyReport> {
    let mut per_user = Vec::with_capacity(params.users.len());
    let mut total = 0.0;
    for (k, (dec, user)) in point.users.iter().zip(&params.users).enumerate() {
        let bits = secrecy_bits(dec.offload_time, dec.tx_energy, user, params.bandwidth)?
            + local_bits(dec.cpu_hz, params.deadline, user.cycles_per_bit)?;
        let energy = user_energy(dec, user, params).total;
        let efficiency = if energy > 0.0 {
            bits / energy
        } else if bits == 0.0 {
            0.0
        } else {
            return Err(Error::Inconsistent { user: k, bits });
        };
        total += user.weight * efficiency;
        per_user.push(UserEfficiency {
            bits,
            energy,
            efficiency,
        });
    }
    Ok(EfficiencyReport { total, per_user })
}

/// Constraint families of the original problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    /// Sum of offload times within the deadline.
    TimeBudget,
    /// Secure rate times time covers the offloaded bits.
    SecrecyCapacity,
    /// Offloaded bits between `L - T*f_max/C` and `L`.
    OffloadSplit,
    /// Per-user energy within budget.
    EnergyBudget,
    /// Variable bounds (nonnegativity, `f <= f_max`).
    Bounds,
}

impl std::fmt::Display for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Constraint::TimeBudget => "time budget",
            Constraint::SecrecyCapacity => "secrecy capacity",
            Constraint::OffloadSplit => "offload split",
            Constraint::EnergyBudget => "energy budget",
            Constraint::Bounds => "bounds",
        };
        f.write_str(s)
    }
}

/// One constraint violation; `amount` is the relative overshoot.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub constraint: Constraint,
    /// Violating user, `None` for the shared time budget.
    pub user: Option<usize>,
    /// Relative violation magnitude (already normalized by the constraint scale).
    pub amount: f64,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.user {
            Some(k) => write!(
                f,
                "{} violated by user {} (rel. {:.3e})",
                self.constraint, k, self.amount
            ),
            None => write!(f, "{} violated (rel. {:.3e})", self.constraint, self.amount),
        }
    }
}

/// Evaluates every constraint of the original problem at `point`.
///
/// Violations are data, not errors: the returned list is empty iff the point
/// is feasible within the relative tolerance `tol`.
pub fn check_feasibility(
    point: &DecisionPoint,
    params: &SystemParams,
    tol: f64,
) -> Result<Vec<Violation>> {
    let mut violations = Vec::new();
    let t_sum = point.total_offload_time();
    let rel = (t_sum - params.deadline) / params.deadline;
    if rel > tol {
        violations.push(Violation {
            constraint: Constraint::TimeBudget,
            user: None,
            amount: rel,
        });
    }
    for (k, (dec, user)) in point.users.iter().zip(&params.users).enumerate() {
        let cap = secrecy_bits(dec.offload_time, dec.tx_energy, user, params.bandwidth)?;
        let bits_scale = 1.0 + user.task_bits;
        let rel = (dec.offload_bits - cap) / bits_scale;
        if rel > tol {
            violations.push(Violation {
                constraint: Constraint::SecrecyCapacity,
                user: Some(k),
                amount: rel,
            });
        }

        let local_max = local_bits(user.max_cpu_hz, params.deadline, user.cycles_per_bit)?;
        let m_lower = user.task_bits - local_max;
        let below = (m_lower - dec.offload_bits) / bits_scale;
        let above = (dec.offload_bits - user.task_bits) / bits_scale;
        let split = below.max(above);
        if split > tol {
            violations.push(Violation {
                constraint: Constraint::OffloadSplit,
                user: Some(k),
                amount: split,
            });
        }

        let energy = user_energy(dec, user, params).total;
        let rel = (energy - user.energy_budget) / user.energy_budget;
        if rel > tol {
            violations.push(Violation {
                constraint: Constraint::EnergyBudget,
                user: Some(k),
                amount: rel,
            });
        }

        let mut bound = (-dec.offload_time / params.deadline)
            .max(-dec.cpu_hz / user.max_cpu_hz)
            .max((dec.cpu_hz - user.max_cpu_hz) / user.max_cpu_hz)
            .max(-dec.tx_energy / user.energy_budget);
        bound = bound
            .max(-dec.offload_bits / bits_scale)
            .max(-dec.legit_aux / bits_scale.max(1.0))
            .max(-dec.eve_aux / bits_scale.max(1.0));
        if bound > tol {
            violations.push(Violation {
                constraint: Constraint::Bounds,
                user: Some(k),
                amount: bound,
            });
        }
    }
    Ok(violations)
}

/// Offloaded bits implied by a frequency choice: whatever local computing
/// cannot finish, clamped into the valid split range.
pub fn implied_offload_bits(cpu_hz: f64, user: &UserParams, deadline: f64) -> f64 {
    let local = deadline * cpu_hz / user.cycles_per_bit;
    (user.task_bits - local).clamp(0.0, user.task_bits)
}

/// Rounds fractional offload splits to whole bits, keeping feasibility
/// (rounds down, the remainder is computed locally). Post-processing only;
/// the optimum itself treats bits as continuous.
pub fn round_offload_bits(point: &mut DecisionPoint) {
    for dec in &mut point.users {
        dec.offload_bits = dec.offload_bits.floor();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn test_user() -> UserParams {
        UserParams {
            weight: 1.0,
            task_bits: 5e4,
            cycles_per_bit: 1000.0,
            cpu_energy_coeff: 1e-24,
            max_cpu_hz: 1e9,
            energy_budget: 1.0,
            uplink_gain: 7.0,
            eavesdropper_gain: 1.0,
        }
    }

    fn test_params(users: Vec<UserParams>) -> SystemParams {
        SystemParams {
            bandwidth: 200e3,
            deadline: 1.0,
            circuit_power: 0.1,
            users,
        }
    }

    #[test]
    fn secrecy_bits_hand_value() {
        // ln 8 - ln 2 = ln 4
        let u = UserParams {
            uplink_gain: 7.0,
            eavesdropper_gain: 1.0,
            ..test_user()
        };
        let bits = secrecy_bits(1.0, 1.0, &u, 1.0).unwrap();
        assert_relative_eq!(bits, 4.0_f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn secrecy_bits_identical_channels() {
        let u = UserParams {
            uplink_gain: 2.0,
            eavesdropper_gain: 2.0,
            ..test_user()
        };
        assert_eq!(secrecy_bits(1.0, 5.0, &u, 200e3).unwrap(), 0.0);
    }

    #[test]
    fn secrecy_bits_zero_time() {
        let u = test_user();
        assert_eq!(secrecy_bits(0.0, 3.0, &u, 200e3).unwrap(), 0.0);
    }

    #[test]
    fn secrecy_bits_rejects_non_finite() {
        let u = test_user();
        assert!(secrecy_bits(f64::NAN, 1.0, &u, 1.0).is_err());
        assert!(secrecy_bits(1.0, f64::INFINITY, &u, 1.0).is_err());
        assert!(secrecy_bits(-1.0, 1.0, &u, 1.0).is_err());
    }

    #[test]
    fn secrecy_bits_clamps_hostile_channel() {
        let u = UserParams {
            uplink_gain: 1.0,
            eavesdropper_gain: 4.0,
            ..test_user()
        };
        for (t, e) in [(0.5, 0.1), (1.0, 1.0), (0.01, 2.0)] {
            assert_eq!(secrecy_bits(t, e, &u, 200e3).unwrap(), 0.0);
        }
    }

    #[test]
    fn secrecy_bits_linear_in_joint_scaling() {
        // With the power p = e/t fixed, bits are rate*time: scaling (t, e)
        // jointly by c scales the result by c.
        let u = test_user();
        let base = secrecy_bits(0.3, 0.7, &u, 200e3).unwrap();
        for c in [0.25, 2.0, 13.0] {
            let scaled = secrecy_bits(c * 0.3, c * 0.7, &u, 200e3).unwrap();
            assert_relative_eq!(scaled, c * base, max_relative = 1e-12);
        }
    }

    #[test]
    fn local_bits_values() {
        assert_relative_eq!(local_bits(5e7, 1.0, 1000.0).unwrap(), 5e4);
        assert_eq!(local_bits(0.0, 1.0, 1000.0).unwrap(), 0.0);
        assert_relative_eq!(local_bits(1e9, 1.0, 1000.0).unwrap(), 1e6);
        assert!(local_bits(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn energy_breakdown_local_only() {
        let params = test_params(vec![test_user()]);
        let mut point = DecisionPoint::zeros(1);
        point.users[0].cpu_hz = 5e7;
        let e = total_energy(&point, &params);
        assert_relative_eq!(e.local, 0.125, max_relative = 1e-12);
        assert_relative_eq!(e.total, 0.125, max_relative = 1e-12);
        assert_eq!(e.offload_tx, 0.0);
        assert_eq!(e.offload_circuit, 0.0);
    }

    #[test]
    fn energy_breakdown_zero_point() {
        let params = test_params(vec![test_user()]);
        let point = DecisionPoint::zeros(1);
        assert_eq!(total_energy(&point, &params).total, 0.0);
    }

    #[test]
    fn energy_breakdown_offload_only() {
        let params = test_params(vec![test_user()]);
        let mut point = DecisionPoint::zeros(1);
        point.users[0].tx_energy = 0.2;
        point.users[0].offload_time = 0.5;
        let e = total_energy(&point, &params);
        assert_relative_eq!(e.total, 0.25, max_relative = 1e-12);
        assert_relative_eq!(e.offload_circuit, 0.05, max_relative = 1e-12);
    }

    #[test]
    fn energy_monotone_in_each_variable() {
        let params = test_params(vec![test_user()]);
        let mut base = DecisionPoint::zeros(1);
        base.users[0] = UserDecision {
            offload_time: 0.2,
            cpu_hz: 1e7,
            tx_energy: 0.1,
            ..Default::default()
        };
        let e0 = total_energy(&base, &params).total;
        for bump in [
            |d: &mut UserDecision| d.offload_time += 0.1,
            |d: &mut UserDecision| d.cpu_hz += 1e7,
            |d: &mut UserDecision| d.tx_energy += 0.1,
        ] {
            let mut p = base.clone();
            bump(&mut p.users[0]);
            assert!(total_energy(&p, &params).total >= e0);
        }
    }

    #[test]
    fn ce_local_only_user() {
        let params = test_params(vec![test_user()]);
        let mut point = DecisionPoint::zeros(1);
        point.users[0].cpu_hz = 5e7;
        let report = ce_objective(&point, &params).unwrap();
        assert_relative_eq!(report.total, 4.0e5, max_relative = 1e-12);
        assert_relative_eq!(report.per_user[0].bits, 5e4, max_relative = 1e-12);
    }

    #[test]
    fn ce_zero_point_is_zero() {
        let params = test_params(vec![test_user()]);
        let point = DecisionPoint::zeros(1);
        assert_eq!(ce_objective(&point, &params).unwrap().total, 0.0);
    }

    #[test]
    fn ce_additive_over_identical_users() {
        let params = test_params(vec![test_user(), test_user()]);
        let mut point = DecisionPoint::zeros(2);
        point.users[0].cpu_hz = 5e7;
        point.users[1].cpu_hz = 5e7;
        let report = ce_objective(&point, &params).unwrap();
        assert_relative_eq!(report.total, 8.0e5, max_relative = 1e-12);
    }

    #[test]
    fn ce_permutation_invariant() {
        let a = UserParams {
            task_bits: 3e4,
            ..test_user()
        };
        let b = UserParams {
            task_bits: 7e4,
            uplink_gain: 5.0,
            ..test_user()
        };
        let da = UserDecision {
            offload_time: 0.3,
            cpu_hz: 2e7,
            tx_energy: 0.2,
            ..Default::default()
        };
        let db = UserDecision {
            offload_time: 0.4,
            cpu_hz: 6e7,
            tx_energy: 0.1,
            ..Default::default()
        };

        let p1 = test_params(vec![a.clone(), b.clone()]);
        let p2 = test_params(vec![b, a]);
        let r1 = ce_objective(
            &DecisionPoint {
                users: vec![da, db],
            },
            &p1,
        )
        .unwrap();
        let r2 = ce_objective(
            &DecisionPoint {
                users: vec![db, da],
            },
            &p2,
        )
        .unwrap();
        assert_relative_eq!(r1.total, r2.total, max_relative = 1e-12);
    }

    #[test]
    fn ce_bounded_by_eavesdropper_free_rate() {
        // Dropping the eavesdropper term can only increase the bit count.
        let params = test_params(vec![test_user()]);
        let dec = UserDecision {
            offload_time: 0.4,
            cpu_hz: 3e7,
            tx_energy: 0.3,
            ..Default::default()
        };
        let point = DecisionPoint { users: vec![dec] };
        let report = ce_objective(&point, &params).unwrap();

        let u = &params.users[0];
        let upper_bits = params.bandwidth
            * entropy(u.uplink_gain * dec.tx_energy, dec.offload_time).unwrap()
            + local_bits(dec.cpu_hz, params.deadline, u.cycles_per_bit).unwrap();
        let energy = user_energy(&dec, u, &params).total;
        assert!(report.total <= u.weight * upper_bits / energy + 1e-12);
    }

    #[test]
    fn feasibility_local_only_point_passes() {
        let params = test_params(vec![test_user()]);
        let mut point = DecisionPoint::zeros(1);
        point.users[0].cpu_hz = 5e7;
        // m = 0 is allowed because L - T*f_max/C = 5e4 - 1e6 < 0.
        let violations = check_feasibility(&point, &params, 1e-9).unwrap();
        assert!(violations.is_empty(), "unexpected: {violations:?}");
    }

    #[test]
    fn feasibility_flags_time_budget() {
        let params = test_params(vec![test_user(), test_user()]);
        let mut point = DecisionPoint::zeros(2);
        point.users[0].offload_time = 0.8;
        point.users[1].offload_time = 0.7;
        let violations = check_feasibility(&point, &params, 1e-9).unwrap();
        assert!(violations
            .iter()
            .any(|v| v.constraint == Constraint::TimeBudget));
    }

    #[test]
    fn feasibility_flags_frequency_bound() {
        let params = test_params(vec![test_user()]);
        let mut point = DecisionPoint::zeros(1);
        point.users[0].cpu_hz = 2e9;
        let violations = check_feasibility(&point, &params, 1e-9).unwrap();
        assert!(violations
            .iter()
            .any(|v| v.constraint == Constraint::Bounds));
    }

    #[test]
    fn feasibility_flags_capacity_shortfall() {
        let params = test_params(vec![test_user()]);
        let mut point = DecisionPoint::zeros(1);
        point.users[0].offload_bits = 1e4; // no transmission at all
        point.users[0].cpu_hz = 5e7;
        let violations = check_feasibility(&point, &params, 1e-9).unwrap();
        assert!(violations
            .iter()
            .any(|v| v.constraint == Constraint::SecrecyCapacity));
    }

    #[test]
    fn inconsistent_energy_is_an_error() {
        // Positive bits with exactly zero energy cannot happen through
        // validated parameters; forcing eps = 0 must surface as an error,
        // not as an infinite ratio.
        let mut user = test_user();
        user.cpu_energy_coeff = 0.0;
        let params = test_params(vec![user]);
        let mut point = DecisionPoint::zeros(1);
        point.users[0].cpu_hz = 1e3;
        let err = ce_objective(&point, &params).unwrap_err();
        assert!(matches!(
            err,
            crate::error::Error::Inconsistent { user: 0, .. }
        ));

        // Tiny but nonzero energy stays a plain ratio.
        let mut user = test_user();
        user.cpu_energy_coeff = f64::MIN_POSITIVE;
        let params = test_params(vec![user]);
        assert!(ce_objective(&point, &params).is_ok());
    }
}
