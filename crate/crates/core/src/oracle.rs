//! Exhaustive-search oracle over the exact nonlinear model, for validating
//! the iterative solver. Users decouple once their offload times are fixed,
//! so the search grids each user over (time, transmission energy), solves the
//! frequency axis per cell (exactly by default, or on a grid), and combines
//! users with a dynamic program over the shared time lattice.

use crate::error::{Error, Result};
use crate::model::{secrecy_bits, DecisionPoint, SystemParams, UserDecision, UserParams};

/// Search resolution. Time and transmission-energy axes are uniform lattices;
/// the frequency axis is solved exactly per cell unless `freq_steps` forces a
/// plain grid there too.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleGrid {
    pub time_steps: usize,
    pub energy_steps: usize,
    pub freq_steps: Option<usize>,
}

impl OracleGrid {
    pub fn uniform(steps: usize) -> Self {
        OracleGrid {
            time_steps: steps,
            energy_steps: steps,
            freq_steps: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.time_steps < 2 || self.energy_steps < 2 || self.freq_steps.is_some_and(|n| n < 2) {
            return Err(Error::domain(
                "OracleGrid",
                "each axis needs at least 2 steps",
            ));
        }
        if self.time_steps > 20_000 || self.energy_steps > 20_000 {
            return Err(Error::domain(
                "OracleGrid",
                "grid sizes are bounded at 20000 steps",
            ));
        }
        Ok(())
    }
}

/// Best feasible point found by the search.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Weighted total efficiency at the argmax.
    pub efficiency: f64,
    pub point: DecisionPoint,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    efficiency: f64,
    cpu_hz: f64,
    tx_energy: f64,
}

/// Best allocation for one user at a fixed offload time, searched over the
/// transmission-energy lattice with the frequency axis solved per cell.
fn best_cell_at_time(
    user: &UserParams,
    params: &SystemParams,
    t: f64,
    grid: &OracleGrid,
) -> Option<Cell> {
    let mut best: Option<Cell> = None;
    let energy_points = if t == 0.0 { 0 } else { grid.energy_steps };
    for j in 0..=energy_points {
        let tx = user.energy_budget * j as f64 / grid.energy_steps as f64;
        let overhead = tx + params.circuit_power * t;
        if overhead > user.energy_budget {
            break;
        }
        let secure = secrecy_bits(t, tx, user, params.bandwidth).unwrap_or(0.0);
        let headroom = user.energy_budget - overhead;
        let f_needed =
            (user.cycles_per_bit * (user.task_bits - secure).max(0.0) / params.deadline).max(0.0);
        let f_energy_cap = (headroom / (user.cpu_energy_coeff * params.deadline)).cbrt();
        let f_hi = user.max_cpu_hz.min(f_energy_cap);
        if f_needed > f_hi * (1.0 + 1e-12) {
            continue;
        }
        let candidate = match grid.freq_steps {
            None => exact_frequency(user, params, secure, overhead, f_needed, f_hi),
            Some(nf) => {
                let mut inner: Option<Cell> = None;
                for i in 0..=nf {
                    let f = user.max_cpu_hz * i as f64 / nf as f64;
                    if f + 1e-9 < f_needed || f > f_hi * (1.0 + 1e-12) {
                        continue;
                    }
                    let cell = evaluate_cell(user, params, secure, overhead, f, tx);
                    if inner.is_none_or(|b| cell.efficiency > b.efficiency) {
                        inner = Some(cell);
                    }
                }
                inner.map(|mut c| {
                    c.tx_energy = tx;
                    c
                })
            }
        };
        let candidate = candidate.map(|mut c| {
            c.tx_energy = tx;
            c
        });
        if let Some(c) = candidate {
            if best.is_none_or(|b| c.efficiency > b.efficiency) {
                best = Some(c);
            }
        }
    }
    best
}

fn evaluate_cell(
    user: &UserParams,
    params: &SystemParams,
    secure_bits: f64,
    overhead: f64,
    f: f64,
    tx: f64,
) -> Cell {
    let bits = secure_bits + params.deadline * f / user.cycles_per_bit;
    let energy = overhead + user.cpu_energy_coeff * f.powi(3) * params.deadline;
    let efficiency = if energy > 0.0 {
        user.weight * bits / energy
    } else {
        0.0
    };
    Cell {
        efficiency,
        cpu_hz: f,
        tx_energy: tx,
    }
}

/// Exact 1-D maximization over the frequency for a fixed (t, tx) cell.
///
/// The efficiency ratio is unimodal in `f`: its stationarity condition
/// `(T/C)*E0 - 3*eps*T*A*f^2 - 2*eps*T^2/C*f^3 = 0` has a strictly
/// decreasing left side, so a bisection localizes the peak to machine
/// precision and the optimum is that root clamped into `[f_needed, f_hi]`.
fn exact_frequency(
    user: &UserParams,
    params: &SystemParams,
    secure_bits: f64,
    overhead: f64,
    f_needed: f64,
    f_hi: f64,
) -> Option<Cell> {
    let deadline = params.deadline;
    let eps = user.cpu_energy_coeff;
    let c = user.cycles_per_bit;
    let f_opt = if overhead == 0.0 {
        // No offload energy at all: efficiency decreases in f, so sit on the
        // bits requirement.
        f_needed
    } else {
        let g = |f: f64| {
            (deadline / c) * overhead
                - 3.0 * eps * deadline * secure_bits * f * f
                - 2.0 * eps * deadline * deadline / c * f * f * f
        };
        if g(f_hi) >= 0.0 {
            f_hi
        } else {
            let (mut lo, mut hi) = (0.0, f_hi);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g(mid) >= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        }
    };
    let f = f_opt.clamp(f_needed, f_hi);
    if !f.is_finite() {
        return None;
    }
    Some(evaluate_cell(user, params, secure_bits, overhead, f, 0.0))
}

/// Exhaustive search over the exact model. Returns the best feasible point.
pub fn brute_force_oracle(params: &SystemParams, grid: &OracleGrid) -> Result<OracleResult> {
    params.validate()?;
    grid.validate()?;
    let nt = grid.time_steps;
    let num = params.num_users();

    // Per-user best cell at each time-lattice index (None = infeasible).
    let mut tables: Vec<Vec<Option<Cell>>> = Vec::with_capacity(num);
    for (k, user) in params.users.iter().enumerate() {
        let mut table = Vec::with_capacity(nt + 1);
        for i in 0..=nt {
            let t = params.deadline * i as f64 / nt as f64;
            table.push(best_cell_at_time(user, params, t, grid));
        }
        if table.iter().all(|c| c.is_none()) {
            let achievable = crate::driver::max_achievable_bits(user, params);
            return Err(Error::InfeasibleInstance {
                user: k,
                required: user.task_bits,
                achievable,
            });
        }
        tables.push(table);
    }

    // Dynamic program over the shared time budget (in lattice units).
    // dp[b] = best weighted efficiency for the users handled so far with
    // total time index at most b.
    let mut dp = vec![f64::NEG_INFINITY; nt + 1];
    let mut choices: Vec<Vec<usize>> = Vec::with_capacity(num);
    for (i, cell) in tables[0].iter().enumerate() {
        if let Some(c) = cell {
            for slot in dp.iter_mut().skip(i) {
                if c.efficiency > *slot {
                    *slot = c.efficiency;
                }
            }
        }
    }
    let mut first_choice = vec![usize::MAX; nt + 1];
    {
        let mut best = f64::NEG_INFINITY;
        let mut best_i = usize::MAX;
        for i in 0..=nt {
            if let Some(c) = tables[0][i] {
                if c.efficiency > best {
                    best = c.efficiency;
                    best_i = i;
                }
            }
            first_choice[i] = best_i;
        }
    }
    choices.push(first_choice);

    for table in tables.iter().skip(1) {
        let mut next = vec![f64::NEG_INFINITY; nt + 1];
        let mut choice = vec![usize::MAX; nt + 1];
        for b in 0..=nt {
            for (i, cell) in table.iter().enumerate().take(b + 1) {
                let (Some(c), prev) = (cell, dp[b - i]) else {
                    continue;
                };
                if prev == f64::NEG_INFINITY {
                    continue;
                }
                let total = c.efficiency + prev;
                if total > next[b] {
                    next[b] = total;
                    choice[b] = i;
                }
            }
        }
        dp = next;
        choices.push(choice);
    }

    if dp[nt] == f64::NEG_INFINITY {
        // Every user is individually feasible but the shared deadline cannot
        // cover them jointly; blame the most time-hungry user.
        let (worst, user) = params
            .users
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.task_bits.total_cmp(&b.1.task_bits))
            .expect("at least one user");
        let achievable = crate::driver::max_achievable_bits(user, params);
        return Err(Error::InfeasibleInstance {
            user: worst,
            required: user.task_bits,
            achievable,
        });
    }

    // Walk the choices back to recover the argmax allocation.
    let mut indices = vec![0usize; num];
    let mut budget = nt;
    for k in (1..num).rev() {
        let i = choices[k][budget];
        indices[k] = i;
        budget -= i;
    }
    indices[0] = choices[0][budget];

    let mut users = Vec::with_capacity(num);
    for (k, user) in params.users.iter().enumerate() {
        let i = indices[k];
        let t = params.deadline * i as f64 / nt as f64;
        let cell = tables[k][i].expect("chosen cell must be feasible");
        let local = params.deadline * cell.cpu_hz / user.cycles_per_bit;
        users.push(UserDecision {
            offload_time: t,
            cpu_hz: cell.cpu_hz,
            offload_bits: (user.task_bits - local).clamp(0.0, user.task_bits),
            tx_energy: cell.tx_energy,
            legit_aux: user.uplink_gain * cell.tx_energy,
            eve_aux: user.eavesdropper_gain * cell.tx_energy,
        });
    }
    Ok(OracleResult {
        efficiency: dp[nt],
        point: DecisionPoint { users },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn one_user(task_bits: f64, uplink: f64, eve: f64) -> SystemParams {
        SystemParams {
            bandwidth: 200e3,
            deadline: 1.0,
            circuit_power: 0.1,
            users: vec![UserParams {
                weight: 1.0,
                task_bits,
                cycles_per_bit: 1000.0,
                cpu_energy_coeff: 1e-24,
                max_cpu_hz: 1e9,
                energy_budget: 1.0,
                uplink_gain: uplink,
                eavesdropper_gain: eve,
            }],
        }
    }

    #[test]
    fn offload_hostile_instance_recovers_local_only_optimum() {
        // G >= H: no secure bits, and the analytic optimum is f = C*L/T with
        // CE = L/(eps*f^3*T). The exact-frequency cell solve lands on it
        // regardless of the grid.
        let params = one_user(5e4, 1.0, 4.0);
        let result = brute_force_oracle(&params, &OracleGrid::uniform(40)).unwrap();
        assert_relative_eq!(result.efficiency, 4.0e5, max_relative = 1e-9);
        assert_relative_eq!(result.point.users[0].cpu_hz, 5e7, max_relative = 1e-9);
        assert_eq!(result.point.users[0].tx_energy, 0.0);
    }

    #[test]
    fn refining_the_grid_never_decreases_the_result() {
        let params = one_user(5e4, 7.0, 1.0);
        let mut last = f64::NEG_INFINITY;
        for steps in [20, 40, 80] {
            let grid = OracleGrid {
                time_steps: steps,
                energy_steps: steps,
                freq_steps: Some(steps),
            };
            let result = brute_force_oracle(&params, &grid).unwrap();
            assert!(
                result.efficiency >= last - 1e-9 * last.abs(),
                "refinement regressed: {last:.6e} -> {:.6e}",
                result.efficiency
            );
            last = result.efficiency;
        }
    }

    #[test]
    fn exact_frequency_dominates_frequency_grid() {
        let params = one_user(5e4, 7.0, 1.0);
        let gridded = brute_force_oracle(
            &params,
            &OracleGrid {
                time_steps: 50,
                energy_steps: 50,
                freq_steps: Some(50),
            },
        )
        .unwrap();
        let exact = brute_force_oracle(
            &params,
            &OracleGrid {
                time_steps: 50,
                energy_steps: 50,
                freq_steps: None,
            },
        )
        .unwrap();
        assert!(exact.efficiency >= gridded.efficiency - 1e-9);
    }

    #[test]
    fn degenerate_grids_rejected() {
        let params = one_user(5e4, 7.0, 1.0);
        let too_coarse = OracleGrid {
            time_steps: 1,
            energy_steps: 10,
            freq_steps: None,
        };
        assert!(brute_force_oracle(&params, &too_coarse).is_err());
        let too_fine = OracleGrid {
            time_steps: 50_000,
            energy_steps: 10,
            freq_steps: None,
        };
        assert!(brute_force_oracle(&params, &too_fine).is_err());
    }

    #[test]
    fn impossible_task_is_infeasible() {
        let params = one_user(5e7, 7.0, 1.0);
        let err = brute_force_oracle(&params, &OracleGrid::uniform(30)).unwrap_err();
        assert!(matches!(err, Error::InfeasibleInstance { user: 0, .. }));
    }

    #[test]
    fn argmax_point_reproduces_reported_efficiency() {
        let params = one_user(5e4, 7.0, 1.0);
        let result = brute_force_oracle(&params, &OracleGrid::uniform(60)).unwrap();
        let report = crate::model::ce_objective(&result.point, &params).unwrap();
        assert_relative_eq!(report.total, result.efficiency, max_relative = 1e-9);
        let violations = crate::model::check_feasibility(&result.point, &params, 1e-9).unwrap();
        assert!(violations.is_empty(), "{violations:?}");
    }

    #[test]
    fn two_user_time_split_respects_deadline() {
        let params = SystemParams {
            bandwidth: 200e3,
            deadline: 1.0,
            circuit_power: 0.1,
            users: vec![
                one_user(5e4, 7.0, 1.0).users.remove(0),
                one_user(5e4, 5.0, 1.0).users.remove(0),
            ],
        };
        let result = brute_force_oracle(&params, &OracleGrid::uniform(40)).unwrap();
        let total: f64 = result.point.users.iter().map(|u| u.offload_time).sum();
        assert!(total <= 1.0 + 1e-12);
        let report = crate::model::ce_objective(&result.point, &params).unwrap();
        assert_relative_eq!(report.total, result.efficiency, max_relative = 1e-9);
    }
}
