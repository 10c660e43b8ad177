//! Experiment execution: expands a config into solver tasks, runs them (on a
//! worker pool when the `parallel` feature is on), and flattens the outcomes
//! into result rows in deterministic input order.

use crate::driver::{baseline_local_only, baseline_offload_only, run_solver, Termination};
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::options::SolveOptions;

use super::config::{ExperimentConfig, Scenario};
use super::sample_channels;

/// One output row; the CSV layer serializes these verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: &'static str,
    /// Task size at this sweep point (bits).
    pub task_bits: f64,
    /// Eavesdropper-gain multiplier at this sweep point.
    pub g_scale: f64,
    pub scheme: &'static str,
    /// 1-based user id.
    pub user: usize,
    /// Outer iteration for convergence traces, final count otherwise.
    pub iter: usize,
    pub offload_time_s: f64,
    pub cpu_hz: f64,
    pub tx_power_w: f64,
    /// Weighted total efficiency of the whole allocation (bits/J).
    pub efficiency: f64,
    pub outer_iters: usize,
    pub termination: String,
}

/// True when this row reports a failed solve.
pub fn is_error_termination(termination: &str) -> bool {
    termination != Termination::ResidualConverged.to_string()
}

struct Task {
    scheme: &'static str,
    task_bits: f64,
    g_scale: f64,
    params: SystemParams,
}

fn scenario_tasks(config: &ExperimentConfig) -> Vec<Task> {
    let channels = sample_channels(config, config.seed.unwrap_or(0));
    let mut base = config.system_params();
    for (user, &(h, g)) in base.users.iter_mut().zip(&channels) {
        user.uplink_gain = h;
        user.eavesdropper_gain = g;
    }
    let with = |task_bits: Option<f64>, g_scale: f64| -> SystemParams {
        let mut params = base.clone();
        for user in &mut params.users {
            if let Some(l) = task_bits {
                user.task_bits = l;
            }
            user.eavesdropper_gain *= g_scale;
        }
        params
    };
    match config.scenario {
        Scenario::SingleRun | Scenario::Convergence => {
            vec![Task {
                scheme: "joint",
                task_bits: f64::NAN,
                g_scale: 1.0,
                params: with(None, 1.0),
            }]
        }
        Scenario::CeVsBits => {
            let mut tasks = Vec::new();
            for &g_scale in &config.sweep.g_scale {
                for &l in &config.sweep.task_bits {
                    tasks.push(Task {
                        scheme: "joint",
                        task_bits: l,
                        g_scale,
                        params: with(Some(l), g_scale),
                    });
                }
            }
            tasks
        }
        Scenario::SchemeCompare => {
            let g_scale = config.sweep.g_scale[0];
            let mut tasks = Vec::new();
            for &l in &config.sweep.task_bits {
                for scheme in ["joint", "local_only", "offload_only"] {
                    tasks.push(Task {
                        scheme,
                        task_bits: l,
                        g_scale,
                        params: with(Some(l), g_scale),
                    });
                }
            }
            tasks
        }
    }
}

fn run_task(task: &Task, scenario: &'static str, options: &SolveOptions) -> Vec<ResultRow> {
    let row =
        |user: usize, iter: usize, t: f64, f: f64, p: f64, ce: f64, outer: usize, term: String| {
            ResultRow {
                scenario,
                task_bits: if task.task_bits.is_nan() {
                    task.params.users[user - 1].task_bits
                } else {
                    task.task_bits
                },
                g_scale: task.g_scale,
                scheme: task.scheme,
                user,
                iter,
                offload_time_s: t,
                cpu_hz: f,
                tx_power_w: p,
                efficiency: ce,
                outer_iters: outer,
                termination: term,
            }
        };
    let error_rows = |err: &Error| -> Vec<ResultRow> {
        let term = match err {
            Error::InfeasibleInstance { .. } | Error::SubproblemInfeasible { .. } => {
                Termination::Infeasible.to_string()
            }
            _ => format!("Error({err})"),
        };
        (1..=task.params.num_users())
            .map(|k| row(k, 0, 0.0, 0.0, 0.0, 0.0, 0, term.clone()))
            .collect()
    };

    match task.scheme {
        "local_only" => match baseline_local_only(&task.params) {
            Ok(report) => report
                .per_user
                .iter()
                .enumerate()
                .map(|(k, user)| {
                    let term = if user.feasible {
                        Termination::ResidualConverged.to_string()
                    } else {
                        Termination::Infeasible.to_string()
                    };
                    row(
                        k + 1,
                        0,
                        0.0,
                        user.cpu_hz,
                        0.0,
                        report.total.unwrap_or(0.0),
                        0,
                        term,
                    )
                })
                .collect(),
            Err(err) => error_rows(&err),
        },
        "offload_only" => match baseline_offload_only(&task.params, options) {
            Ok(report) => report
                .per_user
                .iter()
                .enumerate()
                .map(|(k, user)| {
                    row(
                        k + 1,
                        report.outer_iterations,
                        user.offload_time,
                        user.cpu_hz,
                        user.tx_power,
                        report.final_ce,
                        report.outer_iterations,
                        report.termination.to_string(),
                    )
                })
                .collect(),
            Err(err) => error_rows(&err),
        },
        _ => match run_solver(&task.params, options) {
            Ok(report) => {
                if scenario == "convergence" {
                    let mut rows = Vec::new();
                    for record in &report.outer_trace {
                        for k in 0..task.params.num_users() {
                            let t = record.offload_times[k];
                            let f = record.cpu_hzs[k];
                            let tx = record.tx_energies[k];
                            let p = if t > 0.0 { tx / t } else { 0.0 };
                            rows.push(row(
                                k + 1,
                                record.iteration,
                                t,
                                f,
                                p,
                                report.final_ce,
                                report.outer_iterations,
                                report.termination.to_string(),
                            ));
                        }
                    }
                    rows
                } else {
                    report
                        .per_user
                        .iter()
                        .enumerate()
                        .map(|(k, user)| {
                            row(
                                k + 1,
                                report.outer_iterations,
                                user.offload_time,
                                user.cpu_hz,
                                user.tx_power,
                                report.final_ce,
                                report.outer_iterations,
                                report.termination.to_string(),
                            )
                        })
                        .collect()
                }
            }
            Err(err) => error_rows(&err),
        },
    }
}

/// Expands the config and runs every task, keeping rows in input order.
/// Solver failures become rows with error terminations; the sweep continues.
pub fn run_experiment(config: &ExperimentConfig, options: &SolveOptions) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let scenario = config.scenario.id();
    let tasks = scenario_tasks(config);

    #[cfg(feature = "parallel")]
    let per_task: Vec<Vec<ResultRow>> = {
        use rayon::prelude::*;
        tasks
            .par_iter()
            .map(|task| run_task(task, scenario, options))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_task: Vec<Vec<ResultRow>> = tasks
        .iter()
        .map(|task| run_task(task, scenario, options))
        .collect();

    Ok(per_task.into_iter().flatten().collect())
}
