//! Experiment CLI: single solves, scenario sweeps, and the brute-force
//! search, all driven by a JSON config.
//!
//! Exit codes: 0 = success, 1 = at least one row carries a failed solve,
//! 2 = configuration or I/O error.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cemax_core::driver::run_solver;
use cemax_core::experiment::{
    is_error_termination, render_csv, run_experiment, write_csv, ExperimentConfig, Scenario,
};
use cemax_core::options::SolveOptions;
use cemax_core::oracle::{brute_force_oracle, OracleGrid};

#[derive(Parser)]
#[command(
    name = "cemax",
    version,
    about = "Secure computation-efficiency maximization for MEC offloading"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Path to the JSON experiment config.
    config: String,
    /// Override the config's random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write CSV here instead of the config's `output` path (or stdout).
    #[arg(long)]
    out: Option<String>,
    /// Use `lambda*E - 1` for the second residual block instead of `lambda*E - w`.
    #[arg(long = "strict-paper-T")]
    strict_paper_t: bool,
    /// Keep the legitimate entropy term concave in the subproblem.
    #[arg(long = "cccp-faithful")]
    cccp_faithful: bool,
    /// Report rates in base-2 bits instead of nats-based units.
    #[arg(long = "log2-rates")]
    log2_rates: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured instance once and print the allocation.
    Solve(CommonArgs),
    /// Run the config's scenario sweep and emit CSV.
    Sweep(CommonArgs),
    /// Exhaustive grid search on the configured instance.
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
        /// Steps per search axis.
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
}

fn load(common: &CommonArgs) -> Result<(ExperimentConfig, SolveOptions), String> {
    let mut config = ExperimentConfig::load(&common.config).map_err(|e| e.to_string())?;
    if let Some(seed) = common.seed {
        config.seed = Some(seed);
    }
    if let Some(out) = &common.out {
        config.output = Some(out.clone());
    }
    let options = SolveOptions {
        strict_paper_t: common.strict_paper_t,
        cccp_faithful: common.cccp_faithful,
        log2_rates: common.log2_rates,
        ..Default::default()
    };
    Ok((config, options))
}

fn emit(
    config: &ExperimentConfig,
    rows: &[cemax_core::experiment::ResultRow],
) -> Result<(), String> {
    match &config.output {
        Some(path) => {
            write_csv(rows, path).map_err(|e| e.to_string())?;
            eprintln!("wrote {} rows to {path}", rows.len());
        }
        None => print!("{}", render_csv(rows).map_err(|e| e.to_string())?),
    }
    Ok(())
}

fn instance_params(config: &ExperimentConfig) -> cemax_core::model::SystemParams {
    let channels = cemax_core::experiment::sample_channels(config, config.seed.unwrap_or(0));
    let mut params = config.system_params();
    for (user, (h, g)) in params.users.iter_mut().zip(channels) {
        user.uplink_gain = h;
        user.eavesdropper_gain = g;
    }
    params
}

fn cmd_solve(common: &CommonArgs) -> Result<bool, String> {
    let (mut config, options) = load(common)?;
    config.scenario = Scenario::SingleRun;
    let params = instance_params(&config);
    match run_solver(&params, &options) {
        Ok(report) => {
            println!("termination: {}", report.termination);
            println!("outer iterations: {}", report.outer_iterations);
            println!("total efficiency: {:.6e} bits/J", report.final_ce);
            for (k, user) in report.per_user.iter().enumerate() {
                println!(
                    "user {}: t = {:.6e} s, f = {:.6e} Hz, p = {:.6e} W, m = {:.6e} bits, ce = {:.6e}",
                    k + 1,
                    user.offload_time,
                    user.cpu_hz,
                    user.tx_power,
                    user.offload_bits,
                    user.efficiency
                );
            }
            let rows = run_experiment(&config, &options).map_err(|e| e.to_string())?;
            if config.output.is_some() {
                emit(&config, &rows)?;
            }
            Ok(rows.iter().all(|r| !is_error_termination(&r.termination)))
        }
        Err(e) => {
            eprintln!("solve failed: {e}");
            Ok(false)
        }
    }
}

fn cmd_sweep(common: &CommonArgs) -> Result<bool, String> {
    let (config, options) = load(common)?;
    let rows = run_experiment(&config, &options).map_err(|e| e.to_string())?;
    emit(&config, &rows)?;
    Ok(rows.iter().all(|r| !is_error_termination(&r.termination)))
}

fn cmd_oracle(common: &CommonArgs, grid: usize) -> Result<bool, String> {
    let (config, _) = load(common)?;
    let params = instance_params(&config);
    let spec = OracleGrid::uniform(grid);
    match brute_force_oracle(&params, &spec) {
        Ok(result) => {
            println!(
                "oracle efficiency: {:.6e} bits/J (grid {grid})",
                result.efficiency
            );
            for (k, dec) in result.point.users.iter().enumerate() {
                println!(
                    "user {}: t = {:.6e} s, f = {:.6e} Hz, p = {:.6e} W",
                    k + 1,
                    dec.offload_time,
                    dec.cpu_hz,
                    dec.tx_power()
                );
            }
            Ok(true)
        }
        Err(e) => {
            eprintln!("oracle failed: {e}");
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(common) => cmd_solve(common),
        Command::Sweep(common) => cmd_sweep(common),
        Command::Oracle { common, grid } => cmd_oracle(common, *grid),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
