//! Browser bindings: three interactive views over the solver. Each function
//! takes the experiment config as JSON text and returns JSON for the page to
//! plot. All computation runs in the wasm module; no network, no framework.

use cemax_core::driver::{baseline_local_only, baseline_offload_only, run_solver};
use cemax_core::experiment::{sample_channels, ExperimentConfig};
use cemax_core::model::SystemParams;
use cemax_core::options::SolveOptions;
use serde_json::json;

fn parse_config(config_json: &str) -> Result<ExperimentConfig, String> {
    ExperimentConfig::from_json(config_json).map_err(|e| e.to_string())
}

fn instance_params(config: &ExperimentConfig) -> SystemParams {
    let channels = sample_channels(config, config.seed.unwrap_or(0));
    let mut params = config.system_params();
    for (user, (h, g)) in params.users.iter_mut().zip(channels) {
        user.uplink_gain = h;
        user.eavesdropper_gain = g;
    }
    params
}

fn with_task_and_gain(base: &SystemParams, task_bits: f64, g_scale: f64) -> SystemParams {
    let mut params = base.clone();
    for user in &mut params.users {
        user.task_bits = task_bits;
        user.eavesdropper_gain *= g_scale;
    }
    params
}

/// The built-in reference configuration, for seeding the page controls.
pub fn default_config() -> String {
    ExperimentConfig::from_json(r#"{"scenario": "single_run"}"#)
        .expect("reference config parses")
        .to_json()
}

/// Solves the configured instance once and returns the per-iteration time
/// allocations plus the final allocation summary.
pub fn convergence_trace(config_json: &str) -> Result<String, String> {
    let config = parse_config(config_json)?;
    let params = instance_params(&config);
    let report = run_solver(&params, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let iterations: Vec<_> = report
        .outer_trace
        .iter()
        .map(|r| {
            json!({
                "iter": r.iteration,
                "offload_times": r.offload_times,
                "residual": r.residual_norm / r.residual_scale,
            })
        })
        .collect();
    let users: Vec<_> = report
        .per_user
        .iter()
        .map(|u| {
            json!({
                "t_s": u.offload_time,
                "f_hz": u.cpu_hz,
                "p_w": u.tx_power,
                "offload_bits": u.offload_bits,
                "ce": u.efficiency,
            })
        })
        .collect();
    Ok(json!({
        "iterations": iterations,
        "final_ce": report.final_ce,
        "termination": report.termination.to_string(),
        "users": users,
    })
    .to_string())
}

/// Total efficiency over the task-size grid, one curve per eavesdropper
/// scale. Failed points carry `null`.
pub fn efficiency_sweep(config_json: &str) -> Result<String, String> {
    let config = parse_config(config_json)?;
    let base = instance_params(&config);
    let mut curves = Vec::new();
    for &g_scale in &config.sweep.g_scale {
        let mut points = Vec::new();
        for &task_bits in &config.sweep.task_bits {
            let params = with_task_and_gain(&base, task_bits, g_scale);
            let ce = run_solver(&params, &SolveOptions::default())
                .ok()
                .map(|r| r.final_ce);
            points.push(json!({"l": task_bits, "ce": ce}));
        }
        curves.push(json!({"g_scale": g_scale, "points": points}));
    }
    Ok(json!({ "curves": curves }).to_string())
}

/// Joint vs. local-only vs. offload-only efficiency over the task-size grid.
pub fn scheme_comparison(config_json: &str) -> Result<String, String> {
    let config = parse_config(config_json)?;
    let base = instance_params(&config);
    let options = SolveOptions::default();
    let mut points = Vec::new();
    for &task_bits in &config.sweep.task_bits {
        let params = with_task_and_gain(&base, task_bits, config.sweep.g_scale[0]);
        let joint = run_solver(&params, &options).ok().map(|r| r.final_ce);
        let local = baseline_local_only(&params).ok().and_then(|r| r.total);
        let offload = baseline_offload_only(&params, &options)
            .ok()
            .map(|r| r.final_ce);
        points.push(json!({
            "l": task_bits,
            "joint": joint,
            "local_only": local,
            "offload_only": offload,
        }));
    }
    Ok(json!({ "points": points }).to_string())
}

/// Thin wasm exports over the plain-Rust API above; the page imports these.
mod exports {
    use wasm_bindgen::prelude::*;

    #[wasm_bindgen(js_name = default_config)]
    pub fn default_config() -> String {
        super::default_config()
    }

    #[wasm_bindgen(js_name = convergence_trace)]
    pub fn convergence_trace(config_json: &str) -> Result<String, JsValue> {
        super::convergence_trace(config_json).map_err(|e| JsValue::from_str(&e))
    }

    #[wasm_bindgen(js_name = efficiency_sweep)]
    pub fn efficiency_sweep(config_json: &str) -> Result<String, JsValue> {
        super::efficiency_sweep(config_json).map_err(|e| JsValue::from_str(&e))
    }

    #[wasm_bindgen(js_name = scheme_comparison)]
    pub fn scheme_comparison(config_json: &str) -> Result<String, JsValue> {
        super::scheme_comparison(config_json).map_err(|e| JsValue::from_str(&e))
    }
}
