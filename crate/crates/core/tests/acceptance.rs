//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line (visible with `cargo test --test acceptance -- --nocapture`).

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cemax_core::driver::{
    baseline_local_only, baseline_offload_only, initialize, inner_sca, run_solver, Termination,
};
use cemax_core::fractional::{
    damped_aux_update, residual_vector, user_ratios, AuxMultipliers, Evaluation, UserRatio,
};
use cemax_core::kkt::verify_kkt;
use cemax_core::model::{DecisionPoint, SystemParams, UserDecision, UserParams};
use cemax_core::options::{BacktrackParams, SolveOptions};
use cemax_core::oracle::{brute_force_oracle, OracleGrid};
use cemax_core::sca::{entropy, entropy_gradient, linearized_secrecy_bits, make_linearization};
use cemax_core::subproblem::{assemble_subproblem, solve_subproblem};

fn reference_user(task_bits: f64, uplink: f64, eve: f64) -> UserParams {
    UserParams {
        weight: 1.0,
        task_bits,
        cycles_per_bit: 1000.0,
        cpu_energy_coeff: 1e-24,
        max_cpu_hz: 1e9,
        energy_budget: 1.0,
        uplink_gain: uplink,
        eavesdropper_gain: eve,
    }
}

fn reference_params(task_bits: f64) -> SystemParams {
    SystemParams {
        bandwidth: 200e3,
        deadline: 1.0,
        circuit_power: 0.1,
        users: vec![
            reference_user(task_bits, 7.0, 1.0),
            reference_user(task_bits, 5.0, 1.0),
        ],
    }
}

fn random_single_user(rng: &mut ChaCha8Rng) -> SystemParams {
    let eve: f64 = rng.random_range(0.3..2.0);
    let uplink: f64 = (1.5 * eve).max(rng.random_range(3.0..10.0));
    SystemParams {
        bandwidth: 200e3,
        deadline: 1.0,
        circuit_power: rng.random_range(0.05..0.2),
        users: vec![UserParams {
            weight: 1.0,
            task_bits: rng.random_range(2e4..1.2e5),
            cycles_per_bit: 1000.0,
            cpu_energy_coeff: 1e-24,
            max_cpu_hz: 1e9,
            energy_budget: rng.random_range(0.5..2.0),
            uplink_gain: uplink,
            eavesdropper_gain: eve,
        }],
    }
}

#[test]
fn acceptance_1_convergence_speed() {
    let start = Instant::now();
    let mut worst = 0;
    for task_bits in [5e4, 6e4] {
        let report = run_solver(&reference_params(task_bits), &SolveOptions::default()).unwrap();
        assert_eq!(
            report.termination,
            Termination::ResidualConverged,
            "criterion 1: L = {task_bits} did not converge"
        );
        assert!(
            report.outer_iterations <= 15,
            "criterion 1: L = {task_bits} took {} outer iterations",
            report.outer_iterations
        );
        worst = worst.max(report.outer_iterations);
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed <= 10.0,
        "criterion 1: runtime {elapsed:.2} s exceeds 10 s"
    );
    println!("acceptance 1 (convergence speed): pass ({worst} outer iterations worst case, {elapsed:.2} s)");
}

#[test]
fn acceptance_2_offload_time_grows_with_task_size() {
    let sum_t = |task_bits: f64| -> f64 {
        run_solver(&reference_params(task_bits), &SolveOptions::default())
            .unwrap()
            .per_user
            .iter()
            .map(|u| u.offload_time)
            .sum()
    };
    let small = sum_t(5e4);
    let large = sum_t(6e4);
    assert!(
        large > small,
        "criterion 2: sum t did not grow: {small:.6} -> {large:.6}"
    );
    println!(
        "acceptance 2 (offload time grows with task size): pass ({small:.4} s -> {large:.4} s)"
    );
}

#[test]
fn acceptance_3_efficiency_trends() {
    let grid = [4e4, 5e4, 6e4, 7e4, 8e4];
    let options = SolveOptions::default();
    let mut curves = Vec::new();
    for g_scale in [1.0, 3.0] {
        let curve: Vec<f64> = grid
            .iter()
            .map(|&l| {
                let mut params = reference_params(l);
                for user in &mut params.users {
                    user.eavesdropper_gain *= g_scale;
                }
                run_solver(&params, &options).unwrap().final_ce
            })
            .collect();
        for (i, pair) in curve.windows(2).enumerate() {
            assert!(
                pair[1] <= pair[0] * 1.001,
                "criterion 3: CE increased by more than 0.1% between L = {} and {} (G x{g_scale}): {} -> {}",
                grid[i],
                grid[i + 1],
                pair[0],
                pair[1]
            );
        }
        curves.push(curve);
    }
    for (i, (&base, &scaled)) in curves[0].iter().zip(&curves[1]).enumerate() {
        assert!(
            scaled <= base * 1.001,
            "criterion 3: CE at G x3 exceeds baseline at L = {}: {scaled} > {base}",
            grid[i]
        );
    }
    println!(
        "acceptance 3 (efficiency trends): pass (CE {:.3e} -> {:.3e} over the grid, x3 eavesdropper below baseline pointwise)",
        curves[0][0],
        curves[0][grid.len() - 1]
    );
}

#[test]
fn acceptance_4_joint_scheme_dominates_baselines() {
    let grid = [4e4, 5e4, 6e4, 7e4, 8e4];
    let options = SolveOptions::default();
    for &l in &grid {
        let params = reference_params(l);
        let joint = run_solver(&params, &options).unwrap().final_ce;
        let local = baseline_local_only(&params).unwrap().total.unwrap();
        let offload = baseline_offload_only(&params, &options).unwrap().final_ce;
        assert!(
            joint >= local * (1.0 - 1e-3),
            "criterion 4: joint {joint:.6e} below local-only {local:.6e} at L = {l}"
        );
        assert!(
            joint >= offload * (1.0 - 1e-3),
            "criterion 4: joint {joint:.6e} below offload-only {offload:.6e} at L = {l}"
        );
    }
    println!(
        "acceptance 4 (joint dominates baselines): pass ({} sweep points)",
        grid.len()
    );
}

#[test]
fn acceptance_5_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20260811);
    let grid = OracleGrid {
        time_steps: 200,
        energy_steps: 200,
        freq_steps: None,
    };
    let options = SolveOptions::default();
    let mut worst: f64 = 0.0;
    for case in 0..10 {
        let params = random_single_user(&mut rng);
        let report = run_solver(&params, &options)
            .unwrap_or_else(|e| panic!("criterion 5: case {case} failed to solve: {e}"));
        let oracle = brute_force_oracle(&params, &grid)
            .unwrap_or_else(|e| panic!("criterion 5: case {case} oracle failed: {e}"));
        let rel = (report.final_ce - oracle.efficiency).abs() / oracle.efficiency;
        assert!(
            rel <= 0.02,
            "criterion 5: case {case} off by {:.3}% (algorithm {:.6e}, oracle {:.6e})",
            rel * 100.0,
            report.final_ce,
            oracle.efficiency
        );
        worst = worst.max(rel);
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed <= 60.0,
        "criterion 5: runtime {elapsed:.1} s exceeds 60 s"
    );
    println!(
        "acceptance 5 (oracle equivalence): pass (10 instances, worst deviation {:.3}%, {elapsed:.1} s)",
        worst * 100.0
    );
}

#[test]
fn acceptance_6_numerical_property_suites() {
    let mut rng = ChaCha8Rng::seed_from_u64(61803);

    // Entropy concavity along random chords.
    for _ in 0..1000 {
        let (x1, y1) = (rng.random_range(1e-6..1e3), rng.random_range(1e-6..1e3));
        let (x2, y2) = (rng.random_range(1e-6..1e3), rng.random_range(1e-6..1e3));
        let a: f64 = rng.random_range(0.0..1.0);
        let mid = entropy(a * x1 + (1.0 - a) * x2, a * y1 + (1.0 - a) * y2).unwrap();
        let chord = a * entropy(x1, y1).unwrap() + (1.0 - a) * entropy(x2, y2).unwrap();
        assert!(
            mid >= chord - 1e-9 * (1.0 + mid.abs()),
            "criterion 6: concavity violated"
        );
    }

    // Expansion-point exactness to 1e-12 relative.
    for _ in 0..1000 {
        let t0 = rng.random_range(1e-3..1.0);
        let n0 = rng.random_range(0.0..50.0);
        let tau0 = rng.random_range(0.0..50.0);
        let point = DecisionPoint {
            users: vec![UserDecision {
                offload_time: t0,
                legit_aux: n0,
                eve_aux: tau0,
                ..Default::default()
            }],
        };
        let lin = make_linearization(&point, 1e-9).unwrap();
        let exact = entropy(n0, t0).unwrap() - entropy(tau0, t0).unwrap();
        let modeled = linearized_secrecy_bits(t0, n0, tau0, &lin.users[0], 1.0);
        assert!(
            (modeled - exact).abs() <= 1e-12 * (1.0 + exact.abs()),
            "criterion 6: expansion-point mismatch"
        );
    }

    // Gradient against central finite differences to 1e-6 relative.
    for _ in 0..1000 {
        let x0 = rng.random_range(1e-3..1e3);
        let y0 = rng.random_range(1e-3..1e3);
        let (dx, dy) = entropy_gradient(x0, y0).unwrap();
        let hx = 1e-6 * x0.max(1.0);
        let hy = 1e-6 * y0.max(1.0);
        let fd_x = (entropy(x0 + hx, y0).unwrap() - entropy(x0 - hx, y0).unwrap()) / (2.0 * hx);
        let fd_y = (entropy(x0, y0 + hy).unwrap() - entropy(x0, y0 - hy).unwrap()) / (2.0 * hy);
        assert!(
            (dx - fd_x).abs() <= 1e-6 * (1.0 + dx.abs()),
            "criterion 6: d/dx mismatch"
        );
        assert!(
            (dy - fd_y).abs() <= 1e-6 * (1.0 + dy.abs()),
            "criterion 6: d/dy mismatch"
        );
    }

    // Inner objective monotone nondecreasing in concave-legit mode; random
    // instances accumulate at least 1000 compared iteration pairs.
    let cccp = SolveOptions {
        cccp_faithful: true,
        ..Default::default()
    };
    let mut pairs = 0;
    while pairs < 1000 {
        let params = random_single_user(&mut rng);
        let Ok((start, aux)) = initialize(&params, &cccp) else {
            continue;
        };
        let (_, trace) = inner_sca(&params, &aux, &start, &cccp).unwrap();
        for pair in trace.windows(2) {
            assert!(
                pair[1].objective >= pair[0].objective - 1e-6 * (1.0 + pair[0].objective.abs()),
                "criterion 6: inner objective decreased"
            );
            pairs += 1;
        }
    }

    // Accepted multiplier updates never increase the residual norm.
    let params = reference_params(5e4);
    let point = DecisionPoint {
        users: vec![
            UserDecision {
                offload_time: 0.4,
                cpu_hz: 4e7,
                tx_energy: 0.3,
                ..Default::default()
            },
            UserDecision {
                offload_time: 0.35,
                cpu_hz: 3e7,
                tx_energy: 0.2,
                ..Default::default()
            },
        ],
    };
    let ratios = user_ratios(&point, &params).unwrap();
    for _ in 0..1000 {
        let aux = AuxMultipliers {
            lambda: vec![rng.random_range(0.1..5.0), rng.random_range(0.1..5.0)],
            beta: vec![rng.random_range(0.0..1e6), rng.random_range(0.0..1e6)],
        };
        let before = residual_vector(&point, &aux, &params, false).unwrap();
        let drift: f64 = rng.random_range(0.8..1.2);
        let drifted: Vec<UserRatio> = ratios
            .iter()
            .map(|r| UserRatio {
                bits: r.bits * drift,
                ..*r
            })
            .collect();
        if let Ok(update) =
            damped_aux_update(&aux, &ratios, &BacktrackParams::default(), false, |_| {
                Ok(Evaluation {
                    ratios: drifted.clone(),
                    carry: (),
                })
            })
        {
            assert!(
                update.residual.norm <= before.norm + 1e-9 * before.scale,
                "criterion 6: accepted update increased the residual"
            );
        }
    }

    // Fixed-point residual is zero to 1e-12 (relative to the residual scale).
    for _ in 0..1000 {
        let params = random_single_user(&mut rng);
        let dec = UserDecision {
            offload_time: rng.random_range(0.05..0.9),
            cpu_hz: rng.random_range(1e6..1e8),
            tx_energy: rng.random_range(0.01..0.5),
            ..Default::default()
        };
        let point = DecisionPoint { users: vec![dec] };
        let ratios = user_ratios(&point, &params).unwrap();
        let aux = AuxMultipliers::fixed_point(&ratios).unwrap();
        let res = residual_vector(&point, &aux, &params, false).unwrap();
        assert!(
            res.norm <= 1e-12 * res.scale,
            "criterion 6: fixed-point residual {:.3e}",
            res.norm
        );
    }

    println!("acceptance 6 (numerical property suites): pass (6 suites, >= 1000 cases each)");
}

#[test]
fn acceptance_7_subproblem_certificates() {
    let mut rng = ChaCha8Rng::seed_from_u64(271828);
    let options = SolveOptions::default();
    let bound = 10.0 * options.subproblem.tol_kkt;
    let mut solved = 0;
    while solved < 40 {
        let params = random_single_user(&mut rng);
        let t0 = rng.random_range(0.1..0.8);
        let tx0 = rng.random_range(0.05..0.5) * params.users[0].energy_budget;
        let point = DecisionPoint {
            users: vec![UserDecision {
                offload_time: t0,
                tx_energy: tx0,
                legit_aux: params.users[0].uplink_gain * tx0,
                eve_aux: params.users[0].eavesdropper_gain * tx0,
                ..Default::default()
            }],
        };
        let lin = make_linearization(&point, options.t_floor).unwrap();
        let aux = AuxMultipliers {
            lambda: vec![rng.random_range(0.2..5.0)],
            beta: vec![rng.random_range(1e4..1e6)],
        };
        let spec = assemble_subproblem(&params, &aux, &lin, &options).unwrap();
        let Ok(solution) = solve_subproblem(&spec, &options.subproblem, None) else {
            continue;
        };
        let report = verify_kkt(&spec, &solution.point);
        assert!(
            report.stationarity <= bound,
            "criterion 7: stationarity {:.3e}",
            report.stationarity
        );
        assert!(
            report.primal <= bound,
            "criterion 7: primal {:.3e}",
            report.primal
        );
        assert!(
            report.complementarity <= bound,
            "criterion 7: complementarity {:.3e}",
            report.complementarity
        );
        solved += 1;
    }

    // Analytic cubic stationarity to 1e-6 relative.
    let params = SystemParams {
        bandwidth: 200e3,
        deadline: 1.0,
        circuit_power: 0.1,
        users: vec![reference_user(0.0, 7.0, 1.0)],
    };
    let point = DecisionPoint {
        users: vec![UserDecision {
            offload_time: 0.4,
            tx_energy: 0.3,
            legit_aux: 7.0 * 0.3,
            eve_aux: 0.3,
            ..Default::default()
        }],
    };
    let lin = make_linearization(&point, options.t_floor).unwrap();
    let beta = 4e5;
    let aux = AuxMultipliers {
        lambda: vec![1.0],
        beta: vec![beta],
    };
    let spec = assemble_subproblem(&params, &aux, &lin, &options).unwrap();
    let solution = solve_subproblem(&spec, &options.subproblem, None).unwrap();
    let f_star = (1.0 / (3.0 * beta * 1e-24 * 1000.0)).sqrt();
    let rel = (solution.point.users[0].cpu_hz - f_star).abs() / f_star;
    assert!(
        rel <= 1e-6,
        "criterion 7: analytic frequency off by {rel:.2e}"
    );

    println!("acceptance 7 (subproblem certificates): pass (40 random solves + analytic stationarity, residual bound {bound:.1e})");
}

#[test]
fn acceptance_8_reproducible_csv() {
    use cemax_core::experiment::{render_csv, run_experiment, ExperimentConfig};
    let config = ExperimentConfig::from_json(
        r#"{
            "scenario": "ce_vs_bits",
            "channel_mode": "random",
            "seed": 7,
            "sweep": {"L": [4e4, 6e4], "G_scale": [1.0]}
        }"#,
    )
    .unwrap();
    let options = SolveOptions::default();
    let first = render_csv(&run_experiment(&config, &options).unwrap()).unwrap();
    let second = render_csv(&run_experiment(&config, &options).unwrap()).unwrap();
    assert_eq!(
        first.as_bytes(),
        second.as_bytes(),
        "criterion 8: reruns differ"
    );
    println!(
        "acceptance 8 (reproducible CSV): pass ({} bytes, byte-identical reruns)",
        first.len()
    );
}
