//! Sum-of-ratios outer layer: the residual system tying the multipliers to
//! the per-user bit totals and energies, and the damped Newton-style update
//! with norm-decrease backtracking.
//!
//! At a solution, `lambda_k = w_k/E_k` and `beta_k = w_k*R_k/E_k` must hold
//! exactly; the residual vector stacks `beta_k*E_k - w_k*R_k` over users
//! followed by `lambda_k*E_k - w_k`. The Jacobian of that system in
//! `(beta, lambda)` is diagonal (entries `E_k`) for frozen `(R_k, E_k)`, so
//! the Newton step is exactly the convex-combination update implemented here
//! and no linear solve is needed.

use crate::error::{Error, Result};
use crate::model::{local_bits, secrecy_bits, user_energy, DecisionPoint, SystemParams};
use crate::options::BacktrackParams;

/// Per-user multipliers of the ratio transformation. `lambda` must stay
/// strictly positive; `beta` is the running per-user efficiency estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxMultipliers {
    pub lambda: Vec<f64>,
    pub beta: Vec<f64>,
}

impl AuxMultipliers {
    pub fn validate(&self) -> Result<()> {
        if self.lambda.len() != self.beta.len() {
            return Err(Error::domain(
                "AuxMultipliers",
                "lambda/beta length mismatch",
            ));
        }
        for (k, &l) in self.lambda.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::domain(
                    "AuxMultipliers",
                    format!("lambda[{k}] = {l} must be > 0"),
                ));
            }
        }
        for (k, &b) in self.beta.iter().enumerate() {
            if !b.is_finite() {
                return Err(Error::domain(
                    "AuxMultipliers",
                    format!("beta[{k}] = {b} must be finite"),
                ));
            }
        }
        Ok(())
    }

    /// The fixed point implied by per-user bit totals and energies:
    /// `lambda = w/E`, `beta = w*R/E`.
    pub fn fixed_point(ratios: &[UserRatio]) -> Result<AuxMultipliers> {
        let mut lambda = Vec::with_capacity(ratios.len());
        let mut beta = Vec::with_capacity(ratios.len());
        for (k, r) in ratios.iter().enumerate() {
            if r.energy <= 0.0 {
                return Err(Error::DegenerateUser { user: k });
            }
            lambda.push(r.weight / r.energy);
            beta.push(r.weight * r.bits / r.energy);
        }
        Ok(AuxMultipliers { lambda, beta })
    }
}

/// One user's bit total and energy at a solution: the `(R_k, E_k)` pair the
/// residual system is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserRatio {
    /// Secure offloaded bits plus local bits.
    pub bits: f64,
    /// Total energy (J), strictly positive for non-idle users.
    pub energy: f64,
    pub weight: f64,
}

/// Computes `(R_k, E_k, w_k)` for every user from the exact model.
pub fn user_ratios(point: &DecisionPoint, params: &SystemParams) -> Result<Vec<UserRatio>> {
    let mut out = Vec::with_capacity(params.num_users());
    for (dec, user) in point.users.iter().zip(&params.users) {
        let bits = secrecy_bits(dec.offload_time, dec.tx_energy, user, params.bandwidth)?
            + local_bits(dec.cpu_hz, params.deadline, user.cycles_per_bit)?;
        let energy = user_energy(dec, user, params).total;
        out.push(UserRatio {
            bits,
            energy,
            weight: user.weight,
        });
    }
    Ok(out)
}

/// The stacked residual system and its Euclidean norm; zero exactly at the
/// multiplier fixed point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualVector {
    /// `beta_k*E_k - w_k*R_k` for each user, then `lambda_k*E_k - w_k`
    /// (or `- 1` in the strict variant).
    pub entries: Vec<f64>,
    pub norm: f64,
    /// Magnitude scale `1 + sum_k (w_k*R_k + w_k)` for relative termination tests.
    pub scale: f64,
}

impl ResidualVector {
    fn from_parts(
        ratios: &[UserRatio],
        aux: &AuxMultipliers,
        strict_paper_t: bool,
    ) -> Result<ResidualVector> {
        let k = ratios.len();
        let mut entries = Vec::with_capacity(2 * k);
        let mut scale = 1.0;
        for (j, r) in ratios.iter().enumerate() {
            if r.energy <= 0.0 {
                return Err(Error::DegenerateUser { user: j });
            }
            entries.push(aux.beta[j] * r.energy - r.weight * r.bits);
            scale += r.weight * r.bits;
        }
        for (j, r) in ratios.iter().enumerate() {
            let target = if strict_paper_t { 1.0 } else { r.weight };
            entries.push(aux.lambda[j] * r.energy - target);
            scale += target;
        }
        let norm = entries.iter().map(|e| e * e).sum::<f64>().sqrt();
        Ok(ResidualVector {
            entries,
            norm,
            scale,
        })
    }
}

/// Residual of the multiplier system at a solved allocation.
pub fn residual_vector(
    point: &DecisionPoint,
    aux: &AuxMultipliers,
    params: &SystemParams,
    strict_paper_t: bool,
) -> Result<ResidualVector> {
    aux.validate()?;
    if aux.lambda.len() != params.num_users() {
        return Err(Error::domain(
            "residual_vector",
            "multiplier count != user count",
        ));
    }
    let ratios = user_ratios(point, params)?;
    ResidualVector::from_parts(&ratios, aux, strict_paper_t)
}

/// What the caller's evaluator returns for a candidate multiplier state: the
/// re-solved ratios plus whatever solution object it wants carried along.
pub struct Evaluation<S> {
    pub ratios: Vec<UserRatio>,
    pub carry: S,
}

/// Outcome of one accepted damped update.
pub struct AuxUpdate<S> {
    pub aux: AuxMultipliers,
    /// Accepted step size in (0, 1].
    pub step: f64,
    pub residual: ResidualVector,
    /// The evaluation at the accepted candidate, for reuse by the caller.
    pub evaluation: Evaluation<S>,
}

/// Damped update of the multipliers toward their fixed point.
///
/// Candidates `step = 1, shrink, shrink^2, ...` move
/// `lambda <- (1-step)*lambda + step*w/E` and
/// `beta <- (1-step)*beta + step*w*R/E`; the first candidate whose
/// re-evaluated residual satisfies `|T_new| <= (1 - decrease*step)*|T_old|`
/// is accepted. The evaluator is invoked once per candidate and must return
/// the ratios at that candidate (typically by re-solving the inner problem).
pub fn damped_aux_update<S>(
    aux: &AuxMultipliers,
    ratios_now: &[UserRatio],
    params: &BacktrackParams,
    strict_paper_t: bool,
    mut evaluate: impl FnMut(&AuxMultipliers) -> Result<Evaluation<S>>,
) -> Result<AuxUpdate<S>> {
    aux.validate()?;
    if !(params.sufficient_decrease > 0.0 && params.sufficient_decrease < 1.0) {
        return Err(Error::domain(
            "damped_aux_update",
            "sufficient_decrease must be in (0, 1)",
        ));
    }
    if !(params.shrink > 0.0 && params.shrink < 1.0) {
        return Err(Error::domain(
            "damped_aux_update",
            "shrink must be in (0, 1)",
        ));
    }
    let current = ResidualVector::from_parts(ratios_now, aux, strict_paper_t)?;
    let mut best: Option<(f64, AuxMultipliers, ResidualVector, Evaluation<S>)> = None;
    for l in 0..=params.max_halvings {
        let step = params.shrink.powi(l as i32);
        let mut cand = aux.clone();
        for (j, r) in ratios_now.iter().enumerate() {
            if r.energy <= 0.0 {
                return Err(Error::DegenerateUser { user: j });
            }
            let lambda_target = r.weight / r.energy;
            let beta_target = r.weight * r.bits / r.energy;
            cand.lambda[j] = (1.0 - step) * cand.lambda[j] + step * lambda_target;
            cand.beta[j] = (1.0 - step) * cand.beta[j] + step * beta_target;
        }
        let evaluation = evaluate(&cand)?;
        let residual = ResidualVector::from_parts(&evaluation.ratios, &cand, strict_paper_t)?;
        // The noise floor keeps the test meaningful at an exact fixed point,
        // where both norms sit at rounding level.
        let floor = 1e-14 * residual.scale;
        if residual.norm <= (1.0 - params.sufficient_decrease * step) * current.norm + floor {
            return Ok(AuxUpdate {
                aux: cand,
                step,
                residual,
                evaluation,
            });
        }
        if best
            .as_ref()
            .is_none_or(|(_, _, r, _)| residual.norm < r.norm)
        {
            best = Some((step, cand, residual, evaluation));
        }
    }
    let norm_new = best.map(|(_, _, r, _)| r.norm).unwrap_or(f64::NAN);
    Err(Error::Stalled {
        norm_old: current.norm,
        norm_new,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::model::{DecisionPoint, UserDecision, UserParams};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params_two_users() -> SystemParams {
        SystemParams {
            bandwidth: 200e3,
            deadline: 1.0,
            circuit_power: 0.1,
            users: vec![
                UserParams {
                    weight: 1.0,
                    task_bits: 5e4,
                    cycles_per_bit: 1000.0,
                    cpu_energy_coeff: 1e-24,
                    max_cpu_hz: 1e9,
                    energy_budget: 1.0,
                    uplink_gain: 7.0,
                    eavesdropper_gain: 1.0,
                },
                UserParams {
                    weight: 1.0,
                    task_bits: 5e4,
                    cycles_per_bit: 1000.0,
                    cpu_energy_coeff: 1e-24,
                    max_cpu_hz: 1e9,
                    energy_budget: 1.0,
                    uplink_gain: 5.0,
                    eavesdropper_gain: 1.0,
                },
            ],
        }
    }

    fn sample_point() -> DecisionPoint {
        DecisionPoint {
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
        }
    }

    #[test]
    fn fixed_point_gives_zero_residual() {
        let params = params_two_users();
        let point = sample_point();
        let ratios = user_ratios(&point, &params).unwrap();
        let aux = AuxMultipliers::fixed_point(&ratios).unwrap();
        let res = residual_vector(&point, &aux, &params, false).unwrap();
        assert!(
            res.norm <= 1e-12 * res.scale,
            "norm {} scale {}",
            res.norm,
            res.scale
        );
    }

    #[test]
    fn doubling_beta_moves_only_first_block() {
        let params = params_two_users();
        let point = sample_point();
        let ratios = user_ratios(&point, &params).unwrap();
        let aux = AuxMultipliers::fixed_point(&ratios).unwrap();
        let mut doubled = aux.clone();
        for b in &mut doubled.beta {
            *b *= 2.0;
        }
        let res = residual_vector(&point, &doubled, &params, false).unwrap();
        for (j, r) in ratios.iter().enumerate() {
            assert_relative_eq!(res.entries[j], r.weight * r.bits, max_relative = 1e-12);
        }
        for j in ratios.len()..2 * ratios.len() {
            assert!(res.entries[j].abs() <= 1e-12 * res.scale);
        }
    }

    #[test]
    fn entries_match_independent_recomputation() {
        let params = params_two_users();
        let point = sample_point();
        let aux = AuxMultipliers {
            lambda: vec![0.7, 1.3],
            beta: vec![2e5, 3e5],
        };
        let res = residual_vector(&point, &aux, &params, false).unwrap();
        for (j, (dec, user)) in point.users.iter().zip(&params.users).enumerate() {
            let bits = secrecy_bits(dec.offload_time, dec.tx_energy, user, params.bandwidth)
                .unwrap()
                + local_bits(dec.cpu_hz, params.deadline, user.cycles_per_bit).unwrap();
            let energy = user_energy(dec, user, &params).total;
            assert_relative_eq!(
                res.entries[j],
                aux.beta[j] * energy - user.weight * bits,
                max_relative = 1e-12
            );
            assert_relative_eq!(
                res.entries[j + 2],
                aux.lambda[j] * energy - user.weight,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn strict_paper_form_matches_default_when_weights_are_one() {
        let params = params_two_users();
        let point = sample_point();
        let aux = AuxMultipliers {
            lambda: vec![0.9, 1.1],
            beta: vec![1e5, 2e5],
        };
        let a = residual_vector(&point, &aux, &params, false).unwrap();
        let b = residual_vector(&point, &aux, &params, true).unwrap();
        assert_eq!(a.entries, b.entries);
    }

    #[test]
    fn frozen_evaluator_accepts_full_step_and_zeroes_residual() {
        let params = params_two_users();
        let point = sample_point();
        let ratios = user_ratios(&point, &params).unwrap();
        let aux = AuxMultipliers {
            lambda: vec![0.5, 2.0],
            beta: vec![1e5, 5e5],
        };
        let frozen = ratios.clone();
        let update = damped_aux_update(&aux, &ratios, &BacktrackParams::default(), false, |_| {
            Ok(Evaluation {
                ratios: frozen.clone(),
                carry: (),
            })
        })
        .unwrap();
        assert_eq!(update.step, 1.0);
        assert!(update.residual.norm <= 1e-10 * update.residual.scale);
        // Accepted multipliers are exactly the closed-form targets.
        for (j, r) in ratios.iter().enumerate() {
            assert_relative_eq!(
                update.aux.lambda[j],
                r.weight / r.energy,
                max_relative = 1e-14
            );
            assert_relative_eq!(
                update.aux.beta[j],
                r.weight * r.bits / r.energy,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn full_step_map_is_idempotent_for_frozen_ratios() {
        let params = params_two_users();
        let point = sample_point();
        let ratios = user_ratios(&point, &params).unwrap();
        let aux = AuxMultipliers {
            lambda: vec![0.5, 2.0],
            beta: vec![1e5, 5e5],
        };
        let frozen = ratios.clone();
        let once = damped_aux_update(&aux, &ratios, &BacktrackParams::default(), false, |_| {
            Ok(Evaluation {
                ratios: frozen.clone(),
                carry: (),
            })
        })
        .unwrap();
        let twice = damped_aux_update(
            &once.aux,
            &ratios,
            &BacktrackParams::default(),
            false,
            |_| {
                Ok(Evaluation {
                    ratios: frozen.clone(),
                    carry: (),
                })
            },
        )
        .unwrap();
        for j in 0..2 {
            assert_relative_eq!(
                once.aux.lambda[j],
                twice.aux.lambda[j],
                max_relative = 1e-14
            );
            assert_relative_eq!(once.aux.beta[j], twice.aux.beta[j], max_relative = 1e-14);
        }
    }

    #[test]
    fn idle_user_is_a_degenerate_error() {
        let params = params_two_users();
        let point = DecisionPoint::zeros(2);
        let aux = AuxMultipliers {
            lambda: vec![1.0, 1.0],
            beta: vec![0.0, 0.0],
        };
        let err = residual_vector(&point, &aux, &params, false).unwrap_err();
        assert!(matches!(err, Error::DegenerateUser { user: 0 }));
    }

    #[test]
    fn stall_reported_when_no_candidate_improves() {
        let params = params_two_users();
        let point = sample_point();
        let ratios = user_ratios(&point, &params).unwrap();
        let aux = AuxMultipliers::fixed_point(&ratios).unwrap();
        // Evaluator that always worsens the residual: returns inflated ratios.
        let result = damped_aux_update(&aux, &ratios, &BacktrackParams::default(), false, |_| {
            let bad: Vec<UserRatio> = ratios
                .iter()
                .map(|r| UserRatio {
                    bits: 10.0 * r.bits + 1e6,
                    ..*r
                })
                .collect();
            Ok(Evaluation {
                ratios: bad,
                carry: (),
            })
        });
        assert!(matches!(result, Err(Error::Stalled { .. })));
    }

    proptest! {
        /// Accepted updates never increase the residual norm, and lambda stays
        /// strictly positive along accepted updates.
        #[test]
        fn accepted_updates_contract(
            l1 in 0.1..5.0f64, l2 in 0.1..5.0f64,
            b1 in 0.0..1e6f64, b2 in 0.0..1e6f64,
            drift in 0.8..1.2f64,
        ) {
            let params = params_two_users();
            let point = sample_point();
            let ratios = user_ratios(&point, &params).unwrap();
            let aux = AuxMultipliers { lambda: vec![l1, l2], beta: vec![b1, b2] };
            let before = residual_vector(&point, &aux, &params, false).unwrap();
            // Mild drift models the inner solution moving between evaluations.
            let drifted: Vec<UserRatio> =
                ratios.iter().map(|r| UserRatio { bits: r.bits * drift, energy: r.energy, weight: r.weight }).collect();
            let update = damped_aux_update(&aux, &ratios, &BacktrackParams::default(), false, |_| {
                Ok(Evaluation { ratios: drifted.clone(), carry: () })
            });
            if let Ok(update) = update {
                prop_assert!(update.residual.norm <= before.norm + 1e-9 * before.scale);
                prop_assert!(update.aux.lambda.iter().all(|&l| l > 0.0));
            }
        }
    }
}
