//! Seeded channel realizations.
//!
//! Gains must be nonnegative, so the random mode draws the squared magnitude
//! of a unit complex Gaussian (a unit-mean exponential) independently for
//! the uplink and eavesdropper paths of each user. Deterministic mode keeps
//! the configured gains as-is.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use super::config::{ChannelMode, ExperimentConfig};

/// Effective per-user `(H, G)` pair for one realization.
pub fn sample_channels(config: &ExperimentConfig, seed: u64) -> Vec<(f64, f64)> {
    match config.channel_mode {
        ChannelMode::Deterministic => config.users.iter().map(|u| (u.h, u.g)).collect(),
        ChannelMode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            config
                .users
                .iter()
                .map(|u| {
                    let x: f64 = Exp1.sample(&mut rng);
                    let x_eve: f64 = Exp1.sample(&mut rng);
                    (u.h * x, u.g * x_eve)
                })
                .collect()
        }
    }
}

/// Unit-mean exponential fading draws from a dedicated stream, used by tests
/// and demos that need raw magnitudes.
pub fn fading_draws(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.sample::<f64, _>(Exp1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::ExperimentConfig;

    fn config(mode: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(&format!(
            r#"{{"scenario": "single_run", "channel_mode": "{mode}", "seed": 3}}"#
        ))
        .unwrap()
    }

    #[test]
    fn deterministic_mode_returns_configured_gains() {
        let channels = sample_channels(&config("deterministic"), 3);
        assert_eq!(channels, vec![(7.0, 1.0), (5.0, 1.0)]);
    }

    #[test]
    fn same_seed_same_draws() {
        let config = config("random");
        assert_eq!(sample_channels(&config, 17), sample_channels(&config, 17));
        assert_ne!(sample_channels(&config, 17), sample_channels(&config, 18));
    }

    #[test]
    fn fading_mean_is_one() {
        let draws = fading_draws(1234, 100_000);
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean {mean}");
        assert!(draws.iter().all(|&x| x >= 0.0));
    }
}
