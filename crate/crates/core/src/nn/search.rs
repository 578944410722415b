//! Random architecture and hyperparameter search scored by k-fold mean
//! validation RMSE.

use rand::prelude::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::features::SampleSet;
use crate::nn::train::{cross_validate, ModelKind, TrainConfig};
use crate::radiation::BodyRadiationProfile;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchSpace {
    /// log10 learning-rate range.
    pub lr_log10: (f64, f64),
    /// Candidate widths per hidden layer.
    pub widths: Vec<usize>,
    /// Candidate depths (number of hidden layers).
    pub depths: Vec<usize>,
    pub batch_sizes: Vec<usize>,
    /// Flux-supervision weight range.
    pub lambda_f: (f64, f64),
    pub trials: usize,
}

impl Default for SearchSpace {
    fn default() -> Self {
        SearchSpace {
            lr_log10: (-4.0, -2.0),
            widths: vec![64, 128, 256],
            depths: vec![2, 3, 4],
            batch_sizes: vec![16, 32, 64],
            lambda_f: (0.0, 1.0),
            trials: 20,
        }
    }
}

impl SearchSpace {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(CoreError::Config("trials must be >= 1".into()));
        }
        if self.widths.is_empty() || self.depths.is_empty() || self.batch_sizes.is_empty() {
            return Err(CoreError::Config("search space sets must be nonempty".into()));
        }
        if self.lr_log10.0 > self.lr_log10.1 || self.lambda_f.0 > self.lambda_f.1 {
            return Err(CoreError::Config("search ranges must be ordered".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialResult {
    /// 0 marks the incumbent (default configuration).
    pub trial: usize,
    pub lr: f64,
    pub hidden_dims: Vec<usize>,
    pub batch_size: usize,
    pub lambda_f: f64,
    pub mean_rmse: f64,
    pub std_rmse: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchReport {
    /// The incumbent configuration scored on the same folds.
    pub incumbent: TrialResult,
    /// Sampled trials sorted ascending by mean RMSE.
    pub trials: Vec<TrialResult>,
}

impl SearchReport {
    /// Best score among trials and the incumbent.
    pub fn best_rmse(&self) -> f64 {
        self.trials
            .first()
            .map(|t| t.mean_rmse)
            .unwrap_or(f64::INFINITY)
            .min(self.incumbent.mean_rmse)
    }
}

fn sample_trial(space: &SearchSpace, rng: &mut ChaCha8Rng) -> (f64, Vec<usize>, usize, f64) {
    let lr = 10f64.powf(rng.random_range(space.lr_log10.0..=space.lr_log10.1));
    let depth = *space.depths.choose(rng).expect("validated nonempty");
    let dims: Vec<usize> = (0..depth)
        .map(|_| *space.widths.choose(rng).expect("validated nonempty"))
        .collect();
    let batch = *space.batch_sizes.choose(rng).expect("validated nonempty");
    let lambda_f = rng.random_range(space.lambda_f.0..=space.lambda_f.1);
    (lr, dims, batch, lambda_f)
}

/// Samples `space.trials` configurations i.i.d. with a seeded RNG, scores
/// each (and the incumbent `base`) by k-fold mean RMSE on identical folds,
/// and returns the trials sorted ascending.
pub fn random_search(
    kind: ModelKind,
    samples: &SampleSet,
    space: &SearchSpace,
    base: &TrainConfig,
    profile: BodyRadiationProfile,
) -> Result<SearchReport> {
    space.validate()?;
    base.validate()?;

    let score = |cfg: &TrainConfig| -> Result<(f64, f64)> {
        let report = cross_validate(kind, samples, cfg, profile)?;
        Ok((report.mean_rmse, report.std_rmse))
    };

    let (inc_rmse, inc_std) = score(base)?;
    let incumbent = TrialResult {
        trial: 0,
        lr: base.lr,
        hidden_dims: base.hidden_dims.clone(),
        batch_size: base.batch_size,
        lambda_f: base.lambda_f,
        mean_rmse: inc_rmse,
        std_rmse: inc_std,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(base.seed);
    rng.set_stream(100);
    let mut trials = Vec::with_capacity(space.trials);
    for t in 0..space.trials {
        let (lr, dims, batch, lambda_f) = sample_trial(space, &mut rng);
        let cfg = TrainConfig {
            lr,
            hidden_dims: dims.clone(),
            batch_size: batch,
            lambda_f,
            ..base.clone()
        };
        let (mean_rmse, std_rmse) = score(&cfg)?;
        trials.push(TrialResult {
            trial: t + 1,
            lr,
            hidden_dims: dims,
            batch_size: batch,
            lambda_f,
            mean_rmse,
            std_rmse,
        });
    }
    trials.sort_by(|a, b| a.mean_rmse.total_cmp(&b.mean_rmse));
    Ok(SearchReport { incumbent, trials })
}
