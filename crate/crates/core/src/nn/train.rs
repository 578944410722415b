//! Mini-batch training with early stopping, k-fold cross validation, and
//! finite-difference gradient verification.
//!
//! Determinism contract: for a fixed seed every entry point here is
//! bit-reproducible. All RNG streams derive from the config seed via
//! ChaCha stream ids, and accumulation order is fixed.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::features::{SampleSet, META_DIM};
use crate::metrics::{compute_metrics, MetricsReport};
use crate::nn::adam::Adam;
use crate::nn::model::{
    loss_batch, BaselineModel, LossWeights, Model, ModelGrads, Normalization, PinnModel,
    Workspace,
};
use crate::radiation::BodyRadiationProfile;

/// Loss level treated as divergence. The guarded softplus/sigmoid
/// implementations never emit NaN themselves, so a runaway run shows up
/// as an exploding (but finite) loss first.
const LOSS_ABORT_THRESHOLD: f64 = 1e12;

/// RNG stream ids (combined with the config seed).
const STREAM_INIT: u64 = 1;
const STREAM_SHUFFLE: u64 = 2;
const STREAM_SPLIT: u64 = 3;
const STREAM_FOLDS: u64 = 4;
const STREAM_GRADCHECK: u64 = 5;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Early-stopping patience on validation RMSE, in epochs.
    pub patience: usize,
    pub lambda_t: f64,
    pub lambda_f: f64,
    pub lambda_night: f64,
    pub seed: u64,
    pub k_folds: usize,
    pub split_fraction: f64,
    pub hidden_dims: Vec<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            batch_size: 32,
            max_epochs: 200,
            patience: 20,
            lambda_t: 1.0,
            lambda_f: 0.1,
            lambda_night: 0.1,
            seed: 42,
            k_folds: 3,
            split_fraction: 0.8,
            hidden_dims: vec![128, 256, 128],
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lr <= 0.0 {
            return Err(CoreError::Config("lr must be positive".into()));
        }
        if self.lambda_t < 0.0 || self.lambda_f < 0.0 || self.lambda_night < 0.0 {
            return Err(CoreError::Config("loss weights must be >= 0".into()));
        }
        if self.k_folds < 2 {
            return Err(CoreError::Config("k_folds must be >= 2".into()));
        }
        if !(0.0 < self.split_fraction && self.split_fraction < 1.0) {
            return Err(CoreError::Config("split_fraction must be in (0, 1)".into()));
        }
        if self.batch_size == 0 {
            return Err(CoreError::Config("batch_size must be >= 1".into()));
        }
        Ok(())
    }

    pub fn weights(&self) -> LossWeights {
        LossWeights {
            lambda_t: self.lambda_t,
            lambda_f: self.lambda_f,
            lambda_night: self.lambda_night,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub loss_t: f64,
    pub loss_f: f64,
    pub loss_night: f64,
    pub val_rmse: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Pinn,
    Baseline,
}

pub struct TrainedModel {
    pub model: Model,
    pub history: Vec<EpochStats>,
    pub best_epoch: usize,
    pub val_metrics: MetricsReport,
    /// Sample indices of the held-out validation rows.
    pub val_indices: Vec<usize>,
}

fn new_model(
    kind: ModelKind,
    feature_dim: usize,
    cfg: &TrainConfig,
    profile: BodyRadiationProfile,
    rng: &mut ChaCha8Rng,
) -> Result<Model> {
    Ok(match kind {
        ModelKind::Pinn => Model::Pinn(PinnModel::new(
            feature_dim,
            META_DIM,
            &cfg.hidden_dims,
            profile,
            rng,
        )?),
        ModelKind::Baseline => {
            Model::Baseline(BaselineModel::new(feature_dim, &cfg.hidden_dims, rng)?)
        }
    })
}

fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Validation RMSE of the current parameters.
fn val_rmse(model: &Model, samples: &SampleSet, idx: &[usize], ws: &mut Workspace) -> Result<f64> {
    let mut sq = 0.0;
    for &i in idx {
        let p = model.predict_with(&samples.features[i], ws)?;
        let label = samples.tmrt[i].expect("validation rows are labeled");
        let e = p.tmrt_c - label;
        sq += e * e;
    }
    Ok((sq / idx.len() as f64).sqrt())
}

fn val_predictions(
    model: &Model,
    samples: &SampleSet,
    idx: &[usize],
    ws: &mut Workspace,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut y = Vec::with_capacity(idx.len());
    let mut yhat = Vec::with_capacity(idx.len());
    for &i in idx {
        let p = model.predict_with(&samples.features[i], ws)?;
        y.push(samples.tmrt[i].expect("labeled"));
        yhat.push(p.tmrt_c);
    }
    Ok((y, yhat))
}

/// Inner trainer over explicit train/validation index sets. Normalization
/// is fitted on the training rows only.
pub fn train_on_indices(
    kind: ModelKind,
    samples: &SampleSet,
    train_idx: &[usize],
    val_idx: &[usize],
    cfg: &TrainConfig,
    profile: BodyRadiationProfile,
    rng_stream_offset: u64,
) -> Result<TrainedModel> {
    cfg.validate()?;
    if train_idx.is_empty() || val_idx.is_empty() {
        return Err(CoreError::Config(
            "train and validation sets must be nonempty".into(),
        ));
    }

    let feature_dim = samples.features[0].len();
    let mut init_rng = seeded(cfg.seed, STREAM_INIT + rng_stream_offset);
    let mut model = new_model(kind, feature_dim, cfg, profile, &mut init_rng)?;
    model.set_norm(Normalization::fit(&samples.features, train_idx));

    let weights = cfg.weights();
    let mut ws = Workspace::default();
    let mut grads = ModelGrads::zeros_like(&model);
    let mut adams: Vec<Adam> = model
        .heads()
        .iter()
        .map(|h| Adam::new(h.n_params(), cfg.lr, cfg.beta1, cfg.beta2, cfg.eps))
        .collect();

    let mut shuffle_rng = seeded(cfg.seed, STREAM_SHUFFLE + rng_stream_offset);
    let mut order: Vec<usize> = train_idx.to_vec();

    let mut history = Vec::new();
    let mut best_rmse = f64::INFINITY;
    let mut best_epoch = 0;
    let mut best_params = model.snapshot_params();
    let mut stale = 0usize;

    for epoch in 0..cfg.max_epochs {
        order.shuffle(&mut shuffle_rng);
        let mut ep_loss = 0.0;
        let mut ep_t = 0.0;
        let mut ep_f = 0.0;
        let mut ep_n = 0.0;
        let mut n_seen = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            grads.zero();
            let lc = loss_batch(&model, samples, chunk, &weights, Some(&mut grads), &mut ws)?;
            if !lc.total.is_finite() || lc.total > LOSS_ABORT_THRESHOLD {
                return Err(CoreError::Diverged {
                    epoch,
                    lr: cfg.lr,
                });
            }
            let bn = chunk.len() as f64;
            ep_loss += lc.total * bn;
            ep_t += lc.loss_t * bn;
            ep_f += lc.loss_f * bn;
            ep_n += lc.loss_night * bn;
            n_seen += bn;
            for (head, (adam, g)) in model
                .heads_mut()
                .into_iter()
                .zip(adams.iter_mut().zip(&grads.heads))
            {
                adam.step(head.params_mut(), g);
            }
        }
        let rmse = val_rmse(&model, samples, val_idx, &mut ws)?;
        if !rmse.is_finite() {
            return Err(CoreError::Diverged {
                epoch,
                lr: cfg.lr,
            });
        }
        history.push(EpochStats {
            epoch,
            train_loss: ep_loss / n_seen,
            loss_t: ep_t / n_seen,
            loss_f: ep_f / n_seen,
            loss_night: ep_n / n_seen,
            val_rmse: rmse,
        });
        if rmse < best_rmse {
            best_rmse = rmse;
            best_epoch = epoch;
            best_params = model.snapshot_params();
            stale = 0;
        } else {
            stale += 1;
            if stale > cfg.patience {
                break;
            }
        }
    }

    model.restore_params(&best_params);
    let (y, yhat) = val_predictions(&model, samples, val_idx, &mut ws)?;
    let val_metrics = compute_metrics(&y, &yhat)?;
    Ok(TrainedModel {
        model,
        history,
        best_epoch,
        val_metrics,
        val_indices: val_idx.to_vec(),
    })
}

/// Seeded shuffle split of the labeled rows into train/validation.
pub fn split_indices(samples: &SampleSet, cfg: &TrainConfig) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut labeled = samples.labeled_indices();
    if labeled.len() < 2 {
        return Err(CoreError::InvalidInput(
            "need at least 2 labeled rows to split".into(),
        ));
    }
    let mut rng = seeded(cfg.seed, STREAM_SPLIT);
    labeled.shuffle(&mut rng);
    let n_train = ((labeled.len() as f64 * cfg.split_fraction).round() as usize)
        .clamp(1, labeled.len() - 1);
    let train = labeled[..n_train].to_vec();
    let val = labeled[n_train..].to_vec();
    Ok((train, val))
}

/// Minimum labeled rows accepted by the public training entry points.
pub const MIN_TRAIN_ROWS: usize = 50;

/// Trains a model on a seeded shuffle split of the labeled rows.
pub fn train(
    kind: ModelKind,
    samples: &SampleSet,
    cfg: &TrainConfig,
    profile: BodyRadiationProfile,
) -> Result<TrainedModel> {
    let labeled = samples.labeled_indices();
    if labeled.len() < MIN_TRAIN_ROWS {
        return Err(CoreError::InvalidInput(format!(
            "need at least {MIN_TRAIN_ROWS} labeled rows, got {}",
            labeled.len()
        )));
    }
    let (train_idx, val_idx) = split_indices(samples, cfg)?;
    train_on_indices(kind, samples, &train_idx, &val_idx, cfg, profile, 0)
}

/// The physics-informed two-head model on an 80/20 split.
pub fn train_pinn(
    samples: &SampleSet,
    cfg: &TrainConfig,
    profile: BodyRadiationProfile,
) -> Result<TrainedModel> {
    train(ModelKind::Pinn, samples, cfg, profile)
}

/// The direct-regression baseline on the same trainer plumbing.
pub fn train_baseline(
    samples: &SampleSet,
    cfg: &TrainConfig,
    profile: BodyRadiationProfile,
) -> Result<TrainedModel> {
    train(ModelKind::Baseline, samples, cfg, profile)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub n_val: usize,
    pub rmse: f64,
    pub r2: Option<f64>,
    pub mape: f64,
    pub mbe: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: Vec<FoldResult>,
    pub mean_rmse: f64,
    pub std_rmse: f64,
    pub mean_r2: Option<f64>,
    pub mean_mape: f64,
    pub mean_mbe: f64,
}

/// Deterministic fold assignment: seeded shuffle, then contiguous folds
/// with the remainder spread over the leading folds (larger folds first).
pub fn fold_assignments(n: usize, k: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = seeded(seed, STREAM_FOLDS);
    idx.shuffle(&mut rng);
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(idx[start..start + len].to_vec());
        start += len;
    }
    folds
}

/// k-fold cross validation. Each fold retrains from scratch with its own
/// derived RNG streams and per-fold normalization.
pub fn cross_validate(
    kind: ModelKind,
    samples: &SampleSet,
    cfg: &TrainConfig,
    profile: BodyRadiationProfile,
) -> Result<CvReport> {
    cfg.validate()?;
    let labeled = samples.labeled_indices();
    let k = cfg.k_folds;
    if labeled.len() < 10 * k {
        return Err(CoreError::InvalidInput(format!(
            "cross validation needs at least {} labeled rows, got {}",
            10 * k,
            labeled.len()
        )));
    }
    let folds = fold_assignments(labeled.len(), k, cfg.seed);
    if folds.iter().any(|f| f.len() < cfg.batch_size.min(labeled.len() / k)) {
        // guarded above by the 10*k requirement; keep the explicit check
        // for tiny batch configurations
    }
    if folds.iter().any(|f| f.is_empty()) {
        return Err(CoreError::Config("fold smaller than one batch".into()));
    }

    let mut results = Vec::with_capacity(k);
    for (f, fold) in folds.iter().enumerate() {
        let val_idx: Vec<usize> = fold.iter().map(|&p| labeled[p]).collect();
        let train_idx: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|(g, _)| *g != f)
            .flat_map(|(_, positions)| positions.iter().map(|&p| labeled[p]))
            .collect();
        if val_idx.len() < cfg.batch_size && val_idx.len() < 10 {
            return Err(CoreError::Config("fold smaller than one batch".into()));
        }
        let trained = train_on_indices(
            kind,
            samples,
            &train_idx,
            &val_idx,
            cfg,
            profile,
            10 * (f as u64 + 1),
        )?;
        results.push(FoldResult {
            fold: f,
            n_val: val_idx.len(),
            rmse: trained.val_metrics.rmse,
            r2: trained.val_metrics.r2,
            mape: trained.val_metrics.mape,
            mbe: trained.val_metrics.mbe,
        });
    }

    let kf = k as f64;
    let mean_rmse = results.iter().map(|r| r.rmse).sum::<f64>() / kf;
    let std_rmse = (results
        .iter()
        .map(|r| (r.rmse - mean_rmse).powi(2))
        .sum::<f64>()
        / kf)
        .sqrt();
    let r2s: Vec<f64> = results.iter().filter_map(|r| r.r2).collect();
    let mean_r2 = if r2s.len() == results.len() {
        Some(r2s.iter().sum::<f64>() / kf)
    } else {
        None
    };
    Ok(CvReport {
        mean_rmse,
        std_rmse,
        mean_r2,
        mean_mape: results.iter().map(|r| r.mape).sum::<f64>() / kf,
        mean_mbe: results.iter().map(|r| r.mbe).sum::<f64>() / kf,
        folds: results,
    })
}

/// Compares analytic gradients of the batch loss against central finite
/// differences on `n_checks` randomly chosen parameters; returns the
/// maximum relative error with denominator max(|g|, 1e-8).
pub fn grad_check(
    model: &mut Model,
    samples: &SampleSet,
    idx: &[usize],
    weights: &LossWeights,
    h: f64,
    n_checks: usize,
    seed: u64,
) -> Result<f64> {
    if !(1e-6..=1e-2).contains(&h) {
        return Err(CoreError::InvalidInput(format!(
            "step h = {h} outside [1e-6, 1e-2]"
        )));
    }
    let mut ws = Workspace::default();
    let mut grads = ModelGrads::zeros_like(model);
    loss_batch(model, samples, idx, weights, Some(&mut grads), &mut ws)?;
    let flat_grad: Vec<f64> = grads.heads.concat();

    let n_params = model.n_params();
    let mut order: Vec<usize> = (0..n_params).collect();
    let mut rng = seeded(seed, STREAM_GRADCHECK);
    order.shuffle(&mut rng);
    let picks = &order[..n_checks.min(n_params)];

    let mut max_rel: f64 = 0.0;
    for &p in picks {
        let orig = model.get_param(p);
        model.set_param(p, orig + h);
        let lp = loss_batch(model, samples, idx, weights, None, &mut ws)?.total;
        model.set_param(p, orig - h);
        let lm = loss_batch(model, samples, idx, weights, None, &mut ws)?.total;
        model.set_param(p, orig);
        let fd = (lp - lm) / (2.0 * h);
        let g = flat_grad[p];
        let rel = (g - fd).abs() / g.abs().max(fd.abs()).max(1e-8);
        max_rel = max_rel.max(rel);
    }
    Ok(max_rel)
}
