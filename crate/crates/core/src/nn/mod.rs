//! Dense-network engine with reverse-mode differentiation through the
//! radiation physics layer, plus training, cross validation, random
//! hyperparameter search, and checkpointing.

pub mod adam;
pub mod checkpoint;
pub mod mlp;
pub mod model;
pub mod search;
pub mod train;

pub use checkpoint::{Checkpoint, CHECKPOINT_VERSION};
pub use mlp::{Activation, Mlp, MlpSpec, OutputTransform};
pub use model::{
    loss_batch, BaselineModel, LossComponents, LossWeights, Model, ModelGrads, Normalization,
    PinnModel, Prediction, Workspace,
};
pub use search::{random_search, SearchReport, SearchSpace, TrialResult};
pub use train::{
    cross_validate, fold_assignments, grad_check, split_indices, train, train_on_indices,
    CvReport, EpochStats, FoldResult, ModelKind, TrainConfig, TrainedModel,
};
