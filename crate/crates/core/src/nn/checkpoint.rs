//! Versioned JSON model checkpoints: specs, 64-bit parameters,
//! normalization statistics, the radiation profile, and the seed.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::features::FeatureToggles;
use crate::nn::mlp::Mlp;
use crate::nn::model::{BaselineModel, Model, Normalization, PinnModel};
use crate::nn::train::ModelKind;
use crate::radiation::BodyRadiationProfile;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SavedModel {
    Pinn {
        sw_head: Mlp,
        lw_head: Mlp,
        meta_dim: usize,
    },
    Baseline {
        mlp: Mlp,
    },
}

/// On-disk checkpoint contents.
#[derive(Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub seed: u64,
    pub toggles: FeatureToggles,
    pub fisheye_size: u32,
    pub split_fraction: f64,
    pub profile: BodyRadiationProfile,
    pub norm: Normalization,
    pub feature_names: Vec<String>,
    model: SavedModel,
}

impl Checkpoint {
    pub fn from_model(
        model: &Model,
        seed: u64,
        toggles: FeatureToggles,
        fisheye_size: u32,
        split_fraction: f64,
    ) -> Self {
        let (saved, profile, norm) = match model {
            Model::Pinn(m) => (
                SavedModel::Pinn {
                    sw_head: m.sw_head.clone(),
                    lw_head: m.lw_head.clone(),
                    meta_dim: m.meta_dim,
                },
                m.profile,
                m.norm.clone(),
            ),
            Model::Baseline(m) => (
                SavedModel::Baseline { mlp: m.mlp.clone() },
                BodyRadiationProfile::standing(),
                m.norm.clone(),
            ),
        };
        Checkpoint {
            version: CHECKPOINT_VERSION,
            seed,
            toggles,
            fisheye_size,
            split_fraction,
            profile,
            norm,
            feature_names: crate::features::feature_names(),
            model: saved,
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self.model {
            SavedModel::Pinn { .. } => ModelKind::Pinn,
            SavedModel::Baseline { .. } => ModelKind::Baseline,
        }
    }

    pub fn into_model(self) -> Model {
        match self.model {
            SavedModel::Pinn {
                sw_head,
                lw_head,
                meta_dim,
            } => Model::Pinn(PinnModel {
                sw_head,
                lw_head,
                profile: self.profile,
                norm: self.norm,
                meta_dim,
            }),
            SavedModel::Baseline { mlp } => Model::Baseline(BaselineModel {
                mlp,
                norm: self.norm,
            }),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let value: serde_json::Value = serde_json::from_reader(std::io::BufReader::new(file))?;
        let found = value
            .get("version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| CoreError::InvalidInput("checkpoint has no version field".into()))?
            as u32;
        if found != CHECKPOINT_VERSION {
            return Err(CoreError::CheckpointVersion {
                found,
                expected: CHECKPOINT_VERSION,
            });
        }
        Ok(serde_json::from_value(value)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{FEATURE_DIM, META_DIM};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_preserves_predictions_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let m = PinnModel::new(
            FEATURE_DIM,
            META_DIM,
            &[8, 8],
            BodyRadiationProfile::standing(),
            &mut rng,
        )
        .unwrap();
        let model = Model::Pinn(m);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ckpt.json");
        Checkpoint::from_model(&model, 7, FeatureToggles::default(), 256, 0.8)
            .save(&path)
            .unwrap();
        let loaded = Checkpoint::load(&path).unwrap().into_model();
        let x = vec![0.42; FEATURE_DIM];
        let a = model.predict(&x).unwrap();
        let b = loaded.predict(&x).unwrap();
        assert_eq!(a.tmrt_c.to_bits(), b.tmrt_c.to_bits());
    }

    #[test]
    fn version_mismatch_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let m = BaselineModel::new(FEATURE_DIM, &[4], &mut rng).unwrap();
        let model = Model::Baseline(m);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ckpt.json");
        Checkpoint::from_model(&model, 7, FeatureToggles::default(), 256, 0.8)
            .save(&path)
            .unwrap();
        // tamper with the version
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        v["version"] = serde_json::json!(99);
        std::fs::write(&path, serde_json::to_string(&v).unwrap()).unwrap();
        assert!(matches!(
            Checkpoint::load(&path),
            Err(CoreError::CheckpointVersion { found: 99, .. })
        ));
    }
}
