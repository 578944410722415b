//! Flat key-value run configuration.
//!
//! Grammar: one `key = value` pair per line; `#` starts a comment; blank
//! lines are ignored. Unknown keys are rejected. The environment variable
//! `MRTFORGE_SEED` overrides the configured seed.

use std::path::{Path, PathBuf};

use crate::error::{CoreError, Result};
use crate::features::FeatureToggles;
use crate::nn::{ModelKind, TrainConfig};
use crate::radiation::{BodyRadiationProfile, SIGMA};

/// Seed override environment variable.
pub const SEED_ENV: &str = "MRTFORGE_SEED";

/// Training/evaluation run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub data_csv: PathBuf,
    pub image_dir: Option<PathBuf>,
    pub out_dir: PathBuf,
    /// "split" for an 80/20 run, "cv" for k-fold cross validation.
    pub mode: RunMode,
    pub model: ModelKind,
    pub train: TrainConfig,
    pub toggles: FeatureToggles,
    pub profile: BodyRadiationProfile,
    pub fisheye_size: u32,
    /// 0 = library default thread pool; 1 forces bit-reproducibility.
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    Split,
    CrossValidate,
}

fn parse_bool(v: &str, key: &str) -> Result<bool> {
    match v {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        _ => Err(CoreError::Config(format!(
            "key `{key}`: expected true/false, got `{v}`"
        ))),
    }
}

fn parse_num<T: std::str::FromStr>(v: &str, key: &str) -> Result<T> {
    v.parse()
        .map_err(|_| CoreError::Config(format!("key `{key}`: unparseable value `{v}`")))
}

impl RunConfig {
    /// Parses a config file. `data_csv` and `out_dir` are required keys.
    pub fn parse_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CoreError::Config(format!("{}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut data_csv: Option<PathBuf> = None;
        let mut image_dir: Option<PathBuf> = None;
        let mut out_dir: Option<PathBuf> = None;
        let mut mode = RunMode::Split;
        let mut model = ModelKind::Pinn;
        let mut train = TrainConfig::default();
        let mut toggles = FeatureToggles::default();
        let mut a_k = 0.70;
        let mut a_l = 0.97;
        let mut a1 = 0.97;
        let mut w_updown = 0.06;
        let mut w_others = 0.22;
        let mut sigma = SIGMA;
        let mut fisheye_size: u32 = 256;
        let mut threads: usize = 0;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CoreError::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            let v = value.trim();
            match key {
                "data_csv" => data_csv = Some(PathBuf::from(v)),
                "image_dir" => image_dir = Some(PathBuf::from(v)),
                "out_dir" => out_dir = Some(PathBuf::from(v)),
                "mode" => {
                    mode = match v {
                        "split" => RunMode::Split,
                        "cv" => RunMode::CrossValidate,
                        _ => {
                            return Err(CoreError::Config(format!(
                                "key `mode`: expected split|cv, got `{v}`"
                            )))
                        }
                    }
                }
                "model" => {
                    model = match v {
                        "pinn" => ModelKind::Pinn,
                        "baseline" => ModelKind::Baseline,
                        _ => {
                            return Err(CoreError::Config(format!(
                                "key `model`: expected pinn|baseline, got `{v}`"
                            )))
                        }
                    }
                }
                "seed" => train.seed = parse_num(v, key)?,
                "lr" => train.lr = parse_num(v, key)?,
                "batch_size" => train.batch_size = parse_num(v, key)?,
                "max_epochs" => train.max_epochs = parse_num(v, key)?,
                "patience" => train.patience = parse_num(v, key)?,
                "lambda_t" => train.lambda_t = parse_num(v, key)?,
                "lambda_f" => train.lambda_f = parse_num(v, key)?,
                "lambda_night" => train.lambda_night = parse_num(v, key)?,
                "k_folds" => train.k_folds = parse_num(v, key)?,
                "split_fraction" => train.split_fraction = parse_num(v, key)?,
                "hidden_dims" => {
                    train.hidden_dims = v
                        .split(',')
                        .map(|d| parse_num(d.trim(), key))
                        .collect::<Result<_>>()?;
                }
                "use_images" => toggles.use_images = parse_bool(v, key)?,
                "use_measured_shade" => toggles.use_measured_shade = parse_bool(v, key)?,
                "use_predicted_shade" => toggles.use_predicted_shade = parse_bool(v, key)?,
                "use_built_env" => toggles.use_built_env = parse_bool(v, key)?,
                "a_k" => a_k = parse_num(v, key)?,
                "a_l" => a_l = parse_num(v, key)?,
                "a1" => a1 = parse_num(v, key)?,
                "w_updown" => w_updown = parse_num(v, key)?,
                "w_others" => w_others = parse_num(v, key)?,
                "sigma" => sigma = parse_num(v, key)?,
                "fisheye_size" => fisheye_size = parse_num(v, key)?,
                "threads" => threads = parse_num(v, key)?,
                _ => {
                    return Err(CoreError::Config(format!(
                        "line {}: unknown key `{key}`",
                        lineno + 1
                    )))
                }
            }
        }

        if let Ok(seed) = std::env::var(SEED_ENV) {
            train.seed = seed.parse().map_err(|_| {
                CoreError::Config(format!("{SEED_ENV}: unparseable seed `{seed}`"))
            })?;
        }

        toggles.validate()?;
        train.validate()?;
        let profile = BodyRadiationProfile::new(a_k, a_l, a1, w_updown, w_others, sigma)?;
        Ok(RunConfig {
            data_csv: data_csv
                .ok_or_else(|| CoreError::Config("missing required key `data_csv`".into()))?,
            image_dir,
            out_dir: out_dir
                .ok_or_else(|| CoreError::Config("missing required key `out_dir`".into()))?,
            mode,
            model,
            train,
            toggles,
            profile,
            fisheye_size,
            threads,
        })
    }
}
