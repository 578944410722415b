//! Model input assembly: metadata block plus image-derived block, with
//! ablation toggles realized as feature masking so every configuration
//! shares one architecture.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{CoreError, Result};
use crate::fisheye::{cube_to_fisheye, CubeMap, FisheyeImage};
use crate::sky::{segment_sky, sky_features, SkyFeatures, SkyMask, DIRECTIONAL_CELLS};
use crate::solar::solar_position;

/// Metadata block width.
pub const META_DIM: usize = 12;
/// Image block width: svf + shade flag + 32 directional sky fractions.
pub const IMAGE_DIM: usize = 2 + DIRECTIONAL_CELLS;
/// Full feature vector width.
pub const FEATURE_DIM: usize = META_DIM + IMAGE_DIM;

/// Ablation axes. Measured and predicted shade are mutually exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureToggles {
    pub use_images: bool,
    pub use_measured_shade: bool,
    pub use_predicted_shade: bool,
    pub use_built_env: bool,
}

impl Default for FeatureToggles {
    fn default() -> Self {
        FeatureToggles {
            use_images: true,
            use_measured_shade: true,
            use_predicted_shade: false,
            use_built_env: false,
        }
    }
}

impl FeatureToggles {
    pub fn validate(&self) -> Result<()> {
        if self.use_measured_shade && self.use_predicted_shade {
            return Err(CoreError::Config(
                "use_measured_shade and use_predicted_shade are mutually exclusive".into(),
            ));
        }
        Ok(())
    }

    fn needs_image(&self) -> bool {
        self.use_images || self.use_predicted_shade
    }
}

pub fn feature_names() -> Vec<String> {
    let mut names = vec![
        "air_temp_C".to_string(),
        "rh_pct".to_string(),
        "wind_ms".to_string(),
        "sun_altitude_deg".to_string(),
        "sun_azimuth_sin".to_string(),
        "sun_azimuth_cos".to_string(),
        "minutes_from_sunrise".to_string(),
        "shade_flag".to_string(),
        "svf_meta".to_string(),
        "pct_trees".to_string(),
        "pct_buildings".to_string(),
        "pct_impervious".to_string(),
        "img_svf".to_string(),
        "img_shade".to_string(),
    ];
    for i in 0..DIRECTIONAL_CELLS {
        names.push(format!("img_sky_{i}"));
    }
    names
}

/// Assembled training inputs. Feature vectors are raw (unnormalized);
/// normalization statistics belong to the model.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub features: Vec<Vec<f64>>,
    pub tmrt: Vec<Option<f64>>,
    /// Twelve flux labels per sample (shortwave then longwave), missing
    /// components skipped by the flux loss term.
    pub flux_labels: Vec<[Option<f64>; 12]>,
    /// Sun at or below the horizon.
    pub night: Vec<bool>,
    pub toggles: FeatureToggles,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// Indices of samples carrying a T_mrt label.
    pub fn labeled_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.tmrt[i].is_some()).collect()
    }
}

/// Derives image features for one image id: prefers an external mask
/// (`<id>_mask.png`), then a prebuilt fisheye (`<id>_fisheye.png`), and
/// finally projects the cube faces (`<id>_{N,E,S,W,U,D}.png`).
pub fn extract_sky_features(
    image_dir: &Path,
    image_id: &str,
    fisheye_size: u32,
    sun: &crate::solar::SolarPosition,
) -> Result<SkyFeatures> {
    let mask_path = image_dir.join(format!("{image_id}_mask.png"));
    let mask: SkyMask = if mask_path.exists() {
        SkyMask::load(&mask_path)?
    } else {
        let fisheye_path = image_dir.join(format!("{image_id}_fisheye.png"));
        let fe: FisheyeImage = if fisheye_path.exists() {
            FisheyeImage::load(&fisheye_path)?
        } else {
            let cube = CubeMap::load(image_dir, image_id)?;
            cube_to_fisheye(&cube, fisheye_size)?
        };
        segment_sky(&fe)
    };
    Ok(sky_features(&mask, sun))
}

/// Builds the sample set for a dataset, deriving image features where the
/// configuration needs them. Image work runs in parallel per image and is
/// deterministic regardless of thread count.
pub fn build_samples(ds: &Dataset, toggles: FeatureToggles, fisheye_size: u32) -> Result<SampleSet> {
    toggles.validate()?;

    // solar positions first; they are needed for both features and labels
    let suns: Vec<crate::solar::SolarPosition> = ds
        .records
        .iter()
        .map(|r| solar_position(&r.geo))
        .collect::<Result<_>>()?;

    // image features per unique id
    let mut sky: BTreeMap<String, SkyFeatures> = BTreeMap::new();
    if toggles.needs_image() {
        let image_dir = ds.image_dir.as_deref().ok_or_else(|| {
            CoreError::Config("configuration needs images but no image_dir is set".into())
        })?;
        let mut wanted: Vec<(String, usize)> = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for (i, r) in ds.records.iter().enumerate() {
            let id = r.image_id.as_ref().ok_or_else(|| {
                CoreError::InvalidInput(format!(
                    "record {i} has no image reference but the configuration needs images"
                ))
            })?;
            if seen.insert(id.clone()) {
                wanted.push((id.clone(), i));
            }
        }
        let computed: Vec<(String, Result<SkyFeatures>)> = wanted
            .par_iter()
            .map(|(id, i)| {
                (
                    id.clone(),
                    extract_sky_features(image_dir, id, fisheye_size, &suns[*i]),
                )
            })
            .collect();
        for (id, res) in computed {
            sky.insert(id, res?);
        }
    }

    let mut features = Vec::with_capacity(ds.records.len());
    let mut tmrt = Vec::with_capacity(ds.records.len());
    let mut flux_labels = Vec::with_capacity(ds.records.len());
    let mut night = Vec::with_capacity(ds.records.len());

    for (i, r) in ds.records.iter().enumerate() {
        let sun = &suns[i];
        let sf = r.image_id.as_ref().and_then(|id| sky.get(id));

        let mut x = vec![0.0; FEATURE_DIM];
        x[0] = r.air_temp_c.ok_or_else(|| missing(i, "air_temp_C"))?;
        x[1] = r.rh_pct.ok_or_else(|| missing(i, "rh_pct"))?;
        x[2] = r.wind_ms.ok_or_else(|| missing(i, "wind_ms"))?;
        x[3] = sun.altitude_deg;
        let az = sun.azimuth_deg.to_radians();
        x[4] = az.sin();
        x[5] = az.cos();
        x[6] = sun.minutes_from_sunrise;
        x[7] = if toggles.use_measured_shade {
            let s = r
                .shade_measured
                .ok_or_else(|| missing(i, "shade (measured)"))?;
            if s {
                1.0
            } else {
                0.0
            }
        } else if toggles.use_predicted_shade {
            let sf = sf.ok_or_else(|| missing(i, "image features"))?;
            if sf.predicted_shade {
                1.0
            } else {
                0.0
            }
        } else {
            0.0
        };
        if toggles.use_built_env {
            x[8] = r.svf_meta.unwrap_or(0.0);
            x[9] = r.pct_trees.unwrap_or(0.0);
            x[10] = r.pct_buildings.unwrap_or(0.0);
            x[11] = r.pct_impervious.unwrap_or(0.0);
        }
        if toggles.use_images {
            let sf = sf.ok_or_else(|| missing(i, "image features"))?;
            x[META_DIM] = sf.svf;
            x[META_DIM + 1] = if sf.predicted_shade { 1.0 } else { 0.0 };
            for (k, v) in sf.directional_sky.iter().enumerate() {
                x[META_DIM + 2 + k] = *v;
            }
        }

        features.push(x);
        tmrt.push(r.tmrt_c);
        flux_labels.push(r.flux_labels());
        night.push(sun.altitude_deg <= 0.0);
    }

    Ok(SampleSet {
        features,
        tmrt,
        flux_labels,
        night,
        toggles,
    })
}

fn missing(row: usize, what: &str) -> CoreError {
    CoreError::InvalidInput(format!("record {row}: missing {what}"))
}
