//! Subcommand implementations.

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use mrtforge_core::config::{RunConfig, RunMode};
use mrtforge_core::dataset::{impute_missing, ingest_csv, remove_outliers, write_csv, Dataset};
use mrtforge_core::error::{CoreError, Result};
use mrtforge_core::features::{build_samples, SampleSet};
use mrtforge_core::fisheye::{cube_to_fisheye, validate_projection, CubeMap, FisheyeImage};
use mrtforge_core::metrics::{compute_metrics, shade_accuracy, MetricsReport};
use mrtforge_core::nn::{
    cross_validate, train as train_model, Checkpoint, Model, TrainedModel, Workspace,
};
use mrtforge_core::sky::{predict_shade, segment_sky, SkyColorRule, SkyMask};
use mrtforge_core::solar::{solar_position, GeoTime};
use mrtforge_core::synth::{write_synth_dataset, SynthOptions};

pub fn fisheye(cube_dir: &Path, out_dir: &Path, size: u32) -> Result<ExitCode> {
    if !cube_dir.is_dir() {
        return Err(CoreError::InvalidInput(format!(
            "cube directory {} does not exist",
            cube_dir.display()
        )));
    }
    std::fs::create_dir_all(out_dir)?;

    // image ids discovered from the up-face files
    let mut ids: Vec<String> = Vec::new();
    for entry in std::fs::read_dir(cube_dir)? {
        let name = entry?.file_name().to_string_lossy().into_owned();
        if let Some(stem) = name.strip_suffix("_U.png") {
            ids.push(stem.to_string());
        }
    }
    ids.sort();
    if ids.is_empty() {
        return Err(CoreError::InvalidInput(format!(
            "no `*_U.png` cube faces found in {}",
            cube_dir.display()
        )));
    }

    let mut report = Vec::new();
    let mut any_fail = false;
    for id in &ids {
        let cube = CubeMap::load(cube_dir, id)?;
        let fe = cube_to_fisheye(&cube, size)?;
        fe.save(&out_dir.join(format!("{id}_fisheye.png")))?;
        let rule = SkyColorRule::fit(&fe);
        let ratio = validate_projection(&cube, &fe, |c| rule.is_sky(c));
        if !ratio.pass {
            any_fail = true;
            eprintln!(
                "{id}: sky exposure ratio mismatch {:.4} (fisheye {:.4} vs cube {:.4})",
                ratio.abs_diff, ratio.fisheye_fraction, ratio.cube_fraction
            );
        }
        report.push(serde_json::json!({
            "image_id": id,
            "fisheye_fraction": ratio.fisheye_fraction,
            "cube_fraction": ratio.cube_fraction,
            "abs_diff": ratio.abs_diff,
            "pass": ratio.pass,
        }));
    }
    std::fs::write(
        out_dir.join("fisheye_report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    eprintln!("converted {} cube maps", ids.len());
    Ok(if any_fail {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    })
}

#[allow(clippy::too_many_arguments)]
pub fn shade(
    fisheye_path: &Path,
    lat: f64,
    lon: f64,
    alt_m: f64,
    date: &str,
    time: &str,
    utc_offset: i32,
    mask_path: Option<&Path>,
) -> Result<ExitCode> {
    let mask: SkyMask = match mask_path {
        Some(p) => SkyMask::load(p)?,
        None => segment_sky(&FisheyeImage::load(fisheye_path)?),
    };
    let gt = GeoTime::parse(lat, lon, alt_m, date, time, utc_offset)?;
    let sun = solar_position(&gt)?;
    let pred = predict_shade(&mask, &sun);
    let out = serde_json::json!({
        "predicted_shade": pred.predicted_shade,
        "sun_disk_sky_fraction": pred.sun_disk_sky_fraction,
        "sun_altitude": sun.altitude_deg,
        "sun_azimuth": sun.azimuth_deg,
        "night": pred.night,
    });
    println!("{}", serde_json::to_string(&out)?);
    Ok(ExitCode::SUCCESS)
}

pub fn synth(n: usize, seed: u64, out: &Path, cube_size: u32) -> Result<ExitCode> {
    let opts = SynthOptions {
        n_scenes: n,
        seed,
        cube_size,
        ..Default::default()
    };
    let scenes = write_synth_dataset(&opts, out)?;
    eprintln!(
        "wrote {} scenes to {} (data.csv, truth.csv, images/)",
        scenes.len(),
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

/// ingest -> impute -> (optional) outlier removal -> feature assembly
fn prepare_samples(
    data: &Path,
    image_dir: Option<&Path>,
    toggles: mrtforge_core::features::FeatureToggles,
    fisheye_size: u32,
    drop_outliers: bool,
) -> Result<(Dataset, SampleSet)> {
    let (ds, report) = ingest_csv(data, image_dir)?;
    if !report.rejected.is_empty() {
        eprintln!("rejected {} rows:", report.rejected.len());
        for r in report.rejected.iter().take(20) {
            eprintln!("  row {}: {}", r.row, r.reason);
        }
    }
    eprintln!(
        "ingested {} records (T_mrt {:?}..{:?})",
        report.n_accepted, report.tmrt_min, report.tmrt_max
    );
    let (ds, imp) = impute_missing(&ds)?;
    if imp.imputed > 0 {
        eprintln!(
            "imputed {} values (max time gap {:.1} min)",
            imp.imputed, imp.max_gap_min
        );
    }
    let ds = if drop_outliers {
        let (ds, out) = remove_outliers(&ds);
        if !out.dropped.is_empty() {
            eprintln!("dropped {} outlier rows", out.dropped.len());
            for (row, field) in out.dropped.iter().take(20) {
                eprintln!("  record {row}: {field}");
            }
        }
        ds
    } else {
        ds
    };
    let samples = build_samples(&ds, toggles, fisheye_size)?;
    Ok((ds, samples))
}

fn write_history_csv(trained: &TrainedModel, path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "epoch,train_loss,loss_t,loss_f,loss_night,val_rmse")?;
    for e in &trained.history {
        writeln!(
            f,
            "{},{},{},{},{},{}",
            e.epoch, e.train_loss, e.loss_t, e.loss_f, e.loss_night, e.val_rmse
        )?;
    }
    f.flush()?;
    Ok(())
}

pub fn train(config_path: &Path) -> Result<ExitCode> {
    let cfg = RunConfig::parse_file(config_path)?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    let (ds, samples) = prepare_samples(
        &cfg.data_csv,
        cfg.image_dir.as_deref(),
        cfg.toggles,
        cfg.fisheye_size,
        true,
    )?;

    if cfg.mode == RunMode::CrossValidate {
        let report = cross_validate(cfg.model, &samples, &cfg.train, cfg.profile)?;
        std::fs::write(
            cfg.out_dir.join("cv_report.json"),
            serde_json::to_string_pretty(&report)?,
        )?;
        eprintln!(
            "cross validation: mean rmse {:.4} (+- {:.4}) over {} folds",
            report.mean_rmse,
            report.std_rmse,
            report.folds.len()
        );
    }

    // split training produces the checkpoint artifacts in both modes
    let trained = train_model(cfg.model, &samples, &cfg.train, cfg.profile)?;
    let ckpt = Checkpoint::from_model(
        &trained.model,
        cfg.train.seed,
        cfg.toggles,
        cfg.fisheye_size,
        cfg.train.split_fraction,
    );
    ckpt.save(&cfg.out_dir.join("checkpoint.json"))?;
    write_history_csv(&trained, &cfg.out_dir.join("history.csv"))?;
    std::fs::write(
        cfg.out_dir.join("metrics.json"),
        serde_json::to_string_pretty(&trained.val_metrics)?,
    )?;

    // the held-out rows, re-serialized so `evaluate` can reproduce the
    // training-log metrics exactly
    let val_ds = Dataset {
        records: trained
            .val_indices
            .iter()
            .map(|&i| ds.records[i].clone())
            .collect(),
        image_dir: ds.image_dir.clone(),
    };
    write_csv(&val_ds, &cfg.out_dir.join("val_split.csv"))?;

    eprintln!(
        "trained {} (best epoch {}): val rmse {:.4}, r2 {:?}",
        match cfg.model {
            mrtforge_core::nn::ModelKind::Pinn => "pinn",
            mrtforge_core::nn::ModelKind::Baseline => "baseline",
        },
        trained.best_epoch,
        trained.val_metrics.rmse,
        trained.val_metrics.r2
    );
    println!("{}", serde_json::to_string(&trained.val_metrics)?);
    Ok(ExitCode::SUCCESS)
}

/// Metrics of a checkpoint on labeled rows; includes shade accuracy when
/// both a measured flag and an image-derived prediction are available.
fn evaluate_inner(
    checkpoint: &Path,
    data: &Path,
    image_dir: Option<&Path>,
) -> Result<MetricsReport> {
    let ckpt = Checkpoint::load(checkpoint)?;
    let toggles = ckpt.toggles;
    let fisheye_size = ckpt.fisheye_size;
    let model = ckpt.into_model();
    let (ds, samples) = prepare_samples(data, image_dir, toggles, fisheye_size, false)?;

    let mut ws = Workspace::default();
    let mut y = Vec::new();
    let mut yhat = Vec::new();
    let mut shade_pred = Vec::new();
    let mut shade_truth = Vec::new();
    for i in 0..samples.len() {
        let Some(label) = samples.tmrt[i] else {
            continue;
        };
        let p = model.predict_with(&samples.features[i], &mut ws)?;
        y.push(label);
        yhat.push(p.tmrt_c);
        if let Some(measured) = ds.records[i].shade_measured {
            if toggles.use_images {
                shade_pred.push(samples.features[i][mrtforge_core::features::META_DIM + 1] > 0.5);
                shade_truth.push(measured);
            } else if toggles.use_predicted_shade {
                shade_pred.push(samples.features[i][7] > 0.5);
                shade_truth.push(measured);
            }
        }
    }
    if y.is_empty() {
        return Err(CoreError::InvalidInput(
            "no labeled rows to evaluate".into(),
        ));
    }
    let mut report = compute_metrics(&y, &yhat)?;
    if !shade_pred.is_empty() {
        report.shade_accuracy = Some(shade_accuracy(&shade_pred, &shade_truth)?);
    }
    Ok(report)
}

pub fn evaluate(
    checkpoint: &Path,
    data: &Path,
    image_dir: Option<&Path>,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let report = evaluate_inner(checkpoint, data, image_dir)?;
    let json = serde_json::to_string_pretty(&report)?;
    match out {
        Some(p) => std::fs::write(p, json)?,
        None => println!("{json}"),
    }
    Ok(ExitCode::SUCCESS)
}

pub const PREDICTIONS_HEADER: &str =
    "row,image_id,S_up,S_down,S_n,S_e,S_s,S_w,L_up,L_down,L_n,L_e,L_s,L_w,tmrt_pred_C,tmrt_obs_C";

pub fn predict(
    checkpoint: &Path,
    data: &Path,
    out: &Path,
    image_dir: Option<&Path>,
) -> Result<ExitCode> {
    let ckpt = Checkpoint::load(checkpoint)?;
    let toggles = ckpt.toggles;
    let fisheye_size = ckpt.fisheye_size;
    let model: Model = ckpt.into_model();
    let (ds, samples) = prepare_samples(data, image_dir, toggles, fisheye_size, false)?;

    let mut ws = Workspace::default();
    let mut f = std::io::BufWriter::new(std::fs::File::create(out)?);
    writeln!(f, "{PREDICTIONS_HEADER}")?;
    for i in 0..samples.len() {
        let p = model.predict_with(&samples.features[i], &mut ws)?;
        let id = ds.records[i].image_id.clone().unwrap_or_default();
        let fluxes = p
            .fluxes
            .map(|fl| {
                fl.as_vec()
                    .iter()
                    .map(|v| format!("{v}"))
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .unwrap_or_else(|| ",,,,,,,,,,,".to_string());
        let obs = ds.records[i]
            .tmrt_c
            .map(|t| format!("{t}"))
            .unwrap_or_default();
        writeln!(f, "{i},{id},{fluxes},{},{obs}", p.tmrt_c)?;
    }
    f.flush()?;
    eprintln!("wrote {} prediction rows to {}", samples.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

pub fn plot(pred: &Path, out: &Path) -> Result<ExitCode> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(pred)
        .map_err(|e| CoreError::InvalidInput(format!("{}: {e}", pred.display())))?;
    let headers = reader.headers()?.clone();
    let pred_col = headers
        .iter()
        .position(|h| h == "tmrt_pred_C")
        .ok_or_else(|| CoreError::InvalidInput("missing column tmrt_pred_C".into()))?;
    let obs_col = headers
        .iter()
        .position(|h| h == "tmrt_obs_C")
        .ok_or_else(|| CoreError::InvalidInput("missing column tmrt_obs_C".into()))?;

    let mut pairs = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let p: Option<f64> = rec.get(pred_col).and_then(|s| s.parse().ok());
        let o: Option<f64> = rec.get(obs_col).and_then(|s| s.parse().ok());
        if let (Some(p), Some(o)) = (p, o) {
            pairs.push((o, p));
        }
    }
    if pairs.is_empty() {
        return Err(CoreError::InvalidInput(
            "no rows with both observed and predicted T_mrt".into(),
        ));
    }
    let (obs, predv): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
    let metrics = compute_metrics(&obs, &predv)?;
    let svg = crate::svg::scatter_svg(&pairs, &metrics);
    std::fs::write(out, svg)?;
    eprintln!("plotted {} points to {}", pairs.len(), out.display());
    Ok(ExitCode::SUCCESS)
}
