//! Python bindings for the core types and operations: the radiation
//! balance, solar geometry, fisheye projection, sky analysis, metrics,
//! the synthetic generator, and checkpoint inference.

use std::path::{Path, PathBuf};

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use mrtforge_core::dataset::{impute_missing, ingest_csv};
use mrtforge_core::features::build_samples;
use mrtforge_core::fisheye;
use mrtforge_core::metrics;
use mrtforge_core::nn::{Checkpoint, Workspace};
use mrtforge_core::radiation::{self, BodyRadiationProfile, DirectionalFluxes};
use mrtforge_core::sky;
use mrtforge_core::solar::{self, GeoTime};
use mrtforge_core::synth::{write_synth_dataset, SynthOptions};
use mrtforge_core::CoreError;

fn err(e: CoreError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fluxes_from(shortwave: [f64; 6], longwave: [f64; 6]) -> DirectionalFluxes {
    DirectionalFluxes {
        shortwave,
        longwave,
    }
}

/// Absorption coefficients and directional weights of the human body.
#[pyclass(get_all, set_all, from_py_object)]
#[derive(Clone)]
struct BodyProfile {
    a_k: f64,
    a_l: f64,
    a1: f64,
    w_updown: f64,
    w_others: f64,
    sigma: f64,
}

#[pymethods]
impl BodyProfile {
    #[new]
    #[pyo3(signature = (a_k=0.70, a_l=0.97, a1=0.97, w_updown=0.06, w_others=0.22, sigma=radiation::SIGMA))]
    fn new(a_k: f64, a_l: f64, a1: f64, w_updown: f64, w_others: f64, sigma: f64) -> PyResult<Self> {
        // validate through the core constructor
        BodyRadiationProfile::new(a_k, a_l, a1, w_updown, w_others, sigma).map_err(err)?;
        Ok(BodyProfile {
            a_k,
            a_l,
            a1,
            w_updown,
            w_others,
            sigma,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "BodyProfile(a_k={}, a_l={}, a1={}, w_updown={}, w_others={}, sigma={})",
            self.a_k, self.a_l, self.a1, self.w_updown, self.w_others, self.sigma
        )
    }
}

impl BodyProfile {
    fn to_core(&self) -> PyResult<BodyRadiationProfile> {
        BodyRadiationProfile::new(
            self.a_k,
            self.a_l,
            self.a1,
            self.w_updown,
            self.w_others,
            self.sigma,
        )
        .map_err(err)
    }
}

fn profile_or_default(profile: Option<&BodyProfile>) -> PyResult<BodyRadiationProfile> {
    match profile {
        Some(p) => p.to_core(),
        None => Ok(BodyRadiationProfile::standing()),
    }
}

/// Total absorbed radiative flux density, W/m^2. Flux order per band:
/// up, down, north, east, south, west.
#[pyfunction]
#[pyo3(signature = (shortwave, longwave, profile=None))]
fn total_flux(
    shortwave: [f64; 6],
    longwave: [f64; 6],
    profile: Option<&BodyProfile>,
) -> PyResult<f64> {
    radiation::total_flux(&fluxes_from(shortwave, longwave), &profile_or_default(profile)?)
        .map_err(err)
}

/// Mean radiant temperature in degrees Celsius.
#[pyfunction]
#[pyo3(signature = (shortwave, longwave, profile=None))]
fn tmrt_from_fluxes(
    shortwave: [f64; 6],
    longwave: [f64; 6],
    profile: Option<&BodyProfile>,
) -> PyResult<f64> {
    radiation::tmrt_from_fluxes(&fluxes_from(shortwave, longwave), &profile_or_default(profile)?)
        .map_err(err)
}

/// Partial derivatives of T_mrt: (d/dS per direction, d/dL per direction).
#[pyfunction]
#[pyo3(signature = (shortwave, longwave, profile=None))]
fn tmrt_gradient(
    shortwave: [f64; 6],
    longwave: [f64; 6],
    profile: Option<&BodyProfile>,
) -> PyResult<([f64; 6], [f64; 6])> {
    let g = radiation::tmrt_gradient(
        &fluxes_from(shortwave, longwave),
        &profile_or_default(profile)?,
    )
    .map_err(err)?;
    let mut s = [0.0; 6];
    let mut l = [0.0; 6];
    s.copy_from_slice(&g[..6]);
    l.copy_from_slice(&g[6..]);
    Ok((s, l))
}

/// Sun position for a local civil timestamp:
/// (altitude_deg, azimuth_deg, minutes_from_sunrise).
#[pyfunction]
fn solar_position(
    lat: f64,
    lon: f64,
    alt_m: f64,
    date: &str,
    time: &str,
    utc_offset_min: i32,
) -> PyResult<(f64, f64, f64)> {
    let gt = GeoTime::parse(lat, lon, alt_m, date, time, utc_offset_min).map_err(err)?;
    let pos = solar::solar_position(&gt).map_err(err)?;
    Ok((pos.altitude_deg, pos.azimuth_deg, pos.minutes_from_sunrise))
}

/// Minutes since the day's sunrise (negative before sunrise).
#[pyfunction]
fn sunrise_minutes(
    lat: f64,
    lon: f64,
    alt_m: f64,
    date: &str,
    time: &str,
    utc_offset_min: i32,
) -> PyResult<f64> {
    let gt = GeoTime::parse(lat, lon, alt_m, date, time, utc_offset_min).map_err(err)?;
    solar::sunrise_minutes(&gt).map_err(err)
}

/// Equiangular fisheye coordinates of a sky direction.
#[pyfunction]
fn direction_to_pixel(azimuth_deg: f64, altitude_deg: f64, size: u32) -> PyResult<(f64, f64)> {
    fisheye::direction_to_pixel(azimuth_deg, altitude_deg, size).map_err(err)
}

/// Inverse projection: continuous pixel coordinates to (azimuth, altitude).
#[pyfunction]
fn pixel_to_direction(x: f64, y: f64, size: u32) -> PyResult<(f64, f64)> {
    fisheye::pixel_to_direction(x, y, size).map_err(err)
}

/// Projects `<image_id>_{N,E,S,W,U,D}.png` in `cube_dir` to a fisheye PNG.
#[pyfunction]
#[pyo3(signature = (cube_dir, image_id, out_path, size=1000))]
fn cube_to_fisheye_files(
    cube_dir: PathBuf,
    image_id: &str,
    out_path: PathBuf,
    size: u32,
) -> PyResult<()> {
    let cube = fisheye::CubeMap::load(&cube_dir, image_id).map_err(err)?;
    let fe = fisheye::cube_to_fisheye(&cube, size).map_err(err)?;
    fe.save(&out_path).map_err(err)
}

/// Image-derived sky summary.
#[pyclass(get_all)]
struct SkyReport {
    svf: f64,
    directional_sky: Vec<f64>,
    sun_disk_sky_fraction: f64,
    predicted_shade: bool,
    night: bool,
}

/// Segments a fisheye image (or reads an external mask) and reports SVF,
/// directional sky fractions, and the sun-disk shade decision for a sun
/// position given by place and time.
#[pyfunction]
#[pyo3(signature = (fisheye_path, lat, lon, alt_m, date, time, utc_offset_min, mask_path=None))]
#[allow(clippy::too_many_arguments)]
fn sky_features(
    fisheye_path: PathBuf,
    lat: f64,
    lon: f64,
    alt_m: f64,
    date: &str,
    time: &str,
    utc_offset_min: i32,
    mask_path: Option<PathBuf>,
) -> PyResult<SkyReport> {
    let mask = match mask_path {
        Some(p) => sky::SkyMask::load(&p).map_err(err)?,
        None => sky::segment_sky(&fisheye::FisheyeImage::load(&fisheye_path).map_err(err)?),
    };
    let gt = GeoTime::parse(lat, lon, alt_m, date, time, utc_offset_min).map_err(err)?;
    let sun = solar::solar_position(&gt).map_err(err)?;
    let f = sky::sky_features(&mask, &sun);
    Ok(SkyReport {
        svf: f.svf,
        directional_sky: f.directional_sky,
        sun_disk_sky_fraction: f.sun_disk_sky_fraction,
        predicted_shade: f.predicted_shade,
        night: f.night,
    })
}

/// Evaluation metrics over paired actual/predicted values.
#[pyclass(get_all)]
struct Metrics {
    rmse: f64,
    r2: Option<f64>,
    mape: f64,
    mbe: f64,
    n: usize,
    mape_excluded: usize,
}

#[pyfunction]
fn compute_metrics(actual: Vec<f64>, predicted: Vec<f64>) -> PyResult<Metrics> {
    let m = metrics::compute_metrics(&actual, &predicted).map_err(err)?;
    Ok(Metrics {
        rmse: m.rmse,
        r2: m.r2,
        mape: m.mape,
        mbe: m.mbe,
        n: m.n,
        mape_excluded: m.mape_excluded,
    })
}

#[pyfunction]
fn shade_accuracy(predicted: Vec<bool>, truth: Vec<bool>) -> PyResult<f64> {
    metrics::shade_accuracy(&predicted, &truth).map_err(err)
}

/// Writes a synthetic labeled dataset (data.csv, truth.csv, images/).
#[pyfunction]
#[pyo3(signature = (n, seed, out_dir, cube_size=128))]
fn synth_generate(n: usize, seed: u64, out_dir: PathBuf, cube_size: u32) -> PyResult<usize> {
    if n == 0 {
        return Err(PyValueError::new_err("n must be at least 1"));
    }
    let opts = SynthOptions {
        n_scenes: n,
        seed,
        cube_size,
        ..Default::default()
    };
    let scenes = write_synth_dataset(&opts, &out_dir).map_err(err)?;
    Ok(scenes.len())
}

/// Runs a checkpoint over a records CSV; returns per-row predicted T_mrt.
#[pyfunction]
#[pyo3(signature = (checkpoint, data_csv, image_dir=None))]
fn predict_tmrt(
    checkpoint: PathBuf,
    data_csv: PathBuf,
    image_dir: Option<PathBuf>,
) -> PyResult<Vec<f64>> {
    let ckpt = Checkpoint::load(&checkpoint).map_err(err)?;
    let toggles = ckpt.toggles;
    let fisheye_size = ckpt.fisheye_size;
    let model = ckpt.into_model();
    let (ds, _) = ingest_csv(&data_csv, image_dir.as_deref().map(Path::new)).map_err(err)?;
    let (ds, _) = impute_missing(&ds).map_err(err)?;
    let samples = build_samples(&ds, toggles, fisheye_size).map_err(err)?;
    let mut ws = Workspace::default();
    let mut out = Vec::with_capacity(samples.len());
    for i in 0..samples.len() {
        out.push(
            model
                .predict_with(&samples.features[i], &mut ws)
                .map_err(err)?
                .tmrt_c,
        );
    }
    Ok(out)
}

#[pymodule]
fn mrtforge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("SIGMA", radiation::SIGMA)?;
    m.add_class::<BodyProfile>()?;
    m.add_class::<SkyReport>()?;
    m.add_class::<Metrics>()?;
    m.add_function(wrap_pyfunction!(total_flux, m)?)?;
    m.add_function(wrap_pyfunction!(tmrt_from_fluxes, m)?)?;
    m.add_function(wrap_pyfunction!(tmrt_gradient, m)?)?;
    m.add_function(wrap_pyfunction!(solar_position, m)?)?;
    m.add_function(wrap_pyfunction!(sunrise_minutes, m)?)?;
    m.add_function(wrap_pyfunction!(direction_to_pixel, m)?)?;
    m.add_function(wrap_pyfunction!(pixel_to_direction, m)?)?;
    m.add_function(wrap_pyfunction!(cube_to_fisheye_files, m)?)?;
    m.add_function(wrap_pyfunction!(sky_features, m)?)?;
    m.add_function(wrap_pyfunction!(compute_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(shade_accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(synth_generate, m)?)?;
    m.add_function(wrap_pyfunction!(predict_tmrt, m)?)?;
    Ok(())
}
