//! Synthetic canyon-scene generator.
//!
//! Each scene is a uniform sky plus 0-3 rectangular wall occluders around
//! an observation point in Tempe, with a sun position sampled over the
//! June-August campaign window. Six-directional fluxes are computed in
//! closed form (direct beam, isotropic diffuse, Lambertian reflections and
//! three-temperature longwave), and the stored T_mrt label is the exact
//! output of the radiation balance on those fluxes, so generated data can
//! serve as ground truth for the full pipeline.
//!
//! Surface temperatures and sky irradiance are deterministic functions of
//! observable inputs (air temperature, humidity, sun altitude, shade), so
//! the mapping from features to fluxes is learnable; the stated sampling
//! ranges for DNI/DHI and surface temperature offsets are respected.

use std::path::Path;

use image::{Rgb, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::{Dataset, ObservationRecord};
use crate::error::Result;
use crate::fisheye::{direction_vector, CubeMap, Face};
use crate::radiation::{
    tmrt_from_fluxes, BodyRadiationProfile, Direction, DirectionalFluxes, SIGMA,
};
use crate::solar::{solar_position, GeoTime};

/// Tempe, AZ campaign site.
pub const SITE_LAT: f64 = 33.4255;
pub const SITE_LON: f64 = -111.94;
pub const SITE_ALT_M: f64 = 360.0;
pub const SITE_UTC_OFFSET_MIN: i32 = -420;

/// Ground albedo used for reflected shortwave.
const ALBEDO: f64 = 0.20;

/// Angular radius of the rendered sun disk, degrees.
const SUN_DISK_RENDER_DEG: f64 = 2.0;

#[derive(Debug, Clone, Copy)]
pub struct Wall {
    pub az_center_deg: f64,
    pub az_halfwidth_deg: f64,
    pub elev_top_deg: f64,
}

impl Wall {
    fn contains(&self, az_deg: f64, alt_deg: f64) -> bool {
        if alt_deg < 0.0 || alt_deg > self.elev_top_deg {
            return false;
        }
        let mut d = (az_deg - self.az_center_deg).rem_euclid(360.0);
        if d > 180.0 {
            d = 360.0 - d;
        }
        d <= self.az_halfwidth_deg
    }
}

/// Scene geometry plus the sampled weather.
#[derive(Debug, Clone)]
pub struct Scene {
    pub walls: Vec<Wall>,
    pub air_temp_c: f64,
    pub rh_pct: f64,
    pub wind_ms: f64,
    pub geo: GeoTime,
    /// Per-scene noise key for the renderer texture.
    noise_key: u64,
}

impl Scene {
    /// True when the direction is blocked by a wall (sky directions only).
    pub fn occluded(&self, az_deg: f64, alt_deg: f64) -> bool {
        self.walls.iter().any(|w| w.contains(az_deg, alt_deg))
    }

    /// Hand-built scene for tests and examples.
    pub fn fixture(walls: Vec<Wall>, air_temp_c: f64, rh_pct: f64) -> Self {
        Scene {
            walls,
            air_temp_c,
            rh_pct,
            wind_ms: 1.0,
            geo: GeoTime::new(
                SITE_LAT,
                SITE_LON,
                SITE_ALT_M,
                2018,
                7,
                1,
                12,
                0,
                0.0,
                SITE_UTC_OFFSET_MIN,
            )
            .expect("fixture geotime valid"),
            noise_key: 0xFEED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    Sky,
    Wall,
    Ground,
}

/// Ground-truth labels for one scene.
#[derive(Debug, Clone)]
pub struct SceneTruth {
    pub image_id: String,
    /// true = sun obstructed (or below the horizon).
    pub shade: bool,
    pub night: bool,
    /// Cosine-weighted sky view factor at the observation point.
    pub svf: f64,
    pub sun_altitude_deg: f64,
    pub sun_azimuth_deg: f64,
    pub fluxes: DirectionalFluxes,
    pub tmrt_c: f64,
}

/// Generator options.
#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub n_scenes: usize,
    pub seed: u64,
    /// Cube face edge length in pixels.
    pub cube_size: u32,
    /// Local-time sampling window in minutes since midnight.
    pub time_window_min: (f64, f64),
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            n_scenes: 100,
            seed: 42,
            cube_size: 128,
            time_window_min: (5.0 * 60.0, 22.0 * 60.0),
        }
    }
}

/// One generated scene: the observation record, its ground truth, and the
/// scene description needed to render cube faces.
pub struct GeneratedScene {
    pub record: ObservationRecord,
    pub truth: SceneTruth,
    pub scene: Scene,
}

fn sensor_axis(d: Direction) -> [f64; 3] {
    match d {
        Direction::Up => [0.0, 0.0, 1.0],
        Direction::Down => [0.0, 0.0, -1.0],
        Direction::North => [0.0, 1.0, 0.0],
        Direction::East => [1.0, 0.0, 0.0],
        Direction::South => [0.0, -1.0, 0.0],
        Direction::West => [-1.0, 0.0, 0.0],
    }
}

/// Cosine-weighted view factors (sky, wall, ground) per sensor direction,
/// by midpoint quadrature over a 1-degree sphere grid shared across the
/// six sensors.
fn view_factors(scene: &Scene) -> [[f64; 3]; 6] {
    const N_THETA: usize = 180;
    const N_PHI: usize = 360;
    // classify the sphere once
    let mut regions = vec![Region::Ground; N_THETA * N_PHI];
    let mut dirs = vec![[0.0f64; 3]; N_THETA * N_PHI];
    let mut sin_theta = vec![0.0f64; N_THETA];
    for it in 0..N_THETA {
        let theta = (it as f64 + 0.5) / N_THETA as f64 * std::f64::consts::PI;
        sin_theta[it] = theta.sin();
        let alt = 90.0 - theta.to_degrees();
        for ip in 0..N_PHI {
            let az = (ip as f64 + 0.5) / N_PHI as f64 * 360.0;
            let idx = it * N_PHI + ip;
            dirs[idx] = direction_vector(az, alt);
            regions[idx] = if alt < 0.0 {
                Region::Ground
            } else if scene.occluded(az, alt) {
                Region::Wall
            } else {
                Region::Sky
            };
        }
    }

    let mut out = [[0.0; 3]; 6];
    for d in Direction::ALL {
        let axis = sensor_axis(d);
        let mut acc = [0.0; 3];
        let mut total = 0.0;
        for it in 0..N_THETA {
            let w_row = sin_theta[it];
            for ip in 0..N_PHI {
                let idx = it * N_PHI + ip;
                let v = dirs[idx];
                let cosp = v[0] * axis[0] + v[1] * axis[1] + v[2] * axis[2];
                if cosp <= 0.0 {
                    continue;
                }
                let w = cosp * w_row;
                total += w;
                match regions[idx] {
                    Region::Sky => acc[0] += w,
                    Region::Wall => acc[1] += w,
                    Region::Ground => acc[2] += w,
                }
            }
        }
        for k in 0..3 {
            acc[k] /= total;
        }
        out[d.index()] = acc;
    }
    out
}

/// Clear-sky direct-normal and diffuse-horizontal irradiance, W m^-2.
/// Deterministic in sun altitude, spanning [600, 1000] and [50, 150].
fn irradiance(sin_alt: f64) -> (f64, f64) {
    let s = sin_alt.clamp(0.0, 1.0);
    let dni = 600.0 + 400.0 * s.powf(0.6);
    let dhi = 50.0 + 100.0 * s;
    (dni, dhi)
}

/// Sky, wall and ground temperatures in Kelvin: deterministic functions of
/// air temperature, humidity, sun altitude and the exposure flag, inside
/// the sampled offset bands (sky air-15..-25 below, wall air+5..+20 above).
fn surface_temperatures(air_c: f64, rh: f64, sin_alt: f64, exposed: bool) -> (f64, f64, f64) {
    let air_k = air_c + 273.15;
    let s = sin_alt.clamp(0.0, 1.0);
    let t_sky = air_k - 25.0 + 0.12 * rh;
    let t_wall = air_k + 5.0 + 15.0 * s;
    let t_ground = air_k + 2.0 + 13.0 * s * if exposed { 1.0 } else { 0.45 };
    (t_sky, t_wall, t_ground)
}

fn compute_fluxes(
    scene: &Scene,
    sun_alt: f64,
    sun_az: f64,
    exposed: bool,
) -> (DirectionalFluxes, f64) {
    let vf = view_factors(scene);
    let svf = vf[Direction::Up.index()][0];
    let sin_alt = sun_alt.to_radians().sin();
    let (dni, dhi) = if sun_alt > 0.0 {
        irradiance(sin_alt)
    } else {
        (0.0, 0.0)
    };
    let (t_sky, t_wall, t_ground) =
        surface_temperatures(scene.air_temp_c, scene.rh_pct, sin_alt.max(0.0), exposed);

    // Local global irradiance driving Lambertian reflection off walls and
    // ground; shaded surroundings still catch a reduced direct share.
    let ghi_local = dni * sin_alt.max(0.0) * if exposed { 1.0 } else { 0.35 } + dhi * svf;

    let sun_vec = direction_vector(sun_az, sun_alt);
    let mut shortwave = [0.0; 6];
    let mut longwave = [0.0; 6];
    for d in Direction::ALL {
        let i = d.index();
        let [f_sky, f_wall, f_ground] = vf[i];
        let axis = sensor_axis(d);
        let cos_inc =
            (sun_vec[0] * axis[0] + sun_vec[1] * axis[1] + sun_vec[2] * axis[2]).max(0.0);
        let direct = if exposed && sun_alt > 0.0 {
            dni * cos_inc
        } else {
            0.0
        };
        let diffuse = dhi * f_sky;
        let reflected = ALBEDO * ghi_local * (f_wall + f_ground);
        shortwave[i] = direct + diffuse + reflected;
        longwave[i] = SIGMA
            * (f_sky * t_sky.powi(4) + f_wall * t_wall.powi(4) + f_ground * t_ground.powi(4));
    }
    (
        DirectionalFluxes {
            shortwave,
            longwave,
        },
        svf,
    )
}

/// Deterministic small-amplitude texture noise in [-1, 1].
fn hash_noise(key: u64, x: u32, y: u32, channel: u32) -> f64 {
    let mut h = key
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((x as u64) << 32 | y as u64)
        .wrapping_add((channel as u64) << 17);
    h ^= h >> 33;
    h = h.wrapping_mul(0xFF51_AFD7_ED55_8CCD);
    h ^= h >> 33;
    (h & 0xFFFF) as f64 / 32767.5 - 1.0
}

/// Scene color along a direction.
fn scene_color(
    scene: &Scene,
    az: f64,
    alt: f64,
    sun: Option<[f64; 3]>,
    px: (u32, u32, u32),
) -> [u8; 3] {
    let noise = |ch: u32, amp: f64| hash_noise(scene.noise_key, px.0, px.1, px.2 * 4 + ch) * amp;
    let base: [f64; 3] = if alt < 0.0 {
        [95.0, 90.0, 85.0]
    } else if scene.occluded(az, alt) {
        [120.0, 112.0, 104.0]
    } else {
        // sky gradient: whiter toward the horizon
        if let Some(s) = sun {
            let v = direction_vector(az, alt);
            let cos_sep = v[0] * s[0] + v[1] * s[1] + v[2] * s[2];
            if cos_sep >= SUN_DISK_RENDER_DEG.to_radians().cos() {
                return [255, 255, 250];
            }
        }
        let t = (alt / 90.0).clamp(0.0, 1.0);
        [
            160.0 + (70.0 - 160.0) * t,
            200.0 + (130.0 - 200.0) * t,
            245.0 + (235.0 - 245.0) * t,
        ]
    };
    let mut out = [0u8; 3];
    for ch in 0..3 {
        out[ch as usize] = (base[ch as usize] + noise(ch, 5.0)).round().clamp(0.0, 255.0) as u8;
    }
    out
}

/// Renders the six cube faces of a scene. The sun disk is drawn only when
/// visible from the observation point.
pub fn render_cube(scene: &Scene, sun_alt: f64, sun_az: f64, size: u32) -> CubeMap {
    let sun = if sun_alt > 0.0 && !scene.occluded(sun_az, sun_alt) {
        Some(direction_vector(sun_az, sun_alt))
    } else {
        None
    };
    let faces: Vec<RgbImage> = Face::ALL
        .iter()
        .map(|&face| {
            let f = face.forward();
            let r = face.right();
            let dn = face.down_dir();
            let mut img = RgbImage::new(size, size);
            for row in 0..size {
                for col in 0..size {
                    let u = (col as f64 + 0.5) / size as f64 * 2.0 - 1.0;
                    let v = (row as f64 + 0.5) / size as f64 * 2.0 - 1.0;
                    let dir = [
                        f[0] + u * r[0] + v * dn[0],
                        f[1] + u * r[1] + v * dn[1],
                        f[2] + u * r[2] + v * dn[2],
                    ];
                    let norm = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
                    let dir = [dir[0] / norm, dir[1] / norm, dir[2] / norm];
                    let (az, alt) = crate::fisheye::vector_direction(dir);
                    let c = scene_color(scene, az, alt, sun, (face.index() as u32, col, row));
                    img.put_pixel(col, row, Rgb(c));
                }
            }
            img
        })
        .collect();
    CubeMap::new(faces.try_into().map_err(|_| ()).expect("six faces")).expect("valid cube")
}

/// Generates one scene deterministically from (seed, index).
pub fn generate_scene(seed: u64, index: usize) -> GeneratedScene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);

    let opts_window = (5.0 * 60.0, 22.0 * 60.0);
    generate_scene_with(&mut rng, index, opts_window)
}

fn generate_scene_with(
    rng: &mut ChaCha8Rng,
    index: usize,
    time_window_min: (f64, f64),
) -> GeneratedScene {
    let n_walls = rng.random_range(0..=3);
    let walls: Vec<Wall> = (0..n_walls)
        .map(|_| Wall {
            az_center_deg: rng.random_range(0.0..360.0),
            az_halfwidth_deg: rng.random_range(15.0..60.0),
            elev_top_deg: rng.random_range(10.0..65.0),
        })
        .collect();

    // June 1 to August 31, 2018
    let day_offset = rng.random_range(0..92u32);
    let (month, day) = if day_offset < 30 {
        (6, day_offset + 1)
    } else if day_offset < 61 {
        (7, day_offset - 30 + 1)
    } else {
        (8, day_offset - 61 + 1)
    };
    let minute_of_day = rng.random_range(time_window_min.0..time_window_min.1).floor();
    let hour = (minute_of_day / 60.0) as u32;
    let minute = (minute_of_day % 60.0) as u32;

    let air_temp_c = rng.random_range(26.0..44.0);
    let rh_pct = rng.random_range(10.0..60.0);
    let wind_ms = rng.random_range(0.0..5.0);

    let geo = GeoTime::new(
        SITE_LAT,
        SITE_LON,
        SITE_ALT_M,
        2018,
        month,
        day,
        hour,
        minute,
        0.0,
        SITE_UTC_OFFSET_MIN,
    )
    .expect("sampled timestamp valid");

    let scene = Scene {
        walls,
        air_temp_c,
        rh_pct,
        wind_ms,
        geo,
        noise_key: (index as u64)
            .wrapping_mul(0x2545_F491_4F6C_DD1D)
            .wrapping_add(0xA076_1D64_78BD_642F),
    };

    let sun = solar_position(&geo).expect("valid geotime");
    let night = sun.altitude_deg <= 0.0;
    let exposed = !night && !scene.occluded(sun.azimuth_deg, sun.altitude_deg);
    let (fluxes, svf) = compute_fluxes(&scene, sun.altitude_deg, sun.azimuth_deg, exposed);
    let tmrt_c = tmrt_from_fluxes(&fluxes, &BodyRadiationProfile::standing())
        .expect("generated fluxes are valid");

    let image_id = format!("scene{index:05}");
    let pct_buildings = scene
        .walls
        .iter()
        .map(|w| 2.0 * w.az_halfwidth_deg / 360.0 * (w.elev_top_deg / 90.0))
        .sum::<f64>()
        .min(1.0)
        * 100.0;

    let record = ObservationRecord {
        geo,
        air_temp_c: Some(air_temp_c),
        rh_pct: Some(rh_pct),
        wind_ms: Some(wind_ms),
        svf_meta: Some(svf),
        pct_trees: Some(0.0),
        pct_buildings: Some(pct_buildings),
        pct_impervious: Some(90.0),
        shade_measured: Some(!exposed),
        shortwave: fluxes.shortwave.map(Some),
        longwave: fluxes.longwave.map(Some),
        tmrt_c: Some(tmrt_c),
        image_id: Some(image_id.clone()),
    };
    let truth = SceneTruth {
        image_id,
        shade: !exposed,
        night,
        svf,
        sun_altitude_deg: sun.altitude_deg,
        sun_azimuth_deg: sun.azimuth_deg,
        fluxes,
        tmrt_c,
    };
    GeneratedScene {
        record,
        truth,
        scene,
    }
}

/// Generates `n_scenes` scenes (records + truth), without rendering.
pub fn generate_batch(opts: &SynthOptions) -> Vec<GeneratedScene> {
    (0..opts.n_scenes)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64 + 1);
            generate_scene_with(&mut rng, i, opts.time_window_min)
        })
        .collect()
}

/// Truth sidecar CSV header.
pub const TRUTH_HEADER: [&str; 19] = [
    "image_id",
    "shade",
    "night",
    "svf",
    "sun_altitude_deg",
    "sun_azimuth_deg",
    "S_up",
    "S_down",
    "S_n",
    "S_e",
    "S_s",
    "S_w",
    "L_up",
    "L_down",
    "L_n",
    "L_e",
    "L_s",
    "L_w",
    "tmrt_C",
];

/// Writes the full synthetic dataset to a directory: `data.csv`,
/// `truth.csv`, and six cube-face PNGs per scene under `images/`.
pub fn write_synth_dataset(opts: &SynthOptions, out_dir: &Path) -> Result<Vec<GeneratedScene>> {
    std::fs::create_dir_all(out_dir)?;
    let image_dir = out_dir.join("images");
    std::fs::create_dir_all(&image_dir)?;

    let scenes = generate_batch(opts);

    scenes.par_iter().try_for_each(|g| -> Result<()> {
        let sun = (g.truth.sun_azimuth_deg, g.truth.sun_altitude_deg);
        let cube = render_cube(&g.scene, sun.1, sun.0, opts.cube_size);
        cube.save(&image_dir, &g.truth.image_id)
    })?;

    let ds = Dataset {
        records: scenes.iter().map(|g| g.record.clone()).collect(),
        image_dir: Some(image_dir.clone()),
    };
    crate::dataset::write_csv(&ds, &out_dir.join("data.csv"))?;

    let mut w = csv::Writer::from_path(out_dir.join("truth.csv"))?;
    w.write_record(TRUTH_HEADER)?;
    for g in &scenes {
        let t = &g.truth;
        let mut fields = vec![
            t.image_id.clone(),
            if t.shade { "1" } else { "0" }.into(),
            if t.night { "1" } else { "0" }.into(),
            format!("{}", t.svf),
            format!("{}", t.sun_altitude_deg),
            format!("{}", t.sun_azimuth_deg),
        ];
        for v in t.fluxes.shortwave {
            fields.push(format!("{v}"));
        }
        for v in t.fluxes.longwave {
            fields.push(format!("{v}"));
        }
        fields.push(format!("{}", t.tmrt_c));
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(scenes)
}
