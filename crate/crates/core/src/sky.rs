//! Sky segmentation, sky view factor, directional sky fractions, and
//! sun-disk shade prediction on fisheye rasters.

use std::path::Path;

use image::GrayImage;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::fisheye::{direction_vector, pixel_to_direction, FisheyeImage};
use crate::solar::SolarPosition;

/// Number of equal-zenith-angle rings in the SVF annulus sum.
pub const SVF_RINGS: usize = 36;

/// Angular radius of the sun-disk obstruction test, degrees.
pub const SUN_DISK_RADIUS_DEG: f64 = 5.0;

/// Sky share below which the sun disk counts as obstructed.
pub const SHADE_THRESHOLD: f64 = 0.5;

/// Azimuth octants and elevation bands of the directional sky summary.
pub const AZIMUTH_SECTORS: usize = 8;
pub const ELEVATION_BANDS: usize = 4;
pub const DIRECTIONAL_CELLS: usize = AZIMUTH_SECTORS * ELEVATION_BANDS;

/// Boolean sky raster aligned to a fisheye image; false outside the disk.
#[derive(Debug, Clone)]
pub struct SkyMask {
    pub size: u32,
    data: Vec<bool>,
}

impl SkyMask {
    pub fn new_false(size: u32) -> Self {
        SkyMask {
            size,
            data: vec![false; (size * size) as usize],
        }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.data[(y * self.size + x) as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        self.data[(y * self.size + x) as usize] = v;
    }

    pub fn count_sky(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    fn in_disk(&self, x: u32, y: u32) -> bool {
        let c = self.size as f64 / 2.0;
        let dx = x as f64 + 0.5 - c;
        let dy = y as f64 + 0.5 - c;
        (dx * dx + dy * dy).sqrt() <= c
    }

    /// Reads a single-channel PNG mask (255 = sky, 0 = non-sky). Pixels
    /// outside the valid disk are forced false.
    pub fn load(path: &Path) -> Result<Self> {
        let img: GrayImage = image::open(path)
            .map_err(|e| CoreError::Image(format!("{}: {e}", path.display())))?
            .to_luma8();
        if img.width() != img.height() {
            return Err(CoreError::InvalidInput(
                "mask raster must be square".into(),
            ));
        }
        let size = img.width();
        let mut mask = SkyMask::new_false(size);
        for y in 0..size {
            for x in 0..size {
                if mask.in_disk(x, y) {
                    mask.set(x, y, img.get_pixel(x, y)[0] >= 128);
                }
            }
        }
        Ok(mask)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut img = GrayImage::new(self.size, self.size);
        for y in 0..self.size {
            for x in 0..self.size {
                img.put_pixel(x, y, image::Luma([if self.get(x, y) { 255 } else { 0 }]));
            }
        }
        img.save(path)
            .map_err(|e| CoreError::Image(format!("writing {}: {e}", path.display())))
    }
}

/// Per-image sky summary used as model features.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkyFeatures {
    pub svf: f64,
    /// Sky fraction per (azimuth octant x elevation band), octant-major:
    /// index = octant * 4 + band, octant 0 covers azimuth [0, 45), band 0
    /// covers elevation [0, 22.5).
    pub directional_sky: Vec<f64>,
    pub sun_disk_sky_fraction: f64,
    pub predicted_shade: bool,
    /// True when the sun was below the horizon at prediction time.
    pub night: bool,
}

/// Classifies a color as "bright" (overexposed sky or the sun itself).
fn is_bright(p: [f64; 3]) -> bool {
    (p[0] + p[1] + p[2]) / 3.0 > 0.92 * 255.0
}

fn blue_ratio(p: [f64; 3]) -> f64 {
    let s = p[0] + p[1] + p[2];
    if s <= 0.0 {
        1.0 / 3.0
    } else {
        p[2] / s
    }
}

/// Otsu threshold over a histogram; returns None when the histogram is
/// effectively unimodal (no meaningful between-class separation).
fn histogram_valley(hist: &[u64; 256], total: u64) -> Option<f64> {
    if total == 0 {
        return None;
    }
    let sum_all: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, &c)| i as f64 * c as f64)
        .sum();
    let mut w0 = 0.0;
    let mut sum0 = 0.0;
    let mut best = (0.0_f64, None::<usize>);
    for t in 0..255 {
        w0 += hist[t] as f64;
        if w0 <= 0.0 {
            continue;
        }
        let w1 = total as f64 - w0;
        if w1 <= 0.0 {
            break;
        }
        sum0 += t as f64 * hist[t] as f64;
        let m0 = sum0 / w0;
        let m1 = (sum_all - sum0) / w1;
        let between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if between > best.0 {
            best = (between, Some(t));
        }
    }
    let t = best.1?;
    // Separation sanity: the two class means must actually differ; a
    // near-single-color image yields negligible spread.
    let variance = {
        let mean = sum_all / total as f64;
        hist.iter()
            .enumerate()
            .map(|(i, &c)| c as f64 * (i as f64 - mean) * (i as f64 - mean))
            .sum::<f64>()
            / total as f64
    };
    if variance < 4.0 {
        None
    } else {
        Some((t as f64 + 0.5) / 255.0)
    }
}

/// Color-based sky classifier fitted to one fisheye image (the adaptive
/// histogram-valley threshold on the blue share, when the image supports
/// one). Reusable on cube-face colors for the projection's ratio check.
#[derive(Debug, Clone, Copy)]
pub struct SkyColorRule {
    valley: Option<f64>,
}

impl SkyColorRule {
    pub fn fit(fe: &FisheyeImage) -> Self {
        let size = fe.size;
        let mut hist = [0u64; 256];
        let mut total = 0u64;
        for y in 0..size {
            for x in 0..size {
                if !fe.in_disk(x, y) {
                    continue;
                }
                let p = fe.pixels.get_pixel(x, y);
                let col = [p[0] as f64, p[1] as f64, p[2] as f64];
                let bin = (blue_ratio(col) * 255.0).round().clamp(0.0, 255.0) as usize;
                hist[bin] += 1;
                total += 1;
            }
        }
        SkyColorRule {
            valley: histogram_valley(&hist, total),
        }
    }

    /// True when a color reads as sky under this rule.
    pub fn is_sky(&self, col: [f64; 3]) -> bool {
        match self.valley {
            Some(t) => blue_ratio(col) > t || is_bright(col),
            None => {
                let lum = (col[0] + col[1] + col[2]) / 3.0;
                (blue_ratio(col) > 0.40 && lum >= 80.0) || is_bright(col)
            }
        }
    }
}

/// Segments sky pixels of a fisheye image.
///
/// A pixel is sky when its blue share b/(r+g+b) exceeds an automatically
/// chosen histogram-valley threshold, or when it is nearly saturated
/// (luminance above 92% of full scale, which catches the sun disk). For
/// degenerate single-color images there is no valley to pick, and a fixed
/// rule is applied instead: sky = (blue share > 0.40 and luminance >= 80)
/// or nearly saturated. A closing with a 3-pixel radius removes pinholes.
pub fn segment_sky(fe: &FisheyeImage) -> SkyMask {
    let size = fe.size;
    let rule = SkyColorRule::fit(fe);
    let mut mask = SkyMask::new_false(size);
    for y in 0..size {
        for x in 0..size {
            if !fe.in_disk(x, y) {
                continue;
            }
            let p = fe.pixels.get_pixel(x, y);
            let col = [p[0] as f64, p[1] as f64, p[2] as f64];
            mask.set(x, y, rule.is_sky(col));
        }
    }
    morphological_close(&mask, 3)
}

/// Morphological closing (dilate then erode) with a disk-shaped structuring
/// element of the given radius; confined to the valid disk.
fn morphological_close(mask: &SkyMask, radius: i32) -> SkyMask {
    let size = mask.size as i32;
    let mut offsets = Vec::new();
    for dy in -radius..=radius {
        for dx in -radius..=radius {
            if dx * dx + dy * dy <= radius * radius {
                offsets.push((dx, dy));
            }
        }
    }
    let mut dilated = SkyMask::new_false(mask.size);
    for y in 0..size {
        for x in 0..size {
            if !mask.in_disk(x as u32, y as u32) {
                continue;
            }
            let mut any = false;
            for &(dx, dy) in &offsets {
                let nx = x + dx;
                let ny = y + dy;
                if nx >= 0 && ny >= 0 && nx < size && ny < size && mask.get(nx as u32, ny as u32)
                {
                    any = true;
                    break;
                }
            }
            dilated.set(x as u32, y as u32, any);
        }
    }
    let mut closed = SkyMask::new_false(mask.size);
    for y in 0..size {
        for x in 0..size {
            if !mask.in_disk(x as u32, y as u32) {
                continue;
            }
            let mut all = true;
            for &(dx, dy) in &offsets {
                let nx = x + dx;
                let ny = y + dy;
                if nx >= 0 && ny >= 0 && nx < size && ny < size {
                    if !mask.in_disk(nx as u32, ny as u32) {
                        continue; // outside the disk does not veto
                    }
                    if !dilated.get(nx as u32, ny as u32) {
                        all = false;
                        break;
                    }
                }
            }
            closed.set(x as u32, y as u32, all);
        }
    }
    closed
}

/// Sky view factor by the annulus method.
///
/// The disk is split into `SVF_RINGS` equal-zenith-angle rings; ring i
/// contributes weight proportional to sin(2 * theta_center), so that a
/// fully open sky integrates to exactly 1 and a uniform horizon
/// obstruction of elevation beta gives cos^2(beta).
pub fn compute_svf(mask: &SkyMask) -> f64 {
    let size = mask.size;
    let c = size as f64 / 2.0;
    let mut sky = [0u64; SVF_RINGS];
    let mut tot = [0u64; SVF_RINGS];
    for y in 0..size {
        for x in 0..size {
            let dx = x as f64 + 0.5 - c;
            let dy = y as f64 + 0.5 - c;
            let r = (dx * dx + dy * dy).sqrt();
            if r > c {
                continue;
            }
            let ring = (((r / c) * SVF_RINGS as f64) as usize).min(SVF_RINGS - 1);
            tot[ring] += 1;
            if mask.get(x, y) {
                sky[ring] += 1;
            }
        }
    }
    let mut weight_sum = 0.0;
    let mut acc = 0.0;
    for i in 0..SVF_RINGS {
        if tot[i] == 0 {
            continue;
        }
        let theta_center = (i as f64 + 0.5) / SVF_RINGS as f64 * std::f64::consts::FRAC_PI_2;
        let w = (2.0 * theta_center).sin();
        weight_sum += w;
        acc += w * sky[i] as f64 / tot[i] as f64;
    }
    if weight_sum <= 0.0 {
        0.0
    } else {
        acc / weight_sum
    }
}

/// Sky fraction per (azimuth octant x elevation band), solid-angle
/// weighted within each cell. Returns `DIRECTIONAL_CELLS` values in
/// octant-major order.
pub fn directional_sky_fractions(mask: &SkyMask) -> Vec<f64> {
    let size = mask.size;
    let c = size as f64 / 2.0;
    let mut sky = vec![0.0; DIRECTIONAL_CELLS];
    let mut tot = vec![0.0; DIRECTIONAL_CELLS];
    for y in 0..size {
        for x in 0..size {
            let px = x as f64 + 0.5;
            let py = y as f64 + 0.5;
            let dx = px - c;
            let dy = py - c;
            let r = (dx * dx + dy * dy).sqrt();
            if r > c {
                continue;
            }
            let (az, alt) = pixel_to_direction(px, py, size).expect("inside disk");
            let octant = ((az / 45.0) as usize).min(AZIMUTH_SECTORS - 1);
            let band = ((alt / 22.5) as usize).min(ELEVATION_BANDS - 1);
            let theta = (90.0 - alt).to_radians();
            // pixel solid angle ~ sin(theta)/r, with the finite limit at
            // the disk center
            let w = if r < 1e-9 {
                std::f64::consts::FRAC_PI_2 / c
            } else {
                theta.sin() / r
            };
            let cell = octant * ELEVATION_BANDS + band;
            tot[cell] += w;
            if mask.get(x, y) {
                sky[cell] += w;
            }
        }
    }
    (0..DIRECTIONAL_CELLS)
        .map(|i| if tot[i] > 0.0 { sky[i] / tot[i] } else { 0.0 })
        .collect()
}

/// Result of the sun-disk obstruction test.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ShadePrediction {
    pub predicted_shade: bool,
    pub sun_disk_sky_fraction: f64,
    /// Sun below the horizon; shade is vacuously true.
    pub night: bool,
}

/// Tests whether the sun disk is obstructed: samples every mask pixel
/// within `SUN_DISK_RADIUS_DEG` of the sun direction and reports the sky
/// share. Below-horizon sun yields a night result.
pub fn predict_shade(mask: &SkyMask, sun: &SolarPosition) -> ShadePrediction {
    if sun.altitude_deg <= 0.0 {
        return ShadePrediction {
            predicted_shade: true,
            sun_disk_sky_fraction: 0.0,
            night: true,
        };
    }
    let size = mask.size;
    let c = size as f64 / 2.0;
    let sun_vec = direction_vector(sun.azimuth_deg, sun.altitude_deg);
    let cos_radius = SUN_DISK_RADIUS_DEG.to_radians().cos();

    // Bounding box around the sun-disk footprint: the equiangular mapping
    // stretches 5 degrees to at most (5/90) * R pixels radially, and wider
    // tangentially near the zenith; a generous margin keeps this exact.
    let (sx, sy) = crate::fisheye::direction_to_pixel(sun.azimuth_deg, sun.altitude_deg, size)
        .expect("sun above horizon");
    let radial_px = SUN_DISK_RADIUS_DEG / 90.0 * c;
    let tangential_px = if sun.altitude_deg >= 85.0 {
        2.0 * radial_px + 4.0
    } else {
        let r_px = (90.0 - sun.altitude_deg) / 90.0 * c;
        let half_angle =
            (SUN_DISK_RADIUS_DEG.to_radians().sin() / sun.altitude_deg.to_radians().cos().max(1e-6))
                .asin()
                .to_degrees();
        (half_angle.to_radians().sin() * r_px * 2.0).max(2.0 * radial_px) + 4.0
    };
    let margin = radial_px.max(tangential_px).ceil() as i64 + 2;

    let x0 = ((sx as i64) - margin).max(0) as u32;
    let x1 = (((sx as i64) + margin) as u32).min(size - 1);
    let y0 = ((sy as i64) - margin).max(0) as u32;
    let y1 = (((sy as i64) + margin) as u32).min(size - 1);

    let mut sky = 0u64;
    let mut tot = 0u64;
    for y in y0..=y1 {
        for x in x0..=x1 {
            let px = x as f64 + 0.5;
            let py = y as f64 + 0.5;
            let dx = px - c;
            let dy = py - c;
            if (dx * dx + dy * dy).sqrt() > c {
                continue;
            }
            let (az, alt) = pixel_to_direction(px, py, size).expect("inside disk");
            let v = direction_vector(az, alt);
            let cos_sep = v[0] * sun_vec[0] + v[1] * sun_vec[1] + v[2] * sun_vec[2];
            if cos_sep >= cos_radius {
                tot += 1;
                if mask.get(x, y) {
                    sky += 1;
                }
            }
        }
    }
    let fraction = if tot == 0 { 0.0 } else { sky as f64 / tot as f64 };
    ShadePrediction {
        predicted_shade: fraction < SHADE_THRESHOLD,
        sun_disk_sky_fraction: fraction,
        night: false,
    }
}

/// Full sky summary for one fisheye image and sun position.
pub fn sky_features(mask: &SkyMask, sun: &SolarPosition) -> SkyFeatures {
    let shade = predict_shade(mask, sun);
    SkyFeatures {
        svf: compute_svf(mask),
        directional_sky: directional_sky_fractions(mask),
        sun_disk_sky_fraction: shade.sun_disk_sky_fraction,
        predicted_shade: shade.predicted_shade,
        night: shade.night,
    }
}

/// Reconstructs the SVF from the 32-cell directional summary using
/// cosine-weighted cell weights; used by the consistency property.
pub fn svf_from_directional(mask: &SkyMask, fractions: &[f64]) -> f64 {
    let size = mask.size;
    let c = size as f64 / 2.0;
    let mut cell_w = vec![0.0; DIRECTIONAL_CELLS];
    for y in 0..size {
        for x in 0..size {
            let px = x as f64 + 0.5;
            let py = y as f64 + 0.5;
            let dx = px - c;
            let dy = py - c;
            let r = (dx * dx + dy * dy).sqrt();
            if r > c {
                continue;
            }
            let (az, alt) = pixel_to_direction(px, py, size).expect("inside disk");
            let octant = ((az / 45.0) as usize).min(AZIMUTH_SECTORS - 1);
            let band = ((alt / 22.5) as usize).min(ELEVATION_BANDS - 1);
            let theta = (90.0 - alt).to_radians();
            let w = if r < 1e-9 {
                std::f64::consts::FRAC_PI_2 / c * (2.0 * theta).cos()
            } else {
                (2.0 * theta).sin() / r
            };
            cell_w[octant * ELEVATION_BANDS + band] += w;
        }
    }
    let wsum: f64 = cell_w.iter().sum();
    if wsum <= 0.0 {
        return 0.0;
    }
    cell_w
        .iter()
        .zip(fractions)
        .map(|(w, f)| w / wsum * f)
        .sum()
}
