//! Cube-map to hemispherical fisheye projection.
//!
//! The fisheye raster is an upward-looking, zenith-centered equiangular
//! projection: pixel radius is proportional to zenith angle, with north up
//! and east on the left. Conversion from a six-face cube map proceeds in
//! four steps: exposure normalization of the lateral faces against the up
//! face, equiangular resampling, a 2-degree angular feather across face
//! seams, and a sky-exposure-ratio validation.
//!
//! World frame: X = east, Y = north, Z = up. Azimuth is measured clockwise
//! from north, altitude upward from the horizon.

use std::path::Path;

use image::{Rgb, RgbImage};

use crate::error::{CoreError, Result};

/// Angular feather half-width across face seams, degrees.
pub const SEAM_FEATHER_DEG: f64 = 2.0;

/// Default fisheye diameter in pixels.
pub const DEFAULT_FISHEYE_SIZE: u32 = 1000;

/// Cube-map face identifiers, with their filename suffixes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    North,
    East,
    South,
    West,
    Up,
    Down,
}

impl Face {
    pub const ALL: [Face; 6] = [
        Face::North,
        Face::East,
        Face::South,
        Face::West,
        Face::Up,
        Face::Down,
    ];

    /// Faces used for the upper-hemisphere projection.
    pub const UPPER: [Face; 5] = [Face::North, Face::East, Face::South, Face::West, Face::Up];

    pub fn index(self) -> usize {
        match self {
            Face::North => 0,
            Face::East => 1,
            Face::South => 2,
            Face::West => 3,
            Face::Up => 4,
            Face::Down => 5,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            Face::North => "N",
            Face::East => "E",
            Face::South => "S",
            Face::West => "W",
            Face::Up => "U",
            Face::Down => "D",
        }
    }

    /// View direction of the face camera.
    pub fn forward(self) -> [f64; 3] {
        match self {
            Face::North => [0.0, 1.0, 0.0],
            Face::East => [1.0, 0.0, 0.0],
            Face::South => [0.0, -1.0, 0.0],
            Face::West => [-1.0, 0.0, 0.0],
            Face::Up => [0.0, 0.0, 1.0],
            Face::Down => [0.0, 0.0, -1.0],
        }
    }

    /// World direction of increasing image column.
    pub fn right(self) -> [f64; 3] {
        match self {
            Face::North => [1.0, 0.0, 0.0],
            Face::East => [0.0, -1.0, 0.0],
            Face::South => [-1.0, 0.0, 0.0],
            Face::West => [0.0, 1.0, 0.0],
            // Up/down faces carry north at the top; an upward-looking
            // camera with north up sees east on the left.
            Face::Up => [-1.0, 0.0, 0.0],
            Face::Down => [1.0, 0.0, 0.0],
        }
    }

    /// World direction of increasing image row.
    pub fn down_dir(self) -> [f64; 3] {
        match self {
            Face::North | Face::East | Face::South | Face::West => [0.0, 0.0, -1.0],
            Face::Up | Face::Down => [0.0, -1.0, 0.0],
        }
    }
}

/// Six square face rasters of equal size.
#[derive(Debug)]
pub struct CubeMap {
    pub size: u32,
    faces: [RgbImage; 6],
}

impl CubeMap {
    pub fn new(faces: [RgbImage; 6]) -> Result<Self> {
        let size = faces[0].width();
        if size < 64 {
            return Err(CoreError::InvalidInput(format!(
                "cube face size {size} below minimum 64"
            )));
        }
        for (i, f) in faces.iter().enumerate() {
            if f.width() != size || f.height() != size {
                return Err(CoreError::InvalidInput(format!(
                    "face {} is {}x{}, expected {size}x{size}",
                    Face::ALL[i].suffix(),
                    f.width(),
                    f.height()
                )));
            }
        }
        Ok(CubeMap { size, faces })
    }

    pub fn face(&self, f: Face) -> &RgbImage {
        &self.faces[f.index()]
    }

    /// Loads the six faces `<image_id>_{N,E,S,W,U,D}.png` from a directory.
    pub fn load(dir: &Path, image_id: &str) -> Result<Self> {
        let mut faces = Vec::with_capacity(6);
        for f in Face::ALL {
            let path = dir.join(format!("{image_id}_{}.png", f.suffix()));
            if !path.exists() {
                return Err(CoreError::MissingFace(f.suffix()));
            }
            let img = image::open(&path)
                .map_err(|e| {
                    CoreError::Image(format!("face {} ({}): {e}", f.suffix(), path.display()))
                })?
                .to_rgb8();
            faces.push(img);
        }
        CubeMap::new(faces.try_into().map_err(|_| {
            CoreError::Image("face collection size mismatch".into())
        })?)
    }

    /// Writes the six faces into `dir` using the standard suffixes.
    pub fn save(&self, dir: &Path, image_id: &str) -> Result<()> {
        for f in Face::ALL {
            let path = dir.join(format!("{image_id}_{}.png", f.suffix()));
            self.faces[f.index()]
                .save(&path)
                .map_err(|e| CoreError::Image(format!("writing {}: {e}", path.display())))?;
        }
        Ok(())
    }
}

/// Zenith-centered equiangular fisheye raster.
///
/// Pixels outside the disk of radius `size/2` are invalid and stored black.
pub struct FisheyeImage {
    pub size: u32,
    pub pixels: RgbImage,
}

/// Projection tag: equiangular (radius linear in zenith angle).
pub const PROJECTION_TAG: &str = "equiangular";
/// Orientation tag: upward-looking, north at top, east on the left.
pub const ORIENTATION_TAG: &str = "north-up,east-left";

impl FisheyeImage {
    pub fn new(size: u32, pixels: RgbImage) -> Result<Self> {
        if size % 2 != 0 {
            return Err(CoreError::InvalidInput(format!(
                "fisheye size {size} must be even"
            )));
        }
        if pixels.width() != size || pixels.height() != size {
            return Err(CoreError::InvalidInput("raster size mismatch".into()));
        }
        Ok(FisheyeImage { size, pixels })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let img = image::open(path)
            .map_err(|e| CoreError::Image(format!("{}: {e}", path.display())))?
            .to_rgb8();
        if img.width() != img.height() {
            return Err(CoreError::InvalidInput(format!(
                "fisheye raster must be square, got {}x{}",
                img.width(),
                img.height()
            )));
        }
        let size = img.width();
        FisheyeImage::new(size, img)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.pixels
            .save(path)
            .map_err(|e| CoreError::Image(format!("writing {}: {e}", path.display())))
    }

    /// True when the center of pixel (x, y) lies inside the valid disk.
    pub fn in_disk(&self, x: u32, y: u32) -> bool {
        let c = self.size as f64 / 2.0;
        let dx = x as f64 + 0.5 - c;
        let dy = y as f64 + 0.5 - c;
        (dx * dx + dy * dy).sqrt() <= c
    }
}

/// Maps a sky direction to continuous fisheye coordinates.
///
/// Zenith angle `theta = 90 - altitude` maps to radius `(D/2) * theta/90`;
/// `x = cx - r sin(az)`, `y = cy - r cos(az)` with `cx = cy = D/2`.
/// Coordinates are continuous: pixel (i, j) covers `[i, i+1) x [j, j+1)`.
pub fn direction_to_pixel(azimuth_deg: f64, altitude_deg: f64, size: u32) -> Result<(f64, f64)> {
    if altitude_deg < 0.0 {
        return Err(CoreError::BelowHorizon(altitude_deg));
    }
    if size % 2 != 0 {
        return Err(CoreError::InvalidInput(format!(
            "fisheye size {size} must be even"
        )));
    }
    let c = size as f64 / 2.0;
    let theta = 90.0 - altitude_deg;
    let r = c * theta / 90.0;
    let az = azimuth_deg.to_radians();
    Ok((c - r * az.sin(), c - r * az.cos()))
}

/// Inverse of [`direction_to_pixel`]: continuous coordinates to
/// (azimuth, altitude) in degrees.
pub fn pixel_to_direction(x: f64, y: f64, size: u32) -> Result<(f64, f64)> {
    let c = size as f64 / 2.0;
    let vx = c - x;
    let vy = c - y;
    let r = (vx * vx + vy * vy).sqrt();
    if r > c + 1e-9 {
        return Err(CoreError::InvalidInput(format!(
            "pixel ({x}, {y}) outside the valid disk"
        )));
    }
    let theta = 90.0 * (r / c).min(1.0);
    let az = if r < 1e-12 {
        0.0
    } else {
        vx.atan2(vy).to_degrees().rem_euclid(360.0)
    };
    Ok((az, 90.0 - theta))
}

/// Unit direction vector for (azimuth, altitude) in degrees.
pub fn direction_vector(azimuth_deg: f64, altitude_deg: f64) -> [f64; 3] {
    let az = azimuth_deg.to_radians();
    let alt = altitude_deg.to_radians();
    [az.sin() * alt.cos(), az.cos() * alt.cos(), alt.sin()]
}

/// (azimuth, altitude) in degrees for a unit direction vector.
pub fn vector_direction(d: [f64; 3]) -> (f64, f64) {
    let alt = d[2].clamp(-1.0, 1.0).asin().to_degrees();
    let az = d[0].atan2(d[1]).to_degrees().rem_euclid(360.0);
    (az, alt)
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Signed angular margin (degrees) of a direction inside a face frustum:
/// positive inside, negative outside, measured to the nearest seam plane.
fn face_margin_deg(face: Face, d: [f64; 3]) -> f64 {
    let f = face.forward();
    let r = face.right();
    let dn = face.down_dir();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = f64::INFINITY;
    for axis in [r, dn] {
        for sign in [1.0, -1.0] {
            // boundary plane for coordinate = +-1 along `axis`
            let n = [
                (f[0] - sign * axis[0]) * inv_sqrt2,
                (f[1] - sign * axis[1]) * inv_sqrt2,
                (f[2] - sign * axis[2]) * inv_sqrt2,
            ];
            let margin = dot(d, n).clamp(-1.0, 1.0).asin().to_degrees();
            m = m.min(margin);
        }
    }
    m
}

/// Bilinear sample of a face raster at frustum coordinates (u, v) in
/// [-1, 1], clamped to the face extent. Returns linear RGB in 0..255.
fn sample_face(img: &RgbImage, u: f64, v: f64) -> [f64; 3] {
    let w = img.width() as f64;
    let col = ((u + 1.0) / 2.0 * w - 0.5).clamp(0.0, w - 1.0);
    let row = ((v + 1.0) / 2.0 * w - 0.5).clamp(0.0, w - 1.0);
    let c0 = col.floor();
    let r0 = row.floor();
    let fc = col - c0;
    let fr = row - r0;
    let c1 = (c0 + 1.0).min(w - 1.0);
    let r1 = (r0 + 1.0).min(w - 1.0);
    let p = |c: f64, r: f64| -> [f64; 3] {
        let px = img.get_pixel(c as u32, r as u32);
        [px[0] as f64, px[1] as f64, px[2] as f64]
    };
    let p00 = p(c0, r0);
    let p10 = p(c1, r0);
    let p01 = p(c0, r1);
    let p11 = p(c1, r1);
    let mut out = [0.0; 3];
    for ch in 0..3 {
        let top = p00[ch] * (1.0 - fc) + p10[ch] * fc;
        let bot = p01[ch] * (1.0 - fc) + p11[ch] * fc;
        out[ch] = top * (1.0 - fr) + bot * fr;
    }
    out
}

/// Strip thickness in pixels used for exposure matching.
fn strip_px(size: u32) -> u32 {
    (size / 32).max(1)
}

fn mean_strip_luminance(img: &RgbImage, strip: StripSide, n: u32) -> f64 {
    let w = img.width();
    let mut sum = 0.0;
    let mut count = 0u64;
    for i in 0..w {
        for k in 0..n {
            let (x, y) = match strip {
                StripSide::Top => (i, k),
                StripSide::Bottom => (i, w - 1 - k),
                StripSide::Left => (k, i),
                StripSide::Right => (w - 1 - k, i),
            };
            let px = img.get_pixel(x, y);
            sum += (px[0] as f64 + px[1] as f64 + px[2] as f64) / 3.0;
            count += 1;
        }
    }
    sum / count as f64
}

#[derive(Clone, Copy)]
enum StripSide {
    Top,
    Bottom,
    Left,
    Right,
}

/// Up-face edge adjacent to a given lateral face, under the face
/// orientation conventions above (north at top, east on the left).
fn up_edge_for(face: Face) -> StripSide {
    match face {
        Face::North => StripSide::Top,
        Face::East => StripSide::Left,
        Face::South => StripSide::Bottom,
        Face::West => StripSide::Right,
        _ => unreachable!("only lateral faces have an up seam"),
    }
}

/// Per-face luminance gains that match each lateral face's top edge to the
/// adjacent edge of the up face. The up and down faces keep gain 1.
pub fn exposure_gains(cube: &CubeMap) -> [f64; 6] {
    let n = strip_px(cube.size);
    let mut gains = [1.0; 6];
    for face in [Face::North, Face::East, Face::South, Face::West] {
        let face_mean = mean_strip_luminance(cube.face(face), StripSide::Top, n);
        let up_mean = mean_strip_luminance(cube.face(Face::Up), up_edge_for(face), n);
        if face_mean > 1e-9 {
            gains[face.index()] = (up_mean / face_mean).clamp(0.25, 4.0);
        }
    }
    gains
}

/// Projects the five upper faces of a cube map into an equiangular fisheye
/// disk of diameter `size`.
pub fn cube_to_fisheye(cube: &CubeMap, size: u32) -> Result<FisheyeImage> {
    if size % 2 != 0 {
        return Err(CoreError::InvalidInput(format!(
            "fisheye size {size} must be even"
        )));
    }
    let gains = exposure_gains(cube);
    let mut out = RgbImage::new(size, size);
    let c = size as f64 / 2.0;
    for y in 0..size {
        for x in 0..size {
            let px = x as f64 + 0.5;
            let py = y as f64 + 0.5;
            let dx = px - c;
            let dy = py - c;
            if (dx * dx + dy * dy).sqrt() > c {
                continue; // invalid region stays black
            }
            let (az, alt) = pixel_to_direction(px, py, size)?;
            let d = direction_vector(az, alt);
            let color = sample_hemisphere(cube, &gains, d);
            out.put_pixel(
                x,
                y,
                Rgb([
                    color[0].round().clamp(0.0, 255.0) as u8,
                    color[1].round().clamp(0.0, 255.0) as u8,
                    color[2].round().clamp(0.0, 255.0) as u8,
                ]),
            );
        }
    }
    FisheyeImage::new(size, out)
}

/// Samples the cube along an upper-hemisphere direction with seam
/// feathering and exposure gains applied.
fn sample_hemisphere(cube: &CubeMap, gains: &[f64; 6], d: [f64; 3]) -> [f64; 3] {
    let mut acc = [0.0; 3];
    let mut wsum = 0.0;
    for face in Face::UPPER {
        let fc = dot(d, face.forward());
        if fc <= 1e-9 {
            continue;
        }
        let margin = face_margin_deg(face, d);
        let w = ((margin + SEAM_FEATHER_DEG) / (2.0 * SEAM_FEATHER_DEG)).clamp(0.0, 1.0);
        if w <= 0.0 {
            continue;
        }
        let u = dot(d, face.right()) / fc;
        let v = dot(d, face.down_dir()) / fc;
        let g = gains[face.index()];
        let s = sample_face(cube.face(face), u, v);
        for ch in 0..3 {
            acc[ch] += w * g * s[ch];
        }
        wsum += w;
    }
    if wsum <= 0.0 {
        // Directions at the exact horizon between lateral faces; fall back
        // to the nearest lateral face without feathering.
        let mut best = (f64::NEG_INFINITY, Face::North);
        for face in Face::UPPER {
            let fc = dot(d, face.forward());
            if fc > best.0 {
                best = (fc, face);
            }
        }
        let face = best.1;
        let fc = dot(d, face.forward()).max(1e-9);
        let u = dot(d, face.right()) / fc;
        let v = dot(d, face.down_dir()) / fc;
        let s = sample_face(cube.face(face), u, v);
        let g = gains[face.index()];
        return [s[0] * g, s[1] * g, s[2] * g];
    }
    [acc[0] / wsum, acc[1] / wsum, acc[2] / wsum]
}

/// Outcome of the sky-exposure-ratio validation (conversion step 4).
#[derive(Debug, Clone, Copy)]
pub struct RatioReport {
    /// Solid-angle-weighted sky fraction measured on the fisheye disk.
    pub fisheye_fraction: f64,
    /// Solid-angle-weighted sky fraction measured on the upper cube faces.
    pub cube_fraction: f64,
    pub abs_diff: f64,
    pub pass: bool,
}

/// Tolerated disagreement between the two sky-exposure ratios.
pub const RATIO_TOLERANCE: f64 = 0.02;

/// Compares sky exposure measured on the fisheye against the cube map.
///
/// `mask_fn` classifies a color as sky; it is applied to the fisheye pixels
/// and to the gain-normalized cube pixels.
pub fn validate_projection<F: Fn([f64; 3]) -> bool>(
    cube: &CubeMap,
    fisheye: &FisheyeImage,
    mask_fn: F,
) -> RatioReport {
    let size = fisheye.size;
    let c = size as f64 / 2.0;

    // Fisheye side: equiangular disk pixel at radius r covers solid angle
    // proportional to sin(theta)/r.
    let mut fe_sky = 0.0;
    let mut fe_tot = 0.0;
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
            let theta = std::f64::consts::FRAC_PI_2 * r / c;
            let w = if r < 1e-9 {
                std::f64::consts::FRAC_PI_2 / c
            } else {
                theta.sin() / r
            };
            let p = fisheye.pixels.get_pixel(x, y);
            let col = [p[0] as f64, p[1] as f64, p[2] as f64];
            fe_tot += w;
            if mask_fn(col) {
                fe_sky += w;
            }
        }
    }

    // Cube side: face pixel at frustum coordinates (u, v) covers solid
    // angle proportional to (1 + u^2 + v^2)^(-3/2); only upper-hemisphere
    // directions count.
    let gains = exposure_gains(cube);
    let w_face = cube.size as f64;
    let mut cb_sky = 0.0;
    let mut cb_tot = 0.0;
    for face in Face::UPPER {
        let img = cube.face(face);
        let g = gains[face.index()];
        let f = face.forward();
        let r = face.right();
        let dn = face.down_dir();
        for row in 0..cube.size {
            for colx in 0..cube.size {
                let u = (colx as f64 + 0.5) / w_face * 2.0 - 1.0;
                let v = (row as f64 + 0.5) / w_face * 2.0 - 1.0;
                let dir = [
                    f[0] + u * r[0] + v * dn[0],
                    f[1] + u * r[1] + v * dn[1],
                    f[2] + u * r[2] + v * dn[2],
                ];
                if dir[2] < 0.0 {
                    continue;
                }
                let w = (1.0 + u * u + v * v).powf(-1.5);
                let p = img.get_pixel(colx, row);
                let col = [p[0] as f64 * g, p[1] as f64 * g, p[2] as f64 * g];
                cb_tot += w;
                if mask_fn(col) {
                    cb_sky += w;
                }
            }
        }
    }

    let fisheye_fraction = if fe_tot > 0.0 { fe_sky / fe_tot } else { 0.0 };
    let cube_fraction = if cb_tot > 0.0 { cb_sky / cb_tot } else { 0.0 };
    let abs_diff = (fisheye_fraction - cube_fraction).abs();
    RatioReport {
        fisheye_fraction,
        cube_fraction,
        abs_diff,
        pass: abs_diff <= RATIO_TOLERANCE,
    }
}
