//! Pinhole camera, parallel rendering and image files.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::geometry::{Point3, Vec3};
use crate::marcher::{march, shade_with};
use crate::scene::{CameraSpec, Rgb, SceneConfig};
use crate::surface::Ray3;

/// Output gamma exponent denominator.
pub const GAMMA: f64 = 2.2;

/// Camera with its derived basis.
///
/// Yaw is measured counterclockwise from `+x` in the floor plane and pitch
/// upward from it. The basis is orthonormal with `right × up = −forward`,
/// so the image is seen from the viewer's side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraFrame {
    pub position: Point3,
    pub yaw: f64,
    pub pitch: f64,
    /// Horizontal field of view in degrees.
    pub fov: f64,
    pub right: Vec3,
    pub up: Vec3,
    pub forward: Vec3,
}

impl CameraFrame {
    /// Pitch is clamped just inside `(−π/2, π/2)`.
    pub fn new(position: Point3, yaw: f64, pitch: f64, fov: f64) -> Self {
        let limit = std::f64::consts::FRAC_PI_2 - 1e-6;
        let pitch = pitch.clamp(-limit, limit);
        let (sy, cy) = yaw.sin_cos();
        let (sp, cp) = pitch.sin_cos();
        let forward = Vec3::new(cp * cy, cp * sy, sp);
        let right = Vec3::new(sy, -cy, 0.0);
        let up = right.cross(forward);
        Self {
            position,
            yaw,
            pitch,
            fov,
            right,
            up,
            forward,
        }
    }

    pub fn from_spec(spec: &CameraSpec) -> Self {
        Self::new(spec.position, spec.yaw, spec.pitch, spec.fov)
    }
}

/// Ray through the center of pixel `(px, py)`; row 0 is the top.
pub fn generate_camera_ray(cam: &CameraFrame, px: u32, py: u32, w: u32, h: u32) -> Ray3 {
    let half = (cam.fov.to_radians() * 0.5).tan();
    let sx = ((px as f64 + 0.5) / w as f64 * 2.0 - 1.0) * half;
    let sy = (1.0 - (py as f64 + 0.5) / h as f64 * 2.0) * half * h as f64 / w as f64;
    let d = cam.forward + cam.right * sx + cam.up * sy;
    Ray3::new(cam.position, d)
}

/// 8-bit RGB pixels, row-major, top row first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

#[derive(Debug, thiserror::Error)]
pub enum ImageError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("image encoding failed: {0}")]
    Encode(#[from] image::ImageError),
    #[error("unsupported image extension {0:?} (use .png or .ppm)")]
    Extension(String),
    #[error("image must be 8-bit RGB, got {0:?}")]
    Format(image::ColorType),
}

impl ImageBuffer {
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width >= 1 && height >= 1, "image dimensions must be positive");
        Self {
            width,
            height,
            pixels: vec![0; width as usize * height as usize * 3],
        }
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    /// Lowercase hex SHA-256 of the raw pixel bytes.
    pub fn sha256_hex(&self) -> String {
        hex::encode(Sha256::digest(&self.pixels))
    }

    pub fn write_png(&self, path: &Path) -> Result<(), ImageError> {
        image::save_buffer_with_format(
            path,
            &self.pixels,
            self.width,
            self.height,
            image::ExtendedColorType::Rgb8,
            image::ImageFormat::Png,
        )?;
        Ok(())
    }

    /// Binary PPM (`P6`, maxval 255).
    pub fn write_ppm(&self, path: &Path) -> Result<(), ImageError> {
        let mut out = BufWriter::new(File::create(path)?);
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&self.pixels)?;
        out.flush()?;
        Ok(())
    }

    /// Write by extension: `.png` or `.ppm`.
    pub fn write(&self, path: &Path) -> Result<(), ImageError> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or("")
            .to_ascii_lowercase();
        match ext.as_str() {
            "png" => self.write_png(path),
            "ppm" => self.write_ppm(path),
            _ => Err(ImageError::Extension(ext)),
        }
    }

    pub fn read_png(path: &Path) -> Result<Self, ImageError> {
        let img = image::open(path)?;
        match img {
            image::DynamicImage::ImageRgb8(buf) => Ok(Self {
                width: buf.width(),
                height: buf.height(),
                pixels: buf.into_raw(),
            }),
            other => Err(ImageError::Format(other.color())),
        }
    }
}

/// Gamma-encode a linear channel to 8 bits.
pub fn encode_channel(c: f64) -> u8 {
    (c.clamp(0.0, 1.0).powf(1.0 / GAMMA) * 255.0).round() as u8
}

pub fn encode_rgb(c: Rgb) -> [u8; 3] {
    [encode_channel(c.x), encode_channel(c.y), encode_channel(c.z)]
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RenderOptions {
    /// Paint budget-exhausted rays magenta instead of the background.
    pub debug_budget: bool,
}

/// Render with default options.
pub fn render_image(scene: &SceneConfig, cam: &CameraFrame, w: u32, h: u32, threads: usize) -> ImageBuffer {
    render_image_with(scene, cam, w, h, threads, RenderOptions::default())
}

/// Shade every pixel on a pool of `threads` workers (at least one), one row
/// per task. The bytes do not depend on the thread count.
pub fn render_image_with(
    scene: &SceneConfig,
    cam: &CameraFrame,
    w: u32,
    h: u32,
    threads: usize,
    options: RenderOptions,
) -> ImageBuffer {
    let mut img = ImageBuffer::new(w, h);
    let row_bytes = w as usize * 3;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| {
        img.pixels
            .par_chunks_mut(row_bytes)
            .enumerate()
            .for_each(|(py, row)| {
                for px in 0..w {
                    let ray = generate_camera_ray(cam, px, py as u32, w, h);
                    let hit = march(scene, ray);
                    let rgb = encode_rgb(shade_with(scene, &hit, options.debug_budget));
                    let i = px as usize * 3;
                    row[i..i + 3].copy_from_slice(&rgb);
                }
            });
    });
    img
}
