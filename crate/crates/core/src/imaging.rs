//! Photograph decoding, grayscale conversion and gray-level quantization.

use std::path::Path;

use image::{DynamicImage, ImageFormat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 8-bit gray image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayRaster {
    width: usize,
    height: usize,
    values: Vec<u8>,
}

impl GrayRaster {
    pub fn new(width: usize, height: usize, values: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput(format!(
                "raster must be nonempty, got {width}x{height}"
            )));
        }
        if values.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "raster {width}x{height} needs {} values, got {}",
                width * height,
                values.len()
            )));
        }
        Ok(GrayRaster {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.values[row * self.width + col]
    }

    /// Encodes the raster as an 8-bit grayscale PNG.
    pub fn to_png(&self) -> Result<Vec<u8>> {
        let img = image::GrayImage::from_raw(self.width as u32, self.height as u32, self.values.clone())
            .ok_or_else(|| Error::InvalidInput("raster dimensions overflow".into()))?;
        let mut out = std::io::Cursor::new(Vec::new());
        img.write_to(&mut out, ImageFormat::Png)
            .map_err(|e| Error::InvalidInput(format!("png encoding failed: {e}")))?;
        Ok(out.into_inner())
    }
}

/// 8-bit RGB image, row-major, interleaved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbRaster {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl RgbRaster {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.is_empty() {
            return Err(Error::InvalidInput("empty RGB image".into()));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "RGB image {width}x{height} needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(RgbRaster {
            width,
            height,
            pixels,
        })
    }

    /// Builds a raster from tightly packed `R,G,B` bytes.
    pub fn from_interleaved(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != width * height * 3 {
            return Err(Error::InvalidInput(format!(
                "RGB image {width}x{height} needs {} bytes, got {}",
                width * height * 3,
                bytes.len()
            )));
        }
        let pixels = bytes.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        RgbRaster::new(width, height, pixels)
    }
}

/// Quantized gray levels in `0..m`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelMatrix {
    width: usize,
    height: usize,
    m: usize,
    levels: Vec<u16>,
}

impl LevelMatrix {
    pub fn new(width: usize, height: usize, m: usize, levels: Vec<u16>) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidConfig(format!("gray-level count must be >= 2, got {m}")));
        }
        if width == 0 || height == 0 || levels.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "level matrix {width}x{height} has {} entries",
                levels.len()
            )));
        }
        if let Some(bad) = levels.iter().find(|&&l| l as usize >= m) {
            return Err(Error::InvalidInput(format!("level {bad} is not below m = {m}")));
        }
        Ok(LevelMatrix {
            width,
            height,
            m,
            levels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn levels(&self) -> &[u16] {
        &self.levels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u16 {
        self.levels[row * self.width + col]
    }
}

/// How raw gray values are mapped onto `m` levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrayScaling {
    /// `floor(v * m / 256)` over the fixed range `[0, 255]`.
    #[default]
    Fixed,
    /// Stretch the image's own `[min, max]` onto the levels.
    MinMax,
}

/// Luma conversion with round-half-up: `round(0.299 R + 0.587 G + 0.114 B)`.
pub fn to_grayscale(image: &RgbRaster) -> GrayRaster {
    let values = image.pixels.iter().map(|&p| luma(p)).collect();
    GrayRaster {
        width: image.width,
        height: image.height,
        values,
    }
}

/// Exact integer form of the weighted sum (weights scaled by 1000) so that
/// half-way cases round up identically on every platform.
#[inline]
fn luma([r, g, b]: [u8; 3]) -> u8 {
    let scaled = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
    ((scaled + 500) / 1000).min(255) as u8
}

pub fn quantize(gray: &GrayRaster, m: usize) -> Result<LevelMatrix> {
    quantize_with(gray, m, GrayScaling::Fixed)
}

pub fn quantize_with(gray: &GrayRaster, m: usize, scaling: GrayScaling) -> Result<LevelMatrix> {
    if m < 2 {
        return Err(Error::InvalidConfig(format!("gray-level count must be >= 2, got {m}")));
    }
    if m > 256 {
        return Err(Error::InvalidConfig(format!(
            "gray-level count must be <= 256 for 8-bit input, got {m}"
        )));
    }
    let levels = match scaling {
        GrayScaling::Fixed => gray
            .values
            .iter()
            .map(|&v| (v as usize * m / 256) as u16)
            .collect(),
        GrayScaling::MinMax => {
            let lo = *gray.values.iter().min().expect("raster is nonempty") as usize;
            let hi = *gray.values.iter().max().expect("raster is nonempty") as usize;
            let span = hi - lo + 1;
            gray.values
                .iter()
                .map(|&v| ((v as usize - lo) * m / span) as u16)
                .collect()
        }
    };
    Ok(LevelMatrix {
        width: gray.width,
        height: gray.height,
        m,
        levels,
    })
}

/// Decodes PNG or JPEG bytes into a gray raster. RGB inputs go through
/// [`to_grayscale`]; alpha channels and 16-bit samples are rejected.
pub fn decode_gray(bytes: &[u8]) -> Result<GrayRaster> {
    let format = image::guess_format(bytes)
        .map_err(|e| Error::UnsupportedImage(format!("unrecognized image data: {e}")))?;
    if !matches!(format, ImageFormat::Png | ImageFormat::Jpeg) {
        return Err(Error::UnsupportedImage(format!(
            "{format:?} is not accepted, only PNG and JPEG"
        )));
    }
    let img = image::load_from_memory_with_format(bytes, format)
        .map_err(|e| Error::UnsupportedImage(format!("decode failed: {e}")))?;
    from_dynamic(img)
}

pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayRaster> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_gray(&bytes)
}

fn from_dynamic(img: DynamicImage) -> Result<GrayRaster> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img {
        DynamicImage::ImageLuma8(buf) => GrayRaster::new(w, h, buf.into_raw()),
        DynamicImage::ImageRgb8(buf) => {
            let rgb = RgbRaster::from_interleaved(w, h, buf.as_raw())?;
            Ok(to_grayscale(&rgb))
        }
        DynamicImage::ImageLumaA8(_) | DynamicImage::ImageRgba8(_) => Err(
            Error::UnsupportedImage("images with an alpha channel are not accepted".into()),
        ),
        other => Err(Error::UnsupportedImage(format!(
            "{:?} samples are not accepted, only 8-bit gray or RGB",
            other.color()
        ))),
    }
}
