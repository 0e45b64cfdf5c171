//! 8-bit grayscale images: PGM I/O, block decomposition and fidelity metrics.

mod blocks;
pub(crate) mod metrics;
mod pgm;

pub use blocks::{decompose, reassemble, BlockGrid};
pub use metrics::{mse, psnr, total_variation};
pub use pgm::{read_pgm, write_pgm};

use crate::error::{Error, Result};

/// Row-major grid of 8-bit intensities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pixmap {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl Pixmap {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "pixmap dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                found: pixels.len(),
            });
        }
        Ok(Self { width, height, pixels })
    }

    /// Uniform image of one intensity.
    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }
}
