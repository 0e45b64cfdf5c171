use super::Pixmap;
use crate::error::{Error, Result};

fn check_dims(a: &Pixmap, b: &Pixmap) -> Result<()> {
    if a.width() != b.width() {
        return Err(Error::DimensionMismatch { expected: a.width(), found: b.width() });
    }
    if a.height() != b.height() {
        return Err(Error::DimensionMismatch { expected: a.height(), found: b.height() });
    }
    Ok(())
}

/// Sum of squared per-pixel differences.
pub(crate) fn sse(a: &[u8], b: &[u8]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = i32::from(x) - i32::from(y);
            (d * d) as u64
        })
        .sum()
}

pub fn mse(a: &Pixmap, b: &Pixmap) -> Result<f64> {
    check_dims(a, b)?;
    Ok(sse(a.pixels(), b.pixels()) as f64 / a.pixels().len() as f64)
}

/// Peak signal-to-noise ratio in dB; `f64::INFINITY` for identical images.
pub fn psnr(a: &Pixmap, b: &Pixmap) -> Result<f64> {
    let m = mse(a, b)?;
    if m == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0f64 * 255.0 / m).log10())
}

/// Anisotropic total variation: sum of absolute differences between
/// horizontally and vertically adjacent pixels.
pub fn total_variation(p: &Pixmap) -> u64 {
    let (w, h) = (p.width(), p.height());
    let px = p.pixels();
    let mut tv = 0u64;
    for y in 0..h {
        let row = &px[y * w..(y + 1) * w];
        tv += row.windows(2).map(|d| d[0].abs_diff(d[1]) as u64).sum::<u64>();
        if y + 1 < h {
            let next = &px[(y + 1) * w..(y + 2) * w];
            tv += row.iter().zip(next).map(|(&a, &b)| a.abs_diff(b) as u64).sum::<u64>();
        }
    }
    tv
}
