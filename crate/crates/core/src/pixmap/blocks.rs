use super::Pixmap;
use crate::error::{Error, Result};

/// An image cut into equally sized, non-overlapping blocks.
///
/// Blocks are stored back to back in a flat buffer, enumerated row-major over
/// the block grid with pixels row-major inside each block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockGrid {
    data: Vec<u8>,
    grid_w: usize,
    grid_h: usize,
    block_w: usize,
    block_h: usize,
    orig_w: usize,
    orig_h: usize,
}

impl BlockGrid {
    /// Builds a grid from a flat block buffer, validating every shape invariant.
    pub fn from_blocks(
        data: Vec<u8>,
        (block_w, block_h): (usize, usize),
        (orig_w, orig_h): (usize, usize),
    ) -> Result<Self> {
        if block_w == 0 || block_h == 0 || orig_w == 0 || orig_h == 0 {
            return Err(Error::InvalidParameter(format!(
                "block {block_w}x{block_h} and image {orig_w}x{orig_h} must be non-empty"
            )));
        }
        let grid_w = orig_w.div_ceil(block_w);
        let grid_h = orig_h.div_ceil(block_h);
        let dim = block_w * block_h;
        if data.len() != grid_w * grid_h * dim {
            return Err(Error::BlockCountMismatch {
                expected: grid_w * grid_h,
                found: data.len() / dim,
            });
        }
        Ok(Self { data, grid_w, grid_h, block_w, block_h, orig_w, orig_h })
    }

    pub fn len(&self) -> usize {
        self.grid_w * self.grid_h
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Length of one block vector.
    pub fn dim(&self) -> usize {
        self.block_w * self.block_h
    }

    pub fn block(&self, i: usize) -> &[u8] {
        let d = self.dim();
        &self.data[i * d..(i + 1) * d]
    }

    pub fn blocks(&self) -> std::slice::ChunksExact<'_, u8> {
        self.data.chunks_exact(self.dim())
    }

    pub fn as_flat(&self) -> &[u8] {
        &self.data
    }

    pub fn grid_dims(&self) -> (usize, usize) {
        (self.grid_w, self.grid_h)
    }

    pub fn block_dims(&self) -> (usize, usize) {
        (self.block_w, self.block_h)
    }

    pub fn orig_dims(&self) -> (usize, usize) {
        (self.orig_w, self.orig_h)
    }
}

/// Cuts `p` into `block_w`×`block_h` blocks. Dimensions that are not a
/// multiple of the block size are padded by replicating the last row/column.
pub fn decompose(p: &Pixmap, block_w: usize, block_h: usize) -> Result<BlockGrid> {
    if block_w == 0 || block_h == 0 {
        return Err(Error::InvalidParameter(format!(
            "block size must be positive, got {block_w}x{block_h}"
        )));
    }
    let (w, h) = (p.width(), p.height());
    let grid_w = w.div_ceil(block_w);
    let grid_h = h.div_ceil(block_h);
    let mut data = Vec::with_capacity(grid_w * grid_h * block_w * block_h);
    for gy in 0..grid_h {
        for gx in 0..grid_w {
            for by in 0..block_h {
                let y = (gy * block_h + by).min(h - 1);
                for bx in 0..block_w {
                    let x = (gx * block_w + bx).min(w - 1);
                    data.push(p.get(x, y));
                }
            }
        }
    }
    BlockGrid::from_blocks(data, (block_w, block_h), (w, h))
}

/// Inverse of [`decompose`]: places blocks back and crops the padding.
pub fn reassemble(g: &BlockGrid) -> Result<Pixmap> {
    let (w, h) = g.orig_dims();
    let (bw, bh) = g.block_dims();
    let mut pixels = vec![0u8; w * h];
    for (i, block) in g.blocks().enumerate() {
        let (gx, gy) = (i % g.grid_w, i / g.grid_w);
        for by in 0..bh {
            let y = gy * bh + by;
            if y >= h {
                break;
            }
            let x0 = gx * bw;
            let run = bw.min(w - x0);
            pixels[y * w + x0..y * w + x0 + run].copy_from_slice(&block[by * bw..by * bw + run]);
        }
    }
    Pixmap::new(w, h, pixels)
}
