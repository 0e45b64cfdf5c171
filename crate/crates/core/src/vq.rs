//! Plain vector quantization: exhaustive nearest-codeword search, encoding
//! and decoding without any keying.

use rayon::prelude::*;

use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::pixmap::{reassemble, BlockGrid, Pixmap};

/// Grid of per-block codebook references, 0-based, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexMatrix {
    indices: Vec<usize>,
    grid_w: usize,
    grid_h: usize,
}

impl IndexMatrix {
    pub fn new(indices: Vec<usize>, grid_w: usize, grid_h: usize) -> Result<Self> {
        if indices.len() != grid_w * grid_h {
            return Err(Error::BlockCountMismatch { expected: grid_w * grid_h, found: indices.len() });
        }
        Ok(Self { indices, grid_w, grid_h })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn grid_dims(&self) -> (usize, usize) {
        (self.grid_w, self.grid_h)
    }

    /// Fails on the first entry that does not address a codebook of size `m`.
    pub fn check_range(&self, m: usize) -> Result<()> {
        match self.indices.iter().position(|&ix| ix >= m) {
            Some(block) => Err(Error::IndexOutOfRange { block, index: self.indices[block], m }),
            None => Ok(()),
        }
    }

    /// Renders the matrix with 1-based entries, one grid row per line.
    pub fn display_one_based(&self) -> String {
        self.indices
            .chunks(self.grid_w.max(1))
            .map(|row| row.iter().map(|ix| (ix + 1).to_string()).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Squared Euclidean distance, giving up once it exceeds `bound`.
#[inline]
fn bounded_sq_dist(a: &[u8], b: &[u8], bound: u64) -> Option<u64> {
    let mut acc = 0u64;
    for (ca, cb) in a.chunks(8).zip(b.chunks(8)) {
        acc += ca
            .iter()
            .zip(cb)
            .map(|(&x, &y)| {
                let d = i32::from(x) - i32::from(y);
                (d * d) as u64
            })
            .sum::<u64>();
        if acc > bound {
            return None;
        }
    }
    Some(acc)
}

pub(crate) fn sq_dist(a: &[u8], b: &[u8]) -> u64 {
    bounded_sq_dist(a, b, u64::MAX).unwrap_or(u64::MAX)
}

/// Position of the codeword closest to `v` in squared Euclidean distance.
///
/// Ties go to the lexicographically smallest codeword content, then to the
/// smallest position, so the selected content does not depend on codebook order.
/// The partial-distance cutoff only discards candidates strictly worse than
/// the current best, so the result equals an exhaustive scan.
pub fn nearest(cb: &Codebook, v: &[u8]) -> usize {
    debug_assert_eq!(cb.dim(), v.len());
    let mut best = 0;
    let mut best_d = sq_dist(cb.get(0), v);
    for pos in 1..cb.len() {
        let w = cb.get(pos);
        if let Some(d) = bounded_sq_dist(w, v, best_d) {
            if d < best_d || w < cb.get(best) {
                best = pos;
                best_d = d;
            }
        }
    }
    best
}

pub(crate) fn check_dim(cb: &Codebook, g: &BlockGrid) -> Result<()> {
    if cb.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: cb.dim(), found: g.dim() });
    }
    Ok(())
}

pub fn encode_plain(g: &BlockGrid, cb: &Codebook) -> Result<IndexMatrix> {
    check_dim(cb, g)?;
    let indices: Vec<usize> = g.as_flat().par_chunks_exact(g.dim()).map(|b| nearest(cb, b)).collect();
    let (gw, gh) = g.grid_dims();
    IndexMatrix::new(indices, gw, gh)
}

/// Tiles the referenced codewords and crops to `orig_dims`.
pub fn decode_plain(
    ix: &IndexMatrix,
    cb: &Codebook,
    block_dims: (usize, usize),
    orig_dims: (usize, usize),
) -> Result<Pixmap> {
    ix.check_range(cb.len())?;
    if block_dims.0 * block_dims.1 != cb.dim() {
        return Err(Error::DimensionMismatch { expected: cb.dim(), found: block_dims.0 * block_dims.1 });
    }
    let mut data = Vec::with_capacity(ix.len() * cb.dim());
    for &i in ix.indices() {
        data.extend_from_slice(cb.get(i));
    }
    let g = BlockGrid::from_blocks(data, block_dims, orig_dims)?;
    if g.grid_dims() != ix.grid_dims() {
        return Err(Error::BlockCountMismatch { expected: g.len(), found: ix.len() });
    }
    reassemble(&g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pixmap::decompose;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_nearest(cb: &Codebook, v: &[u8]) -> usize {
        let dist = |w: &[u8]| -> u64 {
            w.iter().zip(v).map(|(&a, &b)| (a as i64 - b as i64).pow(2) as u64).sum()
        };
        (0..cb.len())
            .min_by(|&a, &b| {
                dist(cb.get(a))
                    .cmp(&dist(cb.get(b)))
                    .then_with(|| cb.get(a).cmp(cb.get(b)))
                    .then(a.cmp(&b))
            })
            .unwrap()
    }

    fn random_codebook(rng: &mut ChaCha8Rng, m: usize, dim: usize, levels: u8) -> Codebook {
        let data = (0..m * dim).map(|_| rng.gen_range(0..levels)).collect();
        Codebook::new(dim, data).unwrap()
    }

    #[test]
    fn nearest_simple() {
        let cb = Codebook::from_codewords([[0u8, 0], [10, 10]]).unwrap();
        assert_eq!(nearest(&cb, &[2, 2]), 0);
        assert_eq!(nearest(&cb, &[9, 8]), 1);
    }

    #[test]
    fn tie_goes_to_smaller_content() {
        let cb = Codebook::from_codewords([[0u8, 0], [10, 10]]).unwrap();
        assert_eq!(nearest(&cb, &[5, 5]), 0);
        let flipped = Codebook::from_codewords([[10u8, 10], [0, 0]]).unwrap();
        assert_eq!(nearest(&flipped, &[5, 5]), 1);
    }

    #[test]
    fn duplicate_contents_pick_smallest_position() {
        let cb = Codebook::from_codewords([[9u8, 9], [1, 1], [1, 1]]).unwrap();
        assert_eq!(nearest(&cb, &[0, 0]), 1);
    }

    #[test]
    fn nearest_matches_exhaustive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // few levels so that exact ties actually occur
        for levels in [4u8, 255] {
            let cb = random_codebook(&mut rng, 16, 4, levels);
            for _ in 0..100 {
                let v: Vec<u8> = (0..4).map(|_| rng.gen_range(0..levels)).collect();
                assert_eq!(nearest(&cb, &v), brute_nearest(&cb, &v));
            }
        }
    }

    #[test]
    fn encode_matches_exhaustive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cb = random_codebook(&mut rng, 32, 16, 255);
        let p = Pixmap::from_fn(37, 22, |_, _| rng.gen()).unwrap();
        let g = decompose(&p, 4, 4).unwrap();
        let before = cb.clone();
        let ix = encode_plain(&g, &cb).unwrap();
        assert_eq!(cb, before);
        for (i, block) in g.blocks().enumerate() {
            assert_eq!(ix.indices()[i], brute_nearest(&cb, block));
        }
    }

    #[test]
    fn constant_image_single_index() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cb = random_codebook(&mut rng, 8, 16, 255);
        let g = decompose(&Pixmap::filled(20, 20, 77).unwrap(), 4, 4).unwrap();
        let ix = encode_plain(&g, &cb).unwrap();
        assert_eq!(ix.len(), 25);
        assert!(ix.indices().iter().all(|&i| i == ix.indices()[0]));
    }

    #[test]
    fn codeword_blocks_encode_to_their_position() {
        let cb = Codebook::from_codewords([[0u8; 4], [50; 4], [200; 4]]).unwrap();
        let g = BlockGrid::from_blocks([50u8; 4 * 6].to_vec(), (2, 2), (6, 4)).unwrap();
        let ix = encode_plain(&g, &cb).unwrap();
        assert!(ix.indices().iter().all(|&i| i == 1));
        let out = decode_plain(&ix, &cb, (2, 2), (6, 4)).unwrap();
        assert_eq!(out, Pixmap::filled(6, 4, 50).unwrap());
    }

    #[test]
    fn per_block_error_is_minimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cb = random_codebook(&mut rng, 8, 4, 255);
        let p = Pixmap::from_fn(8, 8, |_, _| rng.gen()).unwrap();
        let g = decompose(&p, 2, 2).unwrap();
        let ix = encode_plain(&g, &cb).unwrap();
        let rec = decompose(&decode_plain(&ix, &cb, (2, 2), (8, 8)).unwrap(), 2, 2).unwrap();
        for (orig, got) in g.blocks().zip(rec.blocks()) {
            let min = cb.iter().map(|w| sq_dist(w, orig)).min().unwrap();
            assert_eq!(sq_dist(got, orig), min);
        }
    }

    #[test]
    fn decode_rejects_out_of_range() {
        let cb = Codebook::from_codewords([[0u8; 4], [1; 4]]).unwrap();
        let ix = IndexMatrix::new(vec![0, 2, 1, 0], 2, 2).unwrap();
        assert_eq!(
            decode_plain(&ix, &cb, (2, 2), (4, 4)).unwrap_err(),
            Error::IndexOutOfRange { block: 1, index: 2, m: 2 }
        );
    }

    #[test]
    fn one_based_display() {
        let ix = IndexMatrix::new(vec![1, 0, 3, 1], 2, 2).unwrap();
        assert_eq!(ix.display_one_based(), "2 1\n4 2");
    }

    proptest! {
        #[test]
        fn nearest_content_is_order_invariant(
            seed in any::<u64>(), levels in 2u8..=255, rot in 0usize..16
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cb = random_codebook(&mut rng, 16, 4, levels);
            let mut order: Vec<usize> = (0..16).collect();
            for i in (1..16).rev() {
                order.swap(i, rng.gen_range(0..=i));
            }
            order.rotate_left(rot);
            let permuted = Codebook::from_codewords(order.iter().map(|&i| cb.get(i))).unwrap();
            let v: Vec<u8> = (0..4).map(|_| rng.gen_range(0..levels)).collect();
            prop_assert_eq!(cb.get(nearest(&cb, &v)), permuted.get(nearest(&permuted, &v)));
        }
    }
}
