//! Joint VQ encoding and encryption by codeword swapping.
//!
//! Every codebook position carries a fixed pseudo-index from the keyed
//! permutation. After a block is matched to the codeword at position `o`,
//! the encoder records `forward[o]` and exchanges the contents of positions
//! `o` and `forward[o]`. The permutation itself never moves; only codeword
//! contents do. Identical blocks therefore emit a changing stream of indices,
//! and the transmitted codebook is a keyed shuffle of the trained one.
//!
//! The swap after the final block is skipped, so the transmitted codebook is
//! the state after `n - 1` swaps. The decoder first redoes that missing swap,
//! then walks the blocks backwards, reading each codeword and undoing the
//! swap that followed it. Undoing uses the inverse table: the swap partner
//! of pseudo-index `p` is position `inverse[p]`.

use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::perm::KeyedPermutation;
use crate::pixmap::{reassemble, BlockGrid, Pixmap};
use crate::vq::{check_dim, nearest, IndexMatrix};

/// Pseudo-index matrix plus the codebook state that accompanies it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncryptResult {
    pub index_matrix: IndexMatrix,
    pub codebook: Codebook,
}

/// Blocks recovered by [`decrypt_decode`], back to back in block order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecryptResult {
    pub blocks: Vec<u8>,
    /// The codebook in its original, pre-encryption position order.
    pub restored_codebook: Codebook,
}

impl DecryptResult {
    pub fn block(&self, i: usize) -> &[u8] {
        let d = self.restored_codebook.dim();
        &self.blocks[i * d..(i + 1) * d]
    }

    pub fn to_pixmap(&self, block_dims: (usize, usize), orig_dims: (usize, usize)) -> Result<Pixmap> {
        reassemble(&BlockGrid::from_blocks(self.blocks.clone(), block_dims, orig_dims)?)
    }
}

fn check_perm(cb: &Codebook, perm: &KeyedPermutation) -> Result<()> {
    if perm.len() != cb.len() {
        return Err(Error::PermutationLength { expected: cb.len(), found: perm.len() });
    }
    Ok(())
}

/// Encodes `g` under `cb` while shuffling a working copy of the codebook.
///
/// Runs strictly in block order: each step's search sees every earlier swap.
pub fn encrypt_encode(g: &BlockGrid, cb: &Codebook, perm: &KeyedPermutation) -> Result<EncryptResult> {
    check_dim(cb, g)?;
    check_perm(cb, perm)?;
    let mut work = cb.clone();
    let n = g.len();
    let mut indices = Vec::with_capacity(n);
    for (i, block) in g.blocks().enumerate() {
        let original = nearest(&work, block);
        let pseudo = perm.forward()[original];
        indices.push(pseudo);
        if i + 1 < n {
            work.swap(original, pseudo);
        }
    }
    let (gw, gh) = g.grid_dims();
    Ok(EncryptResult { index_matrix: IndexMatrix::new(indices, gw, gh)?, codebook: work })
}

/// Exact inverse of [`encrypt_encode`].
pub fn decrypt_decode(ix: &IndexMatrix, shuffled: &Codebook, perm: &KeyedPermutation) -> Result<DecryptResult> {
    check_perm(shuffled, perm)?;
    ix.check_range(shuffled.len())?;
    let inv = perm.inverse();
    let dim = shuffled.dim();
    let indices = ix.indices();
    let mut work = shuffled.clone();
    let mut blocks = vec![0u8; indices.len() * dim];

    if let Some(&last) = indices.last() {
        work.swap(last, inv[last]);
    }
    for (i, &pseudo) in indices.iter().enumerate().rev() {
        blocks[i * dim..(i + 1) * dim].copy_from_slice(work.get(pseudo));
        work.swap(pseudo, inv[pseudo]);
    }
    Ok(DecryptResult { blocks, restored_codebook: work })
}

/// The weaker baseline: disguise indices through the permutation but never
/// swap. Flat regions still map to a single (wrong) index.
pub fn encode_random_index_only(
    g: &BlockGrid,
    cb: &Codebook,
    perm: &KeyedPermutation,
) -> Result<EncryptResult> {
    let plain = crate::vq::encode_plain(g, cb)?;
    check_perm(cb, perm)?;
    let indices = plain.indices().iter().map(|&o| perm.forward()[o]).collect();
    let (gw, gh) = g.grid_dims();
    Ok(EncryptResult { index_matrix: IndexMatrix::new(indices, gw, gh)?, codebook: cb.clone() })
}

/// Maps pseudo-indices of the random-index baseline back to codebook positions.
pub fn undo_random_index(ix: &IndexMatrix, perm: &KeyedPermutation) -> Result<IndexMatrix> {
    ix.check_range(perm.len())?;
    let (gw, gh) = ix.grid_dims();
    IndexMatrix::new(ix.indices().iter().map(|&p| perm.inverse()[p]).collect(), gw, gh)
}
