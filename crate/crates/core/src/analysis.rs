//! Attacks on `.vqc` containers and key-space cost estimates.

use std::time::Instant;

use rayon::prelude::*;

use crate::container::{CipherContainer, Scheme};
use crate::error::{Error, Result};
use crate::perm::{derive_permutation, Seed};
use crate::pixmap::{metrics::sse, psnr, reassemble, total_variation, BlockGrid, Pixmap};
use crate::shuffle::{decrypt_decode, undo_random_index};
use crate::vq::decode_plain;

/// Largest seed space [`brute_force_seed`] will walk.
pub const MAX_BRUTE_FORCE_BITS: u32 = 24;

const SECONDS_PER_YEAR: f64 = 3600.0 * 24.0 * 365.0;

/// Reconstructs an image from a container without any key: every index is
/// looked up positionally in the codebook exactly as transmitted.
pub fn naive_decode(c: &CipherContainer) -> Result<Pixmap> {
    decode_plain(&c.index_matrix, &c.codebook, c.block_dims, c.orig_dims)
}

/// Decodes a container with `seed`, honouring the scheme recorded in its flags.
/// Plain containers ignore the seed.
pub fn decrypt_container(c: &CipherContainer, seed: Seed) -> Result<Pixmap> {
    match c.scheme {
        Scheme::Plain => naive_decode(c),
        Scheme::RandomIndex => {
            let perm = derive_permutation(seed, c.codebook.len())?;
            let ix = undo_random_index(&c.index_matrix, &perm)?;
            decode_plain(&ix, &c.codebook, c.block_dims, c.orig_dims)
        }
        Scheme::Full => {
            let perm = derive_permutation(seed, c.codebook.len())?;
            decrypt_decode(&c.index_matrix, &c.codebook, &perm)?.to_pixmap(c.block_dims, c.orig_dims)
        }
    }
}

/// How brute-force candidates are ranked; lower scores are better.
#[derive(Debug, Clone, Copy)]
pub enum Scoring<'a> {
    /// Known-plainimage: squared error against a reference image.
    Reference(&'a Pixmap),
    /// Ciphertext-only: total variation of the candidate.
    TotalVariation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackReport {
    pub scheme: Scheme,
    pub seeds_tried: u64,
    pub blocks_tried: u64,
    pub elapsed_secs: f64,
    /// Lowest-scoring seed; the smallest seed wins ties.
    pub best_seed: u64,
    pub best_score: u64,
    pub psnr_vs_reference: Option<f64>,
    /// Set only when the best score is strictly lower than every other candidate's.
    pub recovered_seed: Option<u64>,
}

#[derive(Clone, Copy)]
struct Ranked {
    best: (u64, u64),
    runner_up: Option<(u64, u64)>,
}

impl Ranked {
    fn one(score: u64, seed: u64) -> Self {
        Self { best: (score, seed), runner_up: None }
    }

    fn merge(self, other: Self) -> Self {
        let mut all = [Some(self.best), self.runner_up, Some(other.best), other.runner_up];
        all.sort_unstable_by_key(|c| c.unwrap_or((u64::MAX, u64::MAX)));
        Self { best: all[0].unwrap(), runner_up: all[1] }
    }
}

/// Tries every seed below `2^seed_bits`, decrypting and scoring each candidate.
pub fn brute_force_seed(c: &CipherContainer, seed_bits: u32, scoring: Scoring<'_>) -> Result<AttackReport> {
    if seed_bits > MAX_BRUTE_FORCE_BITS {
        return Err(Error::SeedBitsTooLarge(seed_bits));
    }
    if let Scoring::Reference(r) = scoring {
        if (r.width(), r.height()) != c.orig_dims {
            return Err(Error::DimensionMismatch {
                expected: c.orig_dims.0 * c.orig_dims.1,
                found: r.width() * r.height(),
            });
        }
    }
    c.index_matrix.check_range(c.codebook.len())?;

    let score = |p: &Pixmap| match scoring {
        Scoring::Reference(r) => sse(p.pixels(), r.pixels()),
        Scoring::TotalVariation => total_variation(p),
    };

    let start = Instant::now();
    let seeds = 1u64 << seed_bits;
    let ranked = (0..seeds)
        .into_par_iter()
        .map(|s| decrypt_container(c, Seed(s)).map(|p| Ranked::one(score(&p), s)))
        .try_reduce_with(|a, b| Ok(a.merge(b)))
        .expect("seed range is never empty")?;
    let elapsed_secs = start.elapsed().as_secs_f64();

    let (best_score, best_seed) = ranked.best;
    let unique = ranked.runner_up.is_none_or(|(s, _)| s > best_score);
    let psnr_vs_reference = match scoring {
        Scoring::Reference(r) => Some(psnr(&decrypt_container(c, Seed(best_seed))?, r)?),
        Scoring::TotalVariation => None,
    };
    Ok(AttackReport {
        scheme: c.scheme,
        seeds_tried: seeds,
        blocks_tried: seeds * c.index_matrix.len() as u64,
        elapsed_secs,
        best_seed,
        best_score,
        psnr_vs_reference,
        recovered_seed: unique.then_some(best_seed),
    })
}

/// Years needed to enumerate `2^bits` keys at `guesses_per_second`.
pub fn keyspace_years(bits: u32, guesses_per_second: f64) -> f64 {
    2f64.powi(bits as i32) / (guesses_per_second * SECONDS_PER_YEAR)
}

/// `log2(m!)` by direct summation.
pub fn log2_factorial(m: u64) -> f64 {
    (2..=m).map(|k| (k as f64).log2()).sum()
}

/// Replaces every codeword by `remap[codeword position]` and decodes; used to
/// model a consistent wrong-codeword substitution.
pub fn remapped_decode(c: &CipherContainer, remap: &[usize]) -> Result<Pixmap> {
    let dim = c.codebook.dim();
    let mut data = Vec::with_capacity(c.index_matrix.len() * dim);
    for (block, &ix) in c.index_matrix.indices().iter().enumerate() {
        let target = match remap.get(ix) {
            Some(&t) if t < c.codebook.len() => t,
            _ => return Err(Error::IndexOutOfRange { block, index: ix, m: remap.len().min(c.codebook.len()) }),
        };
        data.extend_from_slice(c.codebook.get(target));
    }
    reassemble(&BlockGrid::from_blocks(data, c.block_dims, c.orig_dims)?)
}
