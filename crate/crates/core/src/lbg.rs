//! Codebook design with the Linde–Buzo–Gray splitting algorithm.
//!
//! Training starts from the global centroid and doubles the codebook by
//! perturbing every codeword up and down by a relative `split_delta`, running
//! generalized Lloyd iterations after each split. Cell sums are accumulated
//! in integers so the result does not depend on how the assignment step is
//! scheduled across threads.

use rayon::prelude::*;

use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::vq::{nearest, sq_dist};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainParams {
    /// Final codebook size; must be a power of two.
    pub target_size: usize,
    pub split_delta: f64,
    /// Lloyd iterations stop once the relative distortion decrease falls below this.
    pub rel_tol: f64,
    /// Iteration cap per codebook size.
    pub max_iters: usize,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self { target_size: 256, split_delta: 0.01, rel_tol: 1e-4, max_iters: 100 }
    }
}

impl TrainParams {
    pub fn with_size(target_size: usize) -> Self {
        Self { target_size, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !self.target_size.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "codebook size {} is not a power of two",
                self.target_size
            )));
        }
        if !(self.split_delta > 0.0 && self.split_delta < 1.0) {
            return Err(Error::InvalidParameter(format!("split delta {} outside (0, 1)", self.split_delta)));
        }
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return Err(Error::InvalidParameter(format!("relative tolerance {} must be positive", self.rel_tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// Real-valued codebook used during training.
struct Centroids {
    dim: usize,
    words: Vec<f64>,
}

impl Centroids {
    fn len(&self) -> usize {
        self.words.len() / self.dim
    }

    fn get(&self, pos: usize) -> &[f64] {
        &self.words[pos * self.dim..(pos + 1) * self.dim]
    }

    /// Same tie rule as [`nearest`]: distance, then content, then position.
    fn nearest(&self, v: &[u8]) -> (usize, f64) {
        let dist = |w: &[f64]| -> f64 {
            w.iter()
                .zip(v)
                .map(|(&c, &x)| {
                    let d = f64::from(x) - c;
                    d * d
                })
                .sum()
        };
        let mut best = 0;
        let mut best_d = dist(self.get(0));
        for pos in 1..self.len() {
            let w = self.get(pos);
            let d = dist(w);
            if d < best_d || (d == best_d && lex_less(w, self.get(best))) {
                best = pos;
                best_d = d;
            }
        }
        (best, best_d)
    }

    fn split(&mut self, delta: f64) {
        let mut next = Vec::with_capacity(self.words.len() * 2);
        for w in self.words.chunks_exact(self.dim) {
            next.extend(w.iter().map(|c| c * (1.0 - delta)));
            next.extend(w.iter().map(|c| c * (1.0 + delta)));
        }
        self.words = next;
    }

    fn quantize(&self) -> Result<Codebook> {
        let data = self.words.iter().map(|c| c.round().clamp(0.0, 255.0) as u8).collect();
        Codebook::new(self.dim, data)
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

fn check_blocks<B: AsRef<[u8]>>(blocks: &[B]) -> Result<usize> {
    let dim = blocks.first().ok_or(Error::EmptyTrainingSet)?.as_ref().len();
    if dim == 0 {
        return Err(Error::InvalidParameter("block vectors must be non-empty".into()));
    }
    if let Some(b) = blocks.iter().find(|b| b.as_ref().len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: b.as_ref().len() });
    }
    Ok(dim)
}

/// Distortion recorded at every assignment step, one vector per codebook size.
pub(crate) type Trace = Vec<Vec<f64>>;

fn recenter<B: AsRef<[u8]>>(blocks: &[B], assign: &[(usize, f64)], cents: &mut Centroids) {
    let (m, dim) = (cents.len(), cents.dim);
    let mut sums = vec![0u64; m * dim];
    let mut counts = vec![0u64; m];
    for (b, &(cell, _)) in blocks.iter().zip(assign) {
        counts[cell] += 1;
        for (s, &x) in sums[cell * dim..(cell + 1) * dim].iter_mut().zip(b.as_ref()) {
            *s += u64::from(x);
        }
    }

    // Empty cells take the training vectors farthest from their codewords.
    let mut far: Vec<usize> = Vec::new();
    let mut next_far = 0;
    for cell in 0..m {
        let word = &mut cents.words[cell * dim..(cell + 1) * dim];
        if counts[cell] > 0 {
            let n = counts[cell] as f64;
            for (w, &s) in word.iter_mut().zip(&sums[cell * dim..(cell + 1) * dim]) {
                *w = s as f64 / n;
            }
            continue;
        }
        if far.is_empty() {
            far = (0..blocks.len()).collect();
            far.sort_by(|&a, &b| assign[b].1.total_cmp(&assign[a].1).then(a.cmp(&b)));
        }
        let src = blocks[far[next_far % far.len()]].as_ref();
        next_far += 1;
        for (w, &x) in word.iter_mut().zip(src) {
            *w = f64::from(x);
        }
    }
}

fn lloyd<B: AsRef<[u8]> + Sync>(blocks: &[B], cents: &mut Centroids, params: &TrainParams) -> Vec<f64> {
    let n = blocks.len() as f64;
    let mut history = Vec::new();
    let mut prev: Option<f64> = None;
    for _ in 0..params.max_iters {
        let assign: Vec<(usize, f64)> = blocks.par_iter().map(|b| cents.nearest(b.as_ref())).collect();
        let d = assign.iter().map(|a| a.1).sum::<f64>() / n;
        history.push(d);
        if let Some(p) = prev {
            if p - d <= params.rel_tol * p {
                break;
            }
        }
        recenter(blocks, &assign, cents);
        prev = Some(d);
    }
    history
}

pub(crate) fn train_traced<B: AsRef<[u8]> + Sync>(
    blocks: &[B],
    params: &TrainParams,
) -> Result<(Codebook, Trace)> {
    params.validate()?;
    let dim = check_blocks(blocks)?;

    let mut sum = vec![0u64; dim];
    for b in blocks {
        for (s, &x) in sum.iter_mut().zip(b.as_ref()) {
            *s += u64::from(x);
        }
    }
    let n = blocks.len() as f64;
    let mut cents = Centroids { dim, words: sum.iter().map(|&s| s as f64 / n).collect() };

    let mut trace = Vec::new();
    while cents.len() < params.target_size {
        cents.split(params.split_delta);
        trace.push(lloyd(blocks, &mut cents, params));
    }
    Ok((cents.quantize()?, trace))
}

/// Trains a codebook of `params.target_size` codewords on `blocks`.
pub fn train<B: AsRef<[u8]> + Sync>(blocks: &[B], params: &TrainParams) -> Result<Codebook> {
    train_traced(blocks, params).map(|(cb, _)| cb)
}

/// Mean squared distance from each block to its nearest codeword.
pub fn distortion<B: AsRef<[u8]> + Sync>(blocks: &[B], cb: &Codebook) -> Result<f64> {
    let dim = check_blocks(blocks)?;
    if dim != cb.dim() {
        return Err(Error::DimensionMismatch { expected: cb.dim(), found: dim });
    }
    let total: u64 = blocks
        .par_iter()
        .map(|b| {
            let b = b.as_ref();
            sq_dist(cb.get(nearest(cb, b)), b)
        })
        .sum();
    Ok(total as f64 / blocks.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_blocks(seed: u64, n: usize, dim: usize) -> Vec<Vec<u8>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| (0..dim).map(|_| rng.gen()).collect()).collect()
    }

    #[test]
    fn constant_set_single_codeword() {
        let blocks = vec![vec![42u8; 16]; 30];
        let cb = train(&blocks, &TrainParams::with_size(1)).unwrap();
        assert_eq!(cb.len(), 1);
        assert_eq!(cb.get(0), &[42u8; 16][..]);
    }

    #[test]
    fn two_clusters() {
        let mut blocks = vec![vec![0u8; 16]; 100];
        blocks.extend(vec![vec![255u8; 16]; 100]);
        let cb = train(&blocks, &TrainParams::with_size(2)).unwrap();
        let mut words = cb.sorted_contents();
        words.dedup();
        assert_eq!(words, vec![&[0u8; 16][..], &[255u8; 16][..]]);
        assert_eq!(distortion(&blocks, &cb).unwrap(), 0.0);
    }

    #[test]
    fn lloyd_is_monotone() {
        let blocks = random_blocks(1, 400, 4);
        let params = TrainParams { target_size: 32, rel_tol: 1e-9, ..TrainParams::default() };
        let (_, trace) = train_traced(&blocks, &params).unwrap();
        assert_eq!(trace.len(), 5);
        for level in &trace {
            for w in level.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12), "distortion rose: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn size_preserved_with_empty_cells() {
        // 3 distinct vectors cannot fill 8 cells; repair keeps m anyway
        let mut blocks = vec![vec![0u8, 0]; 10];
        blocks.extend(vec![vec![100u8, 100]; 10]);
        blocks.extend(vec![vec![200u8, 50]; 10]);
        let cb = train(&blocks, &TrainParams::with_size(8)).unwrap();
        assert_eq!(cb.len(), 8);
        assert_eq!(distortion(&blocks, &cb).unwrap(), 0.0);
    }

    #[test]
    fn more_codewords_than_blocks() {
        let blocks = random_blocks(2, 3, 4);
        let cb = train(&blocks, &TrainParams::with_size(16)).unwrap();
        assert_eq!(cb.len(), 16);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let blocks = random_blocks(3, 2000, 16);
        let params = TrainParams::with_size(16);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| train(&blocks, &params).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(4));
        assert_eq!(one, train(&blocks, &params).unwrap());
    }

    #[test]
    fn trained_distortion_beats_centroid() {
        let blocks = random_blocks(4, 500, 4);
        let small = train(&blocks, &TrainParams::with_size(1)).unwrap();
        let big = train(&blocks, &TrainParams::with_size(16)).unwrap();
        assert!(distortion(&blocks, &big).unwrap() < distortion(&blocks, &small).unwrap());
    }

    #[test]
    fn distortion_examples() {
        let cb = Codebook::from_codewords([[3u8, 4]]).unwrap();
        assert_eq!(distortion(&[[0u8, 0]], &cb).unwrap(), 25.0);
        let cb2 = Codebook::from_codewords([[1u8, 2], [7, 7]]).unwrap();
        assert_eq!(distortion(&[[1u8, 2], [7, 7], [1, 2]], &cb2).unwrap(), 0.0);
    }

    #[test]
    fn distortion_matches_brute_force() {
        let blocks = random_blocks(5, 50, 4);
        let words = random_blocks(6, 8, 4);
        let cb = Codebook::from_codewords(&words).unwrap();
        let expected: u64 = blocks
            .iter()
            .map(|b| {
                words
                    .iter()
                    .map(|w| w.iter().zip(b).map(|(&x, &y)| (x as i64 - y as i64).pow(2) as u64).sum::<u64>())
                    .min()
                    .unwrap()
            })
            .sum();
        assert_eq!(distortion(&blocks, &cb).unwrap(), expected as f64 / 50.0);
    }

    #[test]
    fn rejects_bad_input() {
        let empty: Vec<Vec<u8>> = vec![];
        assert_eq!(train(&empty, &TrainParams::with_size(2)).unwrap_err(), Error::EmptyTrainingSet);
        assert!(distortion(&empty, &Codebook::from_codewords([[0u8]]).unwrap()).is_err());
        let ragged = vec![vec![0u8; 4], vec![0u8; 3]];
        assert!(matches!(
            train(&ragged, &TrainParams::with_size(2)),
            Err(Error::DimensionMismatch { expected: 4, found: 3 })
        ));
        let ok = vec![vec![0u8; 4]];
        assert!(train(&ok, &TrainParams::with_size(3)).is_err());
        assert!(train(&ok, &TrainParams { rel_tol: 0.0, ..TrainParams::with_size(2) }).is_err());
    }
}
