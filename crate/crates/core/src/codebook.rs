use crate::error::{Error, Result};

/// Ordered set of `m` codewords of equal dimension.
///
/// Position order is meaningful: the shuffle cipher uses it as mutable state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Codebook {
    dim: usize,
    data: Vec<u8>,
}

impl Codebook {
    /// Wraps a flat buffer of `m * dim` bytes, codewords back to back.
    pub fn new(dim: usize, data: Vec<u8>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("codeword dimension must be positive".into()));
        }
        if data.is_empty() {
            return Err(Error::InvalidParameter("codebook must hold at least one codeword".into()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: data.len() % dim });
        }
        Ok(Self { dim, data })
    }

    pub fn from_codewords<I, W>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = W>,
        W: AsRef<[u8]>,
    {
        let mut data = Vec::new();
        let mut dim = None;
        for w in words {
            let w = w.as_ref();
            match dim {
                None => dim = Some(w.len()),
                Some(d) if d != w.len() => {
                    return Err(Error::DimensionMismatch { expected: d, found: w.len() })
                }
                _ => {}
            }
            data.extend_from_slice(w);
        }
        Self::new(dim.unwrap_or(0), data)
    }

    /// Number of codewords.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, pos: usize) -> &[u8] {
        &self.data[pos * self.dim..(pos + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, u8> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[u8] {
        &self.data
    }

    /// Exchanges the contents of two positions. `a == b` is a no-op.
    pub fn swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let d = self.dim;
        let (head, tail) = self.data.split_at_mut(hi * d);
        head[lo * d..(lo + 1) * d].swap_with_slice(&mut tail[..d]);
    }

    /// Codewords sorted by content; equal for two codebooks that hold the same
    /// multiset of codewords in any order.
    pub fn sorted_contents(&self) -> Vec<&[u8]> {
        let mut words: Vec<&[u8]> = self.iter().collect();
        words.sort_unstable();
        words
    }
}
