//! The `.vqc` container: one file carrying the (possibly shuffled) codebook
//! and the index matrix.
//!
//! Layout, little-endian throughout:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "VQC1"
//!      4     1  version (1)
//!      5     1  flags: bit0 full swap scheme, bit1 random-index only,
//!               bit2 plain, bit3 codebook-only file
//!      6     4  orig_w (u32)
//!     10     4  orig_h (u32)
//!     14     1  block_w
//!     15     1  block_h
//!     16     2  m (u16)
//!     18        m * block_w * block_h codebook bytes, position order
//!               grid_w * grid_h u16 indices, row-major, 0-based
//! ```
//!
//! Standalone codebook files use the same header with only bit3 set, zero
//! image dimensions and no index payload. No integrity check is carried.

use crate::codebook::Codebook;
use crate::error::{ContainerError, Error, Result};
use crate::shuffle::EncryptResult;
use crate::vq::IndexMatrix;

pub const MAGIC: &[u8; 4] = b"VQC1";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 18;
const CODEBOOK_ONLY: u8 = 0b1000;

/// Which encoder produced a container.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Pseudo-indices plus per-block codeword swapping.
    Full,
    /// Pseudo-indices only; the codebook is sent in trained order.
    RandomIndex,
    /// Unencrypted VQ.
    Plain,
}

impl Scheme {
    pub fn flag(self) -> u8 {
        match self {
            Scheme::Full => 0b001,
            Scheme::RandomIndex => 0b010,
            Scheme::Plain => 0b100,
        }
    }

    pub fn from_flag(flags: u8) -> Option<Self> {
        match flags {
            0b001 => Some(Scheme::Full),
            0b010 => Some(Scheme::RandomIndex),
            0b100 => Some(Scheme::Plain),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Full => "full",
            Scheme::RandomIndex => "random-index",
            Scheme::Plain => "plain",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherContainer {
    pub scheme: Scheme,
    pub orig_dims: (usize, usize),
    pub block_dims: (usize, usize),
    pub codebook: Codebook,
    pub index_matrix: IndexMatrix,
}

struct Header {
    flags: u8,
    orig_w: usize,
    orig_h: usize,
    block_w: usize,
    block_h: usize,
    m: usize,
}

fn write_header(out: &mut Vec<u8>, h: &Header) -> Result<()> {
    let orig_w = u32::try_from(h.orig_w).map_err(|_| ContainerError::Unrepresentable("image width"))?;
    let orig_h = u32::try_from(h.orig_h).map_err(|_| ContainerError::Unrepresentable("image height"))?;
    let block_w = u8::try_from(h.block_w).map_err(|_| ContainerError::Unrepresentable("block width"))?;
    let block_h = u8::try_from(h.block_h).map_err(|_| ContainerError::Unrepresentable("block height"))?;
    let m = u16::try_from(h.m).map_err(|_| ContainerError::Unrepresentable("codebook size"))?;
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(h.flags);
    out.extend_from_slice(&orig_w.to_le_bytes());
    out.extend_from_slice(&orig_h.to_le_bytes());
    out.push(block_w);
    out.push(block_h);
    out.extend_from_slice(&m.to_le_bytes());
    Ok(())
}

fn read_header(bytes: &[u8]) -> Result<Header, ContainerError> {
    if bytes.len() < HEADER_LEN {
        if bytes.len() >= 4 && &bytes[..4] != MAGIC {
            return Err(ContainerError::BadMagic(bytes[..4].try_into().unwrap()));
        }
        return Err(ContainerError::TruncatedHeader(bytes.len()));
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if &magic != MAGIC {
        return Err(ContainerError::BadMagic(magic));
    }
    if bytes[4] != VERSION {
        return Err(ContainerError::UnsupportedVersion(bytes[4]));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
    let header = Header {
        flags: bytes[5],
        orig_w: u32_at(6),
        orig_h: u32_at(10),
        block_w: bytes[14] as usize,
        block_h: bytes[15] as usize,
        m: u16::from_le_bytes([bytes[16], bytes[17]]) as usize,
    };
    if header.block_w == 0 {
        return Err(ContainerError::ZeroField("block_w"));
    }
    if header.block_h == 0 {
        return Err(ContainerError::ZeroField("block_h"));
    }
    if header.m == 0 {
        return Err(ContainerError::ZeroField("m"));
    }
    Ok(header)
}

impl CipherContainer {
    pub fn new(
        scheme: Scheme,
        result: EncryptResult,
        block_dims: (usize, usize),
        orig_dims: (usize, usize),
    ) -> Result<Self> {
        let c = Self {
            scheme,
            orig_dims,
            block_dims,
            codebook: result.codebook,
            index_matrix: result.index_matrix,
        };
        c.validate()?;
        Ok(c)
    }

    fn grid_dims(&self) -> (usize, usize) {
        (self.orig_dims.0.div_ceil(self.block_dims.0), self.orig_dims.1.div_ceil(self.block_dims.1))
    }

    fn validate(&self) -> Result<()> {
        let (bw, bh) = self.block_dims;
        if bw == 0 || bh == 0 || self.orig_dims.0 == 0 || self.orig_dims.1 == 0 {
            return Err(Error::InvalidParameter("container dimensions must be positive".into()));
        }
        if bw * bh != self.codebook.dim() {
            return Err(Error::DimensionMismatch { expected: bw * bh, found: self.codebook.dim() });
        }
        if self.index_matrix.grid_dims() != self.grid_dims() {
            let (gw, gh) = self.grid_dims();
            return Err(Error::BlockCountMismatch { expected: gw * gh, found: self.index_matrix.len() });
        }
        self.index_matrix.check_range(self.codebook.len())
    }

    /// Total encoded size in bytes.
    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + self.codebook.as_flat().len() + 2 * self.index_matrix.len()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        self.validate()?;
        let mut out = Vec::with_capacity(self.encoded_len());
        write_header(
            &mut out,
            &Header {
                flags: self.scheme.flag(),
                orig_w: self.orig_dims.0,
                orig_h: self.orig_dims.1,
                block_w: self.block_dims.0,
                block_h: self.block_dims.1,
                m: self.codebook.len(),
            },
        )?;
        out.extend_from_slice(self.codebook.as_flat());
        for &ix in self.index_matrix.indices() {
            // m fits u16, and every index is below m
            out.extend_from_slice(&(ix as u16).to_le_bytes());
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let h = read_header(bytes)?;
        let scheme = Scheme::from_flag(h.flags).ok_or(ContainerError::InvalidFlags(h.flags))?;
        if h.orig_w == 0 {
            return Err(ContainerError::ZeroField("orig_w").into());
        }
        if h.orig_h == 0 {
            return Err(ContainerError::ZeroField("orig_h").into());
        }
        let dim = h.block_w * h.block_h;
        let (gw, gh) = (h.orig_w.div_ceil(h.block_w), h.orig_h.div_ceil(h.block_h));
        let cb_len = h.m * dim;
        let expected = HEADER_LEN + cb_len + 2 * gw * gh;
        if bytes.len() != expected {
            return Err(ContainerError::LengthMismatch { expected, found: bytes.len() }.into());
        }
        let codebook = Codebook::new(dim, bytes[HEADER_LEN..HEADER_LEN + cb_len].to_vec())?;
        let indices: Vec<usize> = bytes[HEADER_LEN + cb_len..]
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]) as usize)
            .collect();
        if let Some(block) = indices.iter().position(|&ix| ix >= h.m) {
            return Err(ContainerError::IndexOutOfRange { block, index: indices[block], m: h.m }.into());
        }
        Ok(Self {
            scheme,
            orig_dims: (h.orig_w, h.orig_h),
            block_dims: (h.block_w, h.block_h),
            codebook,
            index_matrix: IndexMatrix::new(indices, gw, gh)?,
        })
    }
}

/// Serializes a standalone codebook file.
pub fn write_codebook(cb: &Codebook, block_dims: (usize, usize)) -> Result<Vec<u8>> {
    if block_dims.0 * block_dims.1 != cb.dim() {
        return Err(Error::DimensionMismatch { expected: cb.dim(), found: block_dims.0 * block_dims.1 });
    }
    let mut out = Vec::with_capacity(HEADER_LEN + cb.as_flat().len());
    write_header(
        &mut out,
        &Header {
            flags: CODEBOOK_ONLY,
            orig_w: 0,
            orig_h: 0,
            block_w: block_dims.0,
            block_h: block_dims.1,
            m: cb.len(),
        },
    )?;
    out.extend_from_slice(cb.as_flat());
    Ok(out)
}

/// Parses a standalone codebook file, returning the codebook and its block size.
pub fn read_codebook(bytes: &[u8]) -> Result<(Codebook, (usize, usize))> {
    let h = read_header(bytes)?;
    if h.flags != CODEBOOK_ONLY {
        return Err(ContainerError::InvalidFlags(h.flags).into());
    }
    let dim = h.block_w * h.block_h;
    let expected = HEADER_LEN + h.m * dim;
    if bytes.len() != expected {
        return Err(ContainerError::LengthMismatch { expected, found: bytes.len() }.into());
    }
    let cb = Codebook::new(dim, bytes[HEADER_LEN..].to_vec())?;
    Ok((cb, (h.block_w, h.block_h)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> CipherContainer {
        let codebook = Codebook::new(16, (0..64).collect()).unwrap();
        let index_matrix = IndexMatrix::new(vec![3, 0, 2, 1], 2, 2).unwrap();
        CipherContainer::new(Scheme::Full, EncryptResult { index_matrix, codebook }, (4, 4), (8, 8)).unwrap()
    }

    fn container_err(bytes: &[u8]) -> ContainerError {
        match CipherContainer::from_bytes(bytes) {
            Err(Error::Container(e)) => e,
            other => panic!("expected container error, got {other:?}"),
        }
    }

    #[test]
    fn layout_and_length() {
        let c = sample();
        let bytes = c.to_bytes().unwrap();
        assert_eq!(bytes.len(), 90);
        assert_eq!(c.encoded_len(), 90);
        assert_eq!(&bytes[..4], b"VQC1");
        assert_eq!(bytes[4], 1);
        assert_eq!(bytes[5], 0b001);
        assert_eq!(&bytes[6..10], &8u32.to_le_bytes());
        assert_eq!(&bytes[14..18], &[4, 4, 4, 0]);
        assert_eq!(&bytes[18..82], &(0..64).collect::<Vec<u8>>()[..]);
        assert_eq!(&bytes[82..], &[3, 0, 0, 0, 2, 0, 1, 0]);
        assert_eq!(CipherContainer::from_bytes(&bytes).unwrap(), c);
    }

    #[test]
    fn corruption_errors_are_distinct() {
        let good = sample().to_bytes().unwrap();

        let mut bad = good.clone();
        bad[0] = b'X';
        assert_eq!(container_err(&bad), ContainerError::BadMagic(*b"XQC1"));

        let mut bad = good.clone();
        bad[4] = 2;
        assert_eq!(container_err(&bad), ContainerError::UnsupportedVersion(2));

        for flags in [0u8, 0b011, 0b1000, 0x80] {
            let mut bad = good.clone();
            bad[5] = flags;
            assert_eq!(container_err(&bad), ContainerError::InvalidFlags(flags));
        }

        assert_eq!(container_err(&good[..10]), ContainerError::TruncatedHeader(10));
        assert_eq!(container_err(&good[..89]), ContainerError::LengthMismatch { expected: 90, found: 89 });
        let mut long = good.clone();
        long.push(0);
        assert_eq!(container_err(&long), ContainerError::LengthMismatch { expected: 90, found: 91 });

        let mut bad = good.clone();
        bad[84] = 4;
        assert_eq!(container_err(&bad), ContainerError::IndexOutOfRange { block: 1, index: 4, m: 4 });

        let mut bad = good;
        bad[16] = 0;
        assert_eq!(container_err(&bad), ContainerError::ZeroField("m"));
    }

    #[test]
    fn codebook_file_round_trip() {
        let cb = Codebook::new(6, (0..24).collect()).unwrap();
        let bytes = write_codebook(&cb, (3, 2)).unwrap();
        assert_eq!(bytes.len(), 18 + 24);
        assert_eq!(bytes[5], 0b1000);
        assert_eq!(read_codebook(&bytes).unwrap(), (cb, (3, 2)));
        assert!(matches!(
            CipherContainer::from_bytes(&bytes),
            Err(Error::Container(ContainerError::InvalidFlags(0b1000)))
        ));
        let vqc = sample().to_bytes().unwrap();
        assert!(matches!(read_codebook(&vqc), Err(Error::Container(ContainerError::InvalidFlags(1)))));
    }

    #[test]
    fn rejects_unrepresentable() {
        let codebook = Codebook::new(1, vec![0; 70_000]).unwrap();
        let index_matrix = IndexMatrix::new(vec![0], 1, 1).unwrap();
        let c = CipherContainer::new(Scheme::Plain, EncryptResult { index_matrix, codebook }, (1, 1), (1, 1))
            .unwrap();
        assert_eq!(
            c.to_bytes().unwrap_err(),
            Error::Container(ContainerError::Unrepresentable("codebook size"))
        );
    }

    proptest! {
        #[test]
        fn round_trip(
            scheme in prop_oneof![Just(Scheme::Full), Just(Scheme::RandomIndex), Just(Scheme::Plain)],
            w in 1usize..40, h in 1usize..40, bw in 1usize..6, bh in 1usize..6,
            m in 1usize..40, seed in any::<u64>()
        ) {
            let mut s = seed;
            let mut next = move || { s = crate::perm::prng_next(s).1; crate::perm::prng_next(s).0 };
            let codebook = Codebook::new(bw * bh, (0..m * bw * bh).map(|_| next() as u8).collect()).unwrap();
            let (gw, gh) = (w.div_ceil(bw), h.div_ceil(bh));
            let indices = (0..gw * gh).map(|_| (next() % m as u64) as usize).collect();
            let index_matrix = IndexMatrix::new(indices, gw, gh).unwrap();
            let c = CipherContainer::new(scheme, EncryptResult { index_matrix, codebook }, (bw, bh), (w, h)).unwrap();
            let bytes = c.to_bytes().unwrap();
            prop_assert_eq!(bytes.len(), 18 + m * bw * bh + 2 * gw * gh);
            prop_assert_eq!(CipherContainer::from_bytes(&bytes).unwrap(), c);
        }
    }
}
