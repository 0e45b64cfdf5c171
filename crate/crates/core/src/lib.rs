//! Grayscale image codec that compresses with vector quantization and
//! encrypts in the same pass.
//!
//! A 64-bit seed derives a permutation that gives every codebook position a
//! disguised index. While encoding, each matched codeword is swapped with the
//! position named by its disguised index, so both the transmitted codebook
//! and the index matrix are shuffled under the key. Decoding with the same
//! seed replays the swaps backwards and reproduces plain VQ output exactly.
//!
//! ```
//! use vqcrypt::{decompose, derive_permutation, encrypt_encode, decrypt_decode, train, Pixmap, Seed, TrainParams};
//!
//! let img = Pixmap::from_fn(32, 32, |x, y| (x * 8 ^ y * 4) as u8).unwrap();
//! let grid = decompose(&img, 4, 4).unwrap();
//! let blocks: Vec<&[u8]> = grid.blocks().collect();
//! let cb = train(&blocks, &TrainParams::with_size(16)).unwrap();
//! let perm = derive_permutation(Seed(0xC0FFEE), cb.len()).unwrap();
//!
//! let sealed = encrypt_encode(&grid, &cb, &perm).unwrap();
//! let opened = decrypt_decode(&sealed.index_matrix, &sealed.codebook, &perm).unwrap();
//! assert_eq!(opened.restored_codebook, cb);
//! ```

pub mod analysis;
pub mod codebook;
pub mod container;
pub mod error;
pub mod lbg;
pub mod perm;
pub mod pixmap;
pub mod shuffle;
pub mod vq;

pub use analysis::{
    brute_force_seed, decrypt_container, keyspace_years, log2_factorial, naive_decode, AttackReport, Scoring,
};
pub use codebook::Codebook;
pub use container::{read_codebook, write_codebook, CipherContainer, Scheme};
pub use error::{ContainerError, Error, PgmError, Result};
pub use lbg::{distortion, train, TrainParams};
pub use perm::{derive_permutation, prng_next, KeyedPermutation, Seed};
pub use pixmap::{decompose, mse, psnr, read_pgm, reassemble, total_variation, write_pgm, BlockGrid, Pixmap};
pub use shuffle::{decrypt_decode, encode_random_index_only, encrypt_encode, DecryptResult, EncryptResult};
pub use vq::{decode_plain, encode_plain, nearest, IndexMatrix};
