//! Seed-keyed permutations of codebook positions.
//!
//! The generator is SplitMix64 and the shuffle is a down-counting
//! Fisher–Yates with a plain modulo draw. Both are fixed bit for bit so that
//! any implementation derives the same permutation from the same seed.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// 64-bit secret from which the keyed permutation is derived.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Seed(pub u64);

impl fmt::Debug for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Seed({:#x})", self.0)
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#018x}", self.0)
    }
}

impl FromStr for Seed {
    type Err = Error;

    /// Accepts `0x`-prefixed hexadecimal or plain decimal.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
            Some(hex) => u64::from_str_radix(hex, 16),
            None => s.parse::<u64>(),
        };
        parsed
            .map(Seed)
            .map_err(|_| Error::InvalidParameter(format!("invalid seed {s:?}")))
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// One SplitMix64 step: returns `(output, next_state)`.
#[inline]
pub fn prng_next(state: u64) -> (u64, u64) {
    let next = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = next;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    (z ^ (z >> 31), next)
}

/// Bijection on `[0, m)` with its inverse precomputed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KeyedPermutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl KeyedPermutation {
    /// Wraps an explicit forward table, rejecting anything that is not a bijection.
    pub fn from_forward(forward: Vec<usize>) -> Result<Self> {
        let m = forward.len();
        if m == 0 {
            return Err(Error::InvalidParameter("permutation must be non-empty".into()));
        }
        let mut inverse = vec![usize::MAX; m];
        for (i, &f) in forward.iter().enumerate() {
            if f >= m || inverse[f] != usize::MAX {
                return Err(Error::InvalidParameter(format!("not a permutation: entry {f} at {i}")));
            }
            inverse[f] = i;
        }
        Ok(Self { forward, inverse })
    }

    pub fn identity(m: usize) -> Result<Self> {
        Self::from_forward((0..m).collect())
    }

    /// Position → pseudo-index table.
    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    /// Pseudo-index → position table.
    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn invert(&self) -> Self {
        Self { forward: self.inverse.clone(), inverse: self.forward.clone() }
    }
}

pub fn derive_permutation(seed: Seed, m: usize) -> Result<KeyedPermutation> {
    if m == 0 {
        return Err(Error::InvalidParameter("permutation size must be positive".into()));
    }
    let mut a: Vec<usize> = (0..m).collect();
    let mut state = seed.0;
    for i in (1..m).rev() {
        let (out, next) = prng_next(state);
        state = next;
        let j = (out % (i as u64 + 1)) as usize;
        a.swap(i, j);
    }
    let mut inverse = vec![0; m];
    for (i, &f) in a.iter().enumerate() {
        inverse[f] = i;
    }
    Ok(KeyedPermutation { forward: a, inverse })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    #[test]
    fn splitmix_reference_values() {
        let (a, s) = prng_next(0);
        assert_eq!(a, 0xE220_A839_7B1D_CDAF);
        let (b, _) = prng_next(s);
        assert_eq!(b, 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(prng_next(0), prng_next(0));
    }

    #[test]
    fn no_repeats_in_ten_thousand_draws() {
        let mut seen = HashSet::new();
        let mut state = 0x1234_5678;
        for _ in 0..10_000 {
            let (out, next) = prng_next(state);
            state = next;
            assert!(seen.insert(out));
        }
    }

    #[test]
    fn golden_permutation() {
        let p = derive_permutation(Seed(0xDEAD_BEEF), 8).unwrap();
        assert_eq!(p.forward(), &[7, 1, 2, 6, 4, 5, 0, 3]);
        assert_eq!(p.inverse(), &[6, 1, 2, 7, 4, 5, 3, 0]);
        let inv = p.invert();
        assert_eq!(inv.forward(), &[6, 1, 2, 7, 4, 5, 3, 0]);
        assert_eq!(inv.invert(), p);

        let q = derive_permutation(Seed(42), 16).unwrap();
        assert_eq!(q.forward(), &[12, 13, 4, 2, 14, 6, 7, 8, 11, 15, 9, 10, 3, 0, 1, 5]);
    }

    #[test]
    fn trivial_sizes() {
        assert_eq!(derive_permutation(Seed(99), 1).unwrap().forward(), &[0]);
        assert!(derive_permutation(Seed(1), 0).is_err());
        let id = KeyedPermutation::identity(5).unwrap();
        assert_eq!(id.invert(), id);
    }

    #[test]
    fn from_forward_validates() {
        assert!(KeyedPermutation::from_forward(vec![0, 0]).is_err());
        assert!(KeyedPermutation::from_forward(vec![0, 2]).is_err());
        assert!(KeyedPermutation::from_forward(vec![]).is_err());
        let p = KeyedPermutation::from_forward(vec![3, 0, 2, 1]).unwrap();
        assert_eq!(p.inverse(), &[1, 3, 2, 0]);
    }

    #[test]
    fn seeds_differ() {
        let mut distinct = 0;
        for k in 0..1000u64 {
            let a = derive_permutation(Seed(prng_next(k).0), 256).unwrap();
            let b = derive_permutation(Seed(prng_next(k + 1_000_000).0), 256).unwrap();
            distinct += usize::from(a != b);
        }
        assert!(distinct >= 999);
    }

    #[test]
    fn seed_parsing() {
        assert_eq!("0xDEADBEEF".parse::<Seed>().unwrap(), Seed(0xDEAD_BEEF));
        assert_eq!("77".parse::<Seed>().unwrap(), Seed(77));
        assert_eq!("18446744073709551615".parse::<Seed>().unwrap(), Seed(u64::MAX));
        assert!("0x".parse::<Seed>().is_err());
        assert!("-1".parse::<Seed>().is_err());
        assert!("18446744073709551616".parse::<Seed>().is_err());
    }

    proptest! {
        #[test]
        fn always_a_bijection(seed in any::<u64>(), m in 1usize..300) {
            let p = derive_permutation(Seed(seed), m).unwrap();
            let mut sorted = p.forward().to_vec();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (0..m).collect::<Vec<_>>());
            for i in 0..m {
                prop_assert_eq!(p.inverse()[p.forward()[i]], i);
                prop_assert_eq!(p.forward()[p.inverse()[i]], i);
            }
            prop_assert_eq!(derive_permutation(Seed(seed), m).unwrap(), p);
        }
    }
}
