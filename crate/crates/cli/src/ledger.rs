//! Seed-reuse ledger: one line per encryption holding a fingerprint of the
//! seed and of the input image. Seeds themselves are never written.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};
use vqcrypt::Seed;

fn fingerprint(domain: &[u8], data: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(domain);
    h.update(data);
    h.finalize()[..16].iter().map(|b| format!("{b:02x}")).collect()
}

/// Records `(seed, input)` and returns how many other inputs were already
/// encrypted under the same seed.
pub fn record(path: &Path, seed: Seed, input: &[u8]) -> Result<usize> {
    let seed_fp = fingerprint(b"vqcrypt-seed\0", &seed.0.to_le_bytes());
    let input_fp = fingerprint(b"vqcrypt-input\0", input);

    let existing = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
        Err(e) => return Err(e).with_context(|| format!("reading seed log {}", path.display())),
    };
    let mut others: Vec<&str> = existing
        .lines()
        .filter_map(|l| l.split_once(' '))
        .filter(|(s, i)| *s == seed_fp && *i != input_fp)
        .map(|(_, i)| i)
        .collect();
    others.sort_unstable();
    others.dedup();

    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening seed log {}", path.display()))?;
    writeln!(f, "{seed_fp} {input_fp}")?;
    Ok(others.len())
}
