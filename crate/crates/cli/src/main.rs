mod commands;
mod ledger;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vqcrypt::{Scheme, Seed};

/// Joint VQ compression and codebook-shuffling encryption for PGM images.
#[derive(Debug, Parser)]
#[command(name = "vqcrypt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train an LBG codebook on an image and write it as a codebook file.
    Train {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 256)]
        codebook_size: usize,
        #[arg(long, default_value = "4x4", value_parser = parse_block)]
        block: (usize, usize),
        #[arg(long)]
        out: PathBuf,
    },
    /// Compress and encrypt an image into a .vqc container.
    Encrypt(EncryptArgs),
    /// Decrypt a .vqc container back to a PGM image.
    Decrypt {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_seed)]
        seed: Seed,
        #[arg(long)]
        out: PathBuf,
    },
    /// Attacks on containers.
    #[command(subcommand)]
    Attack(AttackCommand),
    /// Print MSE and PSNR between two images.
    Metrics {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Brute-force cost of a seed space, or the size of a permutation space.
    Keyspace(KeyspaceArgs),
}

#[derive(Debug, Args)]
struct EncryptArgs {
    #[arg(long)]
    input: PathBuf,
    /// Pre-trained codebook file; trains on the input image when absent.
    #[arg(long)]
    codebook: Option<PathBuf>,
    #[arg(long, value_parser = parse_seed)]
    seed: Seed,
    #[arg(long, value_enum, default_value_t = SchemeArg::Full)]
    scheme: SchemeArg,
    /// Block size [default: 4x4, or the codebook file's]
    #[arg(long, value_parser = parse_block)]
    block: Option<(usize, usize)>,
    /// Codebook size [default: 256, or the codebook file's]
    #[arg(long)]
    codebook_size: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    /// File recording seed fingerprints, used to warn about seed reuse.
    #[arg(long, env = "VQCRYPT_SEED_LOG")]
    seed_log: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum AttackCommand {
    /// Decode ignoring the key, using the codebook as transmitted.
    Naive {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Enumerate every seed below 2^k.
    Brute {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        seed_bits: u32,
        /// Known plain image; without it candidates are ranked by total variation.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct KeyspaceArgs {
    /// Seed size in bits (0..=128); needs --guesses-per-sec.
    #[arg(long, conflicts_with = "perms", requires = "guesses_per_sec")]
    bits: Option<u32>,
    #[arg(long, requires = "bits")]
    guesses_per_sec: Option<f64>,
    /// Report log2(m!) for a codebook of m entries.
    #[arg(long)]
    perms: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    Full,
    RandomIndex,
    Plain,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Full => Scheme::Full,
            SchemeArg::RandomIndex => Scheme::RandomIndex,
            SchemeArg::Plain => Scheme::Plain,
        }
    }
}

fn parse_block(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let dim = |v: &str| match v.parse::<usize>() {
        Ok(n) if (1..=255).contains(&n) => Ok(n),
        _ => Err(format!("block side {v:?} must be an integer in 1..=255")),
    };
    Ok((dim(w)?, dim(h)?))
}

fn parse_seed(s: &str) -> Result<Seed, String> {
    s.parse::<Seed>().map_err(|e| e.to_string())
}

/// Process exit statuses.
pub(crate) mod exit {
    pub const USAGE: u8 = 1;
    pub const CORRUPT: u8 = 2;
    pub const NOT_RECOVERED: u8 = 3;
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(exit::USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let corrupt = e.downcast_ref::<vqcrypt::Error>().is_some_and(vqcrypt::Error::is_corruption);
            ExitCode::from(if corrupt { exit::CORRUPT } else { exit::USAGE })
        }
    }
}
