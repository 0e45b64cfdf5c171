use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use vqcrypt::analysis::MAX_BRUTE_FORCE_BITS;
use vqcrypt::{
    brute_force_seed, decode_plain, decompose, decrypt_container, derive_permutation, encode_plain,
    encode_random_index_only, encrypt_encode, keyspace_years, log2_factorial, mse, naive_decode, psnr,
    read_codebook, read_pgm, train, write_codebook, write_pgm, BlockGrid, CipherContainer, Codebook,
    EncryptResult, Pixmap, Scheme, Scoring, TrainParams,
};

use crate::{exit, ledger, AttackCommand, Command, EncryptArgs, KeyspaceArgs};

const DEFAULT_BLOCK: (usize, usize) = (4, 4);
const DEFAULT_CODEBOOK_SIZE: usize = 256;

pub fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Train { input, codebook_size, block, out } => {
            let img = load_pgm(&input)?;
            let grid = decompose(&img, block.0, block.1)?;
            let cb = train_codebook(&grid, codebook_size)?;
            write(&out, &write_codebook(&cb, block)?)?;
            println!("trained {} codewords of {}x{} on {} blocks", cb.len(), block.0, block.1, grid.len());
        }
        Command::Encrypt(args) => encrypt(args)?,
        Command::Decrypt { input, seed, out } => {
            let c = load_container(&input)?;
            let img = decrypt_container(&c, seed)?;
            write(&out, &write_pgm(&img))?;
            println!("decrypted {} container {}x{}", c.scheme.name(), img.width(), img.height());
        }
        Command::Attack(AttackCommand::Naive { input, out }) => {
            let c = load_container(&input)?;
            write(&out, &write_pgm(&naive_decode(&c)?))?;
            println!("naive decode of {} container written", c.scheme.name());
        }
        Command::Attack(AttackCommand::Brute { input, seed_bits, reference }) => {
            return brute(&input, seed_bits, reference.as_deref());
        }
        Command::Metrics { a, b } => {
            let (a, b) = (load_pgm(&a)?, load_pgm(&b)?);
            println!("mse: {:.6}", mse(&a, &b)?);
            println!("psnr: {}", fmt_db(psnr(&a, &b)?));
        }
        Command::Keyspace(args) => keyspace(args)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn fmt_db(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v:.4} dB")
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn load_pgm(path: &Path) -> Result<Pixmap> {
    read_pgm(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_container(path: &Path) -> Result<CipherContainer> {
    CipherContainer::from_bytes(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn train_codebook(grid: &BlockGrid, m: usize) -> Result<Codebook> {
    if m > u16::MAX as usize {
        bail!("codebook size {m} exceeds the container limit of {}", u16::MAX);
    }
    let blocks: Vec<&[u8]> = grid.blocks().collect();
    Ok(train(&blocks, &TrainParams::with_size(m))?)
}

fn encrypt(args: EncryptArgs) -> Result<()> {
    let raw = read(&args.input)?;
    let img = read_pgm(&raw).with_context(|| format!("parsing {}", args.input.display()))?;

    let (grid, cb) = match &args.codebook {
        Some(path) => {
            let (cb, block) = read_codebook(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
            if args.block.is_some_and(|b| b != block) {
                bail!("--block conflicts with the codebook file's {}x{} blocks", block.0, block.1);
            }
            if args.codebook_size.is_some_and(|m| m != cb.len()) {
                bail!("--codebook-size conflicts with the codebook file's {} codewords", cb.len());
            }
            (decompose(&img, block.0, block.1)?, cb)
        }
        None => {
            let block = args.block.unwrap_or(DEFAULT_BLOCK);
            let grid = decompose(&img, block.0, block.1)?;
            let cb = train_codebook(&grid, args.codebook_size.unwrap_or(DEFAULT_CODEBOOK_SIZE))?;
            (grid, cb)
        }
    };

    let scheme = Scheme::from(args.scheme);
    let perm = derive_permutation(args.seed, cb.len())?;
    let result = match scheme {
        Scheme::Full => encrypt_encode(&grid, &cb, &perm)?,
        Scheme::RandomIndex => encode_random_index_only(&grid, &cb, &perm)?,
        Scheme::Plain => EncryptResult { index_matrix: encode_plain(&grid, &cb)?, codebook: cb.clone() },
    };
    let container = CipherContainer::new(scheme, result, grid.block_dims(), grid.orig_dims())?;
    let bytes = container.to_bytes()?;
    write(&args.out, &bytes)?;

    let recon = decode_plain(&encode_plain(&grid, &cb)?, &cb, grid.block_dims(), grid.orig_dims())?;
    println!("scheme: {}", scheme.name());
    println!("blocks: {}  codewords: {}", grid.len(), cb.len());
    println!("container bytes: {}  raw bytes: {}", bytes.len(), img.pixels().len());
    println!("psnr: {}", fmt_db(psnr(&img, &recon)?));

    if scheme != Scheme::Plain {
        if let Some(log) = &args.seed_log {
            let reused = ledger::record(log, args.seed, &raw)?;
            if reused > 0 {
                eprintln!(
                    "warning: this seed already encrypted {reused} other image(s); \
                     use a fresh seed per image to resist known-plainimage attacks"
                );
            }
        }
    }
    Ok(())
}

fn brute(input: &Path, seed_bits: u32, reference: Option<&Path>) -> Result<ExitCode> {
    if seed_bits > MAX_BRUTE_FORCE_BITS {
        bail!("--seed-bits {seed_bits} exceeds the limit of {MAX_BRUTE_FORCE_BITS}");
    }
    let c = load_container(input)?;
    let reference = reference.map(load_pgm).transpose()?;
    let scoring = match &reference {
        Some(r) => Scoring::Reference(r),
        None => Scoring::TotalVariation,
    };
    let report = brute_force_seed(&c, seed_bits, scoring)?;

    println!("scheme: {}", report.scheme.name());
    println!("seeds tried: {}", report.seeds_tried);
    println!("blocks tried: {}", report.blocks_tried);
    println!("elapsed: {:.3} s", report.elapsed_secs);
    let per_guess = report.elapsed_secs / report.seeds_tried as f64;
    println!("per guess: {:.3e} s", per_guess);
    if per_guess > 0.0 {
        println!("2^64 seeds at this rate: {:.3e} years", keyspace_years(64, 1.0 / per_guess));
    }
    println!("best seed: {} (score {})", report.best_seed, report.best_score);
    if let Some(p) = report.psnr_vs_reference {
        println!("psnr vs reference: {}", fmt_db(p));
    }
    match report.recovered_seed {
        Some(s) => {
            println!("recovered seed: {s}");
            Ok(ExitCode::SUCCESS)
        }
        None => {
            println!("recovered seed: none (best score not unique)");
            Ok(ExitCode::from(exit::NOT_RECOVERED))
        }
    }
}

fn keyspace(args: KeyspaceArgs) -> Result<()> {
    match (args.bits, args.guesses_per_sec, args.perms) {
        (Some(bits), Some(gps), None) => {
            if bits > 128 {
                bail!("--bits must be at most 128");
            }
            if !(gps > 0.0 && gps.is_finite()) {
                bail!("--guesses-per-sec must be positive");
            }
            println!("{:.6e} years", keyspace_years(bits, gps));
        }
        (None, None, Some(m)) => {
            if m == 0 {
                bail!("--perms must be positive");
            }
            println!("log2({m}!) = {:.4} bits", log2_factorial(m));
        }
        _ => bail!("pass either --bits with --guesses-per-sec, or --perms"),
    }
    Ok(())
}
