use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures while parsing a portable graymap.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PgmError {
    #[error("bad magic number: expected P5 or P2, found {0:?}")]
    BadMagic(String),
    #[error("missing {0} in header")]
    MissingField(&'static str),
    #[error("invalid {field} token {token:?}")]
    BadNumber { field: &'static str, token: String },
    #[error("{0} must be positive")]
    Zero(&'static str),
    #[error("maxval {0} exceeds 255")]
    MaxvalTooLarge(u32),
    #[error("sample {value} at pixel {index} exceeds maxval {maxval}")]
    SampleOutOfRange { index: usize, value: u32, maxval: u32 },
    #[error("truncated payload: expected {expected} pixels, found {found}")]
    Truncated { expected: usize, found: usize },
}

/// Failures while decoding a `.vqc` container or codebook file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContainerError {
    #[error("bad magic bytes {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),
    #[error("invalid scheme flags {0:#04x}")]
    InvalidFlags(u8),
    #[error("file too short for header: {0} bytes")]
    TruncatedHeader(usize),
    #[error("length mismatch: header implies {expected} bytes, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("index {index} at block {block} is out of range for codebook of size {m}")]
    IndexOutOfRange { block: usize, index: usize, m: usize },
    #[error("header field {0} is zero")]
    ZeroField(&'static str),
    #[error("{0} does not fit the container layout")]
    Unrepresentable(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Pgm(#[from] PgmError),
    #[error(transparent)]
    Container(#[from] ContainerError),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("block count mismatch: grid holds {expected} blocks, found {found}")]
    BlockCountMismatch { expected: usize, found: usize },
    #[error("index {index} at block {block} is out of range for codebook of size {m}")]
    IndexOutOfRange { block: usize, index: usize, m: usize },
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("permutation length {found} does not match codebook size {expected}")]
    PermutationLength { expected: usize, found: usize },
    #[error("brute force limited to 24 seed bits, requested {0}")]
    SeedBitsTooLarge(u32),
}

impl Error {
    /// True for errors caused by malformed or corrupted input data.
    pub fn is_corruption(&self) -> bool {
        matches!(
            self,
            Error::Pgm(_) | Error::Container(_) | Error::IndexOutOfRange { .. }
        )
    }
}
