//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in tensor construction, factorization,
/// sampling, completion, or file handling.
#[derive(Debug, Error)]
pub enum Error {
    /// Operands have incompatible shapes.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An index lies outside the tensor or mask it addresses.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// A constructor or file reader met a NaN or infinity.
    #[error("non-finite value at linear index {0}")]
    NonFinite(usize),

    /// An inverse transform of data expected to be real left too much
    /// imaginary mass behind.
    #[error(
        "imaginary residue {residue:.3e} exceeds {tolerance:.3e} relative to magnitude {scale:.3e}"
    )]
    ImaginaryResidue {
        residue: f64,
        scale: f64,
        tolerance: f64,
    },

    /// Sampling probabilities must lie in (0, 1].
    #[error("sampling probability must lie in (0, 1], got {0}")]
    InvalidProbability(f64),

    /// A requested rank is zero or exceeds what the dimensions admit.
    #[error("invalid rank {got}: must lie in 1..={max}")]
    InvalidRank { got: usize, max: usize },

    /// A mask observes nothing, so no completion problem exists.
    #[error("mask observes no entries")]
    EmptyMask,

    /// Too few observations for the solver to be meaningful.
    #[error("mask observes {observed} entries, need at least {required} (one per tube on average)")]
    TooFewSamples { observed: usize, required: usize },

    /// Factors handed to a routine that requires orthonormal columns
    /// fail that requirement.
    #[error("factors are not orthonormal: defect {0:.3e}")]
    NotOrthogonal(f64),

    /// The SVD of one frontal slice in the transform domain did not converge.
    #[error("singular value decomposition failed on transform slice {0}")]
    SvdFailure(usize),

    /// Relative error against a zero reference is undefined.
    #[error("reference tensor has zero norm")]
    ZeroReference,

    /// A mask of the wrong sampling kind was supplied.
    #[error("expected {expected} mask, got {got}")]
    WrongMaskKind {
        expected: &'static str,
        got: &'static str,
    },

    /// Underlying I/O failure.
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    /// A file does not follow the documented binary or text layout.
    #[error("file format: {0}")]
    FileFormat(String),

    /// A configuration file or command-line value could not be interpreted.
    #[error("config: {0}")]
    Config(String),
}
