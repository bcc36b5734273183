use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Coarse classification of an [`Error`], used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    InvalidInput,
    Resource,
    Internal,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Buffer length is not a power of two (or is too short to hold a qubit).
    NotPowerOfTwo {
        len: usize,
    },
    LengthMismatch {
        expected: usize,
        found: usize,
    },
    NonFinite {
        index: usize,
    },
    /// State norm is too far from 1 to be silently corrected.
    Normalization {
        norm: f64,
    },
    ZeroVector,
    IndexOutOfRange {
        index: u64,
        bound: u64,
    },
    QubitOutOfRange {
        qubit: usize,
        n_qubits: u32,
    },
    InvalidArgument(String),
    TooManyQubits {
        n_qubits: u32,
        limit: u32,
    },
    /// A quantity violated an analytic bound beyond rounding tolerance.
    Inconsistent {
        what: &'static str,
        value: f64,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::TooManyQubits { .. } => ErrorKind::Resource,
            Error::Inconsistent { .. } => ErrorKind::Internal,
            _ => ErrorKind::InvalidInput,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPowerOfTwo { len } => {
                write!(f, "buffer length {len} is not a power of two >= 2")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::NonFinite { index } => write!(f, "non-finite amplitude at index {index}"),
            Error::Normalization { norm } => {
                write!(f, "state is not normalized: norm = {norm} (tolerated deviation is 1e-6)")
            }
            Error::ZeroVector => f.write_str("cannot normalize the zero vector"),
            Error::IndexOutOfRange { index, bound } => {
                write!(f, "index {index} out of range (must be < {bound})")
            }
            Error::QubitOutOfRange { qubit, n_qubits } => {
                write!(f, "qubit {qubit} out of range for {n_qubits} qubits")
            }
            Error::InvalidArgument(msg) => f.write_str(msg),
            Error::TooManyQubits { n_qubits, limit } => {
                write!(f, "{n_qubits} qubits exceeds the configured limit of {limit}")
            }
            Error::Inconsistent { what, value } => {
                write!(f, "internal consistency check failed: {what} = {value}")
            }
        }
    }
}

impl core::error::Error for Error {}
