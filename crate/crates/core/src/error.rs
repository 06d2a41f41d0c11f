use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("index {index} out of range for {len} sites/modes")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("operation requires {expected} geometry")]
    GeometryMismatch { expected: &'static str },
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("orbital tuple must be strictly ascending")]
    NotAscending,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("state is not antisymmetric (max swap violation {violation:e})")]
    NotAntisymmetric { violation: f64 },
    #[error("state has support in more than one particle-number sector")]
    CrossSector,
    #[error("size guard exceeded: {what} needs dimension {dimension}, limit {limit}")]
    SizeGuard {
        what: &'static str,
        dimension: u128,
        limit: u128,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
