use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("field of order {p}^{degree} exceeds the size limit {limit}")]
    FieldTooLarge { p: u32, degree: u32, limit: u64 },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("modulus is reducible over GF({0})")]
    ReducibleModulus(u32),
    #[error("element encoding {value} out of range for a field of order {order}")]
    ElementOutOfRange { value: u64, order: u64 },
    #[error("{0} is not a subfield degree of this tower")]
    NotASubfield(u32),
    #[error("Galois exponent {exponent} does not generate Gal(K/k) for extension degree {ell}")]
    NotAGenerator { exponent: u32, ell: u32 },
    #[error("the given elements are not a basis of K over k")]
    NotABasis,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("vector has rank {rank} over k, a Gabidulin vector needs rank {m}")]
    NotGabidulinVector { rank: usize, m: usize },
    #[error("dimension d = {d} out of range 1 <= d < m = {m}")]
    DimensionOutOfRange { d: usize, m: usize },
    #[error("zero polynomial has no bounded kernel")]
    ZeroPolynomial,
    #[error("polynomial degree {degree} exceeds extension degree bound {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },
    #[error("hypothesis violated: code is not MRD (dim {dim}, minimum distance {min_dist})")]
    NotMrd { dim: usize, min_dist: usize },
    #[error("code is not K-linear with respect to the chosen basis")]
    NotLifted,
    #[error("enumeration budget of {budget} exceeded; best bound so far {bound:?}")]
    BudgetExceeded { budget: u64, bound: Option<usize> },
    #[error("unsupported idealiser structure: {0}")]
    Unsupported(String),
    #[error("structure violation: {0}")]
    StructureViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
}
