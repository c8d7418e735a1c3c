//! Error types shared across the crate.

use thiserror::Error;

/// Errors from prime-field construction and arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not an odd prime in [3, 2^62]")]
    InvalidModulus(u64),
    #[error("inverse of zero")]
    ZeroInverse,
}

/// Errors from polynomial and domain operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("field mismatch between operands")]
    FieldMismatch,
    #[error("exponent vector {exps:?} violates bounds d={d}, D={big_d}")]
    DegreeBound { exps: Vec<u32>, d: u32, big_d: u32 },
    #[error("invalid bounds: arity={arity}, d={d}, D={big_d}")]
    InvalidBounds { arity: usize, d: u32, big_d: u32 },
    #[error("suffix length {k} out of range for arity {arity}")]
    SuffixOutOfRange { k: usize, arity: usize },
    #[error("prefix length {len} out of range for arity {arity}")]
    PrefixOutOfRange { len: usize, arity: usize },
    #[error("enumeration size |H|^mu = {h}^{mu} exceeds the guard 2^{guard}")]
    SizeGuard { h: usize, mu: usize, guard: u32 },
    #[error("domain: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

/// Errors from the oracle registry.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("unknown oracle id {0}")]
    UnknownId(usize),
    #[error("virtual expression references id {referenced} not earlier than {at}")]
    DanglingReference { referenced: usize, at: usize },
    #[error("oracle arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("poly error: {0}")]
    Poly(#[from] PolyError),
}

/// Errors from protocol runners.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("arity {0} is not a power of two >= 2; pad with dummy variables")]
    ArityNotPowerOfTwo(usize),
    #[error("degree bound d={d} must satisfy d <= |H|-1 = {hmax}")]
    DegreeVsDomain { d: u32, hmax: usize },
    #[error("univariate mode requires a multiplicative subgroup or coset domain")]
    UniModeNeedsStructure,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("field error: {0}")]
    Field(#[from] FieldError),
    #[error("poly error: {0}")]
    Poly(#[from] PolyError),
    #[error("oracle error: {0}")]
    Oracle(#[from] OracleError),
}

/// Errors from the mock polynomial-commitment layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PcsError {
    #[error("support leaves the admissible basis: exponents {0:?}")]
    SupportOutsideBasis(Vec<u32>),
    #[error("polynomial profile (mu={mu}, d={d}, D={big_d}) does not match parameters")]
    ProfileMismatch { mu: usize, d: u32, big_d: u32 },
    #[error("commitment does not open to the provided polynomial")]
    OpenMismatch,
    #[error("image support {0:?} does not decode to an admissible exponent vector")]
    NotInImage(Vec<u32>),
    #[error("variable count n={0} exceeds the mock-scheme guard")]
    TooManyVariables(usize),
    #[error("poly error: {0}")]
    Poly(#[from] PolyError),
    #[error("protocol error: {0}")]
    Protocol(#[from] ProtocolError),
}

/// Errors from the soundness laboratory.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabError {
    #[error("instance is true: brute-force sum equals the claimed value")]
    AccidentallyTrue,
    #[error("trials must be positive")]
    ZeroTrials,
    #[error("strategy {0} is not applicable to this configuration: {1}")]
    StrategyNotApplicable(String, String),
    #[error("protocol error: {0}")]
    Protocol(#[from] ProtocolError),
    #[error("poly error: {0}")]
    Poly(#[from] PolyError),
}
