//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("two_s must be at least 1 (the trivial representation is rejected)")]
    TrivialRep,

    #[error("n_sites must be positive")]
    NoSites,

    #[error("invalid phase-space point: {0}")]
    InvalidPoint(String),

    #[error("extracted matrix is not a rotation (defect {defect:e})")]
    NotRotation { defect: f64 },

    #[error("Hilbert dimension (2s+1)^N = {dim} exceeds the configured cap {cap}")]
    DimCap { dim: usize, cap: usize },

    #[error("Hilbert dimension (two_s+1)^n_sites overflows usize")]
    DimOverflow,

    #[error("site index {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("operator dimensions do not match: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("operator is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("operator is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("operator is not a density matrix: {reason}")]
    NotAState { reason: String },

    #[error("quadrature degree {got} too low, need at least {need}")]
    DegreeTooLow { need: usize, got: usize },

    #[error("hamiltonian document violates the schema: {0}")]
    Schema(String),

    #[error("term {term} has an empty factor list")]
    EmptyFactorList { term: usize },

    #[error("term {term} references site {site} but n_sites is {n_sites}")]
    TermSiteOutOfRange {
        term: usize,
        site: usize,
        n_sites: usize,
    },

    #[error("coefficient order {n} outside the supplied range (1..=7)")]
    CoefficientOrder { n: usize },

    #[error("walk reaches level {level}, above the bound 2s = {two_s}")]
    WalkLevelBound { level: u32, two_s: u32 },

    #[error("invalid spin walk: {0}")]
    InvalidWalk(String),

    #[error("need at least {need} distinct spin samples, got {got}")]
    UnderdeterminedSamples { need: usize, got: usize },

    #[error("malformed doubled integer arguments: {0}")]
    MalformedDoubled(String),

    #[error("monomial parse error at token {position}: {reason}")]
    MonomialParse { position: usize, reason: String },

    #[error("phase point has {got} sites, expected {expected}")]
    SiteCountMismatch { expected: usize, got: usize },

    #[error("walk length {n} too large (limit {limit})")]
    WalkLengthTooLarge { n: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
