use thiserror::Error;

/// Errors raised by constructions, predicates and enumerations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field exponent t = {0} outside 1..=16")]
    FieldExponent(u32),
    #[error("inverse of zero")]
    InverseOfZero,
    #[error("{n} is not a subfield order of GF(2^{t})")]
    NotSubfield { n: u64, t: u32 },
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("bound violated: {0}")]
    Bound(String),
    #[error("enumeration budget exceeded: {needed} > {budget}")]
    Budget { needed: u128, budget: u128 },
    #[error("rank deficient: {0}")]
    RankDeficient(String),
    #[error("independence assumption violated: {0}")]
    Assumption(String),
    #[error("witness mismatch: {0}")]
    Witness(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("code has no logical qudits")]
    NoLogical,
    #[error("vanishing gauge target: {0}")]
    VanishingGauge(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Refuses when `needed` enumerated items exceed `budget`.
pub(crate) fn check_budget(needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        Err(Error::Budget { needed, budget })
    } else {
        Ok(())
    }
}

/// `base^exp` saturating at `u128::MAX`.
pub(crate) fn sat_pow(base: u128, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}
