use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("pole at w = {point}")]
    Pole { point: String },

    #[error("root order mismatch: {left} vs {right}")]
    RootOrderMismatch { left: u32, right: u32 },

    #[error("root order {target} is not a multiple of {current}")]
    RootOrderNotMultiple { current: u32, target: u32 },

    #[error("exponent {exponent} is not compatible with root order {root_order}")]
    IncompatibleExponent { exponent: String, root_order: u32 },

    #[error("fractional power q^{exponent} is unavailable in this field")]
    FractionalExponent { exponent: String },

    #[error("cyclotomic order mismatch: {left} vs {right}")]
    CyclotomicOrderMismatch { left: u64, right: u64 },

    #[error("p-adic prime mismatch: {left} vs {right}")]
    PrimeMismatch { left: u64, right: u64 },

    #[error("p-adic division by zero at precision")]
    PadicDivisionByZero,

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("precision must be positive")]
    ZeroPrecision,

    #[error("domain requires gcd(d, p) = 1, got d = {d}, p = {p}")]
    DomainNotCoprime { p: u64, d: u64 },

    #[error("inadmissible q: v_p(q - 1) = {valuation}, need at least 1")]
    InadmissibleQ { valuation: i64 },

    #[error("index budget exceeded: {requested} representatives requested, cap is {cap}")]
    BudgetExceeded { requested: u128, cap: u64 },

    #[error("ball index {a} out of range 0..{bound}")]
    BallOutOfRange { a: u64, bound: u64 },

    #[error("{what} must be odd, got {value}")]
    EvenParameter { what: &'static str, value: u64 },

    #[error("character of order {order} has values outside {{0, 1, -1}}")]
    NonQuadraticCharacter { order: u64 },

    #[error("no convergence within N_max; difference valuations {trace:?}")]
    NonConvergence { trace: Vec<i64> },

    #[error("q = 1 is not allowed here")]
    QIsOne,

    #[error("|q| must be below 1 here")]
    QNotInUnitDisc,

    #[error("series constant term must be zero")]
    NonzeroConstantTerm,

    #[error("series constant term must be nonzero")]
    ZeroConstantTerm,

    #[error("series order or field mismatch")]
    SeriesMismatch,

    #[error("invalid input: {0}")]
    Invalid(String),
}
