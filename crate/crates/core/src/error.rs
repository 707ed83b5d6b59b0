use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("inversion of zero")]
    ZeroInversion,
    #[error("the zero ideal has no HNF")]
    ZeroIdeal,
    #[error("quotient is not integral")]
    NonIntegralQuotient,
    #[error("element is not integral at the prime")]
    NonIntegralAtP,
    #[error("bad reduction at the prime")]
    BadReduction,
    #[error("bad reduction at a prime above {0}")]
    BadReductionAtEll(u64),
    #[error("singular curve")]
    SingularCurve,
    #[error("singular parameters for the family")]
    SingularParameters,
    #[error("twist by zero")]
    ZeroTwist,
    #[error("kernel does not define an isogeny")]
    InvalidKernel,
    #[error("isogeny class exceeds {0} curves")]
    ClassSizeLimit(usize),
    #[error("j-invariant is 0 or 1728")]
    DegenerateJ,
    #[error("fewer than three good odd primes below the bound")]
    InsufficientPrimes,
    #[error("polynomial is not a polynomial in X^r")]
    NotAPolynomialInXr,
    #[error("total dimension missing")]
    MissingTotalDim,
    #[error("duplicate level {0}")]
    DuplicateLevel(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { location: location.into(), message: message.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
