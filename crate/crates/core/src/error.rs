use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("divergence undefined: P({index}) > 0 where Q({index}) = 0")]
    DivergenceUndefined { index: usize },
    #[error("enumeration too large: {configurations} configurations exceed the limit of {limit}")]
    TooLarge { configurations: u128, limit: u128 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("bound undefined: {0}")]
    BoundUndefined(String),
    #[error("training diverged at step {step}")]
    TrainingDiverged { step: usize, trace: Vec<f64> },
}

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidInput(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;
