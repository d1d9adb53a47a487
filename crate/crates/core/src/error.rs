use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Invalid grid or generator parameters.
    #[error("configuration error: {0}")]
    Config(alloc::string::String),

    /// Operands live on different grids or have the wrong length.
    #[error("shape error: {0}")]
    Shape(alloc::string::String),

    /// A weight was negative (or not real) beyond tolerance.
    #[error("domain error: {0}")]
    Domain(alloc::string::String),

    #[error("index {index} out of range for {len} generators")]
    Index { index: usize, len: usize },

    #[error("need at least {required} generators, got {got}")]
    TooFewGenerators { required: usize, got: usize },

    #[error("non-finite value at fiber {fiber}")]
    NonFinite { fiber: usize },
}

macro_rules! config_err {
    ($($arg:tt)*) => { $crate::Error::Config(alloc::format!($($arg)*)) };
}
macro_rules! shape_err {
    ($($arg:tt)*) => { $crate::Error::Shape(alloc::format!($($arg)*)) };
}
macro_rules! domain_err {
    ($($arg:tt)*) => { $crate::Error::Domain(alloc::format!($($arg)*)) };
}
pub(crate) use {config_err, domain_err, shape_err};
