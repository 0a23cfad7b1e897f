use alloc::string::String;
use core::fmt;

/// Errors raised by the solver.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A physical or non-dimensional parameter is outside its domain.
    ParameterDomain { name: &'static str, value: f64 },
    /// A state quantity needed for a division vanished (e.g. no electrons left).
    DegenerateState(&'static str),
    /// An inconsistent scheme or flux configuration.
    Configuration(String),
    /// A non-finite value appeared in the state after the given step.
    Instability { step: u64, time: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ParameterDomain { name, value } => {
                write!(f, "parameter `{name}` out of domain: {value}")
            }
            Error::DegenerateState(what) => write!(f, "degenerate state: {what}"),
            Error::Configuration(msg) => write!(f, "configuration error: {msg}"),
            Error::Instability { step, time } => {
                write!(f, "non-finite state after step {step} (t = {time})")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
