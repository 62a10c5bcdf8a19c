use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("undefined density: the index set is empty")]
    UndefinedDensity,

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("domain too large for enumeration: {size} elements, cap is {cap}")]
    TooLargeForEnumeration { size: usize, cap: usize },

    #[error("{what}: needs {needed}, cap is {cap}{hint}")]
    CapExceeded {
        what: &'static str,
        needed: String,
        cap: String,
        hint: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("distance to empty property undefined")]
    EmptyProperty,

    #[error("granularize first: weights are not multiples of {0}")]
    NotGranular(String),

    #[error("profile {0} is not realized by any function")]
    UnrealizedProfile(String),

    #[error("no witness found: {0}")]
    NoWitness(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn cap(what: &'static str, needed: impl ToString, cap: impl ToString) -> Self {
        Error::CapExceeded {
            what,
            needed: needed.to_string(),
            cap: cap.to_string(),
            hint: "",
        }
    }

    pub(crate) fn cap_with_hint(
        what: &'static str,
        needed: impl ToString,
        cap: impl ToString,
        hint: &'static str,
    ) -> Self {
        Error::CapExceeded {
            what,
            needed: needed.to_string(),
            cap: cap.to_string(),
            hint,
        }
    }
}
