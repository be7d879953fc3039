use std::fmt;

/// Why a run stopped; each kind maps to its own exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config or parameter values.
    Invalid(String),
    /// A computation failed on valid inputs.
    Numerical { op: String, source: minerisk::Error },
    /// Reading or writing files.
    Io(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Numerical { .. } => 3,
            Failure::Io(_) => 1,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Failure::Invalid(msg.into())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Invalid(msg) => write!(f, "invalid input: {msg}"),
            Failure::Numerical { op, source } => write!(f, "numerical failure in {op}: {source}"),
            Failure::Io(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

/// Tags a library result with the operation that produced it. Parameter
/// errors count as invalid input.
pub fn op<T>(name: &str, r: minerisk::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| match e {
        minerisk::Error::InvalidParameter { .. } | minerisk::Error::UnknownQuantity(_) => {
            Failure::Invalid(format!("{name}: {e}"))
        }
        source => Failure::Numerical {
            op: name.to_string(),
            source,
        },
    })
}
