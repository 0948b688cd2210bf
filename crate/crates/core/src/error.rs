use alloc::string::String;

/// Errors raised by the core toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// The requested register does not fit the simulator.
    #[error("capacity error: {n_qubits} qubits requested, supported range is 1..={max}")]
    Capacity { n_qubits: usize, max: usize },
    /// A precondition on an argument was violated.
    #[error("argument error: {0}")]
    Argument(String),
    /// Text input (e.g. a serialized circuit) could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = core::result::Result<T, Error>;

/// Shorthand for building an [`Error::Argument`] with `format!` syntax.
macro_rules! arg_err {
    ($($t:tt)*) => {
        $crate::Error::Argument(alloc::format!($($t)*))
    };
}
pub(crate) use arg_err;
