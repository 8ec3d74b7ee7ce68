//! Exit-code-bearing error type for the experiment runner.

use std::fmt;

/// Failure classes with fixed exit codes: usage 2, numerical 3, I/O 4.
#[derive(Debug)]
pub enum CliError {
    /// Unknown experiment, malformed flags, or arguments a module rejects.
    Usage(String),
    /// A run produced no usable number (NaN, undefined fit, non-PSD matrix).
    Numerical(String),
    /// The output destination could not be written.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    /// Class tag for the machine-readable stderr line.
    pub fn class(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) | CliError::Io(m) => m,
        }
    }

    /// The `error,<class>,<message>` line, newlines flattened so the line
    /// stays single and parseable.
    pub fn report_line(&self) -> String {
        let flat = self
            .message()
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect::<Vec<_>>()
            .join("; ");
        format!("error,{},{}", self.class(), flat)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.class(), self.message())
    }
}

impl std::error::Error for CliError {}

impl From<gausslab_core::Error> for CliError {
    fn from(e: gausslab_core::Error) -> Self {
        match e {
            gausslab_core::Error::NotPositiveSemidefinite(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
