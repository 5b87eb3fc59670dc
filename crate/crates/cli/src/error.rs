use std::fmt;

/// CLI error carrying a machine-parsable code and the process exit status:
/// `E0xx` are validation errors (exit 1), `E1xx` numerical failures (exit 2).
#[derive(Debug)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
    pub exit: u8,
}

impl CliError {
    pub fn missing_file(path: &std::path::Path, err: std::io::Error) -> Self {
        CliError {
            code: "E001",
            message: format!("cannot read {}: {err}", path.display()),
            exit: 1,
        }
    }

    pub fn malformed(message: impl Into<String>) -> Self {
        CliError {
            code: "E002",
            message: message.into(),
            exit: 1,
        }
    }

    pub fn invariant(message: impl Into<String>) -> Self {
        CliError {
            code: "E003",
            message: message.into(),
            exit: 1,
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError {
            code: "E101",
            message: message.into(),
            exit: 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

/// Classifies core-library errors: parameter problems are validation
/// errors, everything else is a numerical failure.
pub fn from_core(err: reflco_core::Error) -> CliError {
    use reflco_core::Error as E;
    match err {
        // bad inputs or grids, not numerics going wrong
        E::InvalidParameter(_) | E::NonFinite | E::QuadratureNode => {
            CliError::invariant(err.to_string())
        }
        _ => CliError::numerical(err.to_string()),
    }
}
