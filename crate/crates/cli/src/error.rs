use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] cstar_nets::Error),
}

impl CliError {
    /// Errors that describe malformed input rather than a failed check.
    pub fn is_input_error(&self) -> bool {
        use cstar_nets::Error as E;
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Input(_) => true,
            CliError::Core(e) => matches!(
                e,
                E::UnknownElement(_)
                    | E::InvalidInput(_)
                    | E::InvalidPoset(_)
                    | E::DisconnectedPoset
                    | E::MalformedLoop(_)
                    | E::ShapeMismatch(_)
                    | E::EmptyRestriction
                    | E::InvalidSector(_)
            ),
        }
    }
}
