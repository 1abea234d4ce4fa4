use thiserror::Error;

/// Process exit statuses. Nothing else is ever returned.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flag, config key or parameter outside a precondition.
    #[error("input error: {0}")]
    Input(String),
    /// A computation failed a check it is supposed to pass.
    #[error("invariant failure: {0}")]
    Invariant(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => EXIT_INPUT,
            CliError::Invariant(_) => EXIT_INVARIANT,
        }
    }
}

impl From<polyzeta::Error> for CliError {
    fn from(e: polyzeta::Error) -> Self {
        use polyzeta::Error as E;
        match e {
            E::Argument(_)
            | E::Pole { .. }
            | E::Branch(_)
            | E::Domain(_)
            | E::EmptyRegion { .. }
            | E::NonMonotone(_)
            | E::Degenerate(_) => CliError::Input(e.to_string()),
            E::MissedZero { .. }
            | E::Ambiguous { .. }
            | E::MissedLevel { .. }
            | E::Grid(_)
            | E::NonFinite(_) => CliError::Invariant(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
