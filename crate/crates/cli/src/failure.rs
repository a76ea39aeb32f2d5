use std::fmt;
use std::process::ExitCode;

/// Why a command stopped. User failures exit with 2, internal ones with 1.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(ranksig_core::Error),
    Internal(String),
}

pub type Outcome<T> = Result<T, Failure>;

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        let user = match self {
            Failure::Usage(_) => true,
            Failure::Core(e) => e.is_user_error(),
            Failure::Internal(_) => false,
        };
        ExitCode::from(if user { 2 } else { 1 })
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Internal(m) => f.write_str(m),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<ranksig_core::Error> for Failure {
    fn from(e: ranksig_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}
