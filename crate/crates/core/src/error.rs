use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Bad parameter value or malformed config line.
    #[error("config error{}: {key}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config {
        key: String,
        line: Option<usize>,
        msg: String,
    },
    /// Violated precondition of an analysis routine.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The integrator produced a non-finite state.
    #[error("integration blew up at t = {t:e} s (dt too large?)")]
    BlowUp { t: f64 },
    #[error("calibration failed: {0}")]
    Calibration(String),
}

impl Error {
    pub(crate) fn config(key: &str, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.to_string(),
            line: None,
            msg: msg.into(),
        }
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
