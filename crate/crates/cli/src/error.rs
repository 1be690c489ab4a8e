use lowfreq2d::config::ConfigError;
use lowfreq2d::expansion::ExpansionError;
use lowfreq2d::identities::IdentityError;
use lowfreq2d::resolvent::ResolventError;
use lowfreq2d::scatterer::ScattererError;
use lowfreq2d::scattering::ScatteringError;
use lowfreq2d::threshold::ThresholdError;
use lowfreq2d::wave::WaveError;
use serde::Serialize;

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// Machine-readable failure, printed as JSON on stderr.
#[derive(Debug, Serialize)]
pub struct CliError {
    #[serde(skip)]
    pub code: i32,
    pub error: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            error: "validation",
            message: message.into(),
            line: None,
            key: None,
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            error: "numerical",
            message: message.into(),
            line: None,
            key: None,
        }
    }

    pub fn io(context: &str, e: std::io::Error) -> Self {
        Self {
            error: "io",
            ..Self::validation(format!("{context}: {e}"))
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self {
            line: (e.line > 0).then_some(e.line),
            key: Some(e.key.clone()),
            ..Self::validation(e.to_string())
        }
    }
}

impl From<ScattererError> for CliError {
    fn from(e: ScattererError) -> Self {
        Self::validation(e.to_string())
    }
}

impl From<ThresholdError> for CliError {
    fn from(e: ThresholdError) -> Self {
        match e {
            ThresholdError::Degenerate(_) => Self::numerical(e.to_string()),
            _ => Self::validation(e.to_string()),
        }
    }
}

impl From<ResolventError> for CliError {
    fn from(e: ResolventError) -> Self {
        match e {
            ResolventError::AtPole { .. } | ResolventError::Singular => {
                Self::numerical(e.to_string())
            }
            _ => Self::validation(e.to_string()),
        }
    }
}

impl From<ExpansionError> for CliError {
    fn from(e: ExpansionError) -> Self {
        match e {
            ExpansionError::Resolvent(r) => r.into(),
            ExpansionError::IllConditioned(_) => Self::numerical(e.to_string()),
            _ => Self::validation(e.to_string()),
        }
    }
}

impl From<ScatteringError> for CliError {
    fn from(e: ScatteringError) -> Self {
        match e {
            ScatteringError::Basin { .. } | ScatteringError::Continuation { .. } => {
                Self::numerical(e.to_string())
            }
            _ => Self::validation(e.to_string()),
        }
    }
}

impl From<WaveError> for CliError {
    fn from(e: WaveError) -> Self {
        match e {
            WaveError::NotDecayed { .. } => Self::numerical(e.to_string()),
            _ => Self::validation(e.to_string()),
        }
    }
}

impl From<IdentityError> for CliError {
    fn from(e: IdentityError) -> Self {
        match e {
            IdentityError::Resolvent(r) => r.into(),
            IdentityError::Threshold(t) => t.into(),
            IdentityError::Coverage(_) => Self::validation(e.to_string()),
        }
    }
}
