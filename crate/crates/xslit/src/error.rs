use std::path::Path;

use serde::Serialize;
use xslit_core::camera::CameraError;
use xslit_core::ddar::DdarError;
use xslit_core::inference::InferenceError;
use xslit_core::propagation::PropagationError;
use xslit_core::scene::SceneError;

/// Exit-code class of a failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// Bad input: unreadable or malformed files, invalid parameters.
    Validation,
    /// Valid input on which a solver could not produce an answer.
    Numerical,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct Error {
    pub kind: ErrorKind,
    /// Stable machine-readable identifier.
    pub code: String,
    pub message: String,
}

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Serialize)]
struct Body<'a> {
    code: &'a str,
    message: &'a str,
}

#[derive(Serialize)]
struct Envelope<'a> {
    error: Body<'a>,
}

impl Error {
    pub fn validation(code: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Validation,
            code: code.into(),
            message: message.into(),
        }
    }

    pub fn numerical(code: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Numerical,
            code: code.into(),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        let code = match err.kind() {
            std::io::ErrorKind::NotFound => "file_not_found",
            _ => "io_error",
        };
        Self::validation(code, format!("{}: {err}", path.display()))
    }

    pub fn json(path: &Path, err: serde_json::Error) -> Self {
        Self::validation("invalid_json", format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Validation => 2,
            ErrorKind::Numerical => 3,
        }
    }

    /// `{"error":{"code":..,"message":..}}`
    pub fn to_json(&self) -> String {
        serde_json::to_string(&Envelope {
            error: Body {
                code: &self.code,
                message: &self.message,
            },
        })
        .expect("strings serialize")
    }
}

impl From<CameraError> for Error {
    fn from(e: CameraError) -> Self {
        Self::validation(e.code(), e.to_string())
    }
}

impl From<DdarError> for Error {
    fn from(e: DdarError) -> Self {
        match e {
            DdarError::UnresolvableAr { .. } | DdarError::AtSlitPole { .. } => {
                Self::numerical(e.code(), e.to_string())
            }
            _ => Self::validation(e.code(), e.to_string()),
        }
    }
}

impl From<InferenceError> for Error {
    fn from(e: InferenceError) -> Self {
        if e.is_numerical() {
            Self::numerical(e.code(), e.to_string())
        } else {
            Self::validation(e.code(), e.to_string())
        }
    }
}

impl From<SceneError> for Error {
    fn from(e: SceneError) -> Self {
        match e {
            SceneError::DegenerateEllipse | SceneError::DegeneratePoints => {
                Self::numerical(e.code(), e.to_string())
            }
            _ => Self::validation(e.code(), e.to_string()),
        }
    }
}

impl From<PropagationError> for Error {
    fn from(e: PropagationError) -> Self {
        match e {
            PropagationError::NoAnchors => Self::numerical(e.code(), e.to_string()),
            _ => Self::validation(e.code(), e.to_string()),
        }
    }
}
