use std::path::PathBuf;

use serde::Serialize;
use vra::datamodel::DataError;
use vra::evaluation::EvalError;
use vra::fusion::FusionError;
use vra::handcrafted::FeatureError;
use vra::preprocess::PreprocessError;
use vra::selection::SelectionError;
use vra::svr::SvrError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{message}")]
    Config { message: String, hint: Option<String> },
    #[error("{}: no such file or directory", .0.display())]
    Missing(PathBuf),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Svr(#[from] SvrError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Serialize)]
struct Body<'a> {
    kind: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    hint: Option<String>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    error: Body<'a>,
}

impl CliError {
    pub fn config(message: impl Into<String>, hint: impl Into<String>) -> Self {
        CliError::Config {
            message: message.into(),
            hint: Some(hint.into()),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config { .. } => "config",
            CliError::Missing(_) => "missing-file",
            CliError::Data(DataError::Io { source, .. }) | CliError::Io { source, .. }
                if source.kind() == std::io::ErrorKind::NotFound =>
            {
                "missing-file"
            }
            CliError::Data(DataError::Io { .. }) | CliError::Io { .. } => "io",
            CliError::Data(_) => "format",
            CliError::Preprocess(_) => "preprocess",
            CliError::Feature(_) => "feature",
            CliError::Fusion(FusionError::Schema(_)) | CliError::Eval(EvalError::Schema(_)) => "schema",
            CliError::Selection(SelectionError::NameMismatch(_)) | CliError::Svr(SvrError::FeatureNames(_)) => {
                "schema"
            }
            CliError::Fusion(_) => "fusion",
            CliError::Svr(_) => "svr",
            CliError::Selection(_) => "selection",
            CliError::Eval(EvalError::Config(_)) => "config",
            CliError::Eval(_) => "evaluation",
        }
    }

    fn hint(&self) -> Option<String> {
        match self.kind() {
            "usage" => Some("run `vra --help` or `vra <command> --help`".into()),
            "missing-file" => Some("check the path; relative media paths resolve against the manifest's directory".into()),
            "schema" => Some("all feature files of one table must come from the same extractor version".into()),
            _ => match self {
                CliError::Config { hint, .. } => hint.clone(),
                _ => None,
            },
        }
    }

    /// 2 for usage and configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "usage" | "config" => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        let envelope = Envelope {
            error: Body {
                kind: self.kind(),
                message: self.to_string(),
                hint: self.hint(),
            },
        };
        serde_json::to_string(&envelope).expect("error envelope serializes")
    }
}
