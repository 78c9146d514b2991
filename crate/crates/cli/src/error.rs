use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] nullmem::Error),

    #[error("archive field `{field}`: {detail}")]
    Archive { field: String, detail: String },

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("flag `{flag}`: {detail}")]
    Usage { flag: String, detail: String },

    #[error("spec file {}: {detail}", path.display())]
    SpecFile { path: PathBuf, detail: String },

    #[error("validation failed: {0}")]
    Validation(String),
}

/// Exit code for each machine-readable category. 0 is success and clap
/// itself exits with 2 on malformed command lines.
pub const EXIT_CODES: &[(&str, u8)] = &[
    ("validation", 1),
    ("usage", 2),
    ("io", 3),
    ("archive", 4),
    ("spec", 5),
    ("domain", 6),
    ("range", 7),
    ("shape", 8),
    ("absent-field", 9),
    ("resolution", 10),
    ("non-convergent-tail", 11),
    ("integrator", 12),
    ("consistency", 13),
    ("non-mean-free-source", 14),
    ("non-electric-source", 15),
    ("kernel-obstruction", 16),
    ("grid-collision", 17),
];

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.category(),
            CliError::Archive { .. } => "archive",
            CliError::Io { .. } => "io",
            CliError::Usage { .. } => "usage",
            CliError::SpecFile { .. } => "spec",
            CliError::Validation(_) => "validation",
        }
    }

    pub fn exit_code(&self) -> u8 {
        let c = self.category();
        EXIT_CODES.iter().find(|(k, _)| *k == c).map_or(70, |(_, v)| *v)
    }

    pub(crate) fn archive(field: impl Into<String>, detail: impl Into<String>) -> Self {
        CliError::Archive { field: field.into(), detail: detail.into() }
    }

    pub(crate) fn usage(flag: impl Into<String>, detail: impl Into<String>) -> Self {
        CliError::Usage { flag: flag.into(), detail: detail.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
