// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] kdbound_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Serde(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unsupported {what} version {found}")]
    Version { what: &'static str, found: u32 },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("{experiment} trial {trial} (seed {seed}): {message}")]
    Trial {
        experiment: &'static str,
        trial: u64,
        seed: u64,
        message: String,
    },
    #[error("memory budget exceeded: n*d = {requested} > {budget}; lower d or override n0")]
    MemoryBudget { requested: u128, budget: u128 },
    #[error("thread pool: {0}")]
    Pool(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
