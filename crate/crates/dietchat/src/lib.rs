//! Std companion to `dietchat-core`: the session registry and its HTTP API,
//! a blocking client, the quiz and NLU-corpus harnesses, and the CLI glue.

pub mod canonical;
pub mod client;
pub mod config;
pub mod harness;
pub mod server;
pub mod service;
pub mod transport;

pub use dietchat_core as core;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] dietchat_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("http: {0}")]
    Http(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })
}

/// Loads and validates a diary document.
pub fn load_diary(path: &std::path::Path) -> Result<dietchat_core::FoodDiary> {
    Ok(dietchat_core::FoodDiary::from_json(&read_file(path)?)?)
}
