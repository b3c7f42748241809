use std::path::{Path, PathBuf};

use dietchat_core::dialogue::Pipeline;
use dietchat_core::insight::InsightEngine;
use dietchat_core::nlg::{Planner, TemplateCatalog};
use dietchat_core::nlu::Nlu;
use dietchat_core::Thresholds;
use serde::Deserialize;

use crate::{read_file, Error, Result};

/// Service configuration, read from TOML. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Drop emoji from realized text.
    pub ascii_only: bool,
    pub thresholds: Thresholds,
    /// Replacement template catalog (JSON).
    pub templates: Option<PathBuf>,
    /// Replacement NLU rules (JSON).
    pub nlu_rules: Option<PathBuf>,
    /// When set, each session's transcript is rewritten here after every event.
    pub transcript_dir: Option<PathBuf>,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.thresholds.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&read_file(path)?)
    }

    pub fn pipeline(&self) -> Result<Pipeline> {
        let catalog = match &self.templates {
            Some(p) => TemplateCatalog::from_json(&read_file(p)?)?,
            None => TemplateCatalog::default(),
        };
        let nlu = match &self.nlu_rules {
            Some(p) => Nlu::from_json(&read_file(p)?)?,
            None => Nlu::default(),
        };
        Ok(Pipeline {
            nlu,
            engine: InsightEngine::new(self.thresholds),
            planner: Planner::new(catalog, self.ascii_only),
        })
    }
}
