//! Evaluation settings files.
//!
//! A settings file is TOML with optional top-level `seed` and `aggregation`
//! keys and `[coefficients]`, `[planner]`, `[motion]` tables plus an optional
//! `[[scenarios]]` list. Anything left out keeps its default.

use std::path::Path;

use crate::error::{Error, Result};
use crate::pipeline::EvaluationSettings;

/// Environment variable naming the settings file used when none is given.
pub const CONFIG_ENV: &str = "FALLRISK_CONFIG";

/// The shipped defaults file, one commented entry per coefficient.
pub const TABLE1_DEFAULTS: &str = include_str!("../config/table1_defaults.toml");

pub fn parse_config(text: &str) -> Result<EvaluationSettings> {
    let de = toml::Deserializer::parse(text)
        .map_err(|e| Error::schema("<config>", e.message().to_string()))?;
    let settings: EvaluationSettings = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::schema(
            if path == "." { "<config>".into() } else { path },
            e.inner().message().to_string(),
        )
    })?;
    settings.validate()?;
    Ok(settings)
}

pub fn load_config(path: &Path) -> Result<EvaluationSettings> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
