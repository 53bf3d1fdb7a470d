use std::env;
use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::CliError;

pub const CONFIG_ENV: &str = "NAMEDISS_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProviderMode {
    Oracle,
    Script,
    InteractiveServe,
}

/// Every setting a command may read. Flags and the config file fill the
/// same struct; flags win.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Corpus file: JSON lines, or DBLP XML
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Author name to disambiguate, e.g. "M. Imran"
    #[arg(long)]
    pub query: Option<String>,
    /// CSV of venue,discipline rows
    #[arg(long)]
    pub venue_map: Option<PathBuf>,
    /// Stop-word list, one per line; replaces the built-in list
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// CSV of publisher_url,affiliation rows
    #[arg(long)]
    pub affiliations: Option<PathBuf>,
    /// JSON array of {query, results: [{title, url, snippet}]}
    #[arg(long)]
    pub search_fixture: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub provider: Option<ProviderMode>,
    /// JSON list of {checkpoint, cluster_id} decisions
    #[arg(long)]
    pub script: Option<PathBuf>,
    /// Gold author_key the oracle steers towards
    #[arg(long)]
    pub gold_key: Option<String>,
    #[arg(long)]
    pub threshold_affiliation: Option<f64>,
    #[arg(long)]
    pub threshold_title: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub port: Option<u16>,
    /// Config file only: directory for session snapshots when serving
    #[arg(skip)]
    pub snapshot_dir: Option<PathBuf>,
    /// Config file only: origin allowed by CORS when serving
    #[arg(skip)]
    pub cors_origin: Option<String>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($field:ident),*) => {
        Settings { $($field: $top.$field.or($base.$field)),* }
    };
}

impl Settings {
    /// Fields set in `top` replace those in `self`.
    pub fn overlay(self, top: Settings) -> Settings {
        overlay!(
            self,
            top,
            input,
            query,
            venue_map,
            stopwords,
            affiliations,
            search_fixture,
            provider,
            script,
            gold_key,
            threshold_affiliation,
            threshold_title,
            output,
            port,
            snapshot_dir,
            cors_origin
        )
    }

    pub fn parse_file(text: &str) -> Result<Settings, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config file: {e}")))
    }

    /// The config file named by the environment, if any, under `flags`.
    pub fn resolve(flags: Settings) -> Result<Settings, CliError> {
        let Some(path) = env::var_os(CONFIG_ENV) else { return Ok(flags) };
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::Config(format!("{CONFIG_ENV}={}: {e}", PathBuf::from(&path).display())))?;
        Ok(Self::parse_file(&text)?.overlay(flags))
    }

    pub fn require_input(&self) -> Result<&PathBuf, CliError> {
        self.input.as_ref().ok_or_else(|| CliError::Config("--input is required".into()))
    }
}
