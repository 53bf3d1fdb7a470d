//! Pluggable sources of external evidence: affiliation lookup by publisher
//! URL, and web search for homepages. Both ship with file-backed fixture
//! implementations; the core never touches the network.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("provider unavailable: {0}")]
    Unavailable(String),
    #[error("lookup failed for {key:?}: {message}")]
    Lookup { key: String, message: String },
}

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("row {row}: {message}")]
    Invalid { row: usize, message: String },
}

pub(crate) fn read_file(path: &Path) -> Result<String, FixtureError> {
    std::fs::read_to_string(path).map_err(|source| FixtureError::Io { path: path.display().to_string(), source })
}

/// Reads two-column CSV rows, skipping an optional header equal to
/// `header` (case-insensitive).
pub(crate) fn read_pairs<R: Read>(reader: R, header: (&str, &str)) -> Result<Vec<(String, String)>, FixtureError> {
    let mut csv = csv::ReaderBuilder::new().has_headers(false).flexible(false).trim(csv::Trim::All).from_reader(reader);
    let mut rows = Vec::new();
    for (n, record) in csv.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            return Err(FixtureError::Invalid { row: n + 1, message: "expected two columns".into() });
        }
        let (a, b) = (record[0].to_string(), record[1].to_string());
        if n == 0 && a.eq_ignore_ascii_case(header.0) && b.eq_ignore_ascii_case(header.1) {
            continue;
        }
        rows.push((a, b));
    }
    Ok(rows)
}

/// Resolves a publisher URL to the affiliation printed on that page.
pub trait AffiliationResolver: Send + Sync {
    fn resolve(&self, publisher_url: &str) -> Result<Option<String>, ProviderError>;
}

/// Resolver that knows nothing.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoAffiliations;

impl AffiliationResolver for NoAffiliations {
    fn resolve(&self, _: &str) -> Result<Option<String>, ProviderError> {
        Ok(None)
    }
}

/// Affiliations from a `publisher_url,affiliation` CSV file.
#[derive(Debug, Default, Clone)]
pub struct FixtureAffiliations {
    by_url: HashMap<String, String>,
}

impl FixtureAffiliations {
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, FixtureError> {
        let by_url = read_pairs(reader, ("publisher_url", "affiliation"))?
            .into_iter()
            .filter(|(url, aff)| !url.is_empty() && !aff.is_empty())
            .collect();
        Ok(Self { by_url })
    }

    pub fn from_path(path: &Path) -> Result<Self, FixtureError> {
        Self::from_reader(read_file(path)?.as_bytes())
    }

    pub fn insert(&mut self, url: impl Into<String>, affiliation: impl Into<String>) {
        self.by_url.insert(url.into(), affiliation.into());
    }
}

impl AffiliationResolver for FixtureAffiliations {
    fn resolve(&self, publisher_url: &str) -> Result<Option<String>, ProviderError> {
        Ok(self.by_url.get(publisher_url).cloned())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub title: String,
    pub url: String,
    #[serde(default)]
    pub snippet: String,
}

/// Web search returning organic results in rank order.
pub trait SearchProvider: Send + Sync {
    fn search(&self, query: &str) -> Result<Vec<SearchResult>, ProviderError>;
}

/// Search that never finds anything.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoSearch;

impl SearchProvider for NoSearch {
    fn search(&self, _: &str) -> Result<Vec<SearchResult>, ProviderError> {
        Ok(Vec::new())
    }
}

#[derive(Deserialize)]
struct FixtureEntry {
    query: String,
    results: Vec<SearchResult>,
}

/// Canned results from a JSON array of `{query, results: [{title, url, snippet}]}`.
/// Queries match exactly; unknown queries return no results.
#[derive(Debug, Default, Clone)]
pub struct FixtureSearch {
    by_query: HashMap<String, Vec<SearchResult>>,
}

impl FixtureSearch {
    pub fn from_json(text: &str) -> Result<Self, FixtureError> {
        let entries: Vec<FixtureEntry> = serde_json::from_str(text)?;
        let mut by_query = HashMap::new();
        for entry in entries {
            by_query.insert(entry.query, entry.results);
        }
        Ok(Self { by_query })
    }

    pub fn from_path(path: &Path) -> Result<Self, FixtureError> {
        Self::from_json(&read_file(path)?)
    }

    pub fn insert(&mut self, query: impl Into<String>, results: Vec<SearchResult>) {
        self.by_query.insert(query.into(), results);
    }
}

impl SearchProvider for FixtureSearch {
    fn search(&self, query: &str) -> Result<Vec<SearchResult>, ProviderError> {
        Ok(self.by_query.get(query).cloned().unwrap_or_default())
    }
}
