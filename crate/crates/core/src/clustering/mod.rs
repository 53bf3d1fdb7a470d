//! The four disambiguation layers.
//!
//! 1. [`layer1_discipline_clusters`] restricts the corpus to records whose
//!    principal author is compatible with the query and groups them by the
//!    discipline of their venue.
//! 2. [`layer2_coauthor_split`] divides one discipline cluster into the
//!    connected components of the shared-co-author graph.
//! 3. [`layer3_affiliation_merge`] agglomerates clusters whose affiliations
//!    are close in edit distance and whose candidate principals agree.
//! 4. [`layer4_title_merge`] and [`layer4_homepage_merge`] pull remaining
//!    clusters into the endorsed principal cluster by title vocabulary and by
//!    shared homepage.
//!
//! Every layer partitions its input: output clusters are disjoint and cover
//! exactly the input records. A cluster's id is its smallest record id, and
//! layer outputs are sorted by id.

mod affiliation;
mod coauthor;
mod discipline;
pub(crate) mod disjoint_set;
pub mod providers;
mod pursuit;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::names::{names_compatible, parse_name, promote_groups, specificity_order, NameVariant};
use crate::records::Corpus;
use crate::textmetrics::KeywordVector;

pub use affiliation::layer3_affiliation_merge;
pub use coauthor::layer2_coauthor_split;
pub use discipline::layer1_discipline_clusters;
pub use providers::{
    AffiliationResolver, FixtureAffiliations, FixtureError, FixtureSearch, NoAffiliations, NoSearch, ProviderError,
    SearchProvider, SearchResult,
};
pub use pursuit::{find_homepage, layer4_homepage_merge, layer4_title_merge, normalize_url, prepare_vectors};

pub const UNKNOWN_DISCIPLINE: &str = "unknown";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub id: String,
    pub record_ids: BTreeSet<String>,
    pub discipline: String,
    pub candidate_principals: Vec<NameVariant>,
    pub affiliations: BTreeSet<String>,
    #[serde(default)]
    pub vector: KeywordVector,
}

impl Cluster {
    /// Builds a cluster over `record_ids`, deriving the candidate principals
    /// and recorded affiliations from the corpus. Ids missing from the
    /// corpus are kept but contribute nothing.
    pub fn from_records<I, S>(record_ids: I, discipline: impl Into<String>, corpus: &Corpus) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let record_ids: BTreeSet<String> = record_ids.into_iter().map(Into::into).collect();
        let mut principals = Vec::new();
        let mut affiliations = BTreeSet::new();
        for record in record_ids.iter().filter_map(|id| corpus.get(id)) {
            if let Ok(v) = parse_name(record.principal_author()) {
                principals.push(v);
            }
            if let Some(aff) = record.affiliation.as_deref().map(str::trim).filter(|a| !a.is_empty()) {
                affiliations.insert(aff.to_string());
            }
        }
        let mut cluster = Cluster {
            id: String::new(),
            record_ids,
            discipline: discipline.into(),
            candidate_principals: Vec::new(),
            affiliations,
            vector: KeywordVector::default(),
        };
        cluster.set_principals(principals);
        cluster.refresh_id();
        cluster
    }

    pub fn len(&self) -> usize {
        self.record_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.record_ids.is_empty()
    }

    pub fn contains(&self, record_id: &str) -> bool {
        self.record_ids.contains(record_id)
    }

    pub(crate) fn refresh_id(&mut self) {
        self.id = self.record_ids.iter().next().cloned().unwrap_or_default();
    }

    /// Distinct variants, most specific first.
    pub(crate) fn set_principals(&mut self, mut principals: Vec<NameVariant>) {
        principals.sort_by(specificity_order);
        principals.dedup_by(|a, b| a.raw == b.raw);
        self.candidate_principals = principals;
    }

    pub(crate) fn promote_principals(&mut self) {
        self.candidate_principals = promote_groups(&self.candidate_principals);
    }

    /// Takes over the other cluster's records and evidence. The id is
    /// refreshed; principals are unioned but not promoted.
    pub(crate) fn absorb(&mut self, other: Cluster) {
        self.record_ids.extend(other.record_ids);
        self.affiliations.extend(other.affiliations);
        self.vector.merge(&other.vector);
        let mut principals = std::mem::take(&mut self.candidate_principals);
        principals.extend(other.candidate_principals);
        self.set_principals(principals);
        self.refresh_id();
    }

    /// The name the cluster is searched under: its most specific candidate.
    pub fn display_name(&self) -> Option<&NameVariant> {
        self.candidate_principals.first()
    }
}

/// True when some candidate principal of `a` is compatible with one of `b`.
pub fn principals_compatible(a: &Cluster, b: &Cluster) -> bool {
    a.candidate_principals.iter().any(|x| b.candidate_principals.iter().any(|y| names_compatible(x, y)))
}

pub(crate) fn sort_clusters(clusters: &mut [Cluster]) {
    clusters.sort_by(|a, b| a.id.cmp(&b.id));
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("threshold {name} = {value} is outside {range}")]
    ThresholdOutOfRange { name: &'static str, value: f64, range: &'static str },
    #[error("homepage_top_keywords must be positive")]
    ZeroTopKeywords,
    #[error("venue map row {row}: {message}")]
    VenueMap { row: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    pub affiliation_similarity: f64,
    pub title_similarity: f64,
    pub homepage_keyword_fraction: f64,
    pub homepage_top_keywords: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            affiliation_similarity: 0.75,
            title_similarity: 0.50,
            homepage_keyword_fraction: 0.5,
            homepage_top_keywords: 10,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let unit = |name, value: f64| {
            if (0.0..=1.0).contains(&value) {
                Ok(())
            } else {
                Err(ConfigError::ThresholdOutOfRange { name, value, range: "[0, 1]" })
            }
        };
        unit("affiliation_similarity", self.affiliation_similarity)?;
        unit("title_similarity", self.title_similarity)?;
        let f = self.homepage_keyword_fraction;
        if !(f > 0.0 && f <= 1.0) {
            return Err(ConfigError::ThresholdOutOfRange {
                name: "homepage_keyword_fraction",
                value: f,
                range: "(0, 1]",
            });
        }
        if self.homepage_top_keywords == 0 {
            return Err(ConfigError::ZeroTopKeywords);
        }
        Ok(())
    }
}

/// Venue to discipline assignment. Venue lookups are case-insensitive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VenueMap {
    entries: BTreeMap<String, String>,
    default_label: String,
}

impl Default for VenueMap {
    fn default() -> Self {
        Self { entries: BTreeMap::new(), default_label: UNKNOWN_DISCIPLINE.to_string() }
    }
}

fn fold_venue(venue: &str) -> String {
    venue.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

impl VenueMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, venue: &str, discipline: impl Into<String>) -> &mut Self {
        self.entries.insert(fold_venue(venue), discipline.into());
        self
    }

    /// Parses `venue,discipline` rows; a `venue,discipline` header is skipped.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, FixtureError> {
        let mut map = Self::default();
        for (n, (venue, discipline)) in providers::read_pairs(reader, ("venue", "discipline"))?.into_iter().enumerate()
        {
            if discipline.is_empty() {
                return Err(FixtureError::Invalid { row: n + 1, message: "empty discipline label".into() });
            }
            map.insert(&venue, discipline);
        }
        Ok(map)
    }

    pub fn from_path(path: &Path) -> Result<Self, FixtureError> {
        Self::from_csv(providers::read_file(path)?.as_bytes())
    }

    pub fn lookup(&self, venue: &str) -> &str {
        self.entries.get(&fold_venue(venue)).map(String::as_str).unwrap_or(&self.default_label)
    }

    pub fn default_label(&self) -> &str {
        &self.default_label
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
