//! The four layers as a resumable state machine with two feedback
//! checkpoints.
//!
//! ```text
//! Created -> AwaitingDisciplineChoice -> AwaitingPrincipalEndorsement -> Completed
//!    \______________________\_________________________\______________-> Failed
//! ```
//!
//! At the first checkpoint the operator picks one discipline cluster, which
//! is split by co-authors and re-merged by affiliation. At the second the
//! operator endorses one of the resulting clusters as the principal cluster;
//! title and homepage evidence then pull the remaining clusters into it.
//! An [`Engine`] holds the corpus and providers; a [`Session`] holds only
//! serializable state, so it can be snapshotted and resumed.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::clustering::{
    layer1_discipline_clusters, layer2_coauthor_split, layer3_affiliation_merge, layer4_homepage_merge,
    layer4_title_merge, prepare_vectors, AffiliationResolver, Cluster, NoAffiliations, NoSearch, SearchProvider,
    Thresholds, VenueMap,
};
use crate::names::NameVariant;
use crate::records::Corpus;
use crate::textmetrics::default_stopwords;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SessionState {
    Created,
    AwaitingDisciplineChoice,
    AwaitingPrincipalEndorsement,
    Completed,
    Failed,
}

impl SessionState {
    pub fn is_terminal(self) -> bool {
        matches!(self, SessionState::Completed | SessionState::Failed)
    }

    pub fn checkpoint(self) -> Option<Checkpoint> {
        match self {
            SessionState::AwaitingDisciplineChoice => Some(Checkpoint::Discipline),
            SessionState::AwaitingPrincipalEndorsement => Some(Checkpoint::Principal),
            _ => None,
        }
    }
}

impl fmt::Display for SessionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Checkpoint {
    Discipline,
    Principal,
}

impl fmt::Display for Checkpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Checkpoint::Discipline => "discipline",
            Checkpoint::Principal => "principal",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub checkpoint: Checkpoint,
    pub cluster_id: String,
    pub timestamp: DateTime<Utc>,
}

/// One entry of a decision script file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptStep {
    pub checkpoint: Checkpoint,
    pub cluster_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub thresholds: Thresholds,
    pub venue_map: VenueMap,
    pub stopwords: BTreeSet<String>,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self { thresholds: Thresholds::default(), venue_map: VenueMap::default(), stopwords: default_stopwords() }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SessionError {
    #[error("cluster {cluster_id:?} is not among the options at the {checkpoint} checkpoint")]
    UnknownCluster { checkpoint: Checkpoint, cluster_id: String },
    #[error("session is {0}, not awaiting a decision")]
    NotAwaiting(SessionState),
}

#[derive(Debug, Error, PartialEq)]
pub enum FeedbackError {
    #[error("decision script exhausted at the {0} checkpoint")]
    ScriptExhausted(Checkpoint),
    #[error("decision script expects the {expected} checkpoint but the session is at {actual}")]
    CheckpointMismatch { expected: Checkpoint, actual: Checkpoint },
    #[error("no options to choose from")]
    NoOptions,
    #[error("{0}")]
    Other(String),
}

/// Source of checkpoint decisions: a person, a script, or a gold-label oracle.
pub trait FeedbackProvider {
    /// Returns the id of one of `options`.
    fn decide(&mut self, checkpoint: Checkpoint, options: &[Cluster]) -> Result<String, FeedbackError>;
}

/// Chooses the option holding the most records labeled with the target
/// author key; ties go to the smallest cluster id.
#[derive(Debug, Clone)]
pub struct OracleProvider {
    labels: HashMap<String, String>,
    target: String,
}

impl OracleProvider {
    pub fn new(labels: HashMap<String, String>, target: impl Into<String>) -> Self {
        Self { labels, target: target.into() }
    }

    pub fn from_corpus(corpus: &Corpus, target: impl Into<String>) -> Self {
        let labels = corpus.records().iter().filter_map(|r| r.author_key.clone().map(|k| (r.id.clone(), k))).collect();
        Self::new(labels, target)
    }

    fn score(&self, cluster: &Cluster) -> usize {
        cluster.record_ids.iter().filter(|id| self.labels.get(*id).is_some_and(|k| *k == self.target)).count()
    }
}

impl FeedbackProvider for OracleProvider {
    fn decide(&mut self, _: Checkpoint, options: &[Cluster]) -> Result<String, FeedbackError> {
        options
            .iter()
            .max_by(|a, b| self.score(a).cmp(&self.score(b)).then_with(|| b.id.cmp(&a.id)))
            .map(|c| c.id.clone())
            .ok_or(FeedbackError::NoOptions)
    }
}

/// Replays recorded decisions in order.
#[derive(Debug, Clone, Default)]
pub struct ScriptProvider {
    steps: VecDeque<ScriptStep>,
}

impl ScriptProvider {
    pub fn new(steps: impl IntoIterator<Item = ScriptStep>) -> Self {
        Self { steps: steps.into_iter().collect() }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let steps: Vec<ScriptStep> = serde_json::from_str(text)?;
        Ok(Self::new(steps))
    }
}

impl FeedbackProvider for ScriptProvider {
    fn decide(&mut self, checkpoint: Checkpoint, _: &[Cluster]) -> Result<String, FeedbackError> {
        let step = self.steps.pop_front().ok_or(FeedbackError::ScriptExhausted(checkpoint))?;
        if step.checkpoint != checkpoint {
            return Err(FeedbackError::CheckpointMismatch { expected: step.checkpoint, actual: checkpoint });
        }
        Ok(step.cluster_id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub query: NameVariant,
    pub state: SessionState,
    /// The options while awaiting a decision; the final clusters once completed.
    pub clusters: Vec<Cluster>,
    pub principal_cluster_id: Option<String>,
    pub decisions: Vec<Decision>,
    pub config: SessionConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Session {
    pub fn checkpoint(&self) -> Option<Checkpoint> {
        self.state.checkpoint()
    }

    pub fn options(&self) -> Option<&[Cluster]> {
        self.checkpoint().map(|_| self.clusters.as_slice())
    }

    pub fn principal_cluster(&self) -> Option<&Cluster> {
        let id = self.principal_cluster_id.as_deref()?;
        self.clusters.iter().find(|c| c.id == id)
    }

    /// The decisions taken so far, as a replayable script.
    pub fn decision_script(&self) -> Vec<ScriptStep> {
        self.decisions
            .iter()
            .map(|d| ScriptStep { checkpoint: d.checkpoint, cluster_id: d.cluster_id.clone() })
            .collect()
    }

    fn fail(&mut self, message: impl Into<String>) {
        self.state = SessionState::Failed;
        self.error = Some(message.into());
    }

    /// The stable result document.
    pub fn output(&self) -> ClusterOutput {
        let mut clusters: Vec<ClusterSummary> = self
            .clusters
            .iter()
            .map(|c| ClusterSummary {
                id: c.id.clone(),
                discipline: c.discipline.clone(),
                principal: c.candidate_principals.iter().map(|v| v.raw.clone()).collect(),
                record_ids: c.record_ids.iter().cloned().collect(),
            })
            .collect();
        clusters.sort_by(|a, b| a.id.cmp(&b.id));
        ClusterOutput {
            session_id: self.id.clone(),
            query: self.query.raw.clone(),
            principal_cluster_id: self.principal_cluster_id.clone(),
            clusters,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub id: String,
    pub discipline: String,
    pub principal: Vec<String>,
    pub record_ids: Vec<String>,
}

/// Final clusters as written by batch runs, sorted by cluster id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterOutput {
    pub session_id: String,
    pub query: String,
    pub principal_cluster_id: Option<String>,
    pub clusters: Vec<ClusterSummary>,
}

impl ClusterOutput {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("output always serializes");
        s.push('\n');
        s
    }
}

/// Corpus, configuration and providers shared by any number of sessions.
#[derive(Clone)]
pub struct Engine {
    corpus: Arc<Corpus>,
    config: SessionConfig,
    resolver: Arc<dyn AffiliationResolver>,
    search: Arc<dyn SearchProvider>,
}

impl fmt::Debug for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Engine")
            .field("records", &self.corpus.len())
            .field("config", &self.config)
            .finish_non_exhaustive()
    }
}

impl Engine {
    pub fn new(corpus: impl Into<Arc<Corpus>>, config: SessionConfig) -> Self {
        Self { corpus: corpus.into(), config, resolver: Arc::new(NoAffiliations), search: Arc::new(NoSearch) }
    }

    pub fn with_resolver(mut self, resolver: Arc<dyn AffiliationResolver>) -> Self {
        self.resolver = resolver;
        self
    }

    pub fn with_search(mut self, search: Arc<dyn SearchProvider>) -> Self {
        self.search = search;
        self
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    /// A session id derived from the query and the corpus record ids, so
    /// batch runs over the same inputs name their sessions identically.
    pub fn derived_session_id(&self, query: &NameVariant) -> String {
        let mut hasher = Sha256::new();
        hasher.update(query.raw.as_bytes());
        for record in self.corpus.records() {
            hasher.update([0u8]);
            hasher.update(record.id.as_bytes());
        }
        let digest = hasher.finalize();
        let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
        format!("s-{hex}")
    }

    /// Runs layer 1 and stops at the discipline checkpoint, or completes
    /// immediately when nothing matches the query.
    pub fn start(&self, id: impl Into<String>, query: NameVariant) -> Session {
        let mut session = Session {
            id: id.into(),
            query,
            state: SessionState::Created,
            clusters: Vec::new(),
            principal_cluster_id: None,
            decisions: Vec::new(),
            config: self.config.clone(),
            error: None,
        };
        if let Err(e) = session.config.thresholds.validate() {
            session.fail(format!("invalid configuration: {e}"));
            return session;
        }
        session.clusters = layer1_discipline_clusters(&self.corpus, &session.query, &session.config.venue_map);
        session.state =
            if session.clusters.is_empty() { SessionState::Completed } else { SessionState::AwaitingDisciplineChoice };
        session
    }

    /// Applies a checkpoint decision. On error the session is left untouched.
    pub fn submit_decision(&self, session: &mut Session, cluster_id: &str) -> Result<(), SessionError> {
        let checkpoint = session.checkpoint().ok_or(SessionError::NotAwaiting(session.state))?;
        let Some(pos) = session.clusters.iter().position(|c| c.id == cluster_id) else {
            return Err(SessionError::UnknownCluster { checkpoint, cluster_id: cluster_id.to_string() });
        };
        let config = &session.config;
        match checkpoint {
            Checkpoint::Discipline => {
                let chosen = &session.clusters[pos];
                let split = layer2_coauthor_split(chosen, &self.corpus);
                session.clusters =
                    layer3_affiliation_merge(split, &self.corpus, self.resolver.as_ref(), &config.thresholds);
                session.state = SessionState::AwaitingPrincipalEndorsement;
            }
            Checkpoint::Principal => {
                let clusters = prepare_vectors(std::mem::take(&mut session.clusters), &self.corpus, &config.stopwords);
                let mut others = clusters;
                let principal = others.remove(pos);
                let (principal, others) = layer4_title_merge(principal, others, &config.thresholds);
                let (principal, others) =
                    layer4_homepage_merge(principal, others, self.search.as_ref(), &config.thresholds);
                session.principal_cluster_id = Some(principal.id.clone());
                session.clusters = std::iter::once(principal).chain(others).collect();
                session.clusters.sort_by(|a, b| a.id.cmp(&b.id));
                session.state = SessionState::Completed;
            }
        }
        session.decisions.push(Decision { checkpoint, cluster_id: cluster_id.to_string(), timestamp: Utc::now() });
        Ok(())
    }

    /// Drives a session to a terminal state with decisions from `provider`.
    /// A provider error or an invalid choice fails the session.
    pub fn run_with_provider(
        &self,
        id: impl Into<String>,
        query: NameVariant,
        provider: &mut dyn FeedbackProvider,
    ) -> Session {
        let mut session = self.start(id, query);
        while let Some(checkpoint) = session.checkpoint() {
            let choice = match provider.decide(checkpoint, &session.clusters) {
                Ok(choice) => choice,
                Err(e) => {
                    session.fail(format!("feedback provider failed: {e}"));
                    break;
                }
            };
            if let Err(e) = self.submit_decision(&mut session, &choice) {
                session.fail(e.to_string());
            }
        }
        session
    }
}
