use namediss_core::session::Decision;
use namediss_core::{Checkpoint, Cluster, ClusterOutput, Corpus, Session, SessionState};
use serde::{Deserialize, Serialize};

/// What the review UI needs to show one record in an option panel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordSummary {
    pub id: String,
    pub title: String,
    pub venue: String,
    pub year: Option<i32>,
    pub coauthors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionView {
    pub cluster_id: String,
    pub discipline: String,
    pub principal: Vec<String>,
    pub records: Vec<RecordSummary>,
}

/// The JSON body returned by every session endpoint. `options` is present
/// exactly while the session awaits a decision, `result` once it completed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiSessionView {
    pub id: String,
    pub query: String,
    pub state: SessionState,
    pub checkpoint: Option<Checkpoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<Vec<OptionView>>,
    pub decisions: Vec<Decision>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<ClusterOutput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn option_view(cluster: &Cluster, corpus: &Corpus) -> OptionView {
    OptionView {
        cluster_id: cluster.id.clone(),
        discipline: cluster.discipline.clone(),
        principal: cluster.candidate_principals.iter().map(|v| v.raw.clone()).collect(),
        records: cluster
            .record_ids
            .iter()
            .filter_map(|id| corpus.get(id))
            .map(|r| RecordSummary {
                id: r.id.clone(),
                title: r.title.clone(),
                venue: r.venue.clone(),
                year: r.year,
                coauthors: r.coauthors().to_vec(),
            })
            .collect(),
    }
}

impl ApiSessionView {
    pub fn new(session: &Session, corpus: &Corpus) -> Self {
        Self {
            id: session.id.clone(),
            query: session.query.raw.clone(),
            state: session.state,
            checkpoint: session.checkpoint(),
            options: session.options().map(|opts| opts.iter().map(|c| option_view(c, corpus)).collect()),
            decisions: session.decisions.clone(),
            result: (session.state == SessionState::Completed).then(|| session.output()),
            error: session.error.clone(),
        }
    }
}
