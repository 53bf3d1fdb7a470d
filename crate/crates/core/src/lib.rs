//! Author name disambiguation over bibliographic citation records.
//!
//! Given a corpus and a queried name such as `M. Imran`, the engine groups
//! the records that name could refer to into one cluster per real person.
//! See [`clustering`] for the layers and [`session`] for the interactive
//! driver around them.
//!
//! ```
//! use namediss_core::{ingest_jsonl, parse_name, Engine, OracleProvider, SessionConfig};
//!
//! let corpus = ingest_jsonl(
//!     r#"{"id":"1","title":"Web mashups","authors":["M. Imran","F. Casati"],"author_key":"a"}
//! {"id":"2","title":"Mashup tools","authors":["Muhammad Imran","F. Casati"],"author_key":"a"}"#
//!         .as_bytes(),
//! )
//! .unwrap();
//! let mut oracle = OracleProvider::from_corpus(&corpus, "a");
//! let engine = Engine::new(corpus, SessionConfig::default());
//! let query = parse_name("M. Imran").unwrap();
//! let session = engine.run_with_provider(engine.derived_session_id(&query), query, &mut oracle);
//! let out = session.output();
//! assert_eq!(out.clusters.len(), 1);
//! assert_eq!(out.clusters[0].principal, ["Muhammad Imran"]);
//! ```

pub mod clustering;
pub mod evaluation;
pub mod names;
pub mod records;
pub mod session;
pub mod textmetrics;

pub use clustering::{
    AffiliationResolver, Cluster, ConfigError, FixtureAffiliations, FixtureSearch, NoAffiliations, NoSearch,
    SearchProvider, SearchResult, Thresholds, VenueMap,
};
pub use evaluation::{confusion_report, evaluate, pairwise_scores, EvaluationReport, GoldLabeling, PairwiseScores};
pub use names::{names_compatible, parse_name, NameError, NameVariant};
pub use records::{ingest_dblp_xml, ingest_jsonl, CitationRecord, Corpus, IngestError, Source};
pub use session::{
    Checkpoint, ClusterOutput, ClusterSummary, Engine, FeedbackProvider, OracleProvider, ScriptProvider, ScriptStep,
    Session, SessionConfig, SessionError, SessionState,
};
