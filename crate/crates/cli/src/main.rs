//! `namediss`: batch runs, evaluation, ingestion and the review server.
//!
//! Exit status is 0 on success, 1 for configuration problems (bad flags,
//! missing or unreadable input files, invalid thresholds, unusable port) and
//! 2 for problems in the data itself (malformed corpus, a script choosing a
//! cluster that does not exist, unlabeled records under evaluation).

mod config;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use log::info;
use namediss_core::clustering::FixtureError;
use namediss_core::evaluation::{evaluate, Members};
use namediss_core::textmetrics::parse_stopwords;
use namediss_core::{
    ingest_dblp_xml, ingest_jsonl, parse_name, ClusterOutput, ClusterSummary, Corpus, Engine, FeedbackProvider,
    FixtureAffiliations, FixtureSearch, GoldLabeling, OracleProvider, ScriptProvider, SessionConfig, SessionState,
    VenueMap,
};
use namediss_service::{cors_layer, router, AppState};
use serde::Deserialize;
use thiserror::Error;

use config::{ProviderMode, Settings};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

#[derive(Parser)]
#[command(name = "namediss", version, about = "Author name disambiguation over citation records")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Disambiguate one name and write the final clusters as JSON
    Run(Settings),
    /// Score a clusters file against the author_key labels of the corpus
    Eval {
        /// Clusters JSON as written by `run`
        clusters: PathBuf,
        #[command(flatten)]
        settings: Settings,
    },
    /// Serve the review HTTP API on 127.0.0.1
    Serve(Settings),
    /// Validate a corpus (JSON lines or DBLP XML) and write it as JSON lines
    Ingest(Settings),
}

fn fixture_error(what: &str, e: FixtureError) -> CliError {
    CliError::Config(format!("{what}: {e}"))
}

fn load_corpus(path: &Path) -> Result<Corpus, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let parsed =
        if text.trim_start().starts_with('<') { ingest_dblp_xml(&text) } else { ingest_jsonl(text.as_bytes()) };
    parsed.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn session_config(s: &Settings) -> Result<SessionConfig, CliError> {
    let mut config = SessionConfig::default();
    if let Some(path) = &s.venue_map {
        config.venue_map = VenueMap::from_path(path).map_err(|e| fixture_error("--venue-map", e))?;
    }
    if let Some(path) = &s.stopwords {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Config(format!("--stopwords {}: {e}", path.display())))?;
        config.stopwords = parse_stopwords(&text);
    }
    if let Some(t) = s.threshold_affiliation {
        config.thresholds.affiliation_similarity = t;
    }
    if let Some(t) = s.threshold_title {
        config.thresholds.title_similarity = t;
    }
    config.thresholds.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(config)
}

fn build_engine(s: &Settings) -> Result<Engine, CliError> {
    let config = session_config(s)?;
    let corpus = load_corpus(s.require_input()?)?;
    info!("loaded {} records", corpus.len());
    let mut engine = Engine::new(corpus, config);
    if let Some(path) = &s.affiliations {
        let fixture = FixtureAffiliations::from_path(path).map_err(|e| fixture_error("--affiliations", e))?;
        engine = engine.with_resolver(Arc::new(fixture));
    }
    if let Some(path) = &s.search_fixture {
        let fixture = FixtureSearch::from_path(path).map_err(|e| fixture_error("--search-fixture", e))?;
        engine = engine.with_search(Arc::new(fixture));
    }
    Ok(engine)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Config(format!("--output {}: {e}", p.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Config(format!("stdout: {e}"))),
    }
}

fn cmd_run(s: Settings) -> Result<(), CliError> {
    let provider_mode = s.provider.ok_or_else(|| CliError::Config("--provider is required".into()))?;
    if provider_mode == ProviderMode::InteractiveServe {
        return cmd_serve(s);
    }
    let query = s.query.as_deref().ok_or_else(|| CliError::Config("--query is required".into()))?;
    let query = parse_name(query).map_err(|e| CliError::Config(format!("--query {query:?}: {e}")))?;
    let engine = build_engine(&s)?;
    let mut provider: Box<dyn FeedbackProvider> = match provider_mode {
        ProviderMode::Oracle => {
            let key =
                s.gold_key.as_deref().ok_or_else(|| CliError::Config("--provider oracle needs --gold-key".into()))?;
            Box::new(OracleProvider::from_corpus(engine.corpus(), key))
        }
        ProviderMode::Script => {
            let path = s.script.as_ref().ok_or_else(|| CliError::Config("--provider script needs --script".into()))?;
            let text =
                fs::read_to_string(path).map_err(|e| CliError::Config(format!("--script {}: {e}", path.display())))?;
            Box::new(
                ScriptProvider::from_json(&text)
                    .map_err(|e| CliError::Config(format!("--script {}: {e}", path.display())))?,
            )
        }
        ProviderMode::InteractiveServe => unreachable!("handled above"),
    };
    let session = engine.run_with_provider(engine.derived_session_id(&query), query, provider.as_mut());
    if session.state != SessionState::Completed {
        return Err(CliError::Data(format!(
            "session {} ended {}: {}",
            session.id,
            session.state,
            session.error.as_deref().unwrap_or("no detail")
        )));
    }
    write_output(s.output.as_deref(), &session.output().to_json())
}

/// Accepted shapes for predicted clusters.
#[derive(Deserialize)]
#[serde(untagged)]
enum Predicted {
    Output(ClusterOutput),
    Summaries(Vec<ClusterSummary>),
    Lists(Vec<Vec<String>>),
}

fn cmd_eval(clusters: PathBuf, s: Settings) -> Result<(), CliError> {
    let corpus = load_corpus(s.require_input()?)?;
    let text = fs::read_to_string(&clusters).map_err(|e| CliError::Config(format!("{}: {e}", clusters.display())))?;
    let predicted: Predicted =
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", clusters.display())))?;
    let gold = GoldLabeling::from_corpus(&corpus);
    let report = match predicted {
        Predicted::Output(o) => score(&o.clusters, &gold),
        Predicted::Summaries(c) => score(&c, &gold),
        Predicted::Lists(c) => score(&c, &gold),
    }?;
    print!("{}", report.to_table());
    if let Some(path) = &s.output {
        let json = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
        write_output(Some(path), &json)?;
    }
    Ok(())
}

fn score<M: Members>(predicted: &[M], gold: &GoldLabeling) -> Result<namediss_core::EvaluationReport, CliError> {
    evaluate(predicted, gold).map_err(|e| CliError::Data(e.to_string()))
}

fn cmd_ingest(s: Settings) -> Result<(), CliError> {
    let corpus = load_corpus(s.require_input()?)?;
    let mut buf = Vec::new();
    corpus.write_jsonl(&mut buf).map_err(|e| CliError::Data(e.to_string()))?;
    eprintln!("{} records", corpus.len());
    write_output(s.output.as_deref(), &String::from_utf8(buf).expect("JSON is UTF-8"))
}

async fn shutdown_signal() {
    let ctrl_c = tokio::signal::ctrl_c();
    #[cfg(unix)]
    {
        use tokio::signal::unix::{signal, SignalKind};
        let mut term = signal(SignalKind::terminate()).expect("install SIGTERM handler");
        tokio::select! {
            _ = ctrl_c => {},
            _ = term.recv() => {},
        }
    }
    #[cfg(not(unix))]
    {
        let _ = ctrl_c.await;
    }
    eprintln!("shutting down");
}

fn cmd_serve(s: Settings) -> Result<(), CliError> {
    let port = s.port.ok_or_else(|| CliError::Config("--port is required".into()))?;
    if port == 0 {
        return Err(CliError::Config("--port must be between 1 and 65535".into()));
    }
    let engine = build_engine(&s)?;
    let state = match &s.snapshot_dir {
        Some(dir) => AppState::with_snapshot_dir(engine, dir).map_err(|e| CliError::Config(e.to_string()))?,
        None => AppState::new(engine),
    };
    let cors = cors_layer(s.cors_origin.as_deref()).map_err(|e| CliError::Config(e.to_string()))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Config(format!("runtime: {e}")))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(("127.0.0.1", port))
            .await
            .map_err(|e| CliError::Config(format!("cannot listen on port {port}: {e}")))?;
        eprintln!("listening on http://127.0.0.1:{port}");
        namediss_service::serve(listener, router(state, cors), shutdown_signal())
            .await
            .map_err(|e| CliError::Config(format!("server: {e}")))
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(flags) => Settings::resolve(flags).and_then(cmd_run),
        Command::Eval { clusters, settings } => Settings::resolve(settings).and_then(|s| cmd_eval(clusters, s)),
        Command::Serve(flags) => Settings::resolve(flags).and_then(cmd_serve),
        Command::Ingest(flags) => Settings::resolve(flags).and_then(cmd_ingest),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("namediss: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
