//! Synthetic corpora sized for benchmarking.

use namediss_core::{ingest_jsonl, parse_name, Corpus, Engine, OracleProvider, Session, SessionConfig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VARIANTS: [&str; 4] = ["M. Imran", "Muhammad Imran", "Imran, M.", "Malik Imran"];
const VENUES: [(&str, &str); 4] =
    [("ICWE", "CS"), ("WWW", "CS"), ("Phys. Rev. B", "Physics"), ("Nano Lett.", "Physics")];
const AFFILIATIONS: [&str; 4] = ["University of Trento", "University of Trento, DISI", "QCRI, Doha", "MIT"];
const WORDS: [&str; 16] = [
    "mashup",
    "research",
    "evaluation",
    "quantum",
    "graphene",
    "crisis",
    "tweets",
    "services",
    "composition",
    "spin",
    "reputation",
    "citations",
    "wells",
    "dots",
    "classification",
    "layers",
];

/// `n` records under spellings of one name, drawn from `authors` distinct
/// people who each have their own co-author pool.
pub fn synthetic_corpus(n: usize, authors: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lines: Vec<String> = (0..n)
        .map(|i| {
            let person = rng.gen_range(0..authors);
            let mut names = vec![VARIANTS.choose(&mut rng).unwrap().to_string()];
            for _ in 0..rng.gen_range(1..=3) {
                names.push(format!("C{}. Coauthor{person}x{}", rng.gen_range(0..3), rng.gen_range(0..6)));
            }
            let title: Vec<&str> = (0..rng.gen_range(3..8)).map(|_| *WORDS.choose(&mut rng).unwrap()).collect();
            serde_json::json!({
                "id": format!("r{i:06}"),
                "title": title.join(" "),
                "authors": names,
                "venue": VENUES[person % VENUES.len()].0,
                "affiliation": AFFILIATIONS[person % AFFILIATIONS.len()],
                "author_key": format!("p{person}"),
            })
            .to_string()
        })
        .collect();
    ingest_jsonl(lines.join("\n").as_bytes()).expect("synthetic corpus is valid")
}

pub fn venue_config() -> SessionConfig {
    let mut config = SessionConfig::default();
    for (venue, discipline) in VENUES {
        config.venue_map.insert(venue, discipline);
    }
    config
}

/// One oracle-driven session for person `p0`.
pub fn oracle_session(engine: &Engine) -> Session {
    let query = parse_name("M. Imran").expect("valid name");
    let mut oracle = OracleProvider::from_corpus(engine.corpus(), "p0");
    engine.run_with_provider("bench", query, &mut oracle)
}
