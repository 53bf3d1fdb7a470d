//! Synthetic corpora shared by the integration tests.
#![allow(dead_code)]

use namediss_core::{ingest_jsonl, Corpus, SessionConfig};
use serde_json::json;

pub fn corpus_from(records: &[serde_json::Value]) -> Corpus {
    let text: Vec<String> = records.iter().map(|r| r.to_string()).collect();
    ingest_jsonl(text.join("\n").as_bytes()).expect("fixture corpus is valid")
}

const CS_VENUES: [&str; 3] = ["ICWE", "WWW", "CAiSE"];
const PHYS_VENUES: [&str; 3] = ["Phys. Rev. B", "Appl. Phys. Lett.", "Nano Letters"];

pub fn venue_config() -> SessionConfig {
    let mut config = SessionConfig::default();
    for v in CS_VENUES {
        config.venue_map.insert(v, "Computer Science");
    }
    for v in PHYS_VENUES {
        config.venue_map.insert(v, "Physics");
    }
    config
}

/// Two different people published as "M. Imran", ten records each. Within
/// one author the records are chained by co-authors; the two co-author
/// pools and venue sets do not overlap.
pub fn mixed_citation() -> Corpus {
    let cs_coauthors = ["F. Casati", "S. Soi", "F. Daniel", "M. Marchese", "A. Birukou", "V. D'Andrea"];
    let ph_coauthors = ["Q. Zhang", "L. Wang", "H. Kim", "R. Singh", "T. Okafor", "P. Novak"];
    let cs_titles = [
        "Mashups for research evaluation",
        "Reputation of scientists via mashup tools",
        "Web service composition for bibliometrics",
        "Assisted mashup development",
        "Citation analysis with web mashups",
    ];
    let ph_titles = [
        "Band structure of quantum dots",
        "Spin transport in graphene layers",
        "Phonon scattering in nanowires",
        "Optical response of thin films",
        "Magnetic order in layered oxides",
    ];
    let mut records = Vec::new();
    for i in 0..10 {
        records.push(json!({
            "id": format!("cs{i:02}"),
            "title": cs_titles[i % cs_titles.len()],
            "authors": ["M. Imran", cs_coauthors[i % 6], cs_coauthors[(i + 1) % 6]],
            "venue": CS_VENUES[i % 3],
            "year": 2008 + i as i32,
            "author_key": "imran-trento",
        }));
        records.push(json!({
            "id": format!("ph{i:02}"),
            "title": ph_titles[i % ph_titles.len()],
            "authors": ["M. Imran", ph_coauthors[i % 6], ph_coauthors[(i + 1) % 6]],
            "venue": PHYS_VENUES[i % 3],
            "year": 2005 + i as i32,
            "author_key": "imran-physics",
        }));
    }
    corpus_from(&records)
}

/// One author across twelve records under three spellings of the name,
/// chained by co-authors so every record is reachable from every other.
pub fn split_citation() -> Corpus {
    let spellings = ["Muhammad Imran", "M. Imran", "Imran, M."];
    let coauthors = ["F. Casati", "S. Soi", "F. Daniel", "M. Marchese"];
    let records: Vec<serde_json::Value> = (0..12)
        .map(|i| {
            json!({
                "id": format!("r{i:02}"),
                "title": format!("Research evaluation mashups part {i}"),
                "authors": [spellings[i % 3], coauthors[i % 4], coauthors[(i + 1) % 4]],
                "venue": CS_VENUES[i % 3],
                "author_key": "imran-trento",
            })
        })
        .collect();
    corpus_from(&records)
}

use rand::seq::SliceRandom;
use rand::Rng;

pub const PRINCIPAL_VARIANTS: [&str; 6] =
    ["M. Imran", "Muhammad Imran", "Imran, M.", "Malik Imran", "Mohammad Imran", "M. A. Imran"];
pub const COAUTHOR_POOL: [&str; 9] = [
    "F. Casati",
    "Fabio Casati",
    "G. Casati",
    "S. Soi",
    "Stefano Soi",
    "F. Daniel",
    "Q. Zhang",
    "Qiang Zhang",
    "L. Wang",
];
const AFFILIATION_POOL: [&str; 5] = [
    "University of Trento",
    "University of Trento, DISI",
    "DISI, Univ. Trento",
    "MIT",
    "Qatar Computing Research Institute",
];
const TITLE_WORDS: [&str; 12] = [
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
];
const VENUES: [&str; 4] = ["ICWE", "WWW", "Phys. Rev. B", "Nature"];

/// A random corpus of `n` records whose principal authors are all spelling
/// variants around "Imran", with random co-authors, titles, venues,
/// affiliations and publisher URLs.
pub fn random_corpus<R: Rng>(rng: &mut R, n: usize) -> Corpus {
    let records: Vec<serde_json::Value> = (0..n)
        .map(|i| {
            let mut authors = vec![PRINCIPAL_VARIANTS.choose(rng).unwrap().to_string()];
            let k = rng.gen_range(0..=3);
            authors.extend(COAUTHOR_POOL.choose_multiple(rng, k).map(|s| s.to_string()));
            let words = rng.gen_range(1..=4);
            let title: Vec<&str> = (0..words).map(|_| *TITLE_WORDS.choose(rng).unwrap()).collect();
            let mut r = json!({
                "id": format!("r{i:02}"),
                "title": title.join(" "),
                "authors": authors,
                "venue": VENUES.choose(rng).unwrap(),
            });
            if rng.gen_bool(0.5) {
                r["affiliation"] = json!(AFFILIATION_POOL.choose(rng).unwrap());
            } else if rng.gen_bool(0.5) {
                r["publisher_url"] = json!(format!("https://doi.org/10.1/{}", rng.gen_range(0..4)));
            }
            r
        })
        .collect();
    corpus_from(&records)
}
