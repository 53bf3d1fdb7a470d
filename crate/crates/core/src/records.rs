//! Citation records and corpus ingestion.
//!
//! JSONL is the canonical interchange format: one object per line with the
//! required keys `id`, `title` and `authors`. DBLP XML is supported as an
//! importer (see [`ingest_dblp_xml`]) and always produces the same record
//! shape, so a DBLP import can be exported to JSONL and re-read unchanged.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use quick_xml::events::Event;
use quick_xml::Reader;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: malformed record: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
    #[error("record {0:?} has no authors")]
    EmptyAuthors(String),
    #[error("record {0:?} has an empty title")]
    EmptyTitle(String),
    #[error("malformed XML at byte {offset}: {message}")]
    Xml { offset: u64, message: String },
    #[error("publication {key:?} is missing {field}")]
    MissingField { key: String, field: &'static str },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Dblp,
    #[default]
    Jsonl,
    Other,
}

/// One bibliographic item. `authors[0]` is the principal author; the rest
/// are co-authors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationRecord {
    pub id: String,
    pub title: String,
    pub authors: Vec<String>,
    #[serde(default)]
    pub venue: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affiliation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub publisher_url: Option<String>,
    /// Ground-truth discipline override, consulted before the venue map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discipline: Option<String>,
    /// Gold author label; only the evaluation module reads it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author_key: Option<String>,
    #[serde(default)]
    pub source: Source,
}

impl CitationRecord {
    pub fn principal_author(&self) -> &str {
        &self.authors[0]
    }

    pub fn coauthors(&self) -> &[String] {
        &self.authors[1..]
    }
}

/// An immutable, indexed collection of records.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    records: Vec<CitationRecord>,
    index: HashMap<String, usize>,
}

impl Corpus {
    /// Builds a corpus, rejecting duplicate ids, empty titles and empty
    /// author lists.
    pub fn new(records: Vec<CitationRecord>) -> Result<Self, IngestError> {
        let mut index = HashMap::with_capacity(records.len());
        for (pos, record) in records.iter().enumerate() {
            validate(record)?;
            if index.insert(record.id.clone(), pos).is_some() {
                return Err(IngestError::DuplicateId(record.id.clone()));
            }
        }
        Ok(Self { records, index })
    }

    pub fn records(&self) -> &[CitationRecord] {
        &self.records
    }

    pub fn get(&self, id: &str) -> Option<&CitationRecord> {
        self.index.get(id).map(|&pos| &self.records[pos])
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Writes the corpus as JSONL, one record per line, in corpus order.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<(), IngestError> {
        for record in &self.records {
            let line = serde_json::to_string(record).expect("records always serialize");
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

fn validate(record: &CitationRecord) -> Result<(), IngestError> {
    if record.authors.is_empty() {
        return Err(IngestError::EmptyAuthors(record.id.clone()));
    }
    if record.title.trim().is_empty() {
        return Err(IngestError::EmptyTitle(record.id.clone()));
    }
    Ok(())
}

/// Reads line-oriented JSON records. Blank lines are skipped; line numbers in
/// errors are 1-based.
pub fn ingest_jsonl<R: BufRead>(stream: R) -> Result<Corpus, IngestError> {
    let mut records = Vec::new();
    for (n, line) in stream.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: CitationRecord = serde_json::from_str(&line)
            .map_err(|e| IngestError::MalformedLine { line: n + 1, message: e.to_string() })?;
        records.push(record);
    }
    Corpus::new(records)
}

const PUBLICATION_ELEMENTS: &[&[u8]] = &[b"article", b"inproceedings"];

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Author,
    Title,
    Venue,
    Year,
    Ee,
}

impl Field {
    fn from_tag(name: &[u8]) -> Option<Self> {
        match name {
            b"author" => Some(Field::Author),
            b"title" => Some(Field::Title),
            b"journal" | b"booktitle" => Some(Field::Venue),
            b"year" => Some(Field::Year),
            b"ee" => Some(Field::Ee),
            _ => None,
        }
    }
}

#[derive(Default)]
struct Pending {
    key: String,
    authors: Vec<String>,
    title: Option<String>,
    venue: Option<String>,
    year: Option<i32>,
    ee: Option<String>,
}

impl Pending {
    fn finish(self) -> Result<CitationRecord, IngestError> {
        let title = self
            .title
            .filter(|t| !t.trim().is_empty())
            .ok_or_else(|| IngestError::MissingField { key: self.key.clone(), field: "title" })?;
        if self.authors.is_empty() {
            return Err(IngestError::MissingField { key: self.key, field: "author" });
        }
        Ok(CitationRecord {
            id: self.key,
            title,
            authors: self.authors,
            venue: self.venue.unwrap_or_default(),
            year: self.year,
            affiliation: None,
            publisher_url: self.ee,
            discipline: None,
            author_key: None,
            source: Source::Dblp,
        })
    }
}

/// Imports `article` and `inproceedings` elements from a DBLP-style XML
/// document. Other elements are skipped. Inline markup inside fields (for
/// example `<i>` in titles) contributes its text.
pub fn ingest_dblp_xml(document: &str) -> Result<Corpus, IngestError> {
    let mut reader = Reader::from_str(document);
    let xml_err = |reader: &Reader<&[u8]>, e: &dyn std::fmt::Display| IngestError::Xml {
        offset: reader.error_position(),
        message: e.to_string(),
    };

    let mut records = Vec::new();
    let mut current: Option<Pending> = None;
    let mut publication_depth = 0usize;
    let mut field: Option<(Field, usize)> = None;
    let mut depth = 0usize;
    let mut text = String::new();

    loop {
        let event = reader
            .read_event()
            .map_err(|e| IngestError::Xml { offset: reader.error_position(), message: e.to_string() })?;
        match event {
            Event::Start(start) => {
                depth += 1;
                let name = start.name();
                if current.is_none() && PUBLICATION_ELEMENTS.contains(&name.as_ref()) {
                    let mut pending = Pending::default();
                    for attr in start.attributes() {
                        let attr = attr.map_err(|e| xml_err(&reader, &e))?;
                        if attr.key.as_ref() == b"key" {
                            pending.key = attr.unescape_value().map_err(|e| xml_err(&reader, &e))?.into_owned();
                        }
                    }
                    current = Some(pending);
                    publication_depth = depth;
                } else if current.is_some() && field.is_none() {
                    if let Some(f) = Field::from_tag(name.as_ref()) {
                        field = Some((f, depth));
                        text.clear();
                    }
                }
            }
            Event::Empty(start) => {
                if current.is_none() && PUBLICATION_ELEMENTS.contains(&start.name().as_ref()) {
                    let key = start
                        .try_get_attribute("key")
                        .ok()
                        .flatten()
                        .and_then(|a| a.unescape_value().ok().map(|v| v.into_owned()))
                        .unwrap_or_default();
                    return Err(IngestError::MissingField { key, field: "title" });
                }
            }
            Event::Text(t) => {
                if field.is_some() {
                    text.push_str(&t.unescape().map_err(|e| xml_err(&reader, &e))?);
                }
            }
            Event::CData(t) => {
                if field.is_some() {
                    text.push_str(&String::from_utf8_lossy(&t));
                }
            }
            Event::End(_) => {
                if let Some((f, d)) = field {
                    if d == depth {
                        let pending = current.as_mut().expect("field implies publication");
                        let value = collapse_whitespace(&text);
                        match f {
                            Field::Author => pending.authors.push(value),
                            Field::Title => pending.title = Some(value),
                            Field::Venue => pending.venue = Some(value),
                            Field::Year => pending.year = value.parse().ok(),
                            Field::Ee => {
                                if pending.ee.is_none() {
                                    pending.ee = Some(value);
                                }
                            }
                        }
                        field = None;
                    }
                }
                if current.is_some() && depth == publication_depth {
                    let pending = current.take().expect("checked above");
                    records.push(pending.finish()?);
                }
                depth = depth.saturating_sub(1);
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if depth != 0 {
        return Err(IngestError::Xml {
            offset: reader.buffer_position(),
            message: "unexpected end of document".into(),
        });
    }
    Corpus::new(records)
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jsonl(s: &str) -> Result<Corpus, IngestError> {
        ingest_jsonl(s.as_bytes())
    }

    #[test]
    fn jsonl_maps_fields() {
        let corpus = jsonl(r#"{"id":"r1","title":"A","authors":["M. Imran","F. Casati"],"venue":"ICWE"}"#).unwrap();
        assert_eq!(corpus.len(), 1);
        let r = &corpus.records()[0];
        assert_eq!(r.principal_author(), "M. Imran");
        assert_eq!(r.coauthors(), ["F. Casati".to_string()]);
        assert_eq!(r.venue, "ICWE");
        assert_eq!(r.year, None);
        assert!(corpus.get("r1").is_some());
    }

    #[test]
    fn jsonl_empty_stream() {
        assert!(jsonl("").unwrap().is_empty());
        assert!(jsonl("\n  \n").unwrap().is_empty());
    }

    #[test]
    fn jsonl_duplicate_id() {
        let err = jsonl(
            "{\"id\":\"r1\",\"title\":\"A\",\"authors\":[\"X\"]}\n{\"id\":\"r1\",\"title\":\"B\",\"authors\":[\"Y\"]}",
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::DuplicateId(ref id) if id == "r1"), "{err}");
    }

    #[test]
    fn jsonl_errors_name_line_and_id() {
        let err = jsonl("{\"id\":\"a\",\"title\":\"A\",\"authors\":[\"X\"]}\n\n{not json").unwrap_err();
        assert!(matches!(err, IngestError::MalformedLine { line: 3, .. }), "{err}");

        let err = jsonl(r#"{"id":"e","title":"A","authors":[]}"#).unwrap_err();
        assert!(matches!(err, IngestError::EmptyAuthors(ref id) if id == "e"));

        let err = jsonl(r#"{"id":"m","title":"A"}"#).unwrap_err();
        assert!(matches!(err, IngestError::MalformedLine { line: 1, .. }));
    }

    #[test]
    fn dblp_inproceedings() {
        let doc = r#"<?xml version="1.0"?>
<dblp>
  <inproceedings key="conf/x/Imran12" mdate="2012-01-01">
    <author>Muhammad Imran</author>
    <author>Fabio Casati</author>
    <title>Mashups for <i>research</i> evaluation.</title>
    <booktitle>ICWE</booktitle>
    <year>2012</year>
    <ee>https://doi.org/10.1000/x</ee>
    <ee>https://example.org/second</ee>
  </inproceedings>
</dblp>"#;
        let corpus = ingest_dblp_xml(doc).unwrap();
        assert_eq!(corpus.len(), 1);
        let r = &corpus.records()[0];
        assert_eq!(r.id, "conf/x/Imran12");
        assert_eq!(r.venue, "ICWE");
        assert_eq!(r.authors, vec!["Muhammad Imran", "Fabio Casati"]);
        assert_eq!(r.title, "Mashups for research evaluation.");
        assert_eq!(r.year, Some(2012));
        assert_eq!(r.publisher_url.as_deref(), Some("https://doi.org/10.1000/x"));
        assert_eq!(r.source, Source::Dblp);
    }

    #[test]
    fn dblp_ignores_other_elements() {
        let doc = r#"<dblp><proceedings key="conf/x/2012"><title>Proc</title><editor>E</editor></proceedings></dblp>"#;
        assert!(ingest_dblp_xml(doc).unwrap().is_empty());
    }

    #[test]
    fn dblp_missing_title_names_key() {
        let doc = r#"<dblp><article key="journals/j/A1"><author>A B</author><journal>J</journal></article></dblp>"#;
        let err = ingest_dblp_xml(doc).unwrap_err();
        assert!(
            matches!(err, IngestError::MissingField { ref key, field: "title" } if key == "journals/j/A1"),
            "{err}"
        );
        let doc = r#"<dblp><article key="journals/j/A2"><title>T</title></article></dblp>"#;
        assert!(matches!(ingest_dblp_xml(doc).unwrap_err(), IngestError::MissingField { field: "author", .. }));
    }

    #[test]
    fn dblp_decodes_standard_and_numeric_entities() {
        let doc = r#"<dblp><article key="k&amp;1"><author>J&#252;rgen M&#xFC;ller</author><title>A &lt;b&gt; &quot;c&quot; &apos;d&apos;</title><journal>J</journal></article></dblp>"#;
        let corpus = ingest_dblp_xml(doc).unwrap();
        let r = &corpus.records()[0];
        assert_eq!(r.id, "k&1");
        assert_eq!(r.authors[0], "Jürgen Müller");
        assert_eq!(r.title, "A <b> \"c\" 'd'");
    }

    #[test]
    fn dblp_malformed_reports_offset() {
        let doc = "<dblp><article key=\"a\"><title>T</journal></article></dblp>";
        match ingest_dblp_xml(doc).unwrap_err() {
            IngestError::Xml { offset, .. } => assert!(offset > 0),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn jsonl_round_trip_preserves_records() {
        let doc = r#"<dblp><article key="a"><author>A B</author><author>C D</author><title>T</title><journal>J</journal><year>1999</year></article><inproceedings key="b"><author>E F</author><title>U</title><booktitle>B</booktitle></inproceedings></dblp>"#;
        let corpus = ingest_dblp_xml(doc).unwrap();
        let mut buf = Vec::new();
        corpus.write_jsonl(&mut buf).unwrap();
        let again = ingest_jsonl(buf.as_slice()).unwrap();
        assert_eq!(again.records(), corpus.records());
    }
}
