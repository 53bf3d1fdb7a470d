//! Pairwise clustering scores against gold author labels, plus a
//! per-author / per-cluster breakdown of split and mixed errors.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::Cluster;
use crate::records::Corpus;
use crate::session::ClusterSummary;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("record {0:?} has no gold author label")]
    Unlabeled(String),
    #[error("record {0:?} appears in more than one predicted cluster")]
    DuplicateRecord(String),
}

/// Anything that names a set of record ids.
pub trait Members {
    fn cluster_id(&self) -> String;
    fn member_ids(&self) -> Vec<&str>;
}

impl Members for Cluster {
    fn cluster_id(&self) -> String {
        self.id.clone()
    }
    fn member_ids(&self) -> Vec<&str> {
        self.record_ids.iter().map(String::as_str).collect()
    }
}

impl Members for ClusterSummary {
    fn cluster_id(&self) -> String {
        self.id.clone()
    }
    fn member_ids(&self) -> Vec<&str> {
        self.record_ids.iter().map(String::as_str).collect()
    }
}

impl Members for Vec<String> {
    fn cluster_id(&self) -> String {
        self.iter().min().cloned().unwrap_or_default()
    }
    fn member_ids(&self) -> Vec<&str> {
        self.iter().map(String::as_str).collect()
    }
}

/// Record id to gold author key.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldLabeling(BTreeMap<String, String>);

impl GoldLabeling {
    pub fn new(labels: BTreeMap<String, String>) -> Self {
        Self(labels)
    }

    /// Labels from the `author_key` field; unlabeled records are left out.
    pub fn from_corpus(corpus: &Corpus) -> Self {
        Self(corpus.records().iter().filter_map(|r| r.author_key.clone().map(|k| (r.id.clone(), k))).collect())
    }

    pub fn get(&self, record_id: &str) -> Option<&str> {
        self.0.get(record_id).map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairwiseScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// (cluster index, author key) for every predicted record.
fn assignments<'a, M: Members>(predicted: &'a [M], gold: &'a GoldLabeling) -> Result<Vec<(usize, &'a str)>, EvalError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (c, cluster) in predicted.iter().enumerate() {
        for id in cluster.member_ids() {
            if !seen.insert(id) {
                return Err(EvalError::DuplicateRecord(id.to_string()));
            }
            let author = gold.get(id).ok_or_else(|| EvalError::Unlabeled(id.to_string()))?;
            out.push((c, author));
        }
    }
    Ok(out)
}

fn pairs(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// Precision and recall over unordered record pairs. A ratio whose
/// denominator is zero counts as 1.
pub fn pairwise_scores<M: Members>(predicted: &[M], gold: &GoldLabeling) -> Result<PairwiseScores, EvalError> {
    let assigned = assignments(predicted, gold)?;
    let mut by_cluster: HashMap<usize, usize> = HashMap::new();
    let mut by_author: HashMap<&str, usize> = HashMap::new();
    let mut by_both: HashMap<(usize, &str), usize> = HashMap::new();
    for &(c, a) in &assigned {
        *by_cluster.entry(c).or_default() += 1;
        *by_author.entry(a).or_default() += 1;
        *by_both.entry((c, a)).or_default() += 1;
    }
    let same_cluster: u64 = by_cluster.values().map(|&n| pairs(n)).sum();
    let same_author: u64 = by_author.values().map(|&n| pairs(n)).sum();
    let both: u64 = by_both.values().map(|&n| pairs(n)).sum();

    let precision = ratio(both, same_cluster);
    let recall = ratio(both, same_author);
    let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
    Ok(PairwiseScores { precision, recall, f1 })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorBreakdown {
    pub author_key: String,
    pub records: usize,
    pub clusters: usize,
    pub split_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterBreakdown {
    pub cluster_id: String,
    pub records: usize,
    pub authors: Vec<String>,
    pub mixed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionReport {
    pub authors: Vec<AuthorBreakdown>,
    pub clusters: Vec<ClusterBreakdown>,
}

impl ConfusionReport {
    pub fn mixed_clusters(&self) -> usize {
        self.clusters.iter().filter(|c| c.mixed).count()
    }

    pub fn total_splits(&self) -> usize {
        self.authors.iter().map(|a| a.split_count).sum()
    }
}

/// Split count per gold author (clusters holding its records, minus one)
/// and a mixed flag per predicted cluster (two or more gold authors).
pub fn confusion_report<M: Members>(predicted: &[M], gold: &GoldLabeling) -> Result<ConfusionReport, EvalError> {
    let assigned = assignments(predicted, gold)?;
    let mut author_clusters: BTreeMap<&str, (usize, BTreeSet<usize>)> = BTreeMap::new();
    let mut cluster_authors: Vec<BTreeSet<&str>> = vec![BTreeSet::new(); predicted.len()];
    for &(c, a) in &assigned {
        let entry = author_clusters.entry(a).or_default();
        entry.0 += 1;
        entry.1.insert(c);
        cluster_authors[c].insert(a);
    }
    let authors = author_clusters
        .into_iter()
        .map(|(key, (records, clusters))| AuthorBreakdown {
            author_key: key.to_string(),
            records,
            clusters: clusters.len(),
            split_count: clusters.len() - 1,
        })
        .collect();
    let mut clusters: Vec<ClusterBreakdown> = predicted
        .iter()
        .zip(cluster_authors)
        .map(|(cluster, authors)| ClusterBreakdown {
            cluster_id: cluster.cluster_id(),
            records: cluster.member_ids().len(),
            mixed: authors.len() >= 2,
            authors: authors.into_iter().map(str::to_string).collect(),
        })
        .collect();
    clusters.sort_by(|a, b| a.cluster_id.cmp(&b.cluster_id));
    Ok(ConfusionReport { authors, clusters })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub scores: PairwiseScores,
    pub confusion: ConfusionReport,
}

pub fn evaluate<M: Members>(predicted: &[M], gold: &GoldLabeling) -> Result<EvaluationReport, EvalError> {
    Ok(EvaluationReport { scores: pairwise_scores(predicted, gold)?, confusion: confusion_report(predicted, gold)? })
}

fn table(out: &mut String, header: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |out: &mut String, cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(out, header.to_vec());
    line(out, widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect());
    for row in rows {
        line(out, row.iter().map(String::as_str).collect());
    }
}

impl EvaluationReport {
    /// Aligned-column text rendering.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let s = &self.scores;
        table(
            &mut out,
            &["metric", "value"],
            &[
                vec!["precision".into(), format!("{:.4}", s.precision)],
                vec!["recall".into(), format!("{:.4}", s.recall)],
                vec!["f1".into(), format!("{:.4}", s.f1)],
            ],
        );
        out.push('\n');
        let rows: Vec<Vec<String>> = self
            .confusion
            .authors
            .iter()
            .map(|a| {
                vec![a.author_key.clone(), a.records.to_string(), a.clusters.to_string(), a.split_count.to_string()]
            })
            .collect();
        table(&mut out, &["author", "records", "clusters", "split"], &rows);
        out.push('\n');
        let rows: Vec<Vec<String>> = self
            .confusion
            .clusters
            .iter()
            .map(|c| {
                vec![
                    c.cluster_id.clone(),
                    c.records.to_string(),
                    c.authors.join(","),
                    if c.mixed { "yes".into() } else { "no".into() },
                ]
            })
            .collect();
        table(&mut out, &["cluster", "records", "authors", "mixed"], &rows);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn groups(members: &[&[&str]]) -> Vec<Vec<String>> {
        members.iter().map(|g| g.iter().map(|s| s.to_string()).collect()).collect()
    }

    fn gold(pairs: &[(&str, &str)]) -> GoldLabeling {
        GoldLabeling::new(pairs.iter().map(|(r, a)| (r.to_string(), a.to_string())).collect())
    }

    /// Enumerates every unordered pair.
    fn oracle(predicted: &[Vec<String>], gold: &GoldLabeling) -> (f64, f64) {
        let flat: Vec<(usize, &str)> =
            predicted.iter().enumerate().flat_map(|(c, g)| g.iter().map(move |id| (c, id.as_str()))).collect();
        let (mut sc, mut sa, mut both) = (0u64, 0u64, 0u64);
        for i in 0..flat.len() {
            for j in i + 1..flat.len() {
                let same_c = flat[i].0 == flat[j].0;
                let same_a = gold.get(flat[i].1) == gold.get(flat[j].1);
                sc += u64::from(same_c);
                sa += u64::from(same_a);
                both += u64::from(same_c && same_a);
            }
        }
        let r = |n: u64, d: u64| if d == 0 { 1.0 } else { n as f64 / d as f64 };
        (r(both, sc), r(both, sa))
    }

    #[test]
    fn perfect_prediction() {
        let g = gold(&[("1", "a"), ("2", "a"), ("3", "b"), ("4", "b")]);
        let s = pairwise_scores(&groups(&[&["1", "2"], &["3", "4"]]), &g).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
        let r = confusion_report(&groups(&[&["1", "2"], &["3", "4"]]), &g).unwrap();
        assert_eq!(r.total_splits(), 0);
        assert_eq!(r.mixed_clusters(), 0);
    }

    #[test]
    fn everything_in_one_cluster() {
        let g = gold(&[("1", "a"), ("2", "a"), ("3", "b"), ("4", "b")]);
        let predicted = groups(&[&["1", "2", "3", "4"]]);
        // 6 pairs, 2 of them same-author
        assert_eq!(oracle(&predicted, &g), (2.0 / 6.0, 1.0));
        let s = pairwise_scores(&predicted, &g).unwrap();
        assert!((s.precision - 2.0 / 6.0).abs() < 1e-12);
        assert_eq!(s.recall, 1.0);
        assert!((s.f1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn all_singletons() {
        let g = gold(&[("1", "a"), ("2", "a"), ("3", "b")]);
        let s = pairwise_scores(&groups(&[&["1"], &["2"], &["3"]]), &g).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 0.0, 0.0));
    }

    #[test]
    fn errors() {
        let g = gold(&[("1", "a")]);
        assert_eq!(pairwise_scores(&groups(&[&["1", "2"]]), &g), Err(EvalError::Unlabeled("2".into())));
        assert_eq!(confusion_report(&groups(&[&["1"], &["1"]]), &g), Err(EvalError::DuplicateRecord("1".into())));
    }

    #[test]
    fn split_and_mixed_counts() {
        let g = gold(&[("1", "a"), ("2", "a"), ("3", "a"), ("4", "b")]);
        let r = confusion_report(&groups(&[&["1"], &["2"], &["3", "4"]]), &g).unwrap();
        assert_eq!(r.authors[0], AuthorBreakdown { author_key: "a".into(), records: 3, clusters: 3, split_count: 2 });
        assert_eq!(r.authors[1].split_count, 0);
        assert_eq!(r.mixed_clusters(), 1);
        assert!(r.clusters.iter().find(|c| c.cluster_id == "3").unwrap().mixed);
    }

    #[test]
    fn table_is_aligned() {
        let g = gold(&[("1", "a"), ("2", "b")]);
        let report = evaluate(&groups(&[&["1", "2"]]), &g).unwrap();
        let text = report.to_table();
        assert!(text.contains("precision  0.0000"));
        assert!(text.contains("recall     1.0000"));
        assert!(text.contains("1        2        a,b      yes"));
    }

    fn labeled_partition() -> impl Strategy<Value = (Vec<Vec<String>>, GoldLabeling)> {
        prop::collection::vec((0usize..4, 0usize..3), 1..12).prop_map(|rows| {
            let mut clusters: Vec<Vec<String>> = vec![Vec::new(); 4];
            let mut labels = BTreeMap::new();
            for (i, (c, a)) in rows.into_iter().enumerate() {
                clusters[c].push(format!("r{i}"));
                labels.insert(format!("r{i}"), format!("a{a}"));
            }
            (clusters.into_iter().filter(|c| !c.is_empty()).collect(), GoldLabeling::new(labels))
        })
    }

    proptest! {
        #[test]
        fn matches_pair_enumeration((predicted, gold) in labeled_partition()) {
            let s = pairwise_scores(&predicted, &gold).unwrap();
            let (p, r) = oracle(&predicted, &gold);
            prop_assert!((s.precision - p).abs() < 1e-12);
            prop_assert!((s.recall - r).abs() < 1e-12);
            if s.precision + s.recall > 0.0 {
                prop_assert!(s.f1 >= s.precision.min(s.recall) - 1e-12);
                prop_assert!(s.f1 <= s.precision.max(s.recall) + 1e-12);
            }
        }

        #[test]
        fn permutation_invariant((predicted, gold) in labeled_partition()) {
            let s = pairwise_scores(&predicted, &gold).unwrap();
            let mut shuffled: Vec<Vec<String>> = predicted.iter().rev().cloned().collect();
            for c in &mut shuffled {
                c.reverse();
            }
            prop_assert_eq!(pairwise_scores(&shuffled, &gold).unwrap(), s);
        }
    }
}
