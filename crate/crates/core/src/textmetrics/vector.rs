use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::porter::stem_to_fixpoint;

/// Stemmed term frequencies over a set of titles.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KeywordVector {
    terms: BTreeMap<String, u32>,
}

impl KeywordVector {
    pub fn terms(&self) -> &BTreeMap<String, u32> {
        &self.terms
    }

    pub fn get(&self, term: &str) -> u32 {
        self.terms.get(term).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds the frequencies of `other`; the result equals the vector built
    /// over both title sets.
    pub fn merge(&mut self, other: &KeywordVector) {
        for (term, n) in &other.terms {
            *self.terms.entry(term.clone()).or_insert(0) += n;
        }
    }

    /// The `k` most frequent terms, ties broken alphabetically.
    pub fn top_terms(&self, k: usize) -> Vec<&str> {
        let mut ranked: Vec<(&String, &u32)> = self.terms.iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
        ranked.into_iter().take(k).map(|(t, _)| t.as_str()).collect()
    }

    pub fn from_counts<I, S>(counts: I) -> Self
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        let terms = counts.into_iter().filter(|(_, n)| *n > 0).map(|(t, n)| (t.into(), n)).collect();
        Self { terms }
    }
}

/// Lowercased alphanumeric runs.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()).map(str::to_lowercase)
}

/// Stemmed terms of `text` after dropping stop-words and one-letter tokens.
pub fn terms<'a>(text: &'a str, stopwords: &'a BTreeSet<String>) -> impl Iterator<Item = String> + 'a {
    tokenize(text)
        .filter(|t| t.chars().count() >= 2 && !stopwords.contains(t))
        .map(|t| stem_to_fixpoint(&t))
        .filter(|t| !stopwords.contains(t))
}

pub fn build_vector<S: AsRef<str>>(titles: &[S], stopwords: &BTreeSet<String>) -> KeywordVector {
    let mut terms = BTreeMap::new();
    for title in titles {
        for term in self::terms(title.as_ref(), stopwords) {
            *terms.entry(term).or_insert(0) += 1;
        }
    }
    KeywordVector { terms }
}

/// Cosine similarity; zero when either vector is empty.
pub fn vector_similarity(u: &KeywordVector, v: &KeywordVector) -> f64 {
    if u.is_empty() || v.is_empty() {
        return 0.0;
    }
    let (small, large) = if u.len() <= v.len() { (u, v) } else { (v, u) };
    let dot: f64 = small.terms.iter().map(|(t, &n)| f64::from(n) * f64::from(large.get(t))).sum();
    let norm = |x: &KeywordVector| x.terms.values().map(|&n| f64::from(n).powi(2)).sum::<f64>().sqrt();
    (dot / (norm(u) * norm(v))).clamp(0.0, 1.0)
}
