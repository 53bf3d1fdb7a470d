use std::collections::BTreeSet;

use log::warn;

use super::{principals_compatible, sort_clusters, Cluster, ProviderError, SearchProvider, Thresholds};
use crate::records::Corpus;
use crate::textmetrics::{build_vector, terms, tokenize, vector_similarity};

/// Organic results inspected per homepage query.
pub const HOMEPAGE_RESULT_LIMIT: usize = 10;

/// Sets each cluster's keyword vector from its member titles.
pub fn prepare_vectors(mut clusters: Vec<Cluster>, corpus: &Corpus, stopwords: &BTreeSet<String>) -> Vec<Cluster> {
    for cluster in &mut clusters {
        let titles: Vec<&str> =
            cluster.record_ids.iter().filter_map(|id| corpus.get(id)).map(|r| r.title.as_str()).collect();
        cluster.vector = build_vector(&titles, stopwords);
    }
    clusters
}

fn absorb_all(mut principal: Cluster, absorbed: Vec<Cluster>) -> Cluster {
    for other in absorbed {
        principal.absorb(other);
    }
    principal.promote_principals();
    principal
}

/// Absorbs every other cluster whose title vector is at least
/// `title_similarity` close to the principal's and whose candidate
/// principals are compatible with the principal's. All similarities are
/// taken against the principal vector as it was on entry; the merged vector
/// is the sum of the absorbed ones.
pub fn layer4_title_merge(
    principal: Cluster,
    others: Vec<Cluster>,
    thresholds: &Thresholds,
) -> (Cluster, Vec<Cluster>) {
    let mut scored: Vec<(f64, Cluster)> =
        others.into_iter().map(|c| (vector_similarity(&principal.vector, &c.vector), c)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.id.cmp(&b.1.id)));

    let mut absorbed = Vec::new();
    let mut remaining = Vec::new();
    for (score, cluster) in scored {
        if score >= thresholds.title_similarity && principals_compatible(&principal, &cluster) {
            absorbed.push(cluster);
        } else {
            remaining.push(cluster);
        }
    }
    sort_clusters(&mut remaining);
    (absorb_all(principal, absorbed), remaining)
}

/// Drops the scheme and trailing slashes.
pub fn normalize_url(url: &str) -> String {
    let url = url.trim();
    let rest = match url.find("://") {
        Some(pos) => &url[pos + 3..],
        None => url,
    };
    rest.trim_end_matches('/').to_string()
}

/// Looks for the cluster's homepage among the first ten results for
/// "<name> homepage". A result qualifies when its title or snippet contains
/// the word "homepage", the searched name, and at least the configured
/// fraction of the cluster's top keywords. Returns the normalized URL of the
/// first qualifying result.
pub fn find_homepage(
    cluster: &Cluster,
    search: &dyn SearchProvider,
    thresholds: &Thresholds,
) -> Result<Option<String>, ProviderError> {
    let Some(name) = cluster.display_name() else {
        return Ok(None);
    };
    let keywords = cluster.vector.top_terms(thresholds.homepage_top_keywords);
    if keywords.is_empty() {
        return Ok(None);
    }
    let needed = thresholds.homepage_keyword_fraction * keywords.len() as f64;
    let name_lower = name.raw.to_lowercase();
    let no_stopwords = BTreeSet::new();

    let results = search.search(&format!("{} homepage", name.raw))?;
    for result in results.iter().take(HOMEPAGE_RESULT_LIMIT) {
        let text = format!("{} {}", result.title, result.snippet);
        if !tokenize(&text).any(|t| t == "homepage") {
            continue;
        }
        if !text.to_lowercase().contains(&name_lower) {
            continue;
        }
        let present: BTreeSet<String> = terms(&text, &no_stopwords).collect();
        let hits = keywords.iter().filter(|k| present.contains(**k)).count();
        if hits as f64 >= needed {
            return Ok(Some(normalize_url(&result.url)));
        }
    }
    Ok(None)
}

/// Absorbs every other cluster whose homepage is the principal's homepage.
/// Without a principal homepage nothing changes. Any search failure turns
/// the whole step into a no-op.
pub fn layer4_homepage_merge(
    principal: Cluster,
    others: Vec<Cluster>,
    search: &dyn SearchProvider,
    thresholds: &Thresholds,
) -> (Cluster, Vec<Cluster>) {
    let homepages: Result<Vec<Option<String>>, ProviderError> =
        std::iter::once(&principal).chain(&others).map(|c| find_homepage(c, search, thresholds)).collect();
    let homepages = match homepages {
        Ok(h) => h,
        Err(e) => {
            warn!("homepage search skipped: {e}");
            return (principal, others);
        }
    };
    let Some(target) = homepages[0].clone() else {
        return (principal, others);
    };

    let mut absorbed = Vec::new();
    let mut remaining = Vec::new();
    for (cluster, homepage) in others.into_iter().zip(&homepages[1..]) {
        if homepage.as_deref() == Some(target.as_str()) {
            absorbed.push(cluster);
        } else {
            remaining.push(cluster);
        }
    }
    if absorbed.is_empty() {
        return (principal, remaining);
    }
    sort_clusters(&mut remaining);
    (absorb_all(principal, absorbed), remaining)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{FixtureSearch, SearchResult};
    use crate::names::parse_name;
    use crate::textmetrics::KeywordVector;

    fn cluster(id: &str, names: &[&str], vector: &[(&str, u32)]) -> Cluster {
        Cluster {
            id: id.to_string(),
            record_ids: [id.to_string()].into(),
            discipline: "CS".into(),
            candidate_principals: names.iter().map(|n| parse_name(n).unwrap()).collect(),
            affiliations: Default::default(),
            vector: KeywordVector::from_counts(vector.iter().map(|(t, n)| (*t, *n))),
        }
    }

    #[test]
    fn prepare_vectors_over_titles() {
        let corpus = crate::records::ingest_jsonl(
            "{\"id\":\"a\",\"title\":\"Mashup tools\",\"authors\":[\"M. Imran\"]}\n{\"id\":\"b\",\"title\":\"The mashups\",\"authors\":[\"M. Imran\"]}\n{\"id\":\"c\",\"title\":\"the of\",\"authors\":[\"M. Imran\"]}".as_bytes(),
        )
        .unwrap();
        let stop: BTreeSet<String> = ["the", "of"].iter().map(|s| s.to_string()).collect();
        let out = prepare_vectors(
            vec![Cluster::from_records(["a", "b"], "CS", &corpus), Cluster::from_records(["c"], "CS", &corpus)],
            &corpus,
            &stop,
        );
        assert!(out[0].vector.get("mashup") >= 2);
        assert!(out[1].vector.is_empty());
    }

    #[test]
    fn title_merge_rules() {
        let principal = cluster("p", &["Muhammad Imran"], &[("mashup", 3), ("web", 1)]);
        let same = cluster("s", &["M. Imran"], &[("mashup", 3), ("web", 1)]);
        let disjoint = cluster("d", &["M. Imran"], &[("quantum", 2)]);
        let stranger = cluster("x", &["Malik Imran"], &[("mashup", 3), ("web", 1)]);
        let (merged, rest) = layer4_title_merge(principal, vec![stranger, disjoint, same], &Thresholds::default());
        assert_eq!(merged.record_ids.iter().collect::<Vec<_>>(), ["p", "s"]);
        assert_eq!(merged.vector.get("mashup"), 6);
        assert_eq!(merged.candidate_principals.len(), 1);
        assert_eq!(merged.candidate_principals[0].raw, "Muhammad Imran");
        assert_eq!(rest.iter().map(|c| c.id.as_str()).collect::<Vec<_>>(), ["d", "x"]);
    }

    #[test]
    fn title_merge_does_not_refresh_principal_vector() {
        // b only resembles the principal after a is absorbed
        let principal = cluster("p", &["M. Imran"], &[("alpha", 1)]);
        let a = cluster("a", &["M. Imran"], &[("alpha", 1), ("beta", 1)]);
        let b = cluster("b", &["M. Imran"], &[("beta", 1)]);
        let (merged, rest) = layer4_title_merge(principal, vec![a, b], &Thresholds::default());
        assert_eq!(merged.record_ids.len(), 2);
        assert_eq!(rest.len(), 1);
        assert_eq!(merged.id, "a");
    }

    fn hit(url: &str, title: &str, snippet: &str) -> SearchResult {
        SearchResult { title: title.into(), url: url.into(), snippet: snippet.into() }
    }

    #[test]
    fn url_normalization() {
        assert_eq!(normalize_url("https://example.org/~imran/"), "example.org/~imran");
        assert_eq!(normalize_url("http://example.org/~imran"), "example.org/~imran");
        assert_eq!(normalize_url("example.org//"), "example.org");
    }

    #[test]
    fn homepage_merge_on_same_url() {
        let principal = cluster("p", &["Muhammad Imran"], &[("mashup", 3), ("research", 2)]);
        let other = cluster("o", &["M. Imran"], &[("mashup", 1), ("evaluation", 1)]);
        let unrelated = cluster("u", &["Malik Imran"], &[("physics", 1)]);
        let mut search = FixtureSearch::default();
        search.insert(
            "Muhammad Imran homepage",
            vec![hit("https://disi.unitn.it/~imran/", "Muhammad Imran homepage", "mashup research tools")],
        );
        search.insert(
            "M. Imran homepage",
            vec![hit("http://disi.unitn.it/~imran", "M. Imran - Homepage", "mashup and evaluation")],
        );
        search.insert(
            "Malik Imran homepage",
            vec![hit("https://physics.example/malik", "Malik Imran homepage", "physics")],
        );
        let (merged, rest) = layer4_homepage_merge(principal, vec![other, unrelated], &search, &Thresholds::default());
        assert_eq!(merged.record_ids.iter().collect::<Vec<_>>(), ["o", "p"]);
        assert_eq!(rest.len(), 1);
        assert_eq!(rest[0].id, "u");
    }

    #[test]
    fn homepage_requires_keyword_name_and_vocabulary() {
        let c = cluster("p", &["Muhammad Imran"], &[("mashup", 3), ("research", 2)]);
        let t = Thresholds::default();
        let check = |result: SearchResult| {
            let mut search = FixtureSearch::default();
            search.insert("Muhammad Imran homepage", vec![result]);
            find_homepage(&c, &search, &t).unwrap()
        };
        assert_eq!(check(hit("http://a/", "Muhammad Imran", "mashup research")), None);
        assert_eq!(check(hit("http://a/", "homepage", "mashup research")), None);
        assert_eq!(check(hit("http://a/", "Muhammad Imran homepage", "cooking")), None);
        // one of two keywords meets a 0.5 fraction
        assert_eq!(check(hit("http://a/", "Muhammad Imran homepage", "mashups")).as_deref(), Some("a"));
    }

    #[test]
    fn homepage_beyond_tenth_result_ignored() {
        let principal = cluster("p", &["Muhammad Imran"], &[("mashup", 1)]);
        let mut results: Vec<SearchResult> = (0..10).map(|i| hit(&format!("http://junk/{i}"), "junk", "")).collect();
        results.push(hit("http://good/", "Muhammad Imran homepage", "mashup"));
        let mut search = FixtureSearch::default();
        search.insert("Muhammad Imran homepage", results);
        assert_eq!(find_homepage(&principal, &search, &Thresholds::default()).unwrap(), None);

        let other = cluster("o", &["M. Imran"], &[("mashup", 1)]);
        search.insert("M. Imran homepage", vec![hit("http://good/", "M. Imran homepage", "mashup")]);
        let (merged, rest) =
            layer4_homepage_merge(principal.clone(), vec![other.clone()], &search, &Thresholds::default());
        assert_eq!(merged, principal);
        assert_eq!(rest, vec![other]);
    }

    struct Down;
    impl SearchProvider for Down {
        fn search(&self, _: &str) -> Result<Vec<SearchResult>, ProviderError> {
            Err(ProviderError::Unavailable("offline".into()))
        }
    }

    #[test]
    fn unavailable_search_is_a_no_op() {
        let principal = cluster("p", &["Muhammad Imran"], &[("mashup", 1)]);
        let other = cluster("o", &["M. Imran"], &[("mashup", 1)]);
        let (merged, rest) =
            layer4_homepage_merge(principal.clone(), vec![other.clone()], &Down, &Thresholds::default());
        assert_eq!(merged, principal);
        assert_eq!(rest, vec![other]);
    }
}
