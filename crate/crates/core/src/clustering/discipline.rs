use std::collections::BTreeMap;

use super::{sort_clusters, Cluster, VenueMap};
use crate::names::{names_compatible, parse_name, NameVariant};
use crate::records::Corpus;

/// Keeps the records whose principal author is compatible with `query` and
/// groups them by discipline: the record's own discipline override first,
/// then the venue map, then the map's default label. An empty result means
/// no record matched.
pub fn layer1_discipline_clusters(corpus: &Corpus, query: &NameVariant, map: &VenueMap) -> Vec<Cluster> {
    let mut groups: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for record in corpus.records() {
        let Ok(principal) = parse_name(record.principal_author()) else {
            continue;
        };
        if !names_compatible(&principal, query) {
            continue;
        }
        let label =
            record.discipline.as_deref().filter(|d| !d.trim().is_empty()).unwrap_or_else(|| map.lookup(&record.venue));
        groups.entry(label).or_default().push(&record.id);
    }
    let mut clusters: Vec<Cluster> =
        groups.into_iter().map(|(label, ids)| Cluster::from_records(ids, label, corpus)).collect();
    sort_clusters(&mut clusters);
    clusters
}
