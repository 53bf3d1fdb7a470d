use std::collections::BTreeMap;

use super::disjoint_set::DisjointSet;
use super::{sort_clusters, Cluster};
use crate::names::{names_compatible, parse_name, NameVariant};
use crate::records::Corpus;

/// Splits a cluster into the connected components of the graph linking two
/// records when some co-author of one is name-compatible with some
/// co-author of the other. Records without co-authors end up alone.
pub fn layer2_coauthor_split(cluster: &Cluster, corpus: &Corpus) -> Vec<Cluster> {
    let ids: Vec<&String> = cluster.record_ids.iter().collect();

    // co-author variants bucketed by surname; only same-surname names can match
    let mut by_surname: BTreeMap<String, Vec<(usize, NameVariant)>> = BTreeMap::new();
    for (idx, id) in ids.iter().enumerate() {
        let Some(record) = corpus.get(id) else { continue };
        for raw in record.coauthors() {
            if let Ok(v) = parse_name(raw) {
                by_surname.entry(v.surname.clone()).or_default().push((idx, v));
            }
        }
    }

    let mut components = DisjointSet::new(ids.len());
    for bucket in by_surname.values() {
        for (i, (ra, va)) in bucket.iter().enumerate() {
            for (rb, vb) in &bucket[i + 1..] {
                if ra != rb && names_compatible(va, vb) {
                    components.union(*ra, *rb);
                }
            }
        }
    }

    let mut out: Vec<Cluster> = components
        .groups()
        .into_iter()
        .map(|group| {
            Cluster::from_records(group.into_iter().map(|i| ids[i].clone()), cluster.discipline.clone(), corpus)
        })
        .collect();
    sort_clusters(&mut out);
    out
}
