use log::warn;

use super::disjoint_set::DisjointSet;
use super::{principals_compatible, sort_clusters, AffiliationResolver, Cluster, Thresholds};
use crate::records::Corpus;
use crate::textmetrics::similarity;

fn fold_affiliation(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Adds each member record's affiliation to the cluster: the recorded one if
/// present, otherwise whatever the resolver finds behind its publisher URL.
fn collect_affiliations(cluster: &mut Cluster, corpus: &Corpus, resolver: &dyn AffiliationResolver) {
    for record in cluster.record_ids.iter().filter_map(|id| corpus.get(id)) {
        let recorded = record.affiliation.as_deref().map(str::trim).filter(|a| !a.is_empty());
        let found = match (recorded, record.publisher_url.as_deref()) {
            (Some(aff), _) => Some(aff.to_string()),
            (None, Some(url)) => match resolver.resolve(url) {
                Ok(aff) => aff.map(|a| a.trim().to_string()).filter(|a| !a.is_empty()),
                Err(e) => {
                    warn!("affiliation lookup for {url} failed: {e}");
                    None
                }
            },
            (None, None) => None,
        };
        if let Some(aff) = found {
            cluster.affiliations.insert(aff);
        }
    }
}

fn affiliations_match(a: &[String], b: &[String], threshold: f64) -> bool {
    a.iter().any(|x| b.iter().any(|y| similarity(x, y) >= threshold))
}

/// Merges clusters with a close affiliation pair (normalized edit similarity
/// at or above the threshold) and a compatible pair of candidate principals.
/// Merging is closed transitively and repeated on the merged clusters until
/// nothing changes, so running this on its own output is a no-op. Each
/// output cluster's candidate principals are then promoted group-wise, so
/// short variants give way to the fuller names they match.
pub fn layer3_affiliation_merge(
    clusters: Vec<Cluster>,
    corpus: &Corpus,
    resolver: &dyn AffiliationResolver,
    thresholds: &Thresholds,
) -> Vec<Cluster> {
    let mut current = clusters;
    for cluster in &mut current {
        collect_affiliations(cluster, corpus, resolver);
    }

    loop {
        let folded: Vec<Vec<String>> =
            current.iter().map(|c| c.affiliations.iter().map(|a| fold_affiliation(a)).collect()).collect();
        let mut sets = DisjointSet::new(current.len());
        let mut merged_any = false;
        for i in 0..current.len() {
            for j in i + 1..current.len() {
                if affiliations_match(&folded[i], &folded[j], thresholds.affiliation_similarity)
                    && principals_compatible(&current[i], &current[j])
                {
                    merged_any |= sets.union(i, j);
                }
            }
        }
        if !merged_any {
            break;
        }
        let mut slots: Vec<Option<Cluster>> = current.into_iter().map(Some).collect();
        current = sets
            .groups()
            .into_iter()
            .map(|group| {
                let mut members = group.into_iter().map(|i| slots[i].take().expect("each index once"));
                let mut head = members.next().expect("groups are non-empty");
                for other in members {
                    head.absorb(other);
                }
                head
            })
            .collect();
    }

    for cluster in &mut current {
        cluster.promote_principals();
    }
    sort_clusters(&mut current);
    current
}
