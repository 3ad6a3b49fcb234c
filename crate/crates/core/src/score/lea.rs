//! The LEA coreference metric, in exact rational arithmetic.
//!
//! Each cluster is weighted by its size (its importance) and scored by the
//! fraction of its links resolved in the other clustering:
//!
//! recall = Σ_k |k| · (Σ_r link(k∩r) / link(k)) / Σ_k |k|
//!
//! over gold clusters k and system clusters r, where link(e) counts the
//! within-entity links of e. Entities of size ≥ 2 have |e|·(|e|−1)/2 links; a
//! singleton carries one self-link, resolved only by the identical singleton
//! in the other clustering. Precision is the same sum with the roles of gold
//! and system swapped, so the duality precision(g,s) = recall(s,g) holds
//! exactly by construction.

use std::collections::HashMap;

use num::{BigRational, Zero};

use crate::corpus::{Cluster, Corpus, Document, MentionSpan};
use crate::exec;
use crate::score::{ScoreError, ScoreReport};

fn big(n: u64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Weighted resolved-link sum of `clusters` against `response`:
/// (Σ_k |k| · resolved(k)/link(k), Σ_k |k|).
fn resolved_side(clusters: &[Cluster], response: &[Cluster]) -> (BigRational, BigRational) {
    // Span -> indices of response clusters containing it. Well-formed
    // clusterings have one entry per span, but duplicates stay countable.
    let mut span_owner: HashMap<MentionSpan, Vec<usize>> = HashMap::new();
    for (idx, cluster) in response.iter().enumerate() {
        for &span in &cluster.mentions {
            span_owner.entry(span).or_default().push(idx);
        }
    }

    let mut num = BigRational::zero();
    let mut den = BigRational::zero();
    for cluster in clusters {
        let size = cluster.mentions.len() as u64;
        if size == 0 {
            continue;
        }
        let weight = big(size);
        let resolved = if size == 1 {
            // Self-link: resolved iff the identical singleton exists.
            let span = cluster.mentions[0];
            let hit = span_owner
                .get(&span)
                .is_some_and(|owners| owners.iter().any(|&r| response[r].mentions == [span]));
            big(u64::from(hit))
        } else {
            // Σ_r C(|k∩r|, 2) / C(|k|, 2)
            let mut overlap: HashMap<usize, u64> = HashMap::new();
            for span in &cluster.mentions {
                for &owner in span_owner.get(span).into_iter().flatten() {
                    *overlap.entry(owner).or_insert(0) += 1;
                }
            }
            let resolved_links: u64 = overlap.values().map(|&n| n * (n - 1) / 2).sum();
            big(resolved_links) / big(cluster.link_count())
        };
        num += &weight * resolved;
        den += weight;
    }
    (num, den)
}

/// LEA between a gold and a system document.
pub fn lea(gold: &Document, system: &Document) -> Result<ScoreReport, ScoreError> {
    if !gold.same_tokens(system) {
        return Err(ScoreError::TokenMismatch {
            id: gold.doc_id.clone(),
        });
    }
    let (recall_num, recall_den) = resolved_side(&gold.clusters, &system.clusters);
    let (precision_num, precision_den) = resolved_side(&system.clusters, &gold.clusters);
    Ok(ScoreReport::from_parts(
        recall_num,
        recall_den,
        precision_num,
        precision_den,
    ))
}

/// Corpus-level LEA: documents paired by id, parts summed (micro-average) in
/// gold document order.
pub fn corpus_lea(gold: &Corpus, system: &Corpus) -> Result<ScoreReport, ScoreError> {
    for doc in &system.documents {
        if gold.get(&doc.doc_id).is_none() {
            return Err(ScoreError::MissingDocument {
                id: doc.doc_id.clone(),
            });
        }
    }
    let reports = exec::map(&gold.documents, |doc| match system.get(&doc.doc_id) {
        Some(sys) => lea(doc, sys),
        None => Err(ScoreError::MissingDocument {
            id: doc.doc_id.clone(),
        }),
    });
    let mut total = ScoreReport::zero();
    for report in reports {
        total.merge(&report?);
    }
    Ok(total)
}
