//! Majority-vote adjudication of three annotators' coreference clusterings.
//!
//! Votes are cast on unordered mention-pair links: a link is accepted when at
//! least two of the three annotators place both spans in one cluster
//! together. Merged clusters are the connected components of the accepted
//! links; mentions with no accepted link are unresolved and dropped (or kept
//! as singletons on request). The merge is invariant under annotator order.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::corpus::{Cluster, Document, MentionSpan};

/// One annotator's clustering of a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationSet {
    pub annotator_id: String,
    pub doc: Document,
}

/// Errors raised by adjudication.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AdjudicateError {
    #[error("majority adjudication needs exactly 3 annotation sets, found {found}")]
    WrongAnnotatorCount { found: usize },
    #[error("annotators '{a}' and '{b}' disagree on the document's tokens or sentences")]
    TokenMismatch { a: String, b: String },
}

/// An unordered mention-pair link, stored with the smaller span first.
pub type Link = (MentionSpan, MentionSpan);

fn link(a: MentionSpan, b: MentionSpan) -> Link {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Vote tallies and span diagnostics from one merge.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AdjudicationReport {
    /// Links all three annotators agreed on.
    pub unanimous: Vec<Link>,
    /// Links accepted two-to-one.
    pub majority: Vec<Link>,
    /// Links proposed by a single annotator, rejected.
    pub rejected: Vec<Link>,
    /// Mentions left without any accepted link.
    pub unresolved: Vec<MentionSpan>,
    /// Span pairs from different annotators whose boundaries differ by one
    /// token — likely the same mention, flagged for review, never merged.
    pub near_misses: Vec<Link>,
}

/// Pairs of spans differing by exactly one boundary token.
fn is_near_miss(a: MentionSpan, b: MentionSpan) -> bool {
    (a.start == b.start && a.end.abs_diff(b.end) == 1)
        || (a.end == b.end && a.start.abs_diff(b.start) == 1)
}

/// Disjoint-set over mention indices.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Merge three annotation sets by majority vote over mention-pair links.
///
/// Returns the merged document (tokens and sentences from the first set,
/// all sets being identical there) plus the vote report. With
/// `keep_singletons`, unresolved mentions survive as singleton clusters;
/// they are dropped otherwise (and listed in the report either way).
pub fn majority_merge(
    annotations: &[AnnotationSet],
    keep_singletons: bool,
) -> Result<(Document, AdjudicationReport), AdjudicateError> {
    if annotations.len() != 3 {
        return Err(AdjudicateError::WrongAnnotatorCount {
            found: annotations.len(),
        });
    }
    let base = &annotations[0];
    for other in &annotations[1..] {
        if !base.doc.same_tokens(&other.doc) || base.doc.sentences != other.doc.sentences {
            return Err(AdjudicateError::TokenMismatch {
                a: base.annotator_id.clone(),
                b: other.annotator_id.clone(),
            });
        }
    }

    // One vote per annotator per link; duplicated pairs inside one
    // annotation (overlapping clusters) still count once.
    let mut votes: HashMap<Link, u8> = HashMap::new();
    let mut all_mentions: BTreeSet<MentionSpan> = BTreeSet::new();
    for annotation in annotations {
        let mut seen: BTreeSet<Link> = BTreeSet::new();
        for cluster in &annotation.doc.clusters {
            all_mentions.extend(cluster.mentions.iter().copied());
            for (i, &a) in cluster.mentions.iter().enumerate() {
                for &b in &cluster.mentions[i + 1..] {
                    seen.insert(link(a, b));
                }
            }
        }
        for l in seen {
            *votes.entry(l).or_insert(0) += 1;
        }
    }

    let mut report = AdjudicationReport::default();
    let mut accepted: Vec<Link> = Vec::new();
    for (&l, &count) in &votes {
        match count {
            3 => report.unanimous.push(l),
            2 => report.majority.push(l),
            _ => report.rejected.push(l),
        }
        if count >= 2 {
            accepted.push(l);
        }
    }
    report.unanimous.sort_unstable();
    report.majority.sort_unstable();
    report.rejected.sort_unstable();

    // Connected components over resolved mentions.
    let resolved: BTreeSet<MentionSpan> = accepted
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .collect();
    let kept: Vec<MentionSpan> = if keep_singletons {
        all_mentions.iter().copied().collect()
    } else {
        resolved.iter().copied().collect()
    };
    let index: BTreeMap<MentionSpan, usize> = kept
        .iter()
        .enumerate()
        .map(|(i, &span)| (span, i))
        .collect();
    let mut components = UnionFind::new(kept.len());
    for &(a, b) in &accepted {
        components.union(index[&a], index[&b]);
    }
    let mut grouped: BTreeMap<usize, Vec<MentionSpan>> = BTreeMap::new();
    for (i, &span) in kept.iter().enumerate() {
        grouped.entry(components.find(i)).or_default().push(span);
    }
    // `kept` is sorted, so component roots ascend with their smallest span.
    let clusters: Vec<Cluster> = grouped
        .into_values()
        .enumerate()
        .map(|(id, mentions)| Cluster::new(id as u32, mentions))
        .collect();

    report.unresolved = all_mentions.difference(&resolved).copied().collect();
    let spans: Vec<MentionSpan> = all_mentions.iter().copied().collect();
    for (i, &a) in spans.iter().enumerate() {
        for &b in &spans[i + 1..] {
            if is_near_miss(a, b) {
                report.near_misses.push(link(a, b));
            }
        }
    }

    let merged = Document {
        doc_id: base.doc.doc_id.clone(),
        part: base.doc.part,
        sentences: base.doc.sentences.clone(),
        tokens: base.doc.tokens.clone(),
        clusters,
    };
    Ok((merged, report))
}
