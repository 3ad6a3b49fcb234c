//! Data model for coreference-annotated documents.
//!
//! A [`Document`] is a pre-tokenized text partitioned into sentences, together
//! with coreference [`Cluster`]s of mention spans. Spans are half-open token
//! ranges at document level. [`validate`] reports invariant violations as data
//! rather than failures; [`stats`] summarizes a whole [`Corpus`].

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// A single token. The document-level ordinal is its position in
/// [`Document::tokens`]; `extra` carries any opaque payload columns from the
/// source file so round trips lose nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub extra: Vec<String>,
}

impl Token {
    pub fn new(text: impl Into<String>) -> Self {
        Token {
            text: text.into(),
            extra: Vec::new(),
        }
    }
}

/// A half-open token range `[start, end)` at document level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MentionSpan {
    pub start: usize,
    pub end: usize,
}

impl MentionSpan {
    pub fn new(start: usize, end: usize) -> Self {
        MentionSpan { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// Token indices covered by the span.
    pub fn indices(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

impl fmt::Display for MentionSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end)
    }
}

/// An entity: the set of mentions that corefer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub id: u32,
    pub mentions: Vec<MentionSpan>,
}

impl Cluster {
    /// Builds a cluster with mentions sorted by `(start, end)` and deduplicated.
    pub fn new(id: u32, mut mentions: Vec<MentionSpan>) -> Self {
        mentions.sort();
        mentions.dedup();
        Cluster { id, mentions }
    }

    /// Unordered within-cluster mention pairs: `|c|·(|c|−1)/2`.
    pub fn link_count(&self) -> u64 {
        let n = self.mentions.len() as u64;
        n * n.saturating_sub(1) / 2
    }
}

/// One coreference-annotated document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    /// Part number from the source header; purely for round trips.
    pub part: u32,
    /// Sentence boundaries as half-open token ranges partitioning the tokens.
    pub sentences: Vec<MentionSpan>,
    pub tokens: Vec<Token>,
    pub clusters: Vec<Cluster>,
}

impl Document {
    pub fn token_texts(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.text.as_str())
    }

    /// Index of the sentence containing token `idx`, if any.
    pub fn sentence_of(&self, idx: usize) -> Option<usize> {
        self.sentences
            .iter()
            .position(|s| s.start <= idx && idx < s.end)
    }

    /// True when the two documents carry the identical token text sequence.
    pub fn same_tokens(&self, other: &Document) -> bool {
        self.tokens.len() == other.tokens.len()
            && self
                .token_texts()
                .zip(other.token_texts())
                .all(|(a, b)| a == b)
    }
}

/// An ordered list of documents with unique ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub documents: Vec<Document>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Self {
        Corpus { documents }
    }

    pub fn get(&self, doc_id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.doc_id == doc_id)
    }
}

/// Aggregate counts over a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_docs: usize,
    pub n_tokens: usize,
    pub n_clusters: usize,
    /// Pairwise within-cluster mention pairs, summed over all clusters.
    pub n_links: u64,
    /// Distinct lowercased token texts.
    pub vocab_size: usize,
}

/// A violated document invariant, with enough location to find it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Sentence ranges do not partition `[0, token count)` contiguously.
    SentencesNotPartition { detail: String },
    /// A token text is empty or contains whitespace.
    BadTokenText { index: usize },
    /// A mention span is empty or escapes the token range.
    SpanOutOfRange { cluster: u32, span: MentionSpan },
    /// A mention span crosses a sentence boundary.
    CrossSentenceSpan { cluster: u32, span: MentionSpan },
    /// The same span occurs twice within one cluster.
    DuplicateSpanInCluster { cluster: u32, span: MentionSpan },
    /// One span is claimed by more than one cluster.
    SpanInMultipleClusters { span: MentionSpan, clusters: Vec<u32> },
    /// Two clusters share the same id.
    DuplicateClusterId { id: u32 },
    /// Mentions within a cluster are not sorted by `(start, end)`.
    UnsortedMentions { cluster: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SentencesNotPartition { detail } => {
                write!(f, "sentence ranges do not partition the tokens: {detail}")
            }
            Violation::BadTokenText { index } => {
                write!(f, "token {index} is empty or contains whitespace")
            }
            Violation::SpanOutOfRange { cluster, span } => {
                write!(f, "cluster {cluster}: span {span} out of token range")
            }
            Violation::CrossSentenceSpan { cluster, span } => {
                write!(f, "cluster {cluster}: span {span} crosses a sentence boundary")
            }
            Violation::DuplicateSpanInCluster { cluster, span } => {
                write!(f, "cluster {cluster}: duplicate span {span}")
            }
            Violation::SpanInMultipleClusters { span, clusters } => {
                write!(f, "span {span} appears in clusters {clusters:?}")
            }
            Violation::DuplicateClusterId { id } => write!(f, "duplicate cluster id {id}"),
            Violation::UnsortedMentions { cluster } => {
                write!(f, "cluster {cluster}: mentions not sorted by (start, end)")
            }
        }
    }
}

/// Checks every [`Document`] invariant; an empty list means the document is
/// well formed. Violations are data, not errors.
pub fn validate(doc: &Document) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = doc.tokens.len();

    let mut expected_start = 0usize;
    for s in &doc.sentences {
        if s.start != expected_start || s.is_empty() {
            out.push(Violation::SentencesNotPartition {
                detail: format!("range {s} does not continue at {expected_start}"),
            });
            break;
        }
        expected_start = s.end;
    }
    if out.is_empty() && expected_start != n {
        out.push(Violation::SentencesNotPartition {
            detail: format!("ranges cover [0,{expected_start}) of {n} tokens"),
        });
    }

    for (i, t) in doc.tokens.iter().enumerate() {
        if t.text.is_empty() || t.text.chars().any(char::is_whitespace) {
            out.push(Violation::BadTokenText { index: i });
        }
    }

    let mut seen_ids = HashSet::new();
    for c in &doc.clusters {
        if !seen_ids.insert(c.id) {
            out.push(Violation::DuplicateClusterId { id: c.id });
        }
        if !c.mentions.windows(2).all(|w| w[0] <= w[1]) {
            out.push(Violation::UnsortedMentions { cluster: c.id });
        }
        let mut seen_spans = HashSet::new();
        for &m in &c.mentions {
            if !seen_spans.insert(m) {
                out.push(Violation::DuplicateSpanInCluster { cluster: c.id, span: m });
            }
            if m.is_empty() || m.end > n {
                out.push(Violation::SpanOutOfRange { cluster: c.id, span: m });
                continue;
            }
            let first = doc.sentence_of(m.start);
            let last = doc.sentence_of(m.end - 1);
            if first.is_none() || first != last {
                out.push(Violation::CrossSentenceSpan { cluster: c.id, span: m });
            }
        }
    }

    let mut owners: BTreeMap<MentionSpan, Vec<u32>> = BTreeMap::new();
    for c in &doc.clusters {
        for &m in c.mentions.iter().collect::<HashSet<_>>() {
            owners.entry(m).or_default().push(c.id);
        }
    }
    for (span, mut clusters) in owners {
        if clusters.len() > 1 {
            clusters.sort_unstable();
            out.push(Violation::SpanInMultipleClusters { span, clusters });
        }
    }

    out
}

/// Counts documents, tokens, clusters, pairwise links, and vocabulary size.
pub fn stats(corpus: &Corpus) -> CorpusStats {
    let mut vocab = HashSet::new();
    let mut n_tokens = 0usize;
    let mut n_clusters = 0usize;
    let mut n_links = 0u64;
    for doc in &corpus.documents {
        n_tokens += doc.tokens.len();
        n_clusters += doc.clusters.len();
        for c in &doc.clusters {
            n_links += c.link_count();
        }
        for t in &doc.tokens {
            vocab.insert(t.text.to_lowercase());
        }
    }
    CorpusStats {
        n_docs: corpus.documents.len(),
        n_tokens,
        n_clusters,
        n_links,
        vocab_size: vocab.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(tokens: &[&str], sentences: &[(usize, usize)], clusters: &[(u32, &[(usize, usize)])]) -> Document {
        Document {
            doc_id: "t".into(),
            part: 0,
            sentences: sentences.iter().map(|&(s, e)| MentionSpan::new(s, e)).collect(),
            tokens: tokens.iter().map(|t| Token::new(*t)).collect(),
            clusters: clusters
                .iter()
                .map(|&(id, spans)| {
                    Cluster::new(id, spans.iter().map(|&(s, e)| MentionSpan::new(s, e)).collect())
                })
                .collect(),
        }
    }

    #[test]
    fn well_formed_doc_has_no_violations() {
        let d = doc(
            &["John", "fell", ".", "He", "cried", "."],
            &[(0, 3), (3, 6)],
            &[(0, &[(0, 1), (3, 4)])],
        );
        assert_eq!(validate(&d), vec![]);
    }

    #[test]
    fn cross_sentence_span_is_reported() {
        let d = doc(
            &["John", "fell", "He", "cried"],
            &[(0, 2), (2, 4)],
            &[(0, &[(1, 3)])],
        );
        assert_eq!(
            validate(&d),
            vec![Violation::CrossSentenceSpan { cluster: 0, span: MentionSpan::new(1, 3) }]
        );
    }

    #[test]
    fn span_in_two_clusters_is_reported() {
        // Constructed by direct field manipulation: the same span claimed twice.
        let mut d = doc(
            &["John", "fell"],
            &[(0, 2)],
            &[(0, &[(0, 1)]), (1, &[(1, 2)])],
        );
        d.clusters[1].mentions = vec![MentionSpan::new(0, 1)];
        assert_eq!(
            validate(&d),
            vec![Violation::SpanInMultipleClusters {
                span: MentionSpan::new(0, 1),
                clusters: vec![0, 1]
            }]
        );
    }

    #[test]
    fn duplicate_span_and_unsorted_mentions_are_reported() {
        let mut d = doc(&["a", "b", "c"], &[(0, 3)], &[(0, &[(0, 1), (1, 2)])]);
        d.clusters[0].mentions = vec![MentionSpan::new(1, 2), MentionSpan::new(1, 2), MentionSpan::new(0, 1)];
        let v = validate(&d);
        assert!(v.contains(&Violation::UnsortedMentions { cluster: 0 }));
        assert!(v.contains(&Violation::DuplicateSpanInCluster { cluster: 0, span: MentionSpan::new(1, 2) }));
    }

    #[test]
    fn stats_on_empty_corpus_is_all_zeros() {
        let s = stats(&Corpus::default());
        assert_eq!(
            s,
            CorpusStats { n_docs: 0, n_tokens: 0, n_clusters: 0, n_links: 0, vocab_size: 0 }
        );
    }

    #[test]
    fn stats_counts_pairwise_links() {
        // One cluster of 3 mentions: the pairs are (m1,m2),(m1,m3),(m2,m3) = 3.
        let d1 = doc(
            &["a", "b", "c"],
            &[(0, 3)],
            &[(0, &[(0, 1), (1, 2), (2, 3)])],
        );
        assert_eq!(stats(&Corpus::new(vec![d1])).n_links, 3);

        // Clusters of sizes 2 and 1: one pair plus none.
        let d2 = doc(
            &["a", "b", "c"],
            &[(0, 3)],
            &[(0, &[(0, 1), (1, 2)]), (1, &[(2, 3)])],
        );
        assert_eq!(stats(&Corpus::new(vec![d2])).n_links, 1);
    }

    #[test]
    fn stats_vocab_is_case_folded() {
        let d = doc(&["The", "the", "THE", "cat"], &[(0, 4)], &[]);
        assert_eq!(stats(&Corpus::new(vec![d])).vocab_size, 2);
    }

    #[test]
    fn sentence_partition_gaps_are_reported() {
        let d = doc(&["a", "b", "c"], &[(0, 1), (2, 3)], &[]);
        assert!(matches!(validate(&d)[0], Violation::SentencesNotPartition { .. }));
    }
}
