//! Slice reports: recall over subsets of gold clusters.
//!
//! The built-in slices split gold clusters by the kind of pronoun they
//! contain (binary he/she versus neopronouns). Recall decomposes over gold
//! clusters, so each slice gets its own recall against the full system
//! response; precision does not decompose this way and is reported only for
//! the all-clusters slice.

use std::collections::HashMap;

use num::{BigRational, Zero};

use crate::corpus::{Cluster, Corpus, Document};
use crate::lexicon::{classify_token, GenderClass, GenderLexicon, TokenCategory};
use crate::score::lea::lea;
use crate::score::{ScoreError, ScoreReport};

/// Pronoun-based kind of a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClusterKind {
    /// Contains a masculine or feminine pronoun and no neopronoun.
    Binary,
    /// Contains a neopronoun (possibly alongside binary pronouns).
    Neo,
    /// No pronoun, or only pronouns outside both groups (singular they).
    Other,
}

/// Classify a cluster by the pronouns inside its mentions. A cluster with
/// both binary pronouns and neopronouns counts as [`ClusterKind::Neo`]: the
/// neopronoun is the phenomenon the slice isolates.
pub fn cluster_kind(doc: &Document, cluster: &Cluster, lex: &GenderLexicon) -> ClusterKind {
    let mut has_binary = false;
    let mut has_neo = false;
    for span in &cluster.mentions {
        for idx in span.indices() {
            let Some(info) = classify_token(&doc.tokens[idx].text, lex) else {
                continue;
            };
            if info.category != TokenCategory::Pronoun {
                continue;
            }
            match info.gender {
                Some(GenderClass::Masculine | GenderClass::Feminine) => has_binary = true,
                Some(class) if class.is_neo() => has_neo = true,
                _ => {}
            }
        }
    }
    if has_neo {
        ClusterKind::Neo
    } else if has_binary {
        ClusterKind::Binary
    } else {
        ClusterKind::Other
    }
}

/// A slicing strategy: a total predicate over gold clusters.
#[derive(Debug, Clone, Copy)]
pub enum Slicer {
    /// Every gold cluster.
    All,
    /// Clusters of kind [`ClusterKind::Binary`].
    BinaryPronounClusters,
    /// Clusters of kind [`ClusterKind::Neo`].
    NeopronounClusters,
    /// User-supplied predicate.
    Custom(fn(&Document, &Cluster) -> bool),
}

impl Slicer {
    pub fn name(&self) -> &'static str {
        match self {
            Slicer::All => "all",
            Slicer::BinaryPronounClusters => "binary",
            Slicer::NeopronounClusters => "neo",
            Slicer::Custom(_) => "custom",
        }
    }

    fn selects(&self, doc: &Document, cluster: &Cluster, lex: &GenderLexicon) -> bool {
        match self {
            Slicer::All => true,
            Slicer::BinaryPronounClusters => {
                cluster_kind(doc, cluster, lex) == ClusterKind::Binary
            }
            Slicer::NeopronounClusters => cluster_kind(doc, cluster, lex) == ClusterKind::Neo,
            Slicer::Custom(pred) => pred(doc, cluster),
        }
    }
}

/// The slices to report on, in report order.
#[derive(Debug, Clone)]
pub struct SliceSpec {
    pub slicers: Vec<Slicer>,
}

impl SliceSpec {
    /// The default report: all clusters, binary clusters, neopronoun
    /// clusters.
    pub fn standard() -> SliceSpec {
        SliceSpec {
            slicers: vec![
                Slicer::All,
                Slicer::BinaryPronounClusters,
                Slicer::NeopronounClusters,
            ],
        }
    }

    /// Parse a comma-separated slice list such as `"binary,neo"`.
    pub fn parse(text: &str) -> Option<SliceSpec> {
        let slicers = text
            .split(',')
            .filter(|part| !part.trim().is_empty())
            .map(|part| match part.trim().to_lowercase().as_str() {
                "all" => Some(Slicer::All),
                "binary" => Some(Slicer::BinaryPronounClusters),
                "neo" => Some(Slicer::NeopronounClusters),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(SliceSpec { slicers })
    }
}

/// Score of one slice. Recall covers the slice's gold clusters against the
/// full system response; the exact parts are retained. An absent slice (no
/// gold clusters selected) has a zero recall denominator and
/// [`SliceScore::recall`] returns `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceScore {
    pub name: String,
    pub n_gold_clusters: usize,
    pub recall_num: BigRational,
    pub recall_den: BigRational,
    /// Full precision/recall report; present only for [`Slicer::All`],
    /// where precision is well-defined.
    pub full: Option<ScoreReport>,
}

impl SliceScore {
    fn absent(name: String) -> SliceScore {
        SliceScore {
            name,
            n_gold_clusters: 0,
            recall_num: BigRational::zero(),
            recall_den: BigRational::zero(),
            full: None,
        }
    }

    /// Exact recall, or `None` when the slice selected no gold clusters.
    pub fn recall(&self) -> Option<BigRational> {
        (!self.recall_den.is_zero()).then(|| &self.recall_num / &self.recall_den)
    }

    fn merge(&mut self, other: &SliceScore) {
        self.n_gold_clusters += other.n_gold_clusters;
        self.recall_num += &other.recall_num;
        self.recall_den += &other.recall_den;
        match (&mut self.full, &other.full) {
            (Some(mine), Some(theirs)) => mine.merge(theirs),
            (None, Some(theirs)) => self.full = Some(theirs.clone()),
            _ => {}
        }
    }
}

/// Slice a gold document's clusters into a restricted document, keeping the
/// token sequence.
fn restrict(doc: &Document, slicer: &Slicer, lex: &GenderLexicon) -> Document {
    Document {
        doc_id: doc.doc_id.clone(),
        part: doc.part,
        sentences: doc.sentences.clone(),
        tokens: doc.tokens.clone(),
        clusters: doc
            .clusters
            .iter()
            .filter(|c| slicer.selects(doc, c, lex))
            .cloned()
            .collect(),
    }
}

/// Per-slice scores for one gold/system document pair, in slicer order.
pub fn score_slices(
    gold: &Document,
    system: &Document,
    spec: &SliceSpec,
    lex: &GenderLexicon,
) -> Result<Vec<SliceScore>, ScoreError> {
    spec.slicers
        .iter()
        .map(|slicer| {
            let sliced = restrict(gold, slicer, lex);
            let report = lea(&sliced, system)?;
            let (num, den) = report.recall_parts();
            Ok(SliceScore {
                name: slicer.name().to_string(),
                n_gold_clusters: sliced.clusters.len(),
                recall_num: num.clone(),
                recall_den: den.clone(),
                full: matches!(slicer, Slicer::All).then_some(report),
            })
        })
        .collect()
}

/// Corpus-level slice scores: documents paired by id, slice parts summed in
/// gold document order.
pub fn corpus_slices(
    gold: &Corpus,
    system: &Corpus,
    spec: &SliceSpec,
    lex: &GenderLexicon,
) -> Result<Vec<SliceScore>, ScoreError> {
    for doc in &system.documents {
        if gold.get(&doc.doc_id).is_none() {
            return Err(ScoreError::MissingDocument {
                id: doc.doc_id.clone(),
            });
        }
    }
    let mut totals: Vec<SliceScore> = spec
        .slicers
        .iter()
        .map(|s| SliceScore::absent(s.name().to_string()))
        .collect();
    let mut by_name: HashMap<&str, usize> = HashMap::new();
    for (idx, slicer) in spec.slicers.iter().enumerate() {
        by_name.insert(slicer.name(), idx);
    }
    for doc in &gold.documents {
        let system_doc = system.get(&doc.doc_id).ok_or_else(|| {
            ScoreError::MissingDocument {
                id: doc.doc_id.clone(),
            }
        })?;
        for score in score_slices(doc, system_doc, spec, lex)? {
            let idx = by_name[score.name.as_str()];
            totals[idx].merge(&score);
        }
    }
    Ok(totals)
}
