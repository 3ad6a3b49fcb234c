//! Token edit plans and span remapping.
//!
//! Every text transformation is expressed as a per-token [`EditPlan`]: each
//! original token is kept, retexted, spliced into zero or more new tokens, or
//! deleted. Applying a plan rebuilds the token stream and remaps sentence
//! boundaries and mention spans through a [`SpanRemap`], so cluster structure
//! survives edits that change the token count.

use crate::corpus::{Cluster, Document, MentionSpan, Token};

/// Edit applied to one original token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Edit {
    /// Keep the token unchanged.
    Keep,
    /// Replace the text, keeping the token's extra columns.
    Retext(String),
    /// Replace the token with zero or more new tokens.
    Splice(Vec<Token>),
    /// Remove the token.
    Delete,
}

/// A whole-document edit: one [`Edit`] per original token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditPlan {
    edits: Vec<Edit>,
}

impl EditPlan {
    /// A plan that keeps every one of `len` tokens.
    pub fn identity(len: usize) -> EditPlan {
        EditPlan {
            edits: vec![Edit::Keep; len],
        }
    }

    pub fn len(&self) -> usize {
        self.edits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }

    /// Replace the text of token `idx`, keeping its extra columns.
    pub fn retext(&mut self, idx: usize, text: impl Into<String>) {
        self.edits[idx] = Edit::Retext(text.into());
    }

    /// Replace token `idx` with `tokens` (possibly empty).
    pub fn splice(&mut self, idx: usize, tokens: Vec<Token>) {
        self.edits[idx] = Edit::Splice(tokens);
    }

    /// Delete token `idx`.
    pub fn delete(&mut self, idx: usize) {
        self.edits[idx] = Edit::Delete;
    }

    pub fn edit(&self, idx: usize) -> &Edit {
        &self.edits[idx]
    }

    /// True when no token is changed.
    pub fn is_identity(&self) -> bool {
        self.edits.iter().all(|e| matches!(e, Edit::Keep))
    }

    /// Number of tokens the edit of `idx` produces.
    fn out_len(&self, idx: usize) -> usize {
        match &self.edits[idx] {
            Edit::Keep | Edit::Retext(_) => 1,
            Edit::Splice(tokens) => tokens.len(),
            Edit::Delete => 0,
        }
    }
}

/// Mapping from original token indices to post-edit indices.
///
/// `offset(i)` is the new index of the first token produced by original token
/// `i`; spans remap as `[offset(start), offset(end))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanRemap {
    offsets: Vec<usize>,
}

impl SpanRemap {
    /// Build the remap for `plan`.
    pub fn from_plan(plan: &EditPlan) -> SpanRemap {
        let mut offsets = Vec::with_capacity(plan.len() + 1);
        let mut next = 0usize;
        for idx in 0..plan.len() {
            offsets.push(next);
            next += plan.out_len(idx);
        }
        offsets.push(next);
        SpanRemap { offsets }
    }

    /// Total number of tokens after the edit.
    pub fn new_len(&self) -> usize {
        *self.offsets.last().expect("offsets always has a last entry")
    }

    /// New index range covered by the original span, or `None` when every
    /// token inside it was deleted.
    pub fn remap_span(&self, span: MentionSpan) -> Option<MentionSpan> {
        let start = self.offsets[span.start];
        let end = self.offsets[span.end];
        (start < end).then(|| MentionSpan::new(start, end))
    }
}

/// Errors raised while applying an edit plan.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RemapError {
    /// A mention span lost all of its tokens.
    #[error("mention {span} of cluster {cluster} has no tokens left after the edit")]
    EmptyRemappedSpan { cluster: u32, span: MentionSpan },
}

/// Result of applying an [`EditPlan`] to a document.
#[derive(Debug, Clone)]
pub struct RemappedDocument {
    pub document: Document,
    pub remap: SpanRemap,
    /// Mentions dropped because their spans emptied (cluster id, original
    /// span). Non-empty only when drops are allowed.
    pub dropped: Vec<(u32, MentionSpan)>,
}

/// Apply `plan` to `doc`, rebuilding tokens, sentences and clusters.
///
/// Sentences that lose all tokens are removed. A mention span that loses all
/// tokens is an [`RemapError::EmptyRemappedSpan`] unless `allow_drop` is set,
/// in which case the mention is dropped (and its cluster too, if it empties).
pub fn apply_plan(
    doc: &Document,
    plan: &EditPlan,
    allow_drop: bool,
) -> Result<RemappedDocument, RemapError> {
    assert_eq!(
        plan.len(),
        doc.tokens.len(),
        "edit plan length must match the document's token count"
    );
    let remap = SpanRemap::from_plan(plan);
    let mut tokens = Vec::with_capacity(remap.new_len());
    for (idx, token) in doc.tokens.iter().enumerate() {
        match plan.edit(idx) {
            Edit::Keep => tokens.push(token.clone()),
            Edit::Retext(text) => tokens.push(Token {
                text: text.clone(),
                extra: token.extra.clone(),
            }),
            Edit::Splice(new_tokens) => tokens.extend(new_tokens.iter().cloned()),
            Edit::Delete => {}
        }
    }

    let sentences = doc
        .sentences
        .iter()
        .filter_map(|&s| remap.remap_span(s))
        .collect();

    let mut dropped = Vec::new();
    let mut clusters = Vec::new();
    for cluster in &doc.clusters {
        let mut mentions = Vec::with_capacity(cluster.mentions.len());
        for &span in &cluster.mentions {
            match remap.remap_span(span) {
                Some(new_span) => mentions.push(new_span),
                None if allow_drop => dropped.push((cluster.id, span)),
                None => {
                    return Err(RemapError::EmptyRemappedSpan {
                        cluster: cluster.id,
                        span,
                    })
                }
            }
        }
        if !mentions.is_empty() || cluster.mentions.is_empty() {
            clusters.push(Cluster::new(cluster.id, mentions));
        }
    }

    Ok(RemappedDocument {
        document: Document {
            doc_id: doc.doc_id.clone(),
            part: doc.part,
            sentences,
            tokens,
            clusters,
        },
        remap,
        dropped,
    })
}
