//! CoNLL-2012-style column format: parsing and byte-deterministic serialization.
//!
//! The canonical columns are document id, part, token index within the
//! sentence, token text, then any number of opaque payload columns, with the
//! coreference column last. Sentences are separated by blank lines; each
//! document sits between a `#begin document (<id>); part <nnn>` header and an
//! `#end document` footer.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::corpus::{Cluster, Corpus, Document, MentionSpan, Token};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    /// A coref marker that never matched: an open without a close, a close
    /// without an open, or a malformed marker.
    #[error("line {line}: unbalanced coref marker for cluster {cluster}")]
    UnbalancedBracket { line: usize, cluster: u32 },
    #[error("line {line}: expected at least {min} columns, found {found}")]
    BadColumnCount { line: usize, min: usize, found: usize },
    #[error("duplicate document id {id:?}")]
    DuplicateDocId { id: String },
    #[error("line {line}: malformed document header or unexpected content")]
    MalformedHeader { line: usize },
    #[error("document {id:?} is missing its '#end document' footer")]
    MissingFooter { id: String },
}

const MIN_COLUMNS: usize = 5;

/// One scanned coref-column marker.
enum Marker {
    Open(u32),
    Close(u32),
    Single(u32),
}

/// Scans a coref column such as `(0`, `0)`, `(0)`, `(0(1`, or `(0|(1`.
/// Both `|`-separated and concatenated marker runs are accepted.
fn scan_coref_column(col: &str, line: usize) -> Result<Vec<Marker>, ParseError> {
    if col == "-" || col == "_" {
        return Ok(Vec::new());
    }
    let mut markers = Vec::new();
    let mut chars = col.chars().peekable();
    let bad = |cluster| ParseError::UnbalancedBracket { line, cluster };
    while let Some(&c) = chars.peek() {
        match c {
            '|' => {
                chars.next();
            }
            '(' => {
                chars.next();
                let mut id = String::new();
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    id.push(*d);
                    chars.next();
                }
                let id: u32 = id.parse().map_err(|_| bad(0))?;
                if chars.peek() == Some(&')') {
                    chars.next();
                    markers.push(Marker::Single(id));
                } else {
                    markers.push(Marker::Open(id));
                }
            }
            d if d.is_ascii_digit() => {
                let mut id = String::new();
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    id.push(*d);
                    chars.next();
                }
                let id: u32 = id.parse().map_err(|_| bad(0))?;
                if chars.next() != Some(')') {
                    return Err(bad(id));
                }
                markers.push(Marker::Close(id));
            }
            _ => return Err(bad(0)),
        }
    }
    Ok(markers)
}

/// Parses the header line, returning `(doc_id, part)`.
fn parse_header(trimmed: &str, line: usize) -> Result<(String, u32), ParseError> {
    let err = || ParseError::MalformedHeader { line };
    let rest = trimmed.strip_prefix("#begin document (").ok_or_else(err)?;
    let sep = rest.rfind("); part ").ok_or_else(err)?;
    let id = &rest[..sep];
    let part: u32 = rest[sep + "); part ".len()..].trim().parse().map_err(|_| err())?;
    if id.is_empty() {
        return Err(err());
    }
    Ok((id.to_string(), part))
}

struct DocBuilder {
    doc_id: String,
    part: u32,
    tokens: Vec<Token>,
    sentences: Vec<MentionSpan>,
    sentence_start: usize,
    /// Per cluster id: stack of (open line, open token index).
    open: HashMap<u32, Vec<(usize, usize)>>,
    spans: HashMap<u32, Vec<MentionSpan>>,
}

impl DocBuilder {
    fn new(doc_id: String, part: u32) -> Self {
        DocBuilder {
            doc_id,
            part,
            tokens: Vec::new(),
            sentences: Vec::new(),
            sentence_start: 0,
            open: HashMap::new(),
            spans: HashMap::new(),
        }
    }

    fn flush_sentence(&mut self) {
        if self.tokens.len() > self.sentence_start {
            self.sentences
                .push(MentionSpan::new(self.sentence_start, self.tokens.len()));
            self.sentence_start = self.tokens.len();
        }
    }

    fn push_token(&mut self, line: usize, cols: &[&str]) -> Result<(), ParseError> {
        if cols.len() < MIN_COLUMNS {
            return Err(ParseError::BadColumnCount { line, min: MIN_COLUMNS, found: cols.len() });
        }
        let idx = self.tokens.len();
        let text = cols[3].to_string();
        let extra = cols[4..cols.len() - 1].iter().map(|c| c.to_string()).collect();
        for marker in scan_coref_column(cols[cols.len() - 1], line)? {
            match marker {
                Marker::Open(id) => self.open.entry(id).or_default().push((line, idx)),
                Marker::Single(id) => self
                    .spans
                    .entry(id)
                    .or_default()
                    .push(MentionSpan::new(idx, idx + 1)),
                Marker::Close(id) => {
                    let (_, start) = self
                        .open
                        .get_mut(&id)
                        .and_then(Vec::pop)
                        .ok_or(ParseError::UnbalancedBracket { line, cluster: id })?;
                    self.spans
                        .entry(id)
                        .or_default()
                        .push(MentionSpan::new(start, idx + 1));
                }
            }
        }
        self.tokens.push(Token { text, extra });
        Ok(())
    }

    fn finish(mut self) -> Result<Document, ParseError> {
        self.flush_sentence();
        for (id, stack) in &self.open {
            if let Some(&(line, _)) = stack.last() {
                return Err(ParseError::UnbalancedBracket { line, cluster: *id });
            }
        }
        let mut clusters: Vec<Cluster> = self
            .spans
            .into_iter()
            .map(|(id, spans)| Cluster::new(id, spans))
            .collect();
        clusters.sort_by_key(|c| c.id);
        Ok(Document {
            doc_id: self.doc_id,
            part: self.part,
            sentences: self.sentences,
            tokens: self.tokens,
            clusters,
        })
    }
}

/// Parses a whole file of CoNLL-style documents.
pub fn parse_conll(text: &str) -> Result<Corpus, ParseError> {
    let mut documents: Vec<Document> = Vec::new();
    let mut current: Option<DocBuilder> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim_end();
        match &mut current {
            None => {
                if trimmed.is_empty() {
                    continue;
                }
                let (id, part) = parse_header(trimmed, line)?;
                if documents.iter().any(|d| d.doc_id == id) {
                    return Err(ParseError::DuplicateDocId { id });
                }
                current = Some(DocBuilder::new(id, part));
            }
            Some(builder) => {
                if trimmed.is_empty() {
                    builder.flush_sentence();
                } else if trimmed == "#end document" {
                    let builder = current.take().expect("builder present");
                    documents.push(builder.finish()?);
                } else if trimmed.starts_with('#') {
                    return Err(ParseError::MalformedHeader { line });
                } else {
                    let cols: Vec<&str> = trimmed.split_whitespace().collect();
                    builder.push_token(line, &cols)?;
                }
            }
        }
    }
    if let Some(builder) = current {
        return Err(ParseError::MissingFooter { id: builder.doc_id });
    }
    Ok(Corpus::new(documents))
}

/// Canonical coref column for token `idx`: opening markers (outermost first),
/// then width-one markers, then closing markers (innermost first), `|`-joined.
fn coref_column(doc: &Document, idx: usize) -> String {
    let mut opens: Vec<(usize, u32)> = Vec::new();
    let mut singles: Vec<u32> = Vec::new();
    let mut closes: Vec<(usize, u32)> = Vec::new();
    for c in &doc.clusters {
        for m in &c.mentions {
            if m.start == idx && m.end == idx + 1 {
                singles.push(c.id);
            } else if m.start == idx {
                opens.push((m.end, c.id));
            } else if m.end == idx + 1 {
                closes.push((m.start, c.id));
            }
        }
    }
    opens.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    singles.sort_unstable();
    closes.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let parts: Vec<String> = opens
        .iter()
        .map(|&(_, id)| format!("({id}"))
        .chain(singles.iter().map(|id| format!("({id})")))
        .chain(closes.iter().map(|&(_, id)| format!("{id})")))
        .collect();
    if parts.is_empty() {
        "-".to_string()
    } else {
        parts.join("|")
    }
}

/// Serializes a corpus back to the column format. Output is byte-deterministic
/// and re-parses to a structurally equal corpus.
pub fn serialize_conll(corpus: &Corpus) -> String {
    let mut out = String::new();
    for doc in &corpus.documents {
        let _ = writeln!(out, "#begin document ({}); part {:03}", doc.doc_id, doc.part);
        for sentence in &doc.sentences {
            for (sent_idx, idx) in sentence.indices().enumerate() {
                let token = &doc.tokens[idx];
                let _ = write!(out, "{}\t{}\t{}\t{}", doc.doc_id, doc.part, sent_idx, token.text);
                for extra in &token.extra {
                    out.push('\t');
                    out.push_str(extra);
                }
                out.push('\t');
                out.push_str(&coref_column(doc, idx));
                out.push('\n');
            }
            out.push('\n');
        }
        out.push_str("#end document\n");
    }
    out
}
