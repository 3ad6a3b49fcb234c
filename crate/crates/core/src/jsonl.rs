//! JSON-lines sidecar format: one document per line with `doc_id`,
//! `sentences` (token-string lists), and `clusters` (lists of `[start, end]`
//! pairs over document-level token indices).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Cluster, Corpus, Document, MentionSpan, Token};

#[derive(Debug, Error)]
pub enum JsonlError {
    #[error("line {line}: {source}")]
    Malformed {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("duplicate document id {id:?}")]
    DuplicateDocId { id: String },
}

#[derive(Serialize, Deserialize)]
struct JsonlDoc {
    doc_id: String,
    sentences: Vec<Vec<String>>,
    clusters: Vec<Vec<(usize, usize)>>,
}

impl From<&Document> for JsonlDoc {
    fn from(doc: &Document) -> Self {
        JsonlDoc {
            doc_id: doc.doc_id.clone(),
            sentences: doc
                .sentences
                .iter()
                .map(|s| s.indices().map(|i| doc.tokens[i].text.clone()).collect())
                .collect(),
            clusters: doc
                .clusters
                .iter()
                .map(|c| c.mentions.iter().map(|m| (m.start, m.end)).collect())
                .collect(),
        }
    }
}

impl JsonlDoc {
    fn into_document(self) -> Document {
        let mut tokens = Vec::new();
        let mut sentences = Vec::new();
        for sent in self.sentences {
            let start = tokens.len();
            tokens.extend(sent.into_iter().map(Token::new));
            sentences.push(MentionSpan::new(start, tokens.len()));
        }
        let clusters = self
            .clusters
            .into_iter()
            .enumerate()
            .map(|(id, spans)| {
                Cluster::new(
                    id as u32,
                    spans.into_iter().map(|(s, e)| MentionSpan::new(s, e)).collect(),
                )
            })
            .collect();
        Document { doc_id: self.doc_id, part: 0, sentences, tokens, clusters }
    }
}

pub fn parse_jsonl(text: &str) -> Result<Corpus, JsonlError> {
    let mut documents: Vec<Document> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let parsed: JsonlDoc =
            serde_json::from_str(raw).map_err(|source| JsonlError::Malformed { line: i + 1, source })?;
        if documents.iter().any(|d| d.doc_id == parsed.doc_id) {
            return Err(JsonlError::DuplicateDocId { id: parsed.doc_id });
        }
        documents.push(parsed.into_document());
    }
    Ok(Corpus::new(documents))
}

pub fn serialize_jsonl(corpus: &Corpus) -> String {
    let mut out = String::new();
    for doc in &corpus.documents {
        let line = serde_json::to_string(&JsonlDoc::from(doc)).expect("documents serialize");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::validate;

    #[test]
    fn roundtrips_structure() {
        let text = concat!(
            r#"{"doc_id":"a","sentences":[["John","fell"],["He","cried"]],"clusters":[[[0,1],[2,3]]]}"#,
            "\n",
        );
        let corpus = parse_jsonl(text).unwrap();
        let doc = &corpus.documents[0];
        assert_eq!(doc.sentences, vec![MentionSpan::new(0, 2), MentionSpan::new(2, 4)]);
        assert_eq!(doc.clusters[0].mentions, vec![MentionSpan::new(0, 1), MentionSpan::new(2, 3)]);
        assert_eq!(validate(doc), vec![]);
        assert_eq!(serialize_jsonl(&corpus), text);
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let line = r#"{"doc_id":"a","sentences":[],"clusters":[]}"#;
        let text = format!("{line}\n{line}\n");
        assert!(matches!(parse_jsonl(&text), Err(JsonlError::DuplicateDocId { .. })));
    }
}
