//! Four-class pronoun-resolution accuracy.
//!
//! Each instance names a pronoun and two candidate people (their mention
//! spans); a system response is classified by which candidates the pronoun's
//! cluster touches: A, B, Both, or Neither. Accuracy over a set of instances
//! comes with a 95% Wilson score interval.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num::BigRational;

use crate::corpus::{Corpus, Document, MentionSpan};
use crate::score::ScoreError;

/// Resolution label: which candidate set the pronoun's cluster touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    A,
    B,
    Both,
    Neither,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::A, Label::B, Label::Both, Label::Neither];

    fn label(self) -> &'static str {
        match self {
            Label::A => "a",
            Label::B => "b",
            Label::Both => "both",
            Label::Neither => "neither",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "a" => Ok(Label::A),
            "b" => Ok(Label::B),
            "both" => Ok(Label::Both),
            "neither" => Ok(Label::Neither),
            other => Err(format!("unknown label '{other}'")),
        }
    }
}

/// One labelled pronoun-resolution instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapInstance {
    pub doc_id: String,
    pub pronoun: MentionSpan,
    pub a_mentions: BTreeSet<MentionSpan>,
    pub b_mentions: BTreeSet<MentionSpan>,
    pub gold_label: Label,
}

impl MapInstance {
    /// Structural checks: the pronoun is not a candidate mention, and the
    /// candidate sets overlap only when the gold label is Both.
    pub fn check(&self) -> Result<(), String> {
        if self.a_mentions.contains(&self.pronoun) || self.b_mentions.contains(&self.pronoun) {
            return Err("the pronoun span may not appear among the candidate mentions".into());
        }
        if self.gold_label != Label::Both
            && self.a_mentions.intersection(&self.b_mentions).next().is_some()
        {
            return Err("overlapping candidate sets require the gold label 'both'".into());
        }
        Ok(())
    }
}

/// Classify a system response for one instance. Total: every instance gets
/// exactly one label; an unclustered pronoun is Neither.
pub fn classify_map_instance(system: &Document, inst: &MapInstance) -> Label {
    let cluster = system
        .clusters
        .iter()
        .find(|c| c.mentions.binary_search(&inst.pronoun).is_ok());
    let Some(cluster) = cluster else {
        return Label::Neither;
    };
    let hits_a = cluster.mentions.iter().any(|m| inst.a_mentions.contains(m));
    let hits_b = cluster.mentions.iter().any(|m| inst.b_mentions.contains(m));
    match (hits_a, hits_b) {
        (true, true) => Label::Both,
        (true, false) => Label::A,
        (false, true) => Label::B,
        (false, false) => Label::Neither,
    }
}

/// 95% Wilson score interval for `correct` successes out of `total` trials,
/// clamped to [0, 1]. `total` must be nonzero.
pub fn wilson_interval(correct: u64, total: u64) -> (f64, f64) {
    // Two-sided 95%: Φ⁻¹(0.975).
    const Z: f64 = 1.959963984540054;
    assert!(total > 0, "Wilson interval over zero trials");
    let n = total as f64;
    let p = correct as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The bounds touch 0 and 1 exactly for extreme counts; computing them
    // ensures rounding never pushes the point estimate outside.
    let lo = if correct == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if correct == total { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Accuracy over a set of instances, with its 95% interval and the full
/// gold-by-predicted confusion counts.
#[derive(Debug, Clone, PartialEq)]
pub struct MapAccuracyReport {
    pub correct: u64,
    pub total: u64,
    /// `confusion[gold][predicted]`, indexed in [`Label::ALL`] order.
    pub confusion: [[u64; 4]; 4],
    pub interval: (f64, f64),
}

impl MapAccuracyReport {
    /// Exact accuracy.
    pub fn accuracy(&self) -> BigRational {
        BigRational::new(self.correct.into(), self.total.into())
    }
}

/// Score all instances against `system`. Instances refer to documents by id.
pub fn map_accuracy(
    instances: &[MapInstance],
    system: &Corpus,
) -> Result<MapAccuracyReport, ScoreError> {
    if instances.is_empty() {
        return Err(ScoreError::EmptyInstanceSet);
    }
    let mut correct = 0u64;
    let mut confusion = [[0u64; 4]; 4];
    for inst in instances {
        let doc = system
            .get(&inst.doc_id)
            .ok_or_else(|| ScoreError::MissingDocument {
                id: inst.doc_id.clone(),
            })?;
        let predicted = classify_map_instance(doc, inst);
        confusion[inst.gold_label as usize][predicted as usize] += 1;
        if predicted == inst.gold_label {
            correct += 1;
        }
    }
    let total = instances.len() as u64;
    Ok(MapAccuracyReport {
        correct,
        total,
        confusion,
        interval: wilson_interval(correct, total),
    })
}

/// Errors raised while parsing an instances file.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapParseError {
    #[error("line {line}: {reason}")]
    BadLine { line: usize, reason: String },
}

fn parse_span(text: &str) -> Result<MentionSpan, String> {
    let (start, end) = text
        .split_once('-')
        .ok_or_else(|| format!("span '{text}' is not of the form start-end"))?;
    let start: usize = start
        .parse()
        .map_err(|_| format!("bad span start in '{text}'"))?;
    let end: usize = end
        .parse()
        .map_err(|_| format!("bad span end in '{text}'"))?;
    if start >= end {
        return Err(format!("span '{text}' is empty or reversed"));
    }
    Ok(MentionSpan::new(start, end))
}

fn parse_span_set(text: &str) -> Result<BTreeSet<MentionSpan>, String> {
    if text == "-" {
        return Ok(BTreeSet::new());
    }
    text.split(',').map(parse_span).collect()
}

/// Parse an instances file: one instance per non-comment line, whitespace-
/// separated columns `doc_id pronoun a_spans b_spans label`. Spans are
/// `start-end` token ranges, span sets are comma-joined with `-` for the
/// empty set.
pub fn parse_map_instances(text: &str) -> Result<Vec<MapInstance>, MapParseError> {
    let mut instances = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let bad = |reason: String| MapParseError::BadLine { line, reason };
        let cols: Vec<&str> = trimmed.split_whitespace().collect();
        if cols.len() != 5 {
            return Err(bad(format!("expected 5 columns, found {}", cols.len())));
        }
        let instance = MapInstance {
            doc_id: cols[0].to_string(),
            pronoun: parse_span(cols[1]).map_err(&bad)?,
            a_mentions: parse_span_set(cols[2]).map_err(&bad)?,
            b_mentions: parse_span_set(cols[3]).map_err(&bad)?,
            gold_label: cols[4].parse().map_err(&bad)?,
        };
        instance.check().map_err(&bad)?;
        instances.push(instance);
    }
    Ok(instances)
}

fn span_set_text(spans: &BTreeSet<MentionSpan>) -> String {
    if spans.is_empty() {
        return "-".to_string();
    }
    spans
        .iter()
        .map(|s| format!("{}-{}", s.start, s.end))
        .collect::<Vec<_>>()
        .join(",")
}

/// Serialize instances in the format [`parse_map_instances`] reads.
pub fn serialize_map_instances(instances: &[MapInstance]) -> String {
    let mut out = String::new();
    for inst in instances {
        out.push_str(&format!(
            "{}\t{}-{}\t{}\t{}\t{}\n",
            inst.doc_id,
            inst.pronoun.start,
            inst.pronoun.end,
            span_set_text(&inst.a_mentions),
            span_set_text(&inst.b_mentions),
            inst.gold_label,
        ));
    }
    out
}
