//! coref-forge: corpus engineering for gender-inclusive coreference data.
//!
//! The crate covers the full path from annotated text to evaluation numbers:
//!
//! * [`conll`] / [`jsonl`] — parsing and byte-deterministic serialization of
//!   the column format and a JSON-lines sidecar format;
//! * [`corpus`] — the document model, well-formedness checks and corpus
//!   statistics;
//! * [`lexicon`] — pronoun paradigms, gendered nouns, descriptors and
//!   address terms, with classification and form mapping;
//! * [`augment`] — rewrite rules R1–R6 and seeded corpus enlargement;
//! * [`ablate`] — gender-cue ablation mechanisms and the nine-variant suite;
//! * [`score`] — the LEA metric in exact rational arithmetic, slice reports,
//!   and four-class pronoun-resolution accuracy with Wilson intervals;
//! * [`adjudicate`] — majority-vote merging of three annotators' clusterings.
//!
//! Corpus-level operations run per-document in parallel when the `parallel`
//! feature (default) is enabled; see [`exec`]. Output never depends on the
//! execution strategy: all randomness is derived per (document, copy) pair
//! from an explicit seed.

pub mod ablate;
pub mod adjudicate;
pub mod augment;
pub mod conll;
pub mod corpus;
pub mod exec;
pub mod jsonl;
pub mod lexicon;
pub mod remap;
pub mod score;

pub use ablate::{ablate, ablation_suite, AblateOptions, AblationCombo, Mechanism};
pub use adjudicate::{majority_merge, AdjudicationReport, AnnotationSet};
pub use augment::{apply_rules, augment_corpus, AugmentPlan, Rule};
pub use conll::{parse_conll, serialize_conll, ParseError};
pub use corpus::{stats, validate, Cluster, Corpus, CorpusStats, Document, MentionSpan, Token};
pub use jsonl::{parse_jsonl, serialize_jsonl};
pub use lexicon::{classify_token, load_lexicon, map_to, GenderClass, GenderLexicon, MapTarget};
pub use score::{corpus_lea, lea, map_accuracy, ScoreError, ScoreReport};
