//! Test support for coref-forge: seeded synthetic corpora and brute-force
//! metric oracles.
//!
//! Everything here is deliberately written the slow, obvious way — the point
//! is to cross-check the optimized implementations in the main crate against
//! an independent route, not to be fast.

use std::collections::BTreeSet;

use num::{BigRational, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use coref_forge::corpus::{Cluster, Corpus, Document, MentionSpan, Token};

/// Vocabulary the generator samples from. Gendered terms are intentionally
/// frequent so augmentation and ablation rules fire often.
const VOCAB: &[&str] = &[
    "he", "she", "him", "her", "his", "hers", "himself", "herself", "they",
    "them", "their", "themself", "zie", "zir", "zirs", "zirself", "John",
    "Mary", "Alex", "Smith", "Jones", "Rivera", "boyfriend", "girlfriend",
    "mother", "father", "brother", "actor", "waitress", "chairman", "male",
    "female", "man", "woman", "the", "a", "dog", "house", "lawyer", "said",
    "met", "saw", "left", "called", "smiled", "yesterday", "quietly", ".",
];

/// Address terms, placed only outside mention spans so that address-term
/// deletion can never empty or collide generated mentions.
const ADDRESS: &[&str] = &["Mr.", "Mrs.", "Dr."];

/// Deterministic RNG for generator functions.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generate one synthetic document. Documents have 1–4 sentences, up to 8
/// mentions grouped into clusters (singletons included), and occasionally no
/// clusters at all. All outputs pass `validate` cleanly.
pub fn gen_document(seed: u64, id: &str) -> Document {
    let mut rng = rng(seed);
    let n_sentences = rng.gen_range(1..=4);
    let mut tokens: Vec<Token> = Vec::new();
    let mut sentences = Vec::new();
    for _ in 0..n_sentences {
        let start = tokens.len();
        let len = rng.gen_range(3..=12);
        for _ in 0..len {
            let word = if rng.gen_ratio(1, 12) {
                ADDRESS[rng.gen_range(0..ADDRESS.len())]
            } else {
                VOCAB[rng.gen_range(0..VOCAB.len())]
            };
            tokens.push(Token::new(word));
        }
        sentences.push(MentionSpan::new(start, tokens.len()));
    }

    // Candidate mention spans: inside one sentence, 1–3 tokens, free of
    // address terms, all distinct.
    let mut spans: BTreeSet<MentionSpan> = BTreeSet::new();
    let target = rng.gen_range(0..=8usize);
    for _ in 0..target * 4 {
        if spans.len() >= target {
            break;
        }
        let sentence = sentences[rng.gen_range(0..sentences.len())];
        if sentence.is_empty() {
            continue;
        }
        let start = rng.gen_range(sentence.start..sentence.end);
        let max_len = (sentence.end - start).min(3);
        let len = rng.gen_range(1..=max_len);
        let span = MentionSpan::new(start, start + len);
        let clean = span
            .indices()
            .all(|i| !ADDRESS.contains(&tokens[i].text.as_str()));
        if clean {
            spans.insert(span);
        }
    }

    let clusters = partition_into_clusters(&mut rng, spans.into_iter().collect());
    Document {
        doc_id: id.to_string(),
        part: rng.gen_range(0..1000),
        sentences,
        tokens,
        clusters,
    }
}

/// True when two spans partially overlap without nesting. The column format
/// matches closing markers to the most recent open of the same cluster, so a
/// crossing pair inside one cluster cannot be written out faithfully; the
/// generator keeps such pairs in separate clusters.
fn crosses(a: MentionSpan, b: MentionSpan) -> bool {
    (a.start < b.start && b.start < a.end && a.end < b.end)
        || (b.start < a.start && a.start < b.end && b.end < a.end)
}

/// Randomly partition spans into clusters with ids 0..n.
fn partition_into_clusters(rng: &mut ChaCha8Rng, mut spans: Vec<MentionSpan>) -> Vec<Cluster> {
    spans.shuffle(rng);
    let mut groups: Vec<Vec<MentionSpan>> = Vec::new();
    for span in spans {
        let slot = rng.gen_range(0..=groups.len());
        if slot == groups.len() || groups[slot].iter().any(|&m| crosses(m, span)) {
            groups.push(vec![span]);
        } else {
            groups[slot].push(span);
        }
    }
    groups.sort_by_key(|g| g.iter().min().copied());
    groups
        .into_iter()
        .enumerate()
        .map(|(id, mentions)| Cluster::new(id as u32, mentions))
        .collect()
}

/// Generate a corpus of `n` synthetic documents.
pub fn gen_corpus(seed: u64, n: usize) -> Corpus {
    let documents = (0..n)
        .map(|i| gen_document(seed.wrapping_add(i as u64), &format!("doc{i:04}")))
        .collect();
    Corpus::new(documents)
}

/// Generate a (gold, system) pair over one token sequence: two independent
/// clusterings of a shared mention pool, with each side keeping a random
/// subset of the mentions.
pub fn gen_scoring_pair(seed: u64) -> (Document, Document) {
    let gold = gen_document(seed, "pair");
    let mut rng = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let pool: Vec<MentionSpan> = gold
        .clusters
        .iter()
        .flat_map(|c| c.mentions.iter().copied())
        .collect();
    let kept: Vec<MentionSpan> = pool
        .iter()
        .copied()
        .filter(|_| rng.gen_ratio(4, 5))
        .collect();
    let system = Document {
        clusters: partition_into_clusters(&mut rng, kept),
        ..gold.clone()
    };
    (gold, system)
}

/// Re-cluster a document's mention pool at random: same tokens and mentions,
/// new partition. Useful for simulating disagreeing annotators.
pub fn recluster(seed: u64, doc: &Document) -> Document {
    let mut rng = rng(seed);
    let pool: Vec<MentionSpan> = doc
        .clusters
        .iter()
        .flat_map(|c| c.mentions.iter().copied())
        .collect();
    Document {
        clusters: partition_into_clusters(&mut rng, pool),
        ..doc.clone()
    }
}

/// Cluster shape of a document: (id, mention count) per cluster, for
/// isomorphism checks after structure-preserving transformations.
pub fn cluster_shape(doc: &Document) -> Vec<(u32, usize)> {
    doc.clusters
        .iter()
        .map(|c| (c.id, c.mentions.len()))
        .collect()
}

/// Brute-force LEA: (precision, recall, f1), enumerating every within-cluster
/// mention pair explicitly. Independent of the main implementation, which
/// counts links through intersection sizes.
pub fn lea_oracle(gold: &Document, system: &Document) -> (BigRational, BigRational, BigRational) {
    let recall = oracle_side(&gold.clusters, &system.clusters);
    let precision = oracle_side(&system.clusters, &gold.clusters);
    let (precision, recall) = match (precision, recall) {
        (Some(p), Some(r)) => (p, r),
        (None, None) => (one(), one()),
        (Some(p), None) => (p, BigRational::zero()),
        (None, Some(r)) => (BigRational::zero(), r),
    };
    let sum = &precision + &recall;
    let f1 = if sum.is_zero() {
        BigRational::zero()
    } else {
        BigRational::from_integer(2.into()) * &precision * &recall / sum
    };
    (precision, recall, f1)
}

fn one() -> BigRational {
    BigRational::from_integer(1.into())
}

fn int(n: u64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Σ_k |k| · resolved(k) / Σ_k |k| with explicit pair enumeration, or `None`
/// when there is nothing to score on this side.
fn oracle_side(clusters: &[Cluster], response: &[Cluster]) -> Option<BigRational> {
    let mut num = BigRational::zero();
    let mut den = BigRational::zero();
    for cluster in clusters {
        let mentions = &cluster.mentions;
        let size = mentions.len() as u64;
        if size == 0 {
            continue;
        }
        den += int(size);
        let resolved = if size == 1 {
            let identical = response.iter().any(|r| r.mentions == *mentions);
            int(u64::from(identical))
        } else {
            let mut hit = 0u64;
            let mut all = 0u64;
            for i in 0..mentions.len() {
                for j in i + 1..mentions.len() {
                    all += 1;
                    let together = response.iter().any(|r| {
                        r.mentions.contains(&mentions[i]) && r.mentions.contains(&mentions[j])
                    });
                    hit += u64::from(together);
                }
            }
            int(hit) / int(all)
        };
        num += int(size) * resolved;
    }
    (!den.is_zero()).then(|| num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use coref_forge::corpus::validate;

    #[test]
    fn generated_documents_are_well_formed() {
        for seed in 0..50 {
            let doc = gen_document(seed, "g");
            assert!(
                validate(&doc).is_empty(),
                "seed {seed}: {:?}",
                validate(&doc)
            );
            assert!(doc.clusters.iter().map(|c| c.mentions.len()).sum::<usize>() <= 8);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(gen_document(7, "g"), gen_document(7, "g"));
        assert_ne!(gen_corpus(1, 10), gen_corpus(2, 10));
    }

    #[test]
    fn oracle_scores_a_hand_checked_pair() {
        // gold {{0,1,2},{3,4}} vs system {{0,1},{2,3,4}} → 3/5 everywhere.
        let tokens: Vec<Token> = (0..5).map(|i| Token::new(format!("w{i}"))).collect();
        let mk = |groups: &[&[usize]]| Document {
            doc_id: "o".into(),
            part: 0,
            sentences: vec![MentionSpan::new(0, 5)],
            tokens: tokens.clone(),
            clusters: groups
                .iter()
                .enumerate()
                .map(|(id, g)| {
                    Cluster::new(
                        id as u32,
                        g.iter().map(|&i| MentionSpan::new(i, i + 1)).collect(),
                    )
                })
                .collect(),
        };
        let gold = mk(&[&[0, 1, 2], &[3, 4]]);
        let system = mk(&[&[0, 1], &[2, 3, 4]]);
        let (p, r, f1) = lea_oracle(&gold, &system);
        let expected = BigRational::new(3.into(), 5.into());
        assert_eq!(p, expected);
        assert_eq!(r, expected);
        assert_eq!(f1, expected);
    }

    #[test]
    fn scoring_pairs_share_tokens() {
        for seed in 0..20 {
            let (gold, system) = gen_scoring_pair(seed);
            assert!(gold.same_tokens(&system));
            assert!(validate(&system).is_empty());
        }
    }
}
