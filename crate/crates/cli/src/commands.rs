//! Subcommand implementations. Every command computes its complete output
//! before touching the filesystem, so a failing run leaves no partial files.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use coref_forge::ablate::{ablate, suite_combos, AblateOptions, AblationCombo};
use coref_forge::adjudicate::{majority_merge, AdjudicationReport, AnnotationSet};
use coref_forge::augment::{augment_corpus, AugmentPlan, Rule};
use coref_forge::corpus::{stats, validate, Corpus, MentionSpan};
use coref_forge::lexicon::{GenderClass, GenderLexicon};
use coref_forge::score::{
    corpus_lea, corpus_slices, map_accuracy, parse_map_instances, to_f64, Label, SliceSpec,
};
use log::info;
use rayon::prelude::*;

use crate::config::Settings;
use crate::io::{read_corpus, render_corpus, Format};
use crate::report::Report;
use crate::usage;

#[derive(Debug, clap::Args)]
pub struct ValidateArgs {
    /// Input corpus (.conll or .jsonl).
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
}

/// Check document invariants; exits 1 when violations are found.
pub fn validate_cmd(settings: &Settings, args: &ValidateArgs) -> Result<()> {
    let corpus = read_corpus(&args.input)?;
    let mut violations: Vec<String> = Vec::new();
    for doc in &corpus.documents {
        for violation in validate(doc) {
            violations.push(format!("{}: {}", doc.doc_id, violation));
        }
    }
    let mut report = Report::new();
    report.note(format!("validation of {}", args.input.display()));
    report.set("docs", corpus.documents.len() as u64);
    report.set("violations", violations.len() as u64);
    for (i, line) in violations.iter().enumerate() {
        report.set(format!("violation.{i}"), line.as_str());
    }
    print!("{}", report.render(settings.json));
    if violations.is_empty() {
        Ok(())
    } else {
        bail!(
            "{} violation(s) in {}",
            violations.len(),
            args.input.display()
        );
    }
}

#[derive(Debug, clap::Args)]
pub struct StatsArgs {
    /// Input corpus (.conll or .jsonl).
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
}

/// Summarize corpus size: documents, tokens, clusters, links, vocabulary.
pub fn stats_cmd(settings: &Settings, args: &StatsArgs) -> Result<()> {
    let corpus = read_corpus(&args.input)?;
    let summary = stats(&corpus);
    let mut report = Report::new();
    report.note(format!("corpus statistics for {}", args.input.display()));
    report.set("n_docs", summary.n_docs as u64);
    report.set("n_tokens", summary.n_tokens as u64);
    report.set("n_clusters", summary.n_clusters as u64);
    report.set("n_links", summary.n_links);
    report.set("vocab_size", summary.vocab_size as u64);
    print!("{}", report.render(settings.json));
    Ok(())
}

#[derive(Debug, clap::Args)]
pub struct AugmentArgs {
    /// Input corpus (.conll or .jsonl).
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// Output corpus path.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Comma-separated rules for one augmented copy (r1,r2,r3,r4,r5,r6).
    #[arg(long, value_name = "LIST", conflicts_with = "plan")]
    pub rules: Option<String>,
    /// Named augmentation plan (default5x, also the default).
    #[arg(long, value_name = "NAME")]
    pub plan: Option<String>,
    /// With --rules, keep each original document alongside its copy.
    #[arg(long)]
    pub keep_original: bool,
    /// Pronoun paradigm rule r4 rewrites into (default: zie).
    #[arg(long, value_name = "PARADIGM")]
    pub r4_target: Option<String>,
    /// Pronoun paradigm rule r6 rewrites into (default: zie).
    #[arg(long, value_name = "PARADIGM")]
    pub r6_target: Option<String>,
}

/// Rewrite a corpus according to an augmentation plan.
pub fn augment_cmd(settings: &Settings, args: &AugmentArgs) -> Result<()> {
    let corpus = read_corpus(&args.input)?;
    let lex = settings.lexicon()?;
    let r4 = paradigm(args.r4_target.as_deref(), GenderClass::NeoZie, &lex)?;
    let r6 = paradigm(args.r6_target.as_deref(), GenderClass::NeoZie, &lex)?;
    let (plan, label) = match (&args.rules, &args.plan) {
        (Some(rules), None) => {
            let copies = vec![parse_rules(rules, &r4, &r6)?];
            let plan = AugmentPlan {
                seed: settings.seed,
                copies,
                include_original: args.keep_original,
            };
            (plan, format!("rules:{}", rules.trim()))
        }
        (None, Some(name)) if name == "default5x" => {
            (AugmentPlan::default_5x(settings.seed), name.clone())
        }
        (None, Some(name)) => {
            return Err(usage(format!("unknown plan {name:?} (expected default5x)")))
        }
        (None, None) => (
            AugmentPlan::default_5x(settings.seed),
            "default5x".to_string(),
        ),
        (Some(_), Some(_)) => unreachable!("clap rejects --rules with --plan"),
    };
    let augmented = augment_corpus(&corpus, &plan, &lex)?;
    let format = settings.format_for(&args.out);
    let rendered = render_corpus(&augmented, format);

    std::fs::write(&args.out, rendered)
        .with_context(|| format!("writing {}", args.out.display()))?;
    info!(
        "wrote {} documents to {}",
        augmented.documents.len(),
        args.out.display()
    );

    let mut report = Report::new();
    report.note(format!(
        "augmented {} -> {}",
        args.input.display(),
        args.out.display()
    ));
    report.set("plan", label);
    report.set("seed", settings.seed);
    report.set("docs_in", corpus.documents.len() as u64);
    report.set("docs_out", augmented.documents.len() as u64);
    report.set("out", args.out.display().to_string());
    print!("{}", report.render(settings.json));
    Ok(())
}

fn parse_rules(text: &str, r4: &GenderClass, r6: &GenderClass) -> Result<Vec<Rule>> {
    let mut rules = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let rule = match part.to_lowercase().as_str() {
            "r1" => Rule::R1SwapGender,
            "r2" => Rule::R2NeutralizeRelationship,
            "r3" => Rule::R3NeutralizeDescriptor,
            "r4" => Rule::R4NeutralizeClusterPronouns { target: r4.clone() },
            "r5" => Rule::R5TruncateFirstNames,
            "r6" => Rule::R6NeutralizeOnePronoun { target: r6.clone() },
            other => return Err(usage(format!("unknown rule {other:?} (expected r1..r6)"))),
        };
        rules.push(rule);
    }
    if rules.is_empty() {
        return Err(usage("--rules needs at least one rule"));
    }
    Ok(rules)
}

/// Resolve a paradigm name against the loaded lexicon.
fn paradigm(
    name: Option<&str>,
    default: GenderClass,
    lex: &GenderLexicon,
) -> Result<GenderClass> {
    let class = match name {
        None => default,
        Some(text) => GenderClass::from_str(text).expect("gender class parsing is infallible"),
    };
    if lex.paradigm(&class).is_none() {
        return Err(usage(format!("lexicon has no pronoun paradigm named {class}")));
    }
    Ok(class)
}

#[derive(Debug, clap::Args)]
pub struct AblateArgs {
    /// Input corpus (.conll or .jsonl).
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// Directory receiving one file per combination.
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    /// Apply the full nine-combination suite.
    #[arg(long, conflicts_with = "combo")]
    pub suite: bool,
    /// Apply one combination, e.g. "name,sem".
    #[arg(long, value_name = "LIST")]
    pub combo: Option<String>,
    /// Pronoun paradigm the pro mechanism rewrites into (default: they).
    #[arg(long, value_name = "PARADIGM")]
    pub pro_target: Option<String>,
    /// Also rewrite the impersonal pronoun (it/its/itself).
    #[arg(long)]
    pub include_impersonal: bool,
    /// Drop mentions emptied by address-term deletion instead of failing.
    #[arg(long)]
    pub allow_drop: bool,
}

/// Apply ablation combinations, writing one corpus file per combination.
pub fn ablate_cmd(settings: &Settings, args: &AblateArgs) -> Result<()> {
    let combos = match (args.suite, &args.combo) {
        (true, None) => suite_combos(),
        (false, Some(text)) => {
            vec![AblationCombo::parse(text).map_err(|err| usage(err.to_string()))?]
        }
        (false, None) => return Err(usage("pass --suite or --combo")),
        (true, Some(_)) => unreachable!("clap rejects --suite with --combo"),
    };
    let corpus = read_corpus(&args.input)?;
    let lex = settings.lexicon()?;
    let opts = AblateOptions {
        pro_target: paradigm(args.pro_target.as_deref(), GenderClass::NeutralThey, &lex)?,
        include_impersonal: args.include_impersonal,
        allow_drop: args.allow_drop,
    };
    let format = settings.format.unwrap_or(Format::Conll);

    // Compute every variant before creating anything on disk.
    let mut files: Vec<(String, String)> = Vec::new();
    let mut docs_out = 0u64;
    for combo in &combos {
        let documents = corpus
            .documents
            .par_iter()
            .map(|doc| ablate(doc, combo, &lex, &opts))
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("ablating with {combo}"))?;
        docs_out += documents.len() as u64;
        let variant = Corpus::new(documents);
        files.push((
            format!("{}.{}", combo.slug(), format.extension()),
            render_corpus(&variant, format),
        ));
    }

    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    for (name, content) in &files {
        let path = args.out_dir.join(name);
        std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
        info!("wrote {}", path.display());
    }

    let mut report = Report::new();
    report.note(format!(
        "ablated {} into {}",
        args.input.display(),
        args.out_dir.display()
    ));
    report.set("combos", combos.len() as u64);
    report.set("docs_in", corpus.documents.len() as u64);
    report.set("docs_out", docs_out);
    for (i, (name, _)) in files.iter().enumerate() {
        report.set(format!("file.{i}"), name.as_str());
    }
    print!("{}", report.render(settings.json));
    Ok(())
}

#[derive(Debug, clap::Args)]
pub struct ScoreArgs {
    /// Gold corpus.
    #[arg(long, value_name = "FILE")]
    pub gold: PathBuf,
    /// System corpus (documents paired with gold by id).
    #[arg(long, value_name = "FILE")]
    pub sys: PathBuf,
    /// Scoring metric (lea).
    #[arg(long, value_name = "NAME", default_value = "lea")]
    pub metric: String,
    /// Report per-slice recall, e.g. "binary,neo" (also: all).
    #[arg(long, value_name = "LIST")]
    pub slices: Option<String>,
}

/// Score a system corpus against gold with LEA.
pub fn score_cmd(settings: &Settings, args: &ScoreArgs) -> Result<()> {
    if args.metric.to_lowercase() != "lea" {
        return Err(usage(format!(
            "unknown metric {:?} (expected lea)",
            args.metric
        )));
    }
    let gold = read_corpus(&args.gold)?;
    let system = read_corpus(&args.sys)?;
    let overall = corpus_lea(&gold, &system)?;

    let recall = to_f64(&overall.recall());
    let precision = to_f64(&overall.precision());
    let f1 = to_f64(&overall.f1());
    let mut report = Report::new();
    report.note(format!(
        "LEA: {} vs {}",
        args.gold.display(),
        args.sys.display()
    ));
    report.note(format!(
        "{:<8} {:>10} {:>10} {:>10}",
        "metric", "recall", "precision", "f1"
    ));
    report.note(format!(
        "{:<8} {:>10.4} {:>10.4} {:>10.4}",
        "lea", recall, precision, f1
    ));
    report.set("metric", "lea");
    let (recall_num, recall_den) = overall.recall_parts();
    let (precision_num, precision_den) = overall.precision_parts();
    report.set("recall_num", recall_num.to_string());
    report.set("recall_den", recall_den.to_string());
    report.set("precision_num", precision_num.to_string());
    report.set("precision_den", precision_den.to_string());
    report.set("recall", recall);
    report.set("precision", precision);
    report.set("f1", f1);

    if let Some(text) = &args.slices {
        let spec = SliceSpec::parse(text)
            .ok_or_else(|| usage(format!("unknown slice list {text:?} (all, binary, neo)")))?;
        let lex = settings.lexicon()?;
        let slices = corpus_slices(&gold, &system, &spec, &lex)?;
        for slice in &slices {
            let prefix = format!("slice.{}", slice.name);
            report.set(format!("{prefix}.gold_clusters"), slice.n_gold_clusters as u64);
            report.set(format!("{prefix}.recall_num"), slice.recall_num.to_string());
            report.set(format!("{prefix}.recall_den"), slice.recall_den.to_string());
            match slice.recall() {
                Some(value) => {
                    let value = to_f64(&value);
                    report.note(format!("slice {:<10} recall {:.4}", slice.name, value));
                    report.set(format!("{prefix}.recall"), value);
                }
                None => {
                    report.note(format!("slice {:<10} empty", slice.name));
                    report.set(format!("{prefix}.recall"), "NA");
                }
            }
        }
    }
    print!("{}", report.render(settings.json));
    Ok(())
}

#[derive(Debug, clap::Args)]
pub struct MapScoreArgs {
    /// Labelled pronoun-resolution instances.
    #[arg(long, value_name = "FILE")]
    pub instances: PathBuf,
    /// System corpus the instances are classified against.
    #[arg(long, value_name = "FILE")]
    pub sys: PathBuf,
}

/// Four-class pronoun-resolution accuracy with a Wilson interval.
pub fn map_score_cmd(settings: &Settings, args: &MapScoreArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.instances)
        .with_context(|| format!("reading {}", args.instances.display()))?;
    let instances = parse_map_instances(&text)
        .with_context(|| format!("parsing {}", args.instances.display()))?;
    let system = read_corpus(&args.sys)?;
    let result = map_accuracy(&instances, &system)?;

    let accuracy = to_f64(&result.accuracy());
    let mut report = Report::new();
    report.note(format!(
        "pronoun resolution: {} against {}",
        args.instances.display(),
        args.sys.display()
    ));
    report.note(format!(
        "accuracy {}/{} = {:.4}, 95% interval [{:.4}, {:.4}]",
        result.correct, result.total, accuracy, result.interval.0, result.interval.1
    ));
    report.note(format!(
        "{:<10} {:>8} {:>8} {:>8} {:>8}",
        "gold\\pred", "a", "b", "both", "neither"
    ));
    for (i, gold_label) in Label::ALL.iter().enumerate() {
        report.note(format!(
            "{:<10} {:>8} {:>8} {:>8} {:>8}",
            gold_label.to_string(),
            result.confusion[i][0],
            result.confusion[i][1],
            result.confusion[i][2],
            result.confusion[i][3],
        ));
    }
    report.set("total", result.total);
    report.set("correct", result.correct);
    report.set("accuracy", accuracy);
    report.set("wilson_low", result.interval.0);
    report.set("wilson_high", result.interval.1);
    for (i, gold_label) in Label::ALL.iter().enumerate() {
        for (j, predicted) in Label::ALL.iter().enumerate() {
            report.set(
                format!("confusion.{gold_label}.{predicted}"),
                result.confusion[i][j],
            );
        }
    }
    print!("{}", report.render(settings.json));
    Ok(())
}

#[derive(Debug, clap::Args)]
pub struct AdjudicateArgs {
    /// Exactly three annotator corpora over the same documents.
    #[arg(value_name = "ANNOTATIONS", num_args = 3)]
    pub annotations: Vec<PathBuf>,
    /// Merged gold corpus to write.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Also write the vote report to this file.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
    /// Keep unresolved mentions as singleton clusters.
    #[arg(long)]
    pub keep_singletons: bool,
}

/// Merge three annotator corpora by majority vote over mention-pair links.
pub fn adjudicate_cmd(settings: &Settings, args: &AdjudicateArgs) -> Result<()> {
    let mut corpora: Vec<(String, Corpus)> = Vec::new();
    for path in &args.annotations {
        let name = path
            .file_stem()
            .and_then(|stem| stem.to_str())
            .unwrap_or("annotator")
            .to_string();
        corpora.push((name, read_corpus(path)?));
    }
    let ids: Vec<String> = corpora[0]
        .1
        .documents
        .iter()
        .map(|doc| doc.doc_id.clone())
        .collect();
    let reference: BTreeSet<&str> = ids.iter().map(String::as_str).collect();
    for (name, corpus) in &corpora[1..] {
        let theirs: BTreeSet<&str> = corpus
            .documents
            .iter()
            .map(|doc| doc.doc_id.as_str())
            .collect();
        if theirs != reference {
            bail!("annotator {name} covers a different document set");
        }
    }

    let mut merged_docs = Vec::new();
    let mut doc_reports: Vec<(String, AdjudicationReport)> = Vec::new();
    for id in &ids {
        let sets: Vec<AnnotationSet> = corpora
            .iter()
            .map(|(name, corpus)| AnnotationSet {
                annotator_id: name.clone(),
                doc: corpus.get(id).expect("ids checked above").clone(),
            })
            .collect();
        let (merged, votes) = majority_merge(&sets, args.keep_singletons)
            .with_context(|| format!("adjudicating document {id}"))?;
        merged_docs.push(merged);
        doc_reports.push((id.clone(), votes));
    }

    let names: Vec<&str> = corpora.iter().map(|(name, _)| name.as_str()).collect();
    let mut report = Report::new();
    report.note(format!(
        "adjudication of {} document(s) by {}",
        ids.len(),
        names.join(", ")
    ));
    report.set("annotators", names.join(","));
    report.set("docs", ids.len() as u64);
    report.set("keep_singletons", args.keep_singletons);
    let total = |pick: fn(&AdjudicationReport) -> usize| -> u64 {
        doc_reports.iter().map(|(_, r)| pick(r) as u64).sum()
    };
    report.set("unanimous", total(|r| r.unanimous.len()));
    report.set("majority", total(|r| r.majority.len()));
    report.set("rejected", total(|r| r.rejected.len()));
    report.set("unresolved", total(|r| r.unresolved.len()));
    report.set("near_misses", total(|r| r.near_misses.len()));
    for (id, votes) in &doc_reports {
        let prefix = format!("doc.{id}");
        for (key, links) in [
            ("unanimous", &votes.unanimous),
            ("majority", &votes.majority),
            ("rejected", &votes.rejected),
            ("near_miss", &votes.near_misses),
        ] {
            for (i, link) in links.iter().enumerate() {
                report.set(format!("{prefix}.{key}.{i}"), link_text(link));
            }
        }
        for (i, span) in votes.unresolved.iter().enumerate() {
            report.set(format!("{prefix}.unresolved.{i}"), span_text(span));
        }
    }

    let merged = Corpus::new(merged_docs);
    let rendered = render_corpus(&merged, settings.format_for(&args.out));
    let report_text = report.render(false);

    std::fs::write(&args.out, rendered)
        .with_context(|| format!("writing {}", args.out.display()))?;
    info!("wrote merged corpus to {}", args.out.display());
    if let Some(path) = &args.report {
        std::fs::write(path, &report_text)
            .with_context(|| format!("writing {}", path.display()))?;
        info!("wrote vote report to {}", path.display());
    }
    print!("{}", report.render(settings.json));
    Ok(())
}

fn span_text(span: &MentionSpan) -> String {
    format!("{}-{}", span.start, span.end)
}

fn link_text(link: &(MentionSpan, MentionSpan)) -> String {
    format!("{}~{}", span_text(&link.0), span_text(&link.1))
}
