//! Gender-cue ablation: four mechanisms and the nine-variant suite.
//!
//! * **Pro** — rewrite every third-person gendered pronoun into a neutral
//!   paradigm (singular they by default),
//! * **Name** — truncate first names to initials (same operation as
//!   augmentation rule R5),
//! * **Sem** — replace gendered nouns with their neutral form,
//! * **Addr** — delete address terms ("Mr.", "Dr."), compacting spans.
//!
//! Mechanisms combine freely except that Pro only co-occurs with others in
//! the full four-mechanism combo. [`ablation_suite`] emits the nine standard
//! variants per document.

use std::fmt;
use std::str::FromStr;

use crate::augment::plan_r5;
use crate::corpus::Document;
use crate::lexicon::{
    apply_case, classify_token, map_to, GenderClass, GenderLexicon, MapTarget, PronounSlot,
    TokenCategory,
};
use crate::remap::{apply_plan, EditPlan, RemapError, SpanRemap};

/// One ablation mechanism. The variant order is the canonical display and
/// application order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mechanism {
    Pro,
    Name,
    Sem,
    Addr,
}

impl Mechanism {
    pub const ALL: [Mechanism; 4] = [
        Mechanism::Pro,
        Mechanism::Name,
        Mechanism::Sem,
        Mechanism::Addr,
    ];

    fn label(self) -> &'static str {
        match self {
            Mechanism::Pro => "pro",
            Mechanism::Name => "name",
            Mechanism::Sem => "sem",
            Mechanism::Addr => "addr",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Mechanism {
    type Err = AblateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "pro" => Ok(Mechanism::Pro),
            "name" => Ok(Mechanism::Name),
            "sem" => Ok(Mechanism::Sem),
            "addr" => Ok(Mechanism::Addr),
            other => Err(AblateError::UnknownMechanism(other.to_string())),
        }
    }
}

/// A set of ablation mechanisms applied together.
///
/// Pro isolates the pronoun signal, so it combines with other mechanisms
/// only in the all-four combo; [`AblationCombo::new`] enforces this.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AblationCombo {
    members: [bool; 4],
}

impl AblationCombo {
    /// Build a combo, rejecting Pro paired with a strict subset of the
    /// other mechanisms.
    pub fn new(mechanisms: impl IntoIterator<Item = Mechanism>) -> Result<Self, AblateError> {
        let mut members = [false; 4];
        for m in mechanisms {
            members[m as usize] = true;
        }
        let combo = AblationCombo { members };
        let others = [Mechanism::Name, Mechanism::Sem, Mechanism::Addr]
            .into_iter()
            .filter(|&m| combo.contains(m))
            .count();
        if combo.contains(Mechanism::Pro) && others != 0 && others != 3 {
            return Err(AblateError::ProCombination);
        }
        Ok(combo)
    }

    /// The empty combo (identity ablation).
    pub fn empty() -> Self {
        AblationCombo { members: [false; 4] }
    }

    /// Parse a comma-separated mechanism list such as `"name,sem"`.
    pub fn parse(text: &str) -> Result<Self, AblateError> {
        let mechanisms = text
            .split(',')
            .filter(|part| !part.trim().is_empty())
            .map(Mechanism::from_str)
            .collect::<Result<Vec<_>, _>>()?;
        AblationCombo::new(mechanisms)
    }

    pub fn contains(&self, m: Mechanism) -> bool {
        self.members[m as usize]
    }

    /// Mechanisms in canonical order.
    pub fn mechanisms(&self) -> impl Iterator<Item = Mechanism> + '_ {
        Mechanism::ALL.into_iter().filter(|&m| self.contains(m))
    }

    /// Name usable in file names: mechanisms joined by `_` ("name_sem"), or
    /// "none" for the empty combo.
    pub fn slug(&self) -> String {
        let parts: Vec<&str> = self.mechanisms().map(Mechanism::label).collect();
        if parts.is_empty() {
            "none".to_string()
        } else {
            parts.join("_")
        }
    }
}

impl fmt::Display for AblationCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.mechanisms().map(|m| format!("+{m}")).collect();
        if parts.is_empty() {
            f.write_str("(none)")
        } else {
            f.write_str(&parts.join(""))
        }
    }
}

impl FromStr for AblationCombo {
    type Err = AblateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AblationCombo::parse(s)
    }
}

/// Errors raised by ablation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AblateError {
    #[error("unknown ablation mechanism '{0}' (expected pro, name, sem or addr)")]
    UnknownMechanism(String),
    #[error("'pro' combines with other mechanisms only in the full pro,name,sem,addr combo")]
    ProCombination,
    #[error(transparent)]
    Remap(#[from] RemapError),
}

/// Options shared by all ablation calls.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AblateOptions {
    /// Paradigm the Pro mechanism rewrites pronouns into.
    pub pro_target: GenderClass,
    /// Also rewrite the impersonal forms it/its/itself under Pro.
    pub include_impersonal: bool,
    /// Drop mentions whose spans empty under Addr instead of failing.
    pub allow_drop: bool,
}

impl Default for AblateOptions {
    fn default() -> Self {
        AblateOptions {
            pro_target: GenderClass::NeutralThey,
            include_impersonal: false,
            allow_drop: false,
        }
    }
}

/// Slot assignment for the impersonal forms, which no paradigm covers.
/// "it" doubles as accusative; the nominative form is used for both.
const IMPERSONAL_SLOTS: [(&str, PronounSlot); 3] = [
    ("it", PronounSlot::Nominative),
    ("its", PronounSlot::PossessiveDependent),
    ("itself", PronounSlot::Reflexive),
];

fn pro_replacement(text: &str, lex: &GenderLexicon, opts: &AblateOptions) -> Option<String> {
    let is_pronoun = classify_token(text, lex)
        .is_some_and(|info| info.category == TokenCategory::Pronoun);
    if is_pronoun {
        return map_to(text, &MapTarget::Gender(opts.pro_target.clone()), lex);
    }
    if opts.include_impersonal {
        let lower = text.to_lowercase();
        let slot = IMPERSONAL_SLOTS
            .iter()
            .find(|(form, _)| *form == lower)
            .map(|&(_, slot)| slot)?;
        let form = lex.paradigm(&opts.pro_target)?.form(slot);
        return Some(apply_case(text, form));
    }
    None
}

/// Build the edit plan for one combo. Mechanisms apply in canonical order
/// (Pro, Name, Sem, Addr), later mechanisms overriding earlier edits on the
/// rare token both touch.
fn build_plan(
    doc: &Document,
    combo: &AblationCombo,
    lex: &GenderLexicon,
    opts: &AblateOptions,
) -> EditPlan {
    let mut plan = EditPlan::identity(doc.tokens.len());
    if combo.contains(Mechanism::Pro) {
        for (idx, token) in doc.tokens.iter().enumerate() {
            if let Some(text) = pro_replacement(&token.text, lex, opts) {
                plan.retext(idx, text);
            }
        }
    }
    if combo.contains(Mechanism::Name) {
        plan_r5(doc, lex, &mut plan);
    }
    if combo.contains(Mechanism::Sem) {
        for (idx, token) in doc.tokens.iter().enumerate() {
            let is_noun = classify_token(&token.text, lex)
                .is_some_and(|info| info.category == TokenCategory::GenderedNoun);
            if is_noun {
                if let Some(text) = map_to(&token.text, &MapTarget::Neutral, lex) {
                    plan.retext(idx, text);
                }
            }
        }
    }
    if combo.contains(Mechanism::Addr) {
        for (idx, token) in doc.tokens.iter().enumerate() {
            if lex.is_address_term(&token.text) {
                plan.delete(idx);
            }
        }
    }
    plan
}

/// Apply one ablation combo to a document.
///
/// Fails with an [`RemapError::EmptyRemappedSpan`] when Addr deletes every
/// token of a mention, unless `opts.allow_drop` is set (then the mention is
/// dropped).
pub fn ablate(
    doc: &Document,
    combo: &AblationCombo,
    lex: &GenderLexicon,
    opts: &AblateOptions,
) -> Result<Document, AblateError> {
    Ok(ablate_with_remap(doc, combo, lex, opts)?.0)
}

/// [`ablate`], also returning the span remap (non-trivial under Addr).
pub fn ablate_with_remap(
    doc: &Document,
    combo: &AblationCombo,
    lex: &GenderLexicon,
    opts: &AblateOptions,
) -> Result<(Document, SpanRemap), AblateError> {
    let plan = build_plan(doc, combo, lex, opts);
    let out = apply_plan(doc, &plan, opts.allow_drop)?;
    Ok((out.document, out.remap))
}

/// The nine standard combos, in canonical order.
pub fn suite_combos() -> Vec<AblationCombo> {
    use Mechanism::*;
    [
        vec![Pro],
        vec![Name],
        vec![Sem],
        vec![Addr],
        vec![Name, Sem],
        vec![Name, Addr],
        vec![Sem, Addr],
        vec![Name, Sem, Addr],
        vec![Pro, Name, Sem, Addr],
    ]
    .into_iter()
    .map(|set| AblationCombo::new(set).expect("suite combos respect the pro rule"))
    .collect()
}

/// Ablate `doc` under every suite combo: exactly nine variants, in the order
/// of [`suite_combos`].
pub fn ablation_suite(
    doc: &Document,
    lex: &GenderLexicon,
    opts: &AblateOptions,
) -> Result<Vec<(AblationCombo, Document)>, AblateError> {
    suite_combos()
        .into_iter()
        .map(|combo| {
            let out = ablate(doc, &combo, lex, opts)?;
            Ok((combo, out))
        })
        .collect()
}
