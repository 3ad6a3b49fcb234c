//! Gender lexicon: pronoun paradigms, gendered nouns, descriptors and
//! address terms, plus token classification and form mapping.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Built-in lexicon shipped with the crate. User lexicons extend/override it.
const DEFAULT_LEXICON: &str = include_str!("data/default_lexicon.txt");

/// Grammatical slot of an English personal pronoun.
///
/// The order of the variants is the tie-break order used when a surface form
/// fills several slots of one paradigm (e.g. "her", "his").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PronounSlot {
    Nominative,
    Accusative,
    PossessiveDependent,
    PossessiveIndependent,
    Reflexive,
}

impl PronounSlot {
    /// All slots in tie-break order.
    pub const ALL: [PronounSlot; 5] = [
        PronounSlot::Nominative,
        PronounSlot::Accusative,
        PronounSlot::PossessiveDependent,
        PronounSlot::PossessiveIndependent,
        PronounSlot::Reflexive,
    ];

    fn label(self) -> &'static str {
        match self {
            PronounSlot::Nominative => "nominative",
            PronounSlot::Accusative => "accusative",
            PronounSlot::PossessiveDependent => "possessive_dependent",
            PronounSlot::PossessiveIndependent => "possessive_independent",
            PronounSlot::Reflexive => "reflexive",
        }
    }
}

impl fmt::Display for PronounSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Gender class of a pronoun paradigm or gendered word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GenderClass {
    Masculine,
    Feminine,
    /// Singular they.
    NeutralThey,
    /// The zie/zir neopronoun paradigm.
    NeoZie,
    /// A user-defined paradigm, keyed by its lowercase name.
    Custom(String),
}

impl GenderClass {
    /// Canonical lowercase name, matching the lexicon file syntax.
    pub fn name(&self) -> &str {
        match self {
            GenderClass::Masculine => "masculine",
            GenderClass::Feminine => "feminine",
            GenderClass::NeutralThey => "they",
            GenderClass::NeoZie => "zie",
            GenderClass::Custom(name) => name,
        }
    }

    /// True for classes other than masculine/feminine/they, i.e. neopronoun
    /// paradigms.
    pub fn is_neo(&self) -> bool {
        matches!(self, GenderClass::NeoZie | GenderClass::Custom(_))
    }
}

impl fmt::Display for GenderClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GenderClass {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_lowercase();
        Ok(match lower.as_str() {
            "masculine" | "masc" => GenderClass::Masculine,
            "feminine" | "fem" => GenderClass::Feminine,
            "they" | "neutral" => GenderClass::NeutralThey,
            "zie" => GenderClass::NeoZie,
            _ => GenderClass::Custom(lower),
        })
    }
}

/// Target of a form mapping: a concrete gender class, or the gender-neutral
/// form of a noun/descriptor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapTarget {
    Gender(GenderClass),
    Neutral,
}

impl FromStr for MapTarget {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(if s.trim().eq_ignore_ascii_case("neutral") {
            MapTarget::Neutral
        } else {
            MapTarget::Gender(s.parse().unwrap())
        })
    }
}

/// One pronoun paradigm: a gender class plus one surface form per slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PronounParadigm {
    pub class: GenderClass,
    forms: [String; 5],
}

impl PronounParadigm {
    pub fn new(class: GenderClass, forms: [String; 5]) -> Self {
        PronounParadigm { class, forms }
    }

    /// Lowercase surface form for `slot`.
    pub fn form(&self, slot: PronounSlot) -> &str {
        &self.forms[slot as usize]
    }
}

/// A gendered-noun row: masculine and feminine counterparts plus a neutral
/// replacement. `relational` marks relationship nouns ("boyfriend", "mother").
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NounEntry {
    pub masculine: String,
    pub feminine: String,
    pub neutral: String,
    pub relational: bool,
}

/// A gender descriptor ("male", "woman"). Paired entries know their
/// opposite-gender counterpart; unpaired entries only map to neutral.
#[derive(Debug, Clone, PartialEq, Eq)]
struct DescriptorEntry {
    gender: Option<GenderClass>,
    counterpart: Option<String>,
    neutral: String,
}

/// Lexical category assigned by [`classify_token`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenCategory {
    Pronoun,
    GenderedNoun,
    Descriptor,
    AddressTerm,
}

/// Classification result for a single token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenGenderInfo {
    pub category: TokenCategory,
    /// Gender class, when the form determines one (always for pronouns and
    /// gendered nouns; only for paired descriptors).
    pub gender: Option<GenderClass>,
    /// Pronoun slot; `None` for non-pronouns.
    pub slot: Option<PronounSlot>,
    /// True for relationship nouns.
    pub relational: bool,
}

/// Errors raised while loading a lexicon.
#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("paradigm '{class}' is missing its {slot} form")]
    MissingParadigmSlot { class: String, slot: PronounSlot },
    #[error("'{token}' is defined more than once across lexicon categories")]
    ConflictingEntry { token: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Paradigms,
    Nouns,
    Descriptors,
    Address,
}

/// One `[descriptors]` row: the optional (masculine, feminine) pairing,
/// the matched term, and its neutral replacement.
type DescriptorRow = (Option<(String, String)>, String, String);

/// Raw rows from one lexicon source, before merging and index construction.
#[derive(Debug, Default)]
struct RawLexicon {
    paradigms: Vec<PronounParadigm>,
    nouns: Vec<NounEntry>,
    descriptor_rows: Vec<DescriptorRow>,
    address: Vec<String>,
}

fn parse_raw(source: &str) -> Result<RawLexicon, LexiconError> {
    let mut raw = RawLexicon::default();
    let mut section = None;
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = Some(match name.trim().to_lowercase().as_str() {
                "paradigms" => Section::Paradigms,
                "nouns" => Section::Nouns,
                "descriptors" => Section::Descriptors,
                "address" => Section::Address,
                other => {
                    return Err(LexiconError::Malformed {
                        line: line_no,
                        reason: format!("unknown section '[{other}]'"),
                    })
                }
            });
            continue;
        }
        let section = section.ok_or_else(|| LexiconError::Malformed {
            line: line_no,
            reason: "entry before any [section] header".into(),
        })?;
        let fields: Vec<String> = line
            .split(',')
            .map(|f| f.trim().to_lowercase())
            .collect();
        match section {
            Section::Paradigms => {
                let class: GenderClass = fields[0].parse().unwrap();
                if fields[0].is_empty() {
                    return Err(LexiconError::Malformed {
                        line: line_no,
                        reason: "paradigm row with empty class name".into(),
                    });
                }
                let mut forms: [String; 5] = Default::default();
                for (i, slot) in PronounSlot::ALL.into_iter().enumerate() {
                    match fields.get(i + 1).filter(|f| !f.is_empty()) {
                        Some(form) => forms[i] = form.clone(),
                        None => {
                            return Err(LexiconError::MissingParadigmSlot {
                                class: class.name().to_string(),
                                slot,
                            })
                        }
                    }
                }
                raw.paradigms.push(PronounParadigm::new(class, forms));
            }
            Section::Nouns => {
                if fields.len() < 3 || fields.iter().take(3).any(String::is_empty) {
                    return Err(LexiconError::Malformed {
                        line: line_no,
                        reason: "noun rows need masculine,feminine,neutral".into(),
                    });
                }
                let relational = match fields.get(3).map(String::as_str) {
                    None | Some("") => false,
                    Some("relational") => true,
                    Some(other) => {
                        return Err(LexiconError::Malformed {
                            line: line_no,
                            reason: format!("unknown noun flag '{other}'"),
                        })
                    }
                };
                raw.nouns.push(NounEntry {
                    masculine: fields[0].clone(),
                    feminine: fields[1].clone(),
                    neutral: fields[2].clone(),
                    relational,
                });
            }
            Section::Descriptors => match fields.len() {
                2 if !fields[0].is_empty() && !fields[1].is_empty() => {
                    raw.descriptor_rows
                        .push((None, fields[0].clone(), fields[1].clone()));
                }
                3 if fields.iter().all(|f| !f.is_empty()) => {
                    raw.descriptor_rows.push((
                        Some((fields[0].clone(), fields[1].clone())),
                        fields[0].clone(),
                        fields[2].clone(),
                    ));
                }
                _ => {
                    return Err(LexiconError::Malformed {
                        line: line_no,
                        reason: "descriptor rows are term,neutral or masculine,feminine,neutral"
                            .into(),
                    })
                }
            },
            Section::Address => {
                if fields.len() != 1 || fields[0].is_empty() {
                    return Err(LexiconError::Malformed {
                        line: line_no,
                        reason: "address rows hold a single term".into(),
                    });
                }
                raw.address.push(fields[0].clone());
            }
        }
    }
    Ok(raw)
}

/// The full lexicon with lookup indices.
#[derive(Debug, Clone)]
pub struct GenderLexicon {
    paradigms: Vec<PronounParadigm>,
    nouns: Vec<NounEntry>,
    /// lowercase form -> (paradigm index, slot); slot picked by tie-break.
    pronoun_index: HashMap<String, (usize, PronounSlot)>,
    /// lowercase form -> (noun index, true when the form is the masculine one).
    noun_index: HashMap<String, (usize, bool)>,
    descriptor_index: HashMap<String, DescriptorEntry>,
    /// Trailing periods trimmed; compared case-insensitively.
    address: HashSet<String>,
}

fn strip_trailing_period(term: &str) -> &str {
    term.trim_end_matches('.')
}

impl GenderLexicon {
    /// The built-in default lexicon.
    pub fn builtin() -> GenderLexicon {
        load_lexicon(None).expect("built-in lexicon is well-formed")
    }

    fn build(raw: RawLexicon) -> Result<GenderLexicon, LexiconError> {
        let mut lex = GenderLexicon {
            paradigms: raw.paradigms,
            nouns: raw.nouns,
            pronoun_index: HashMap::new(),
            noun_index: HashMap::new(),
            descriptor_index: HashMap::new(),
            address: HashSet::new(),
        };
        for (p_idx, paradigm) in lex.paradigms.iter().enumerate() {
            for slot in PronounSlot::ALL {
                let form = paradigm.form(slot).to_string();
                match lex.pronoun_index.get(&form) {
                    // Same paradigm, earlier slot: tie-break keeps the first
                    // slot in `PronounSlot::ALL` order.
                    Some((idx, _)) if *idx == p_idx => {}
                    Some(_) => return Err(LexiconError::ConflictingEntry { token: form }),
                    None => {
                        lex.pronoun_index.insert(form, (p_idx, slot));
                    }
                }
            }
        }
        for (n_idx, noun) in lex.nouns.iter().enumerate() {
            for (form, is_masc) in [(&noun.masculine, true), (&noun.feminine, false)] {
                if lex.noun_index.insert(form.clone(), (n_idx, is_masc)).is_some() {
                    return Err(LexiconError::ConflictingEntry {
                        token: form.clone(),
                    });
                }
            }
        }
        for (pair, term, neutral) in raw.descriptor_rows {
            match pair {
                None => {
                    let entry = DescriptorEntry {
                        gender: None,
                        counterpart: None,
                        neutral,
                    };
                    if lex.descriptor_index.insert(term.clone(), entry).is_some() {
                        return Err(LexiconError::ConflictingEntry { token: term });
                    }
                }
                Some((masc, fem)) => {
                    for (form, gender, other) in [
                        (&masc, GenderClass::Masculine, &fem),
                        (&fem, GenderClass::Feminine, &masc),
                    ] {
                        let entry = DescriptorEntry {
                            gender: Some(gender),
                            counterpart: Some(other.clone()),
                            neutral: neutral.clone(),
                        };
                        if lex.descriptor_index.insert(form.clone(), entry).is_some() {
                            return Err(LexiconError::ConflictingEntry {
                                token: form.clone(),
                            });
                        }
                    }
                }
            }
        }
        for term in raw.address {
            lex.address.insert(strip_trailing_period(&term).to_string());
        }
        // A surface form may live in at most one category.
        for form in lex.pronoun_index.keys() {
            if lex.noun_index.contains_key(form) || lex.descriptor_index.contains_key(form) {
                return Err(LexiconError::ConflictingEntry {
                    token: form.clone(),
                });
            }
        }
        for form in lex.noun_index.keys() {
            if lex.descriptor_index.contains_key(form) {
                return Err(LexiconError::ConflictingEntry {
                    token: form.clone(),
                });
            }
        }
        Ok(lex)
    }

    /// Paradigm for `class`, if one is defined.
    pub fn paradigm(&self, class: &GenderClass) -> Option<&PronounParadigm> {
        self.paradigms.iter().find(|p| &p.class == class)
    }

    /// All paradigms, in definition order.
    pub fn paradigms(&self) -> &[PronounParadigm] {
        &self.paradigms
    }

    /// All gendered-noun entries.
    pub fn nouns(&self) -> &[NounEntry] {
        &self.nouns
    }

    /// True when `token` is an address term ("Mr.", "Dr."), ignoring case and
    /// a trailing period.
    pub fn is_address_term(&self, token: &str) -> bool {
        self.address
            .contains(strip_trailing_period(&token.to_lowercase()))
    }
}

/// Merge `user` rows over the built-in lexicon: a user paradigm replaces the
/// built-in paradigm of the same class, a user noun/descriptor row replaces
/// the row keyed by the same first form, address terms accumulate.
fn merge(mut base: RawLexicon, user: RawLexicon) -> RawLexicon {
    for paradigm in user.paradigms {
        match base.paradigms.iter_mut().find(|p| p.class == paradigm.class) {
            Some(slot) => *slot = paradigm,
            None => base.paradigms.push(paradigm),
        }
    }
    for noun in user.nouns {
        match base.nouns.iter_mut().find(|n| n.masculine == noun.masculine) {
            Some(slot) => *slot = noun,
            None => base.nouns.push(noun),
        }
    }
    for row in user.descriptor_rows {
        match base.descriptor_rows.iter_mut().find(|r| r.1 == row.1) {
            Some(slot) => *slot = row,
            None => base.descriptor_rows.push(row),
        }
    }
    base.address.extend(user.address);
    base
}

/// Load a lexicon. `user_source` rows extend and override the built-in
/// defaults; `None` yields the defaults alone.
pub fn load_lexicon(user_source: Option<&str>) -> Result<GenderLexicon, LexiconError> {
    let base = parse_raw(DEFAULT_LEXICON)?;
    let raw = match user_source {
        Some(source) => merge(base, parse_raw(source)?),
        None => base,
    };
    GenderLexicon::build(raw)
}

/// Classify one token against the lexicon, case-insensitively. Returns `None`
/// for tokens the lexicon does not know.
pub fn classify_token(token: &str, lex: &GenderLexicon) -> Option<TokenGenderInfo> {
    let lower = token.to_lowercase();
    if let Some(&(p_idx, slot)) = lex.pronoun_index.get(&lower) {
        return Some(TokenGenderInfo {
            category: TokenCategory::Pronoun,
            gender: Some(lex.paradigms[p_idx].class.clone()),
            slot: Some(slot),
            relational: false,
        });
    }
    if let Some(&(n_idx, is_masc)) = lex.noun_index.get(&lower) {
        let entry = &lex.nouns[n_idx];
        return Some(TokenGenderInfo {
            category: TokenCategory::GenderedNoun,
            gender: Some(if is_masc {
                GenderClass::Masculine
            } else {
                GenderClass::Feminine
            }),
            slot: None,
            relational: entry.relational,
        });
    }
    if let Some(entry) = lex.descriptor_index.get(&lower) {
        return Some(TokenGenderInfo {
            category: TokenCategory::Descriptor,
            gender: entry.gender.clone(),
            slot: None,
            relational: false,
        });
    }
    if lex.is_address_term(token) {
        return Some(TokenGenderInfo {
            category: TokenCategory::AddressTerm,
            gender: None,
            slot: None,
            relational: false,
        });
    }
    None
}

/// Capitalization pattern of a surface token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CasePattern {
    AllCaps,
    Title,
    Lower,
}

fn case_pattern(token: &str) -> CasePattern {
    let mut chars = token.chars();
    let first_upper = chars.next().is_some_and(|c| c.is_uppercase());
    let uppers = token.chars().filter(|c| c.is_uppercase()).count();
    let has_lower = token.chars().any(|c| c.is_lowercase());
    if first_upper && uppers >= 2 && !has_lower {
        CasePattern::AllCaps
    } else if first_upper {
        CasePattern::Title
    } else {
        CasePattern::Lower
    }
}

/// Re-case `replacement` (stored lowercase) to match the pattern of
/// `original`.
pub(crate) fn apply_case(original: &str, replacement: &str) -> String {
    match case_pattern(original) {
        CasePattern::AllCaps => replacement.to_uppercase(),
        CasePattern::Title => {
            let mut chars = replacement.chars();
            match chars.next() {
                Some(first) => first.to_uppercase().collect::<String>() + chars.as_str(),
                None => String::new(),
            }
        }
        CasePattern::Lower => replacement.to_string(),
    }
}

/// Map `token` to its form under `target`, preserving capitalization.
///
/// Returns `None` when the token is unknown, is an address term, or has no
/// defined form under the target (e.g. mapping a noun to a neopronoun class,
/// or a pronoun to a class with no paradigm).
pub fn map_to(token: &str, target: &MapTarget, lex: &GenderLexicon) -> Option<String> {
    let info = classify_token(token, lex)?;
    let lower = token.to_lowercase();
    let replacement = match info.category {
        TokenCategory::Pronoun => {
            let class = match target {
                MapTarget::Gender(class) => class.clone(),
                MapTarget::Neutral => GenderClass::NeutralThey,
            };
            let slot = info.slot.expect("pronouns carry a slot");
            lex.paradigm(&class)?.form(slot).to_string()
        }
        TokenCategory::GenderedNoun => {
            let (n_idx, _) = lex.noun_index[&lower];
            let entry = &lex.nouns[n_idx];
            match target {
                MapTarget::Gender(GenderClass::Masculine) => entry.masculine.clone(),
                MapTarget::Gender(GenderClass::Feminine) => entry.feminine.clone(),
                MapTarget::Neutral => entry.neutral.clone(),
                MapTarget::Gender(_) => return None,
            }
        }
        TokenCategory::Descriptor => {
            let entry = &lex.descriptor_index[&lower];
            match target {
                MapTarget::Neutral => entry.neutral.clone(),
                MapTarget::Gender(class @ (GenderClass::Masculine | GenderClass::Feminine)) => {
                    if entry.gender.as_ref() == Some(class) {
                        lower.clone()
                    } else {
                        entry.counterpart.clone()?
                    }
                }
                MapTarget::Gender(_) => return None,
            }
        }
        TokenCategory::AddressTerm => return None,
    };
    Some(apply_case(token, &replacement))
}
