//! Morphosyntactic tags, the lexicon-backed tagger and the pre-tagged TSV format.
//!
//! Tags follow the EAGLES scheme (`NCMS000`, `VMIP3S0`, `DA0MS0`, ...). Only
//! the first four positions are used downstream: category, type, and the
//! first two attributes (gender/number for nominals, mood/tense for verbs).

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use crate::corpus::SentenceRecord;
use crate::error::{Error, Result};

/// Number of leading tag positions kept after truncation.
pub const TRUNCATED_LEN: usize = 4;

/// A morphosyntactic label together with its truncated form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PosTag {
    full: String,
    cut: usize,
}

impl PosTag {
    /// Parses a full tag, keeping its first [`TRUNCATED_LEN`] characters as
    /// the truncated form.
    pub fn new(full: &str) -> Result<Self> {
        let full = full.trim();
        if full.is_empty() {
            return Err(Error::Tag("empty tag".into()));
        }
        if full.chars().any(|c| c.is_whitespace() || c.is_control()) {
            return Err(Error::Tag(format!("{full:?} contains whitespace")));
        }
        let cut = full
            .char_indices()
            .nth(TRUNCATED_LEN)
            .map(|(i, _)| i)
            .unwrap_or(full.len());
        Ok(PosTag {
            full: full.to_string(),
            cut,
        })
    }

    pub fn full(&self) -> &str {
        &self.full
    }

    pub fn truncated(&self) -> &str {
        &self.full[..self.cut]
    }

    /// A tag whose full form is this tag's truncated form.
    pub fn to_truncated(&self) -> PosTag {
        PosTag {
            full: self.truncated().to_string(),
            cut: self.cut,
        }
    }

    pub fn category(&self) -> char {
        self.full.chars().next().expect("tags are non-empty")
    }

    pub fn class(&self) -> TagClass {
        classify_tag(self)
    }

    pub fn is_content(&self) -> bool {
        self.class() != TagClass::Functional
    }

    /// Same truncated form.
    pub fn same_class_as(&self, other: &PosTag) -> bool {
        self.truncated() == other.truncated()
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.full)
    }
}

pub fn truncate_tag(full: &str) -> Result<PosTag> {
    PosTag::new(full)
}

/// Function words and punctuation versus the three content classes that get replaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TagClass {
    Functional,
    ContentV,
    ContentS,
    ContentA,
}

pub fn classify_tag(tag: &PosTag) -> TagClass {
    classify_category(tag.category())
}

pub fn classify_category(category: char) -> TagClass {
    match category {
        'V' => TagClass::ContentV,
        'N' => TagClass::ContentS,
        'A' => TagClass::ContentA,
        _ => TagClass::Functional,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedToken {
    pub surface: String,
    pub tag: PosTag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedSentence {
    pub tokens: Vec<TaggedToken>,
    pub source: SentenceRecord,
}

impl TaggedSentence {
    pub fn id(&self) -> String {
        self.source.id()
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.surface.as_str())
    }
}

/// Anything that can assign one tag per token.
pub trait Tagger {
    fn tag_sentence(&self, sentence: &SentenceRecord) -> TaggedSentence;
}

/// Tag assigned to unknown capitalized tokens.
pub const DEFAULT_CAPITALIZED: &str = "NCMS000";
/// Tag assigned to any other unknown token.
pub const DEFAULT_OTHER: &str = "NC00000";

const BUILTIN_SUFFIX_RULES: &str = include_str!("../data/suffix_rules.tsv");

/// Surface-form lexicon with unigram weights and suffix fallbacks.
#[derive(Debug, Clone, Default)]
pub struct TaggerLexicon {
    entries: HashMap<String, Vec<(PosTag, f64)>>,
    suffix_rules: Vec<(String, PosTag)>,
}

impl TaggerLexicon {
    /// Empty lexicon with the bundled suffix rules.
    pub fn new() -> Self {
        TaggerLexicon {
            suffix_rules: parse_suffix_rules(BUILTIN_SUFFIX_RULES).expect("bundled suffix rules are well-formed"),
            ..TaggerLexicon::default()
        }
    }

    pub fn insert(&mut self, surface: &str, tag: PosTag, weight: f64) -> Result<()> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::Config(format!(
                "weight for {surface:?}/{tag} must be positive, got {weight}"
            )));
        }
        let tags = self.entries.entry(surface.to_string()).or_default();
        match tags.iter_mut().find(|(t, _)| *t == tag) {
            Some((_, w)) => *w += weight,
            None => tags.push((tag, weight)),
        }
        Ok(())
    }

    /// Reads `surface<TAB>fulltag<TAB>weight` lines.
    pub fn read(reader: impl BufRead, source_name: &str) -> Result<Self> {
        let mut lex = TaggerLexicon::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::format(source_name, i + 1, e.to_string()))?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::format(
                    source_name,
                    i + 1,
                    format!("expected 3 tab-separated fields, found {}", fields.len()),
                ));
            }
            let tag = PosTag::new(fields[1])
                .map_err(|e| Error::format(source_name, i + 1, e.to_string()))?;
            let weight: f64 = fields[2]
                .parse()
                .map_err(|_| Error::format(source_name, i + 1, format!("bad weight {:?}", fields[2])))?;
            lex.insert(fields[0], tag, weight)
                .map_err(|e| Error::format(source_name, i + 1, e.to_string()))?;
        }
        Ok(lex)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Highest-weight tag for an exact surface form; ties go to the
    /// lexicographically smallest full tag.
    pub fn best_tag(&self, surface: &str) -> Option<&PosTag> {
        self.entries.get(surface).and_then(|tags| {
            tags.iter()
                .max_by(|(ta, wa), (tb, wb)| wa.total_cmp(wb).then_with(|| tb.full().cmp(ta.full())))
                .map(|(t, _)| t)
        })
    }

    pub fn tag_token(&self, surface: &str) -> PosTag {
        if let Some(tag) = self.best_tag(surface) {
            return tag.clone();
        }
        let lower = surface.to_lowercase();
        if let Some(tag) = self.best_tag(&lower) {
            return tag.clone();
        }
        if let Some(tag) = punctuation_tag(surface) {
            return PosTag::new(tag).unwrap();
        }
        if surface.chars().all(|c| c.is_ascii_digit() || c == '.' || c == ',')
            && surface.chars().any(|c| c.is_ascii_digit())
        {
            return PosTag::new("Z").unwrap();
        }
        if let Some((_, tag)) = self
            .suffix_rules
            .iter()
            .find(|(suffix, _)| lower.len() > suffix.len() && lower.ends_with(suffix.as_str()))
        {
            return tag.clone();
        }
        if surface.chars().next().is_some_and(char::is_uppercase) {
            PosTag::new(DEFAULT_CAPITALIZED).unwrap()
        } else {
            PosTag::new(DEFAULT_OTHER).unwrap()
        }
    }
}

impl Tagger for TaggerLexicon {
    fn tag_sentence(&self, sentence: &SentenceRecord) -> TaggedSentence {
        TaggedSentence {
            tokens: sentence
                .tokens
                .iter()
                .map(|surface| TaggedToken {
                    surface: surface.clone(),
                    tag: self.tag_token(surface),
                })
                .collect(),
            source: sentence.clone(),
        }
    }
}

pub fn tag_sentence(sentence: &SentenceRecord, lexicon: &TaggerLexicon) -> TaggedSentence {
    lexicon.tag_sentence(sentence)
}

fn parse_suffix_rules(text: &str) -> Result<Vec<(String, PosTag)>> {
    let mut rules = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (suffix, tag) = line
            .split_once('\t')
            .ok_or_else(|| Error::format("suffix_rules.tsv", i + 1, "expected suffix<TAB>tag"))?;
        rules.push((suffix.to_string(), PosTag::new(tag)?));
    }
    // longest suffix wins
    rules.sort_by(|a, b| b.0.chars().count().cmp(&a.0.chars().count()).then_with(|| a.0.cmp(&b.0)));
    Ok(rules)
}

fn punctuation_tag(surface: &str) -> Option<&'static str> {
    let tag = match surface {
        "." => "Fp",
        "," => "Fc",
        ";" => "Fx",
        ":" => "Fd",
        "¡" => "Faa",
        "!" => "Fat",
        "¿" => "Fia",
        "?" => "Fit",
        "\"" => "Fe",
        "…" | "..." => "Fs",
        "(" => "Fpa",
        ")" => "Fpt",
        "«" => "Fra",
        "»" => "Frc",
        "-" | "—" | "–" => "Fg",
        _ if !surface.is_empty() && surface.chars().all(|c| !c.is_alphanumeric()) => "Fz",
        _ => return None,
    };
    Some(tag)
}

/// Reads the pre-tagged format: `surface<TAB>fulltag` per line, a blank line
/// between sentences, LF endings. Sentence records get `doc_id` and their
/// ordinal in the file.
pub fn read_tagged_tsv(reader: impl BufRead, doc_id: &str) -> Result<Vec<TaggedSentence>> {
    let mut sentences = Vec::new();
    let mut current: Vec<TaggedToken> = Vec::new();
    let flush = |current: &mut Vec<TaggedToken>, sentences: &mut Vec<TaggedSentence>| {
        if current.is_empty() {
            return;
        }
        let tokens = std::mem::take(current);
        let surfaces: Vec<String> = tokens.iter().map(|t| t.surface.clone()).collect();
        let record = SentenceRecord::from_tokens(doc_id, sentences.len(), surfaces);
        sentences.push(TaggedSentence {
            tokens,
            source: record,
        });
    };
    for (i, line) in reader.split(b'\n').enumerate() {
        let line = line.map_err(|e| Error::format(doc_id, i + 1, e.to_string()))?;
        let line = String::from_utf8(line).map_err(|_| Error::format(doc_id, i + 1, "invalid UTF-8"))?;
        if line.contains('\r') {
            return Err(Error::format(doc_id, i + 1, "CR in line; expected LF line endings"));
        }
        if line.is_empty() {
            flush(&mut current, &mut sentences);
            continue;
        }
        let (surface, tag) = line
            .split_once('\t')
            .ok_or_else(|| Error::format(doc_id, i + 1, "expected surface<TAB>tag"))?;
        if surface.is_empty() {
            return Err(Error::format(doc_id, i + 1, "empty surface form"));
        }
        let tag = PosTag::new(tag).map_err(|e| Error::format(doc_id, i + 1, e.to_string()))?;
        current.push(TaggedToken {
            surface: surface.to_string(),
            tag,
        });
    }
    flush(&mut current, &mut sentences);
    Ok(sentences)
}

/// Writes the pre-tagged format. Sentences are separated by one blank line;
/// the file ends with a single LF after the last token.
pub fn write_tagged_tsv(mut writer: impl Write, sentences: &[TaggedSentence]) -> std::io::Result<()> {
    for (i, sentence) in sentences.iter().enumerate() {
        if i > 0 {
            writer.write_all(b"\n")?;
        }
        for token in &sentence.tokens {
            writeln!(writer, "{}\t{}", token.surface, token.tag.full())?;
        }
    }
    Ok(())
}
