//! Pieces shared by the three generation pipelines: options, the output
//! record with its per-slot trace, surface realization and the novelty check.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::{DecodePolicy, MAX_LEN, MIN_LEN};
use crate::model3::ScoreDirection;
use crate::resources::Resources;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    /// Markov skeleton filled from embedding neighbors of the query.
    One,
    /// Template filled from the associative table ranked by query proximity.
    Two,
    /// Template filled by the min-max geometric score.
    Three,
}

impl Model {
    pub fn number(self) -> u8 {
        match self {
            Model::One => 1,
            Model::Two => 2,
            Model::Three => 3,
        }
    }
}

impl TryFrom<u8> for Model {
    type Error = Error;

    fn try_from(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Model::One),
            2 => Ok(Model::Two),
            3 => Ok(Model::Three),
            _ => Err(Error::Config(format!("model must be 1, 2 or 3, got {n}"))),
        }
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<u8>()
            .map_err(|_| Error::Config(format!("model must be 1, 2 or 3, got {s:?}")))
            .and_then(Model::try_from)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateOptions {
    /// Size of L(Q) in model 1.
    pub neighbor_count: usize,
    /// Query relaxations allowed per slot in model 1.
    pub max_hops: usize,
    pub policy: DecodePolicy,
    /// Most frequent candidates kept per slot in model 3.
    pub cap_m: usize,
    pub direction: ScoreDirection,
    /// Whole-sentence attempts before giving up.
    pub max_attempts: usize,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions {
            neighbor_count: 20,
            max_hops: 5,
            policy: DecodePolicy::default(),
            cap_m: 200,
            direction: ScoreDirection::Printed,
            max_attempts: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillSource {
    Literal,
    Dictionary,
    Neighbor,
    Inflection,
    Ranking,
    Score,
    /// Model 3 slot whose original word is out of vocabulary.
    RankingFallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateTrace {
    pub w: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proximity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
}

impl CandidateTrace {
    pub fn ranked(w: &str, proximity: f64) -> Self {
        CandidateTrace {
            w: w.to_string(),
            proximity: Some(proximity),
            theta: None,
            beta: None,
            s: None,
        }
    }
}

/// Decision record for one filled position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotTrace {
    pub position: usize,
    pub tag: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub o: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<CandidateTrace>,
    pub chosen: String,
    pub source: FillSource,
    /// Query chain Q, Q*, Q**, ... used by model 1.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub queries: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hops: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SkeletonRef {
    Egv { tags: Vec<String> },
    Template { id: usize, source_id: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedSentence {
    pub model: Model,
    pub query: String,
    pub tokens: Vec<String>,
    pub text: String,
    pub skeleton: SkeletonRef,
    pub trace: Vec<SlotTrace>,
    /// Attempts used, counting the successful one.
    pub attempts: usize,
}

const NO_SPACE_BEFORE: &[&str] = &[".", ",", ";", ":", "!", "?", "…", "...", "»", ")", "]", "”", "’"];
const NO_SPACE_AFTER: &[&str] = &["¿", "¡", "«", "(", "[", "“", "‘"];

/// Joins tokens with single spaces, attaching punctuation and capitalizing
/// the first letter.
pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut text = String::new();
    let mut glue_next = true;
    for token in tokens {
        let token = token.as_ref();
        if !glue_next && !NO_SPACE_BEFORE.contains(&token) {
            text.push(' ');
        }
        text.push_str(token);
        glue_next = NO_SPACE_AFTER.contains(&token);
    }
    capitalize_first(&text)
}

fn capitalize_first(text: &str) -> String {
    match text.char_indices().find(|(_, c)| c.is_alphabetic()) {
        Some((i, c)) => {
            let mut out = String::with_capacity(text.len());
            out.push_str(&text[..i]);
            out.extend(c.to_uppercase());
            out.push_str(&text[i + c.len_utf8()..]);
            out
        }
        None => text.to_string(),
    }
}

/// Lowercased words only, single-space separated. Two sentences are the
/// same for novelty purposes when their normalized forms are equal.
pub fn normalize(text: &str) -> String {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, Default)]
pub struct NoveltyIndex {
    seen: HashSet<String>,
}

impl NoveltyIndex {
    pub fn insert_text(&mut self, text: &str) {
        self.seen.insert(normalize(text));
    }

    pub fn insert_tokens<S: AsRef<str>>(&mut self, tokens: &[S]) {
        let joined: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
        self.insert_text(&joined.join(" "));
    }

    pub fn contains_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> bool {
        let joined: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
        self.seen.contains(&normalize(&joined.join(" ")))
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }
}

pub(crate) fn check_request(query: &str, n: usize, resources: &Resources) -> Result<()> {
    if !(MIN_LEN..=MAX_LEN).contains(&n) {
        return Err(Error::Config(format!("length must be in [{MIN_LEN}, {MAX_LEN}], got {n}")));
    }
    if !resources.store.contains(query) {
        return Err(Error::Oov(query.to_string()));
    }
    Ok(())
}

/// Outcome of one whole-sentence attempt.
pub(crate) struct Draft {
    pub tokens: Vec<String>,
    pub skeleton: SkeletonRef,
    pub trace: Vec<SlotTrace>,
}

/// Runs `attempt` until it yields a sentence absent from the corpora.
/// `retryable` decides which errors are worth another attempt.
pub(crate) fn generate_novel(
    model: Model,
    query: &str,
    resources: &Resources,
    opts: &GenerateOptions,
    mut retryable: impl FnMut(&Error) -> bool,
    mut attempt: impl FnMut() -> Result<Draft>,
) -> Result<GeneratedSentence> {
    let attempts = opts.max_attempts.max(1);
    let mut last_err = None;
    for k in 1..=attempts {
        match attempt() {
            Ok(draft) => {
                if resources.novelty.contains_tokens(&draft.tokens) {
                    last_err = Some(Error::Generation {
                        msg: format!("no novel sentence in {attempts} attempts"),
                        partial: vec![],
                    });
                    continue;
                }
                return Ok(GeneratedSentence {
                    model,
                    query: query.to_string(),
                    text: detokenize(&draft.tokens),
                    tokens: draft.tokens,
                    skeleton: draft.skeleton,
                    trace: draft.trace,
                    attempts: k,
                });
            }
            Err(e) if retryable(&e) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt ran"))
}

/// Dispatches to the model's pipeline.
pub fn generate(
    model: Model,
    query: &str,
    n: usize,
    resources: &Resources,
    seed: u64,
    opts: &GenerateOptions,
) -> Result<GeneratedSentence> {
    match model {
        Model::One => crate::model1::generate_model1(query, n, resources, seed, opts),
        Model::Two => crate::model2::generate_model2(query, n, resources, seed, opts),
        Model::Three => crate::model3::generate_model3(query, n, resources, seed, opts),
    }
}
