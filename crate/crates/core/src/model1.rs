//! Model 1: a Markov tag skeleton whose function-word slots are drawn from a
//! dictionary and whose content slots come from the query's embedding
//! neighborhood, relaxing the query when no neighbor fits.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embeddings::EmbeddingStore;
use crate::error::{Error, Result};
use crate::generate::{check_request, generate_novel, CandidateTrace, Draft, FillSource, GenerateOptions, GeneratedSentence, Model, SkeletonRef, SlotTrace};
use crate::morphology::FormsLexicon;
use crate::pos::{PosTag, TaggedSentence};
use crate::resources::Resources;

/// Truncated function tag to the sorted, deduplicated surfaces seen under it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FunctionWordDictionary {
    entries: BTreeMap<String, Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct Row {
    tag: String,
    words: Vec<String>,
}

impl FunctionWordDictionary {
    pub fn build(corpus: &[TaggedSentence]) -> Self {
        let mut entries: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for token in corpus.iter().flat_map(|s| &s.tokens) {
            if !token.tag.is_content() {
                entries
                    .entry(token.tag.truncated().to_string())
                    .or_default()
                    .push(token.surface.to_lowercase());
            }
        }
        for words in entries.values_mut() {
            words.sort();
            words.dedup();
        }
        FunctionWordDictionary { entries }
    }

    pub fn get(&self, tag: &str) -> Option<&[String]> {
        self.entries.get(tag).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.entries.iter().map(|(t, w)| (t.as_str(), w.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, tag: &str, mut words: Vec<String>) {
        words.sort();
        words.dedup();
        self.entries.insert(tag.to_string(), words);
    }

    pub fn write_jsonl(&self, mut w: impl Write) -> std::io::Result<()> {
        for (tag, words) in &self.entries {
            serde_json::to_writer(
                &mut w,
                &Row {
                    tag: tag.clone(),
                    words: words.clone(),
                },
            )?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl(r: impl BufRead, source_name: &str) -> Result<Self> {
        let mut dict = FunctionWordDictionary::default();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::format(source_name, i + 1, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let row: Row = serde_json::from_str(&line).map_err(|e| Error::format(source_name, i + 1, e.to_string()))?;
            if row.words.is_empty() {
                return Err(Error::format(source_name, i + 1, format!("empty word list for {}", row.tag)));
            }
            if dict.entries.contains_key(&row.tag) {
                return Err(Error::format(source_name, i + 1, format!("duplicate tag {}", row.tag)));
            }
            dict.insert(&row.tag, row.words);
        }
        Ok(dict)
    }
}

/// Uniform draw from the dictionary list for `tag`.
pub fn fill_functional<R: Rng>(tag: &PosTag, dict: &FunctionWordDictionary, rng: &mut R) -> Result<String> {
    dict.get(tag.truncated())
        .and_then(|words| words.choose(rng))
        .cloned()
        .ok_or_else(|| Error::Dict(tag.truncated().to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContentFill {
    pub word: String,
    pub source: FillSource,
    /// Queries consulted, starting with the original one.
    pub queries: Vec<String>,
    pub hops: usize,
    /// The neighborhood the word was taken from.
    pub lexicon: Vec<(String, f64)>,
}

/// Scans L(Q) for a word matching `tag`, then for one that can be inflected
/// into it. When neither exists the query moves to its nearest neighbor not
/// yet visited, at most `max_hops` times.
pub fn fill_content_with_relaxation(
    tag: &PosTag,
    query: &str,
    store: &EmbeddingStore,
    forms: &FormsLexicon,
    m: usize,
    max_hops: usize,
) -> Result<ContentFill> {
    let mut visited = vec![query.to_string()];
    let mut hops = 0;
    loop {
        let lexicon = store.neighbors(visited.last().unwrap(), m)?;
        let found = lexicon
            .words()
            .find(|w| forms.matches_tag(w, tag))
            .map(|w| (w.to_string(), FillSource::Neighbor))
            .or_else(|| {
                lexicon
                    .words()
                    .find_map(|w| forms.inflect(w, tag).found())
                    .map(|w| (w, FillSource::Inflection))
            });
        if let Some((word, source)) = found {
            return Ok(ContentFill {
                word,
                source,
                queries: visited,
                hops,
                lexicon: lexicon.entries,
            });
        }
        let next = if hops < max_hops {
            lexicon.words().find(|w| !visited.iter().any(|v| v == w)).map(str::to_string)
        } else {
            None
        };
        match next {
            Some(next) => {
                visited.push(next);
                hops += 1;
            }
            None => {
                return Err(Error::Relaxation {
                    tag: tag.truncated().to_string(),
                    hops,
                    visited,
                })
            }
        }
    }
}

fn attempt<R: Rng>(query: &str, n: usize, res: &Resources, opts: &GenerateOptions, rng: &mut R) -> Result<Draft> {
    let egv = res.matrix.generate_egv(None, n, opts.policy, rng)?;
    let mut tokens = Vec::with_capacity(n);
    let mut trace = Vec::with_capacity(n);
    for (position, tag) in egv.slots.iter().enumerate() {
        let slot = if tag.is_content() {
            let fill = fill_content_with_relaxation(tag, query, &res.store, &res.forms, opts.neighbor_count, opts.max_hops)
                .map_err(|e| e.at_slot(position))?;
            SlotTrace {
                position,
                tag: tag.truncated().to_string(),
                o: None,
                candidates: fill.lexicon.iter().map(|(w, p)| CandidateTrace::ranked(w, *p)).collect(),
                chosen: fill.word,
                source: fill.source,
                queries: fill.queries,
                hops: Some(fill.hops),
            }
        } else {
            let word = fill_functional(tag, &res.dictionary, rng).map_err(|e| e.at_slot(position))?;
            SlotTrace {
                position,
                tag: tag.truncated().to_string(),
                o: None,
                candidates: vec![],
                chosen: word,
                source: FillSource::Dictionary,
                queries: vec![],
                hops: None,
            }
        };
        tokens.push(slot.chosen.clone());
        trace.push(slot);
    }
    Ok(Draft {
        tokens,
        skeleton: SkeletonRef::Egv {
            tags: egv.slots.iter().map(|t| t.truncated().to_string()).collect(),
        },
        trace,
    })
}

pub fn generate_model1(query: &str, n: usize, res: &Resources, seed: u64, opts: &GenerateOptions) -> Result<GeneratedSentence> {
    check_request(query, n, res)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let retryable = |e: &Error| {
        matches!(
            e.root(),
            Error::Relaxation { .. } | Error::Generation { .. } | Error::Dict(_)
        )
    };
    generate_novel(Model::One, query, res, opts, retryable, || attempt(query, n, res, opts, &mut rng))
}
