//! Canned-text templates (EGP): a source sentence with its verbs, nouns and
//! adjectives hollowed out into slots, function words and punctuation kept.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pos::{PosTag, TaggedSentence};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "t")]
pub enum TemplateItem {
    #[serde(rename = "lit")]
    Literal { w: String },
    /// `tag` is the truncated tag; `orig` the word it replaced.
    #[serde(rename = "slot")]
    Slot { tag: String, orig: String },
}

impl TemplateItem {
    pub fn is_slot(&self) -> bool {
        matches!(self, TemplateItem::Slot { .. })
    }

    /// The surface this item had in the source sentence.
    pub fn source_surface(&self) -> &str {
        match self {
            TemplateItem::Literal { w } => w,
            TemplateItem::Slot { orig, .. } => orig,
        }
    }
}

/// Partially empty grammatical structure. An item's position is its index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EgpSkeleton {
    pub id: usize,
    pub source_id: String,
    pub items: Vec<TemplateItem>,
}

impl EgpSkeleton {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn slot_count(&self) -> usize {
        self.items.iter().filter(|i| i.is_slot()).count()
    }

    /// Positions, tags and original words of the slots.
    pub fn slots(&self) -> impl Iterator<Item = (usize, &str, &str)> {
        self.items.iter().enumerate().filter_map(|(i, item)| match item {
            TemplateItem::Slot { tag, orig } => Some((i, tag.as_str(), orig.as_str())),
            TemplateItem::Literal { .. } => None,
        })
    }

    /// Fills slots in order with `words`; literals are copied.
    pub fn fill<S: AsRef<str>>(&self, words: &[S]) -> Result<Vec<String>> {
        if words.len() != self.slot_count() {
            return Err(Error::Config(format!(
                "template {} has {} slots, got {} words",
                self.id,
                self.slot_count(),
                words.len()
            )));
        }
        let mut fill = words.iter();
        Ok(self
            .items
            .iter()
            .map(|item| match item {
                TemplateItem::Literal { w } => w.clone(),
                TemplateItem::Slot { .. } => fill.next().unwrap().as_ref().to_string(),
            })
            .collect())
    }

    /// Every slot filled with its own original word.
    pub fn identity_fill(&self) -> Vec<String> {
        self.items.iter().map(|i| i.source_surface().to_string()).collect()
    }

    /// Checks slot tags are content tags and literals are not.
    pub fn validate(&self) -> Result<()> {
        for (i, item) in self.items.iter().enumerate() {
            if let TemplateItem::Slot { tag, .. } = item {
                let tag = PosTag::new(tag)?;
                if !tag.is_content() {
                    return Err(Error::Template {
                        source_id: self.source_id.clone(),
                        msg: format!("slot {i} has non-content tag {tag}"),
                    });
                }
            }
        }
        if self.slot_count() == 0 {
            return Err(Error::Template {
                source_id: self.source_id.clone(),
                msg: "no content slots".into(),
            });
        }
        Ok(())
    }
}

pub fn extract_template(sentence: &TaggedSentence, id: usize) -> Result<EgpSkeleton> {
    let items: Vec<TemplateItem> = sentence
        .tokens
        .iter()
        .map(|t| {
            if t.tag.is_content() {
                TemplateItem::Slot {
                    tag: t.tag.truncated().to_string(),
                    orig: t.surface.clone(),
                }
            } else {
                TemplateItem::Literal { w: t.surface.clone() }
            }
        })
        .collect();
    if !items.iter().any(TemplateItem::is_slot) {
        return Err(Error::Template {
            source_id: sentence.id(),
            msg: "no content words".into(),
        });
    }
    Ok(EgpSkeleton {
        id,
        source_id: sentence.id(),
        items,
    })
}

#[derive(Debug, Clone, Default)]
pub struct TemplateStore {
    templates: Vec<EgpSkeleton>,
    by_length: BTreeMap<usize, Vec<usize>>,
}

impl TemplateStore {
    pub fn new(templates: Vec<EgpSkeleton>) -> Self {
        let mut by_length: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, t) in templates.iter().enumerate() {
            by_length.entry(t.len()).or_default().push(i);
        }
        TemplateStore { templates, by_length }
    }

    /// Extracts a template from each sentence, skipping untemplatable ones.
    /// Returns the store and the number of sentences skipped.
    pub fn build(corpus: &[TaggedSentence]) -> (Self, usize) {
        let mut templates = Vec::new();
        let mut skipped = 0;
        for s in corpus {
            match extract_template(s, templates.len()) {
                Ok(t) => templates.push(t),
                Err(_) => skipped += 1,
            }
        }
        (TemplateStore::new(templates), skipped)
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn templates(&self) -> &[EgpSkeleton] {
        &self.templates
    }

    pub fn get(&self, id: usize) -> Option<&EgpSkeleton> {
        self.templates.iter().find(|t| t.id == id)
    }

    pub fn lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.by_length.keys().copied()
    }

    pub fn with_length(&self, n: usize) -> impl Iterator<Item = &EgpSkeleton> {
        self.by_length
            .get(&n)
            .into_iter()
            .flatten()
            .map(|&i| &self.templates[i])
    }

    /// The available length closest to `n`; ties go to the shorter length.
    pub fn nearest_length(&self, n: usize) -> Option<usize> {
        self.by_length
            .keys()
            .copied()
            .min_by_key(|&len| (len.abs_diff(n), len))
    }

    /// Uniform draw among templates of the nearest available length.
    pub fn select<R: Rng>(&self, n: usize, rng: &mut R) -> Result<&EgpSkeleton> {
        let len = self.nearest_length(n).ok_or(Error::EmptyStore)?;
        let bucket = &self.by_length[&len];
        Ok(&self.templates[bucket[rng.gen_range(0..bucket.len())]])
    }

    pub fn write_jsonl(&self, mut w: impl Write) -> std::io::Result<()> {
        for t in &self.templates {
            serde_json::to_writer(&mut w, t)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl(r: impl BufRead, source_name: &str) -> Result<Self> {
        let mut templates = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::format(source_name, i + 1, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let t: EgpSkeleton = serde_json::from_str(&line)
                .map_err(|e| Error::format(source_name, i + 1, e.to_string()))?;
            t.validate().map_err(|e| Error::format(source_name, i + 1, e.to_string()))?;
            templates.push(t);
        }
        Ok(TemplateStore::new(templates))
    }
}

pub fn select_template<'a, R: Rng>(store: &'a TemplateStore, n: usize, rng: &mut R) -> Result<&'a EgpSkeleton> {
    store.select(n, rng)
}
