use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pos::TaggedSentence;

/// Associative table: truncated content tag to the words attested under it,
/// with corpus frequencies. Each list is ordered by descending frequency,
/// then by word.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AssociativeTable {
    entries: BTreeMap<String, Vec<(String, u64)>>,
}

#[derive(Serialize, Deserialize)]
struct Row {
    tag: String,
    words: Vec<(String, u64)>,
}

impl AssociativeTable {
    pub fn build(corpus: &[TaggedSentence]) -> Self {
        let mut counts: BTreeMap<String, HashMap<String, u64>> = BTreeMap::new();
        for token in corpus.iter().flat_map(|s| &s.tokens) {
            if token.tag.is_content() {
                *counts
                    .entry(token.tag.truncated().to_string())
                    .or_default()
                    .entry(token.surface.to_lowercase())
                    .or_default() += 1;
            }
        }
        AssociativeTable {
            entries: counts
                .into_iter()
                .map(|(tag, words)| (tag, sorted(words.into_iter().collect())))
                .collect(),
        }
    }

    pub fn get(&self, tag: &str) -> Option<&[(String, u64)]> {
        self.entries.get(tag).map(Vec::as_slice)
    }

    pub fn contains(&self, tag: &str, word: &str) -> bool {
        self.get(tag).is_some_and(|ws| ws.iter().any(|(w, _)| w == word))
    }

    pub fn tags(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[(String, u64)])> {
        self.entries.iter().map(|(t, w)| (t.as_str(), w.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Inserts or replaces a tag's list without checking it against any corpus.
    pub fn insert(&mut self, tag: &str, words: Vec<(String, u64)>) {
        self.entries.insert(tag.to_string(), sorted(words));
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
        let mut entries = BTreeMap::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::format(source_name, i + 1, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let row: Row = serde_json::from_str(&line).map_err(|e| Error::format(source_name, i + 1, e.to_string()))?;
            let mut seen = HashSet::new();
            if let Some((w, _)) = row.words.iter().find(|(w, _)| !seen.insert(w.as_str())) {
                return Err(Error::format(source_name, i + 1, format!("duplicate word {w:?} under {}", row.tag)));
            }
            if row.words.iter().any(|(_, f)| *f == 0) {
                return Err(Error::format(source_name, i + 1, "frequencies must be positive"));
            }
            if entries.insert(row.tag.clone(), sorted(row.words)).is_some() {
                return Err(Error::format(source_name, i + 1, format!("duplicate tag {}", row.tag)));
            }
        }
        Ok(AssociativeTable { entries })
    }
}

fn sorted(mut words: Vec<(String, u64)>) -> Vec<(String, u64)> {
    words.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    words
}

pub fn build_associative_table(corpus: &[TaggedSentence]) -> AssociativeTable {
    AssociativeTable::build(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::SentenceRecord;
    use crate::pos::{PosTag, TaggedToken};

    fn tagged(pairs: &[(&str, &str)]) -> TaggedSentence {
        TaggedSentence {
            tokens: pairs
                .iter()
                .map(|(w, t)| TaggedToken {
                    surface: w.to_string(),
                    tag: PosTag::new(t).unwrap(),
                })
                .collect(),
            source: SentenceRecord::from_tokens("t", 0, pairs.iter().map(|p| p.0.to_string()).collect()),
        }
    }

    #[test]
    fn dedup_with_frequency() {
        let ta = AssociativeTable::build(&[
            tagged(&[("El", "DA0MS0"), ("sol", "NCMS000")]),
            tagged(&[("Sol", "NCMS000"), ("brilla", "VMIP3S0")]),
        ]);
        assert_eq!(ta.get("NCMS").unwrap(), &[("sol".to_string(), 2)]);
        assert!(ta.get("DA0M").is_none());
    }

    #[test]
    fn word_under_two_tags() {
        let ta = AssociativeTable::build(&[tagged(&[("amanecer", "NCMS000"), ("amanecer", "VMN0000")])]);
        assert!(ta.contains("NCMS", "amanecer"));
        assert!(ta.contains("VMN0", "amanecer"));
    }

    #[test]
    fn jsonl_round_trip_and_errors() {
        let ta = AssociativeTable::build(&[tagged(&[("sol", "NCMS000"), ("luna", "NCFS000"), ("sol", "NCMS000")])]);
        let mut buf = Vec::new();
        ta.write_jsonl(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "{\"tag\":\"NCFS\",\"words\":[[\"luna\",1]]}\n{\"tag\":\"NCMS\",\"words\":[[\"sol\",2]]}\n"
        );
        assert_eq!(AssociativeTable::read_jsonl(buf.as_slice(), "ta").unwrap(), ta);
        let dup = "{\"tag\":\"NCMS\",\"words\":[[\"sol\",2],[\"sol\",1]]}\n";
        assert!(matches!(AssociativeTable::read_jsonl(dup.as_bytes(), "ta"), Err(Error::Format { line: 1, .. })));
    }
}
