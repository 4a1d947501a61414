//! Forms lexicon: lemma-indexed surface forms used to re-inflect a word for
//! a target tag (gender, number, verb form).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::pos::PosTag;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form {
    pub surface: String,
    pub tag: PosTag,
    pub freq: u64,
}

#[derive(Debug, Clone, Default)]
pub struct FormsLexicon {
    lemmas: BTreeMap<String, Vec<Form>>,
    by_surface: HashMap<String, BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inflection {
    Found(String),
    NotFound,
}

impl Inflection {
    pub fn found(self) -> Option<String> {
        match self {
            Inflection::Found(s) => Some(s),
            Inflection::NotFound => None,
        }
    }
}

impl FormsLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, lemma: &str, surface: &str, tag: PosTag, freq: u64) -> Result<()> {
        let forms = self.lemmas.entry(lemma.to_string()).or_default();
        if forms.iter().any(|f| f.surface == surface && f.tag == tag) {
            return Err(Error::Config(format!("duplicate form {surface}/{tag} for lemma {lemma}")));
        }
        forms.push(Form {
            surface: surface.to_string(),
            tag,
            freq,
        });
        self.by_surface
            .entry(surface.to_string())
            .or_default()
            .insert(lemma.to_string());
        Ok(())
    }

    /// Reads `lemma<TAB>surface<TAB>fulltag<TAB>freq` lines.
    pub fn read(r: impl BufRead, source_name: &str) -> Result<Self> {
        let mut lex = FormsLexicon::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::format(source_name, i + 1, e.to_string()))?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [lemma, surface, tag, freq] = fields.as_slice() else {
                return Err(Error::format(
                    source_name,
                    i + 1,
                    format!("expected 4 tab-separated fields, found {}", fields.len()),
                ));
            };
            let tag = PosTag::new(tag).map_err(|e| Error::format(source_name, i + 1, e.to_string()))?;
            let freq: u64 = freq
                .trim()
                .parse()
                .map_err(|_| Error::format(source_name, i + 1, format!("bad frequency {freq:?}")))?;
            lex.insert(lemma, surface, tag, freq)
                .map_err(|e| Error::format(source_name, i + 1, e.to_string()))?;
        }
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(BufReader::new(f), &path.display().to_string())
    }

    pub fn lemma_count(&self) -> usize {
        self.lemmas.len()
    }

    pub fn lemmas_of(&self, surface: &str) -> impl Iterator<Item = &str> {
        self.by_surface.get(surface).into_iter().flatten().map(String::as_str)
    }

    pub fn forms(&self, lemma: &str) -> &[Form] {
        self.lemmas.get(lemma).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The lexicon attests `word` under a tag with `target`'s truncation.
    pub fn matches_tag(&self, word: &str, target: &PosTag) -> bool {
        self.lemmas_of(word).any(|lemma| {
            self.forms(lemma)
                .iter()
                .any(|f| f.surface == word && f.tag.same_class_as(target))
        })
    }

    /// A form of `word`'s lemma(s) matching `target`. A word that already
    /// matches is returned unchanged; otherwise the most frequent matching
    /// form wins, ties broken by surface.
    pub fn inflect(&self, word: &str, target: &PosTag) -> Inflection {
        if self.matches_tag(word, target) {
            return Inflection::Found(word.to_string());
        }
        self.lemmas_of(word)
            .flat_map(|lemma| self.forms(lemma))
            .filter(|f| f.tag.same_class_as(target))
            .max_by(|a, b| a.freq.cmp(&b.freq).then_with(|| b.surface.cmp(&a.surface)))
            .map_or(Inflection::NotFound, |f| Inflection::Found(f.surface.clone()))
    }
}

pub fn inflect(word: &str, target: &PosTag, lex: &FormsLexicon) -> Inflection {
    lex.inflect(word, target)
}

pub fn matches_tag(word: &str, target: &PosTag, lex: &FormsLexicon) -> bool {
    lex.matches_tag(word, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FIXTURE: &str = "profesor\tprofesor\tNCMS000\t12\n\
profesor\tprofesora\tNCFS000\t5\n\
profesor\tprofesores\tNCMP000\t3\n\
sol\tsol\tNCMS000\t40\n\
sol\tsoles\tNCMP000\t2\n\
amar\tama\tVMIP3S0\t9\n\
amar\taman\tVMIP3P0\t11\n\
amar\tamar\tVMN0000\t4\n";

    fn lex() -> FormsLexicon {
        FormsLexicon::read(FIXTURE.as_bytes(), "forms").unwrap()
    }

    fn tag(t: &str) -> PosTag {
        PosTag::new(t).unwrap()
    }

    #[test]
    fn gender_change() {
        assert_eq!(lex().inflect("profesor", &tag("NCFS")), Inflection::Found("profesora".into()));
        assert_eq!(lex().inflect("profesores", &tag("NCFS000")), Inflection::Found("profesora".into()));
    }

    #[test]
    fn already_matching_word_is_kept() {
        assert_eq!(lex().inflect("sol", &tag("NCMS")), Inflection::Found("sol".into()));
        // "ama" matches VMIP even though "aman" is more frequent
        assert_eq!(lex().inflect("ama", &tag("VMIP")), Inflection::Found("ama".into()));
        assert_eq!(lex().inflect("amar", &tag("VMIP")), Inflection::Found("aman".into()));
    }

    #[test]
    fn unknown_word() {
        assert_eq!(lex().inflect("zzzqx", &tag("NCMS")), Inflection::NotFound);
        assert_eq!(lex().inflect("sol", &tag("AQ0F")), Inflection::NotFound);
    }

    #[test]
    fn matches() {
        assert!(lex().matches_tag("profesora", &tag("NCFS")));
        assert!(!lex().matches_tag("sol", &tag("VMIP")));
        assert!(!lex().matches_tag("zzzqx", &tag("NCMS")));
    }

    #[test]
    fn malformed_lines() {
        let err = FormsLexicon::read("a\tb\tNCMS000\n".as_bytes(), "f").unwrap_err();
        assert!(matches!(err, Error::Format { line: 1, .. }));
        let err = FormsLexicon::read("a\tb\tNCMS000\t1\na\tb\tNCMS000\t2\n".as_bytes(), "f").unwrap_err();
        assert!(matches!(err, Error::Format { line: 2, .. }));
    }

    proptest! {
        #[test]
        fn inflection_laws(
            word in prop::sample::select(vec!["profesor", "profesora", "profesores", "sol", "soles", "ama", "aman", "amar", "luna"]),
            target in prop::sample::select(vec!["NCMS", "NCFS", "NCMP", "VMIP", "VMN0", "AQ0M"]),
        ) {
            let lex = lex();
            let t = tag(target);
            if lex.matches_tag(word, &t) {
                prop_assert_eq!(lex.inflect(word, &t), Inflection::Found(word.to_string()));
            }
            if let Inflection::Found(out) = lex.inflect(word, &t) {
                prop_assert!(lex.matches_tag(&out, &t));
            }
            prop_assert_eq!(lex.inflect(word, &t), lex.inflect(word, &t));
        }
    }
}
