//! The prebuilt resource directory consumed by generation and `check`.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use crate::corpus::read_sentence_lines;
use crate::embeddings::{AssociativeTable, EmbeddingStore};
use crate::error::{Error, Result};
use crate::generate::NoveltyIndex;
use crate::markov::TransitionMatrix;
use crate::model1::FunctionWordDictionary;
use crate::morphology::FormsLexicon;
use crate::pos::{read_tagged_tsv, TaggedSentence};
use crate::templates::TemplateStore;

pub const MATRIX_FILE: &str = "matrix.txt";
pub const TEMPLATES_FILE: &str = "templates.jsonl";
pub const VECTORS_FILE: &str = "vectors.txt";
pub const TABLE_FILE: &str = "ta.jsonl";
pub const DICTIONARY_FILE: &str = "dict.jsonl";
pub const FORMS_FILE: &str = "forms.tsv";
/// Optional: the tagged template corpus, needed by `check`.
pub const TAGGED_FILE: &str = "tagged.tsv";
/// Optional: extra sentence-per-line corpus that generated text must differ from.
pub const SENTENCES_FILE: &str = "corpus.txt";

pub const REQUIRED_FILES: [&str; 6] = [
    MATRIX_FILE,
    TEMPLATES_FILE,
    VECTORS_FILE,
    TABLE_FILE,
    DICTIONARY_FILE,
    FORMS_FILE,
];

#[derive(Debug, Clone)]
pub struct Resources {
    pub matrix: TransitionMatrix,
    pub templates: TemplateStore,
    pub store: EmbeddingStore,
    pub table: AssociativeTable,
    pub dictionary: FunctionWordDictionary,
    pub forms: FormsLexicon,
    pub tagged: Option<Vec<TaggedSentence>>,
    pub novelty: NoveltyIndex,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn with_reader<T>(path: &Path, f: impl FnOnce(BufReader<File>, &str) -> Result<T>) -> Result<T> {
    let r = open(path)?;
    f(r, &path.display().to_string())
}

impl Resources {
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let p = |name: &str| -> PathBuf { dir.join(name) };
        for name in REQUIRED_FILES {
            let path = p(name);
            if !path.is_file() {
                return Err(Error::io(path, std::io::Error::new(std::io::ErrorKind::NotFound, "missing resource")));
            }
        }
        let matrix = with_reader(&p(MATRIX_FILE), TransitionMatrix::read)?;
        let templates = with_reader(&p(TEMPLATES_FILE), TemplateStore::read_jsonl)?;
        let store = EmbeddingStore::load(&p(VECTORS_FILE))?;
        let table = with_reader(&p(TABLE_FILE), AssociativeTable::read_jsonl)?;
        let dictionary = with_reader(&p(DICTIONARY_FILE), FunctionWordDictionary::read_jsonl)?;
        let forms = FormsLexicon::load(&p(FORMS_FILE))?;
        let tagged = if p(TAGGED_FILE).is_file() {
            // sentence ids use the file stem, as when the templates were built
            let stem = TAGGED_FILE.trim_end_matches(".tsv");
            Some(read_tagged_tsv(open(&p(TAGGED_FILE))?, stem)?)
        } else {
            None
        };
        let mut novelty = NoveltyIndex::default();
        for t in templates.templates() {
            novelty.insert_tokens(&t.identity_fill());
        }
        if let Some(tagged) = &tagged {
            for s in tagged {
                novelty.insert_tokens(&s.surfaces().collect::<Vec<_>>());
            }
        }
        if p(SENTENCES_FILE).is_file() {
            let sentences = with_reader(&p(SENTENCES_FILE), read_sentence_lines)?;
            for s in &sentences {
                novelty.insert_tokens(&s.tokens);
            }
        }
        Ok(Resources {
            matrix,
            templates,
            store,
            table,
            dictionary,
            forms,
            tagged,
            novelty,
        })
    }
}

/// Lines of a text file, for callers that only need raw lines.
pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    open(path)?
        .lines()
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| Error::io(path, e))
}
