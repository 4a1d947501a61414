//! Raw text ingestion: sentence segmentation, token filtering, length
//! filtering and corpus statistics.

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::sync::OnceLock;

use regex::Regex;

use crate::error::{Error, Result};

const BUILTIN_ABBREVIATIONS: &str = include_str!("../data/abbreviations.txt");

pub const DEFAULT_MIN_WORDS: usize = 4;
pub const DEFAULT_MAX_WORDS: usize = 29;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub id: String,
    pub text: String,
}

impl RawDocument {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        RawDocument {
            id: id.into(),
            text: normalize_text(&text.into()),
        }
    }

    /// Decodes UTF-8 input; anything else is rejected rather than transcoded.
    pub fn from_bytes(id: impl Into<String>, bytes: Vec<u8>) -> Result<Self> {
        let id = id.into();
        match String::from_utf8(bytes) {
            Ok(text) => Ok(RawDocument::new(id, text)),
            Err(e) => Err(Error::Ingest {
                doc_id: id,
                msg: format!("invalid UTF-8 at byte {}", e.utf8_error().valid_up_to()),
            }),
        }
    }
}

fn normalize_text(text: &str) -> String {
    text.strip_prefix('\u{feff}').unwrap_or(text).replace("\r\n", "\n")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceRecord {
    pub doc_id: String,
    pub index: usize,
    pub tokens: Vec<String>,
    pub char_len: usize,
}

impl SentenceRecord {
    /// Record for an already-tokenized sentence; `char_len` is that of the
    /// tokens joined by single spaces.
    pub fn from_tokens(doc_id: &str, index: usize, tokens: Vec<String>) -> Self {
        let char_len = tokens.iter().map(|t| t.chars().count()).sum::<usize>() + tokens.len().saturating_sub(1);
        SentenceRecord {
            doc_id: doc_id.to_string(),
            index,
            tokens,
            char_len,
        }
    }

    pub fn id(&self) -> String {
        format!("{}:{}", self.doc_id, self.index)
    }

    pub fn word_count(&self) -> usize {
        self.tokens.iter().filter(|t| is_word(t)).count()
    }
}

/// A token counts as a word when it has at least one alphanumeric character.
pub fn is_word(token: &str) -> bool {
    token.chars().any(char::is_alphanumeric)
}

const OPENERS: &[char] = &['¿', '¡', '«', '"', '\'', '(', '[', '“', '‘'];
const CLOSERS: &[char] = &['.', ',', ';', ':', '!', '?', '…', '»', '"', '\'', ')', ']', '”', '’'];
const TERMINATORS: &[char] = &['.', '!', '?', '…'];

struct Token {
    text: String,
    /// First token of a whitespace-delimited chunk.
    chunk_start: bool,
    /// A blank line precedes this token.
    paragraph: bool,
    span: (usize, usize),
}

/// Rule-based segmenter: terminator set plus an abbreviation guard list.
#[derive(Debug, Clone)]
pub struct Segmenter {
    abbreviations: HashSet<String>,
}

impl Default for Segmenter {
    fn default() -> Self {
        Segmenter::with_abbreviations(BUILTIN_ABBREVIATIONS.lines())
    }
}

impl Segmenter {
    /// Lines starting with `#` and blank lines are ignored; entries are
    /// matched case-insensitively and must include their period.
    pub fn with_abbreviations<'a>(lines: impl IntoIterator<Item = &'a str>) -> Self {
        let abbreviations = lines
            .into_iter()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Segmenter { abbreviations }
    }

    pub fn add_abbreviation(&mut self, abbrev: &str) {
        self.abbreviations.insert(abbrev.trim().to_lowercase());
    }

    fn is_abbreviation(&self, s: &str) -> bool {
        s.ends_with('.') && self.abbreviations.contains(&s.to_lowercase())
    }

    /// Splits one whitespace-free chunk into tokens, peeling opening and
    /// closing punctuation. Abbreviations keep their period.
    pub fn tokenize_chunk(&self, chunk: &str) -> Vec<String> {
        if self.is_abbreviation(chunk) {
            return vec![chunk.to_string()];
        }
        let mut out = Vec::new();
        let mut rest = chunk;
        while let Some(c) = rest.chars().next() {
            if !OPENERS.contains(&c) {
                break;
            }
            out.push(c.to_string());
            rest = &rest[c.len_utf8()..];
        }
        let mut trailing = Vec::new();
        while let Some(c) = rest.chars().next_back() {
            if !CLOSERS.contains(&c) {
                break;
            }
            if c == '.' {
                if self.is_abbreviation(rest) {
                    break;
                }
                let dots = rest.len() - rest.trim_end_matches('.').len();
                trailing.push(rest[rest.len() - dots..].to_string());
                rest = &rest[..rest.len() - dots];
            } else {
                trailing.push(c.to_string());
                rest = &rest[..rest.len() - c.len_utf8()];
            }
        }
        if !rest.is_empty() {
            out.push(rest.to_string());
        }
        out.extend(trailing.into_iter().rev());
        out
    }

    /// Tokenizes a single line without looking for sentence boundaries.
    pub fn tokenize(&self, text: &str) -> Vec<String> {
        text.split_whitespace().flat_map(|c| self.tokenize_chunk(c)).collect()
    }

    fn tokens(&self, text: &str) -> Vec<Token> {
        let mut tokens = Vec::new();
        let mut pos = 0;
        let mut newlines = 0;
        for (offset, piece) in split_keep_offsets(text) {
            newlines += text[pos..offset].matches('\n').count();
            pos = offset + piece.len();
            for (k, t) in self.tokenize_chunk(piece).into_iter().enumerate() {
                tokens.push(Token {
                    text: t,
                    chunk_start: k == 0,
                    paragraph: k == 0 && newlines >= 2,
                    span: (offset, offset + piece.len()),
                });
            }
            newlines = 0;
        }
        tokens
    }

    pub fn segment(&self, doc: &RawDocument) -> Vec<SentenceRecord> {
        let text = &doc.text;
        let tokens = self.tokens(text);
        let mut sentences = Vec::new();
        let mut start = 0;
        let mut i = 0;
        while i < tokens.len() {
            let mut end = i + 1;
            let mut boundary = end == tokens.len() || tokens[end].paragraph;
            if !boundary && is_terminator(&tokens[i].text) {
                while end < tokens.len() && !tokens[end].chunk_start && CLOSERS.iter().any(|c| tokens[end].text == c.to_string()) {
                    end += 1;
                }
                boundary = end == tokens.len() || (tokens[end].chunk_start && starts_capitalized(&tokens[end..]));
            }
            if boundary {
                let slice = &tokens[start..end];
                if slice.iter().any(|t| is_word(&t.text)) {
                    let (from, to) = (slice[0].span.0, slice[slice.len() - 1].span.1);
                    sentences.push(SentenceRecord {
                        doc_id: doc.id.clone(),
                        index: sentences.len(),
                        tokens: slice.iter().map(|t| t.text.clone()).collect(),
                        char_len: text[from..to].chars().count(),
                    });
                }
                start = end;
            }
            i = end;
        }
        sentences
    }
}

fn split_keep_offsets(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split_whitespace()
        .map(move |piece| (piece.as_ptr() as usize - text.as_ptr() as usize, piece))
}

fn is_terminator(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| TERMINATORS.contains(&c))
}

fn starts_capitalized(tokens: &[Token]) -> bool {
    tokens
        .iter()
        .flat_map(|t| t.text.chars())
        .find(|c| !OPENERS.contains(c))
        .is_some_and(char::is_uppercase)
}

pub fn segment_sentences(doc: &RawDocument) -> Vec<SentenceRecord> {
    Segmenter::default().segment(doc)
}

struct FilterPatterns {
    number: Regex,
    time: Regex,
    date: Regex,
    acronym: Regex,
}

fn patterns() -> &'static FilterPatterns {
    static PATTERNS: OnceLock<FilterPatterns> = OnceLock::new();
    PATTERNS.get_or_init(|| FilterPatterns {
        // integers and decimals, optional sign, either decimal separator
        number: Regex::new(r"^[+-]?\d+(?:[.,]\d+)*$").unwrap(),
        // HH:MM and HH:MM:SS
        time: Regex::new(r"^\d{1,2}:\d{2}(?::\d{2})?$").unwrap(),
        // DD/MM/YYYY, DD-MM-YY and friends
        date: Regex::new(r"^\d{1,2}[/-]\d{1,2}[/-]\d{2,4}$").unwrap(),
        // all-caps tokens such as ONU or EE.UU.
        acronym: Regex::new(r"^[\p{Lu}\d.&-]+$").unwrap(),
    })
}

/// True for numbers, times, dates and acronyms (all-caps, two or more capitals).
pub fn is_filtered_token(token: &str) -> bool {
    let p = patterns();
    if p.number.is_match(token) || p.time.is_match(token) || p.date.is_match(token) {
        return true;
    }
    p.acronym.is_match(token) && token.chars().filter(|c| c.is_uppercase()).count() >= 2
}

pub fn filter_tokens(sentence: &SentenceRecord) -> SentenceRecord {
    SentenceRecord {
        tokens: sentence
            .tokens
            .iter()
            .filter(|t| !is_filtered_token(t))
            .cloned()
            .collect(),
        ..sentence.clone()
    }
}

/// Keeps sentences whose word count lies in `[min_words, max_words]`.
pub fn length_filter(sentences: Vec<SentenceRecord>, min_words: usize, max_words: usize) -> Result<Vec<SentenceRecord>> {
    if min_words > max_words {
        return Err(Error::Config(format!(
            "minimum length {min_words} exceeds maximum {max_words}"
        )));
    }
    Ok(sentences
        .into_iter()
        .filter(|s| (min_words..=max_words).contains(&s.word_count()))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusStats {
    pub sentence_count: usize,
    pub word_count: usize,
    pub char_count: usize,
    pub mean_words_per_sentence: f64,
}

pub fn compute_stats(sentences: &[SentenceRecord]) -> CorpusStats {
    let word_count: usize = sentences.iter().map(SentenceRecord::word_count).sum();
    let char_count = sentences.iter().map(|s| s.char_len).sum();
    let mean = if sentences.is_empty() {
        0.0
    } else {
        word_count as f64 / sentences.len() as f64
    };
    CorpusStats {
        sentence_count: sentences.len(),
        word_count,
        char_count,
        mean_words_per_sentence: mean,
    }
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sentences: {}", self.sentence_count)?;
        writeln!(f, "words: {}", self.word_count)?;
        writeln!(f, "chars: {}", self.char_count)?;
        writeln!(f, "mean_words_per_sentence: {:.4}", self.mean_words_per_sentence)
    }
}

/// Reads a sentence-per-line file. Each non-blank line is tokenized but not
/// re-segmented; `char_len` is the character count of the trimmed line.
pub fn read_sentence_lines(reader: impl BufRead, doc_id: &str) -> Result<Vec<SentenceRecord>> {
    let segmenter = Segmenter::default();
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::format(doc_id, i + 1, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        out.push(SentenceRecord {
            doc_id: doc_id.to_string(),
            index: out.len(),
            tokens: segmenter.tokenize(line),
            char_len: line.chars().count(),
        });
    }
    Ok(out)
}

/// Writes one sentence per line, tokens separated by single spaces.
pub fn write_sentence_lines(mut writer: impl Write, sentences: &[SentenceRecord]) -> std::io::Result<()> {
    for s in sentences {
        writeln!(writer, "{}", s.tokens.join(" "))?;
    }
    Ok(())
}
