//! Dense word vectors: storage, the word2vec text format, a [0, 1]
//! proximity, exact nearest-neighbor search, plus the minimal skip-gram
//! trainer and the POS-indexed associative table.

mod sgns;
mod table;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

pub use sgns::{train_embeddings, TrainConfig, TrainReport, MIN_DIMS, MIN_SENTENCES};
pub use table::{build_associative_table, AssociativeTable};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    words: Vec<String>,
    index: HashMap<String, usize>,
    dims: usize,
    vectors: Vec<f32>,
    norms: Vec<f64>,
}

impl EmbeddingStore {
    /// `vectors` is row-major, one row of `dims` values per word.
    pub fn new(words: Vec<String>, dims: usize, vectors: Vec<f32>) -> Result<Self> {
        if dims == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        if vectors.len() != words.len() * dims {
            return Err(Error::Config(format!(
                "{} words x {dims} dims needs {} values, got {}",
                words.len(),
                words.len() * dims,
                vectors.len()
            )));
        }
        if let Some(i) = vectors.iter().position(|v| !v.is_finite()) {
            return Err(Error::Config(format!("non-finite component in vector of {:?}", words[i / dims])));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::Config(format!("duplicate word {w:?}")));
            }
        }
        let norms = vectors
            .chunks_exact(dims)
            .map(|v| v.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt())
            .collect();
        Ok(EmbeddingStore {
            words,
            index,
            dims,
            vectors,
            norms,
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, index: usize) -> &str {
        &self.words[index]
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    fn require(&self, word: &str) -> Result<usize> {
        self.index_of(word).ok_or_else(|| Error::Oov(word.to_string()))
    }

    pub fn vector(&self, word: &str) -> Option<&[f32]> {
        self.index_of(word).map(|i| self.row(i))
    }

    fn row(&self, i: usize) -> &[f32] {
        &self.vectors[i * self.dims..(i + 1) * self.dims]
    }

    /// Cosine similarity by index; zero vectors have cosine 0 with anything
    /// but themselves.
    pub fn cosine_idx(&self, a: usize, b: usize) -> f64 {
        if a == b {
            return 1.0;
        }
        let denom = self.norms[a] * self.norms[b];
        if denom == 0.0 {
            return 0.0;
        }
        let dot: f64 = self
            .row(a)
            .iter()
            .zip(self.row(b))
            .map(|(&x, &y)| f64::from(x) * f64::from(y))
            .sum();
        (dot / denom).clamp(-1.0, 1.0)
    }

    /// `(cos + 1) / 2`: 1 for identical direction, 0 for opposite.
    pub fn proximity_idx(&self, a: usize, b: usize) -> f64 {
        (self.cosine_idx(a, b) + 1.0) / 2.0
    }

    pub fn proximity(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.proximity_idx(self.require(a)?, self.require(b)?))
    }

    /// Indices of the `m` words closest to `q` (excluding `q`), by
    /// descending proximity then ascending word.
    pub fn neighbor_indices(&self, q: usize, m: usize) -> Vec<(usize, f64)> {
        let mut all: Vec<(usize, f64)> = (0..self.len())
            .filter(|&i| i != q)
            .map(|i| (i, self.proximity_idx(q, i)))
            .collect();
        let by_rank = |a: &(usize, f64), b: &(usize, f64)| -> Ordering {
            b.1.total_cmp(&a.1).then_with(|| self.words[a.0].cmp(&self.words[b.0]))
        };
        if m < all.len() {
            all.select_nth_unstable_by(m, by_rank);
            all.truncate(m);
        }
        all.sort_unstable_by(by_rank);
        all
    }

    pub fn neighbors(&self, q: &str, m: usize) -> Result<Lexicon> {
        if m == 0 {
            return Err(Error::Config("neighbor count must be at least 1".into()));
        }
        let qi = self.require(q)?;
        Ok(Lexicon {
            query: q.to_string(),
            entries: self
                .neighbor_indices(qi, m)
                .into_iter()
                .map(|(i, p)| (self.words[i].clone(), p))
                .collect(),
        })
    }

    /// Writes `<count> <dims>` then `word v1 ... vD` with six decimals.
    pub fn write_text(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.len(), self.dims)?;
        for (i, word) in self.words.iter().enumerate() {
            w.write_all(word.as_bytes())?;
            for x in self.row(i) {
                write!(w, " {x:.6}")?;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_text(r: impl BufRead, source_name: &str) -> Result<Self> {
        let mut lines = r.lines();
        let header = match lines.next() {
            Some(l) => l.map_err(|e| Error::format(source_name, 1, e.to_string()))?,
            None => return Err(Error::format(source_name, 1, "empty file")),
        };
        let (count, dims) = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            [c, d] => match (c.parse::<usize>(), d.parse::<usize>()) {
                (Ok(c), Ok(d)) if d > 0 => (c, d),
                _ => return Err(Error::format(source_name, 1, format!("bad header {header:?}"))),
            },
            _ => return Err(Error::format(source_name, 1, "header must be `<vocab_count> <dims>`")),
        };
        let mut words = Vec::with_capacity(count);
        let mut vectors = Vec::with_capacity(count * dims);
        let mut seen = HashMap::with_capacity(count);
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let line = line.map_err(|e| Error::format(source_name, lineno, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            if words.len() == count {
                return Err(Error::format(source_name, lineno, format!("more than {count} rows")));
            }
            let mut fields = line.split_whitespace();
            let word = fields.next().unwrap();
            let values: Vec<&str> = fields.collect();
            if values.len() != dims {
                return Err(Error::format(
                    source_name,
                    lineno,
                    format!("expected {dims} values for {word:?}, found {}", values.len()),
                ));
            }
            for v in values {
                match v.parse::<f32>() {
                    Ok(x) if x.is_finite() => vectors.push(x),
                    _ => return Err(Error::format(source_name, lineno, format!("bad value {v:?}"))),
                }
            }
            if seen.insert(word.to_string(), lineno).is_some() {
                return Err(Error::format(source_name, lineno, format!("duplicate word {word:?}")));
            }
            words.push(word.to_string());
        }
        if words.len() != count {
            return Err(Error::format(
                source_name,
                words.len() + 2,
                format!("header promises {count} rows, found {}", words.len()),
            ));
        }
        EmbeddingStore::new(words, dims, vectors)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        EmbeddingStore::read_text(BufReader::new(f), &path.display().to_string())
    }
}

pub fn proximity(a: &str, b: &str, store: &EmbeddingStore) -> Result<f64> {
    store.proximity(a, b)
}

pub fn neighbors(q: &str, m: usize, store: &EmbeddingStore) -> Result<Lexicon> {
    store.neighbors(q, m)
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingStore> {
    EmbeddingStore::load(path)
}

/// L(Q): the words nearest to a query, closest first.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    pub query: String,
    pub entries: Vec<(String, f64)>,
}

impl Lexicon {
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(w, _)| w.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn store(rows: &[(&str, &[f32])]) -> EmbeddingStore {
        let dims = rows[0].1.len();
        EmbeddingStore::new(
            rows.iter().map(|r| r.0.to_string()).collect(),
            dims,
            rows.iter().flat_map(|r| r.1.iter().copied()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn proximity_reference_points() {
        let s = store(&[("a", &[1.0, 0.0]), ("b", &[1.0, 0.0]), ("c", &[-1.0, 0.0]), ("d", &[0.0, 3.0])]);
        assert!((s.proximity("a", "b").unwrap() - 1.0).abs() < 1e-12);
        assert!(s.proximity("a", "c").unwrap().abs() < 1e-12);
        assert!((s.proximity("a", "d").unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(s.proximity("a", "a").unwrap(), 1.0);
        assert!(matches!(s.proximity("a", "zz"), Err(Error::Oov(w)) if w == "zz"));
    }

    #[test]
    fn neighbor_rules() {
        let s = store(&[("q", &[1.0, 0.0]), ("b", &[1.0, 0.1]), ("a", &[1.0, 0.1]), ("c", &[-1.0, 0.0])]);
        let l = s.neighbors("q", 1).unwrap();
        assert_eq!(l.words().collect::<Vec<_>>(), ["a"]);
        let all = s.neighbors("q", 10).unwrap();
        assert_eq!(all.words().collect::<Vec<_>>(), ["a", "b", "c"]);
        assert!(matches!(s.neighbors("zz", 3), Err(Error::Oov(_))));
        assert!(s.neighbors("q", 0).is_err());
    }

    #[test]
    fn text_format() {
        let s = EmbeddingStore::read_text("2 3\nsol 0.1 0.2 0.3\nluna -1 0 1\n".as_bytes(), "v").unwrap();
        assert_eq!((s.len(), s.dims()), (2, 3));
        let mut out = Vec::new();
        s.write_text(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "2 3\nsol 0.100000 0.200000 0.300000\nluna -1.000000 0.000000 1.000000\n"
        );
    }

    #[test]
    fn text_format_errors_carry_line_numbers() {
        let err = EmbeddingStore::read_text("2 3\nsol 0.1 0.2 0.3\nluna 1 2\n".as_bytes(), "v").unwrap_err();
        assert!(matches!(err, Error::Format { line: 3, .. }), "{err}");
        let err = EmbeddingStore::read_text("two 3\n".as_bytes(), "v").unwrap_err();
        assert!(matches!(err, Error::Format { line: 1, .. }));
        let err = EmbeddingStore::read_text("2 1\nsol 1\n".as_bytes(), "v").unwrap_err();
        assert!(matches!(err, Error::Format { .. }));
        let err = EmbeddingStore::read_text("1 1\nsol nan\n".as_bytes(), "v").unwrap_err();
        assert!(matches!(err, Error::Format { line: 2, .. }));
    }

    fn arb_store() -> impl Strategy<Value = EmbeddingStore> {
        (2usize..6, 2usize..40).prop_flat_map(|(dims, n)| {
            prop::collection::vec(-1.0f32..1.0, dims * n).prop_map(move |v| {
                let words = (0..n).map(|i| format!("w{i:02}")).collect();
                EmbeddingStore::new(words, dims, v).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn proximity_symmetric_and_bounded(s in arb_store()) {
            for a in 0..s.len() {
                for b in 0..s.len() {
                    let p = s.proximity_idx(a, b);
                    prop_assert!((0.0..=1.0).contains(&p));
                    prop_assert!((p - s.proximity_idx(b, a)).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn neighbors_match_full_sort(s in arb_store(), m in 1usize..50) {
            for q in 0..s.len() {
                let mut brute: Vec<(String, f64)> = (0..s.len()).filter(|&i| i != q)
                    .map(|i| (s.word(i).to_string(), s.proximity_idx(q, i))).collect();
                brute.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
                brute.truncate(m);
                let got = s.neighbors(s.word(q), m).unwrap();
                prop_assert!(got.words().all(|w| w != s.word(q)));
                prop_assert_eq!(got.entries, brute);
            }
        }

        #[test]
        fn save_load_preserves_rankings(s in arb_store()) {
            let mut buf = Vec::new();
            s.write_text(&mut buf).unwrap();
            let back = EmbeddingStore::read_text(buf.as_slice(), "v").unwrap();
            for w in s.words() {
                let a = s.vector(w).unwrap();
                let b = back.vector(w).unwrap();
                for (x, y) in a.iter().zip(b) {
                    prop_assert!((x - y).abs() <= 1e-6);
                }
            }
            // six-decimal values survive a second trip bit for bit, so
            // rankings do too
            let mut buf2 = Vec::new();
            back.write_text(&mut buf2).unwrap();
            prop_assert_eq!(&buf, &buf2);
            let again = EmbeddingStore::read_text(buf2.as_slice(), "v").unwrap();
            for w in back.words() {
                prop_assert_eq!(back.neighbors(w, 5).unwrap(), again.neighbors(w, 5).unwrap());
            }
        }
    }
}
