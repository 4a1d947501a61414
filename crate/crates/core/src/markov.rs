//! POS-bigram transition matrix and EGV (all-slot skeleton) generation.
//!
//! States are truncated tags plus the synthetic `<START>` and `<END>`
//! boundaries. Probabilities are plain maximum-likelihood estimates; there is
//! no smoothing, so a generated skeleton only ever uses observed bigrams.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::pos::{PosTag, TaggedSentence};

pub const START: &str = "<START>";
pub const END: &str = "<END>";
pub const START_INDEX: usize = 0;
pub const END_INDEX: usize = 1;

pub const MIN_LEN: usize = 3;
pub const MAX_LEN: usize = 15;

/// Restarts attempted after a dead end before giving up.
pub const MAX_RESTARTS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    states: Vec<String>,
    counts: Vec<u64>,
    probs: Vec<f64>,
}

impl TransitionMatrix {
    pub fn build(corpus: &[TaggedSentence]) -> Result<Self> {
        if corpus.iter().all(|s| s.tokens.is_empty()) {
            return Err(Error::Build("empty corpus".into()));
        }
        let tags: BTreeSet<&str> = corpus
            .iter()
            .flat_map(|s| s.tokens.iter().map(|t| t.tag.truncated()))
            .collect();
        let mut states = vec![START.to_string(), END.to_string()];
        states.extend(tags.into_iter().map(str::to_string));
        let n = states.len();
        let mut counts = vec![0u64; n * n];
        // tags after the two boundary states are sorted
        let lookup = |tag: &str| -> usize {
            2 + states[2..]
                .binary_search_by(|s| s.as_str().cmp(tag))
                .expect("tag collected above")
        };
        for sentence in corpus.iter().filter(|s| !s.tokens.is_empty()) {
            let mut prev = START_INDEX;
            for token in &sentence.tokens {
                let cur = lookup(token.tag.truncated());
                counts[prev * n + cur] += 1;
                prev = cur;
            }
            counts[prev * n + END_INDEX] += 1;
        }
        Ok(Self::from_counts(states, counts))
    }

    /// Recomputes probabilities from raw counts.
    fn from_counts(states: Vec<String>, counts: Vec<u64>) -> Self {
        let n = states.len();
        let mut probs = vec![0.0; n * n];
        for i in 0..n {
            let total: u64 = counts[i * n..(i + 1) * n].iter().sum();
            if total > 0 {
                for j in 0..n {
                    probs[i * n + j] = counts[i * n + j] as f64 / total as f64;
                }
            }
        }
        TransitionMatrix { states, counts, probs }
    }

    /// Assembles a matrix without validating `probs` against `counts`.
    /// Meant for loading externally computed tables; run
    /// [`crate::check::check_row_stochastic`] on the result.
    pub fn from_raw_parts(states: Vec<String>, counts: Vec<u64>, probs: Vec<f64>) -> Result<Self> {
        let n = states.len();
        if counts.len() != n * n || probs.len() != n * n {
            return Err(Error::Config(format!(
                "expected {} cells for {} states",
                n * n,
                n
            )));
        }
        Ok(TransitionMatrix { states, counts, probs })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, state: &str) -> Option<usize> {
        self.states.iter().position(|s| s == state)
    }

    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.probs[from * self.len() + to]
    }

    pub fn count(&self, from: usize, to: usize) -> u64 {
        self.counts[from * self.len() + to]
    }

    /// P(to | from) by state name; 0 for unknown states.
    pub fn prob_of(&self, from: &str, to: &str) -> f64 {
        match (self.index_of(from), self.index_of(to)) {
            (Some(i), Some(j)) => self.prob(i, j),
            _ => 0.0,
        }
    }

    pub fn row_count(&self, from: usize) -> u64 {
        let n = self.len();
        self.counts[from * n..(from + 1) * n].iter().sum()
    }

    pub fn row_sum(&self, from: usize) -> f64 {
        let n = self.len();
        self.probs[from * n..(from + 1) * n].iter().sum()
    }

    /// Tag successors of `from` with positive probability, `<END>` excluded,
    /// ordered by descending probability then by tag.
    pub fn successors(&self, from: usize) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = (2..self.len())
            .map(|j| (j, self.prob(from, j)))
            .filter(|&(_, p)| p > 0.0)
            .collect();
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| self.states[a.0].cmp(&self.states[b.0])));
        out
    }

    /// Writes the sparse count format: `states <n>`, one state per line, then
    /// `i j count` triples for every nonzero cell in row-major order.
    pub fn write(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "states {}", self.len())?;
        for s in &self.states {
            writeln!(w, "{s}")?;
        }
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                let c = self.counts[i * n + j];
                if c > 0 {
                    writeln!(w, "{i} {j} {c}")?;
                }
            }
        }
        Ok(())
    }

    pub fn read(r: impl BufRead, source_name: &str) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let mut next_line = || -> Result<Option<(usize, String)>> {
            match lines.next() {
                None => Ok(None),
                Some((i, l)) => l
                    .map(|l| Some((i + 1, l)))
                    .map_err(|e| Error::format(source_name, i + 1, e.to_string())),
            }
        };
        let (_, header) = next_line()?.ok_or_else(|| Error::format(source_name, 1, "empty file"))?;
        let n: usize = header
            .strip_prefix("states ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::format(source_name, 1, "expected `states <n>` header"))?;
        if n < 2 {
            return Err(Error::format(source_name, 1, "need at least the two boundary states"));
        }
        let mut states = Vec::with_capacity(n);
        for _ in 0..n {
            let (lineno, s) = next_line()?
                .ok_or_else(|| Error::format(source_name, states.len() + 2, "missing state line"))?;
            let s = s.trim().to_string();
            if s.is_empty() || states.contains(&s) {
                return Err(Error::format(source_name, lineno, format!("bad or duplicate state {s:?}")));
            }
            states.push(s);
        }
        if states[START_INDEX] != START || states[END_INDEX] != END {
            return Err(Error::format(source_name, 2, "first two states must be <START> and <END>"));
        }
        let mut counts = vec![0u64; n * n];
        while let Some((lineno, line)) = next_line()? {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                [i, j, c] => (i.parse::<usize>(), j.parse::<usize>(), c.parse::<u64>()),
                _ => return Err(Error::format(source_name, lineno, "expected `i j count`")),
            };
            let (i, j, c) = match parsed {
                (Ok(i), Ok(j), Ok(c)) if i < n && j < n => (i, j, c),
                _ => return Err(Error::format(source_name, lineno, format!("bad triple {line:?}"))),
            };
            if j == START_INDEX || i == END_INDEX {
                return Err(Error::format(source_name, lineno, "no mass may enter <START> or leave <END>"));
            }
            counts[i * n + j] = c;
        }
        Ok(Self::from_counts(states, counts))
    }

    /// Generates an `n`-tag skeleton. With `start == None` the first tag is
    /// drawn from the empirical distribution of sentence-initial tags.
    pub fn generate_egv<R: Rng>(
        &self,
        start: Option<&str>,
        n: usize,
        policy: DecodePolicy,
        rng: &mut R,
    ) -> Result<EgvSkeleton> {
        if !(MIN_LEN..=MAX_LEN).contains(&n) {
            return Err(Error::Config(format!(
                "skeleton length must be in [{MIN_LEN}, {MAX_LEN}], got {n}"
            )));
        }
        if let DecodePolicy::TopK(0) = policy {
            return Err(Error::Config("top-k needs k >= 1".into()));
        }
        let start_index = match start {
            Some(tag) => Some(
                self.index_of(tag)
                    .filter(|&i| i >= 2)
                    .ok_or_else(|| Error::Config(format!("unknown start state {tag:?}")))?,
            ),
            None => None,
        };
        let mut partial = Vec::new();
        for _ in 0..=MAX_RESTARTS {
            let first = match start_index {
                Some(i) => i,
                None => {
                    let initial = self.successors(START_INDEX);
                    if initial.is_empty() {
                        return Err(Error::Generation {
                            msg: "no sentence-initial tags".into(),
                            partial: vec![],
                        });
                    }
                    sample_weighted(&initial, rng)
                }
            };
            let mut seq = vec![first];
            while seq.len() < n {
                let succ = self.successors(*seq.last().unwrap());
                if succ.is_empty() {
                    break;
                }
                seq.push(policy.pick(&succ, rng));
            }
            if seq.len() == n {
                return Ok(EgvSkeleton {
                    slots: seq
                        .iter()
                        .map(|&i| PosTag::new(&self.states[i]).expect("states are valid tags"))
                        .collect(),
                });
            }
            partial = seq.iter().map(|&i| self.states[i].clone()).collect();
        }
        Err(Error::Generation {
            msg: format!(
                "state {} has no successors (after {MAX_RESTARTS} restarts)",
                partial.last().map(String::as_str).unwrap_or("?")
            ),
            partial,
        })
    }
}

fn sample_weighted<R: Rng>(candidates: &[(usize, f64)], rng: &mut R) -> usize {
    let total: f64 = candidates.iter().map(|c| c.1).sum();
    let mut x = rng.gen::<f64>() * total;
    for &(j, p) in candidates {
        if x < p {
            return j;
        }
        x -= p;
    }
    candidates.last().unwrap().0
}

/// How the next tag is chosen from the current tag's successors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodePolicy {
    /// Most probable successor; ties drawn uniformly.
    Argmax,
    /// Sample proportionally among the k most probable successors.
    TopK(usize),
}

impl Default for DecodePolicy {
    fn default() -> Self {
        DecodePolicy::TopK(3)
    }
}

impl DecodePolicy {
    /// `succ` must be sorted as returned by [`TransitionMatrix::successors`].
    fn pick<R: Rng>(&self, succ: &[(usize, f64)], rng: &mut R) -> usize {
        match *self {
            DecodePolicy::Argmax => {
                let best = succ[0].1;
                let tied = succ.iter().take_while(|c| c.1 == best).count();
                if tied == 1 {
                    succ[0].0
                } else {
                    succ[rng.gen_range(0..tied)].0
                }
            }
            DecodePolicy::TopK(k) => sample_weighted(&succ[..k.min(succ.len())], rng),
        }
    }
}

impl FromStr for DecodePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "argmax" {
            return Ok(DecodePolicy::Argmax);
        }
        s.strip_prefix("topk:")
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|&k| k > 0)
            .map(DecodePolicy::TopK)
            .ok_or_else(|| Error::Config(format!("policy must be `argmax` or `topk:K`, got {s:?}")))
    }
}

impl fmt::Display for DecodePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodePolicy::Argmax => f.write_str("argmax"),
            DecodePolicy::TopK(k) => write!(f, "topk:{k}"),
        }
    }
}

/// Empty grammatical structure: a sequence of truncated tags, all to be filled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgvSkeleton {
    pub slots: Vec<PosTag>,
}

impl EgvSkeleton {
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }
}
