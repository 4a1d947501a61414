//! Consistency checks over a loaded resource directory.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::generate::{generate, normalize, GenerateOptions, Model};
use crate::markov::{TransitionMatrix, END_INDEX, START_INDEX};
use crate::model3::{candidate_set, score_candidates, ScoreDirection, BASIS_NEIGHBORS};
use crate::pos::TaggedSentence;
use crate::resources::{Resources, TAGGED_FILE};
use crate::templates::TemplateStore;

pub const ROW_TOLERANCE: f64 = 1e-9;
pub const SCORE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub results: Vec<CheckResult>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    fn push(&mut self, name: &'static str, outcome: std::result::Result<String, String>) {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.results.push(CheckResult { name, passed, detail });
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            writeln!(f, "[{}] {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail)?;
        }
        Ok(())
    }
}

/// Every row except `<END>` sums to one; `<END>` is absorbing with no mass.
pub fn check_row_stochastic(matrix: &TransitionMatrix, tol: f64) -> std::result::Result<String, String> {
    for i in 0..matrix.len() {
        let sum = matrix.row_sum(i);
        let expected = if i == END_INDEX { 0.0 } else { 1.0 };
        if (sum - expected).abs() > tol {
            return Err(format!("row {} sums to {sum}", matrix.states()[i]));
        }
    }
    Ok(format!("{} rows", matrix.len()))
}

/// Positive probabilities only where a bigram was observed, and none into
/// `<START>` or out of `<END>`.
pub fn check_support(matrix: &TransitionMatrix) -> std::result::Result<String, String> {
    let n = matrix.len();
    let mut support = 0;
    for i in 0..n {
        for j in 0..n {
            let p = matrix.prob(i, j);
            if p < 0.0 || !p.is_finite() {
                return Err(format!("invalid probability {p} at {}->{}", matrix.states()[i], matrix.states()[j]));
            }
            if p > 0.0 {
                if matrix.count(i, j) == 0 {
                    return Err(format!("unobserved transition {}->{}", matrix.states()[i], matrix.states()[j]));
                }
                if j == START_INDEX || i == END_INDEX {
                    return Err(format!("mass on {}->{}", matrix.states()[i], matrix.states()[j]));
                }
                support += 1;
            }
        }
    }
    Ok(format!("{support} observed transitions"))
}

fn attested(corpus: &[TaggedSentence]) -> HashMap<String, HashMap<String, u64>> {
    let mut by_tag: HashMap<String, HashMap<String, u64>> = HashMap::new();
    for t in corpus.iter().flat_map(|s| &s.tokens) {
        *by_tag
            .entry(t.tag.truncated().to_string())
            .or_default()
            .entry(t.surface.to_lowercase())
            .or_default() += 1;
    }
    by_tag
}

fn check_table(res: &Resources, corpus: &[TaggedSentence]) -> std::result::Result<String, String> {
    let seen = attested(corpus);
    let mut words = 0;
    for (tag, list) in res.table.iter() {
        for (w, freq) in list {
            let count = seen.get(tag).and_then(|m| m.get(w)).copied().unwrap_or(0);
            if count == 0 {
                return Err(format!("{w:?} never appears as {tag}"));
            }
            if count != *freq {
                return Err(format!("{w:?} under {tag}: frequency {freq}, corpus has {count}"));
            }
            words += 1;
        }
    }
    Ok(format!("{} tags, {words} entries", res.table.len()))
}

fn check_dictionary(res: &Resources, corpus: &[TaggedSentence]) -> std::result::Result<String, String> {
    let seen = attested(corpus);
    for (tag, words) in res.dictionary.iter() {
        for w in words {
            if !seen.get(tag).is_some_and(|m| m.contains_key(w)) {
                return Err(format!("{w:?} never appears as {tag}"));
            }
        }
    }
    Ok(format!("{} tags", res.dictionary.len()))
}

fn check_templates(templates: &TemplateStore, corpus: &[TaggedSentence]) -> std::result::Result<String, String> {
    let sources: HashMap<String, &TaggedSentence> = corpus.iter().map(|s| (s.id(), s)).collect();
    for t in templates.templates() {
        let src = sources
            .get(&t.source_id)
            .ok_or_else(|| format!("template {} cites unknown sentence {}", t.id, t.source_id))?;
        let original: Vec<&str> = src.surfaces().collect();
        if t.identity_fill() != original {
            return Err(format!("template {} does not reproduce {}", t.id, t.source_id));
        }
    }
    Ok(format!("{} templates", templates.len()))
}

/// Straight-line restatement of the model 3 score used as an oracle: plain
/// vectors, brute-force sorted neighbors, no caching.
pub fn oracle_scores(o: &str, q: &str, vk: &[String], res: &Resources, direction: ScoreDirection) -> Vec<(String, f64)> {
    let store = &res.store;
    let vec_of = |w: &str| -> Vec<f64> { store.vector(w).unwrap().iter().map(|&x| f64::from(x)).collect() };
    let prox = |a: &str, b: &str| -> f64 {
        let (va, vb) = (vec_of(a), vec_of(b));
        let dot: f64 = va.iter().zip(&vb).map(|(x, y)| x * y).sum();
        let na = va.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb = vb.iter().map(|x| x * x).sum::<f64>().sqrt();
        let cos = if a == b { 1.0 } else if na == 0.0 || nb == 0.0 { 0.0 } else { dot / (na * nb) };
        (cos + 1.0) / 2.0
    };
    let nearest = |a: &str| -> Vec<String> {
        let mut all: Vec<(String, f64)> = store
            .words()
            .iter()
            .filter(|w| w.as_str() != a)
            .map(|w| (w.clone(), prox(a, w)))
            .collect();
        all.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap().then(x.0.cmp(&y.0)));
        all.into_iter().take(BASIS_NEIGHBORS).map(|p| p.0).collect()
    };
    let cos = |a: &[f64], b: &[f64]| -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        dot / (a.iter().map(|x| x * x).sum::<f64>().sqrt() * b.iter().map(|x| x * x).sum::<f64>().sqrt())
    };
    let mut thetas = Vec::new();
    let mut betas = Vec::new();
    for w in vk {
        let mut u = nearest(o);
        u.extend(nearest(q));
        u.extend(nearest(w));
        let x: Vec<f64> = u.iter().map(|j| prox(o, j)).collect();
        let qv: Vec<f64> = u.iter().map(|j| prox(q, j)).collect();
        let wv: Vec<f64> = u.iter().map(|j| prox(w, j)).collect();
        thetas.push(cos(&qv, &wv));
        betas.push(cos(&x, &wv));
    }
    let mt = thetas.iter().sum::<f64>() / vk.len() as f64;
    let mb = betas.iter().sum::<f64>() / vk.len() as f64;
    vk.iter()
        .enumerate()
        .map(|(i, w)| {
            let s = match direction {
                ScoreDirection::Printed => (mt / thetas[i]) * (betas[i] / mb),
                ScoreDirection::Inverted => (thetas[i] / mt) * (mb / betas[i]),
            };
            (w.clone(), s)
        })
        .collect()
}

/// Samples at most this many template slots for the score oracle.
const ORACLE_SLOTS: usize = 4;
const ORACLE_CANDIDATES: usize = 12;

fn check_score_oracle(res: &Resources) -> std::result::Result<String, String> {
    let query = res.store.words().first().ok_or("empty embedding store")?.clone();
    let mut compared = 0;
    let slots = res
        .templates
        .templates()
        .iter()
        .flat_map(|t| t.slots().map(|(_, tag, orig)| (tag.to_string(), orig.to_lowercase())).collect::<Vec<_>>())
        .filter(|(_, o)| res.store.contains(o));
    for (tag, o) in slots {
        if compared == ORACLE_SLOTS {
            break;
        }
        let vk = candidate_set(&tag, res, ORACLE_CANDIDATES).map_err(|e| e.to_string())?;
        if vk.len() < 2 {
            continue;
        }
        for direction in [ScoreDirection::Printed, ScoreDirection::Inverted] {
            let fast = score_candidates(&o, &query, &vk, &res.store, direction).map_err(|e| e.to_string())?;
            let fast: HashMap<&str, f64> = fast.iter().map(|c| (c.w.as_str(), c.s)).collect();
            for (w, s) in oracle_scores(&o, &query, &vk, res, direction) {
                let got = fast[w.as_str()];
                if (got - s).abs() > SCORE_TOLERANCE * s.abs().max(1.0) {
                    return Err(format!("slot o={o:?} w={w:?}: scorer {got}, oracle {s}"));
                }
            }
        }
        compared += 1;
    }
    Ok(format!("{compared} slots agree within {SCORE_TOLERANCE:e}"))
}

fn check_novelty(res: &Resources, corpus: &[TaggedSentence]) -> std::result::Result<String, String> {
    let originals: HashSet<String> = corpus
        .iter()
        .map(|s| normalize(&s.surfaces().collect::<Vec<_>>().join(" ")))
        .collect();
    let query = res.store.words().first().ok_or("empty embedding store")?.clone();
    let opts = GenerateOptions::default();
    let mut produced = 0;
    for model in [Model::One, Model::Two, Model::Three] {
        for seed in 1..=3 {
            match generate(model, &query, 8, res, seed, &opts) {
                Ok(g) => {
                    if originals.contains(&normalize(&g.text)) {
                        return Err(format!("model {model} seed {seed} reproduced a corpus sentence: {}", g.text));
                    }
                    produced += 1;
                }
                Err(Error::Generation { .. }) => {}
                Err(e) if matches!(e.root(), Error::Relaxation { .. }) => {}
                Err(e) => return Err(format!("model {model} seed {seed}: {e}")),
            }
        }
    }
    Ok(format!("{produced} generated sentences are all novel"))
}

/// Runs every check. Needs the optional tagged corpus for the soundness
/// and round-trip checks.
pub fn run_check(res: &Resources) -> Result<CheckReport> {
    let corpus = res.tagged.as_deref().ok_or_else(|| {
        Error::io(TAGGED_FILE, std::io::Error::new(std::io::ErrorKind::NotFound, "check needs the tagged corpus"))
    })?;
    let mut report = CheckReport::default();
    report.push("row-stochastic", check_row_stochastic(&res.matrix, ROW_TOLERANCE));
    report.push("transition support", check_support(&res.matrix));
    report.push("associative table soundness", check_table(res, corpus));
    report.push("dictionary soundness", check_dictionary(res, corpus));
    report.push("template round trip", check_templates(&res.templates, corpus));
    report.push("score oracle", check_score_oracle(res));
    report.push("novelty", check_novelty(res, corpus));
    Ok(report)
}
