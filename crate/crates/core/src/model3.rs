//! Model 3: template slots filled by a geometric score that prefers words
//! close to the query's semantic field and far from the original word.
//!
//! For a slot with original word `o`, query `Q` and candidate `w`, the
//! comparison basis U holds the 10 nearest neighbors of `o`, of `Q` and of
//! `w`. X, Qv and W are the proximity vectors of `o`, `Q` and `w` against U.
//! With θ = cos(Qv, W) and β = cos(X, W) the candidate's score is
//! `(⟨θ⟩/θ)(β/⟨β⟩)`, means taken over the slot's candidates.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embeddings::EmbeddingStore;
use crate::error::{Error, Result};
use crate::generate::{check_request, generate_novel, CandidateTrace, Draft, FillSource, GenerateOptions, GeneratedSentence, Model, SkeletonRef, SlotTrace};
use crate::model2::{choose_top3, rank_vocabulary};
use crate::resources::Resources;
use crate::templates::{EgpSkeleton, TemplateItem};

/// Neighbors per anchor in U.
pub const BASIS_NEIGHBORS: usize = 10;
pub const BASIS_LEN: usize = 3 * BASIS_NEIGHBORS;

/// Which way the score ratios point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreDirection {
    /// `(⟨θ⟩/θ_i)(β_i/⟨β⟩)`.
    #[default]
    Printed,
    /// `(θ_i/⟨θ⟩)(⟨β⟩/β_i)`: rewards query proximity, penalizes closeness to `o`.
    Inverted,
}

impl FromStr for ScoreDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(ScoreDirection::Printed),
            "inverted" => Ok(ScoreDirection::Inverted),
            _ => Err(Error::Config(format!("score direction must be `printed` or `inverted`, got {s:?}"))),
        }
    }
}

impl fmt::Display for ScoreDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoreDirection::Printed => "printed",
            ScoreDirection::Inverted => "inverted",
        })
    }
}

/// The 30-word comparison basis, in order: neighbors of `o`, of `Q`, of `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UVector {
    pub words: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateScore {
    pub w: String,
    pub theta: f64,
    pub beta: f64,
    pub s: f64,
}

/// Neighbor lists memoized by word index, shared across slots of a sentence.
pub(crate) struct Scorer<'a> {
    store: &'a EmbeddingStore,
    cache: HashMap<usize, Vec<usize>>,
}

impl<'a> Scorer<'a> {
    pub(crate) fn new(store: &'a EmbeddingStore) -> Result<Self> {
        if store.len() <= BASIS_NEIGHBORS {
            return Err(Error::Config(format!(
                "vocabulary of {} words cannot supply {BASIS_NEIGHBORS} neighbors",
                store.len()
            )));
        }
        Ok(Scorer {
            store,
            cache: HashMap::new(),
        })
    }

    fn index(&self, word: &str) -> Result<usize> {
        self.store.index_of(word).ok_or_else(|| Error::Oov(word.to_string()))
    }

    fn neighbors(&mut self, i: usize) -> &[usize] {
        let store = self.store;
        self.cache
            .entry(i)
            .or_insert_with(|| store.neighbor_indices(i, BASIS_NEIGHBORS).into_iter().map(|n| n.0).collect())
    }

    fn basis(&mut self, o: usize, q: usize, w: usize) -> Vec<usize> {
        let mut u = Vec::with_capacity(BASIS_LEN);
        u.extend_from_slice(self.neighbors(o));
        u.extend_from_slice(self.neighbors(q));
        u.extend_from_slice(self.neighbors(w));
        u
    }

    fn profile(&self, anchor: usize, u: &[usize]) -> Vec<f64> {
        u.iter().map(|&j| self.store.proximity_idx(anchor, j)).collect()
    }

    pub(crate) fn score(&mut self, o: &str, q: &str, vk: &[String], direction: ScoreDirection) -> Result<Vec<CandidateScore>> {
        if vk.len() < 2 {
            return Err(Error::EmptyRank { tag: String::new() });
        }
        let (oi, qi) = (self.index(o)?, self.index(q)?);
        let mut raw = Vec::with_capacity(vk.len());
        for w in vk {
            let wi = self.index(w)?;
            let u = self.basis(oi, qi, wi);
            let x = self.profile(oi, &u);
            let qv = self.profile(qi, &u);
            let wv = self.profile(wi, &u);
            let theta = cosine(&qv, &wv).ok_or_else(|| Error::DegenerateScore(format!("zero distance vector for {w:?}")))?;
            let beta = cosine(&x, &wv).ok_or_else(|| Error::DegenerateScore(format!("zero distance vector for {w:?}")))?;
            raw.push((w.clone(), theta, beta));
        }
        finish_scores(raw, direction)
    }
}

fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (na > 0.0 && nb > 0.0).then(|| dot / (na * nb))
}

/// Applies the score to per-candidate (θ, β) pairs and sorts by descending
/// score, ties broken by word.
pub fn finish_scores(raw: Vec<(String, f64, f64)>, direction: ScoreDirection) -> Result<Vec<CandidateScore>> {
    let m = raw.len() as f64;
    let mean_theta = raw.iter().map(|r| r.1).sum::<f64>() / m;
    let mean_beta = raw.iter().map(|r| r.2).sum::<f64>() / m;
    let (num_mean, den_mean) = match direction {
        ScoreDirection::Printed => (mean_theta, mean_beta),
        ScoreDirection::Inverted => (mean_beta, mean_theta),
    };
    if den_mean == 0.0 {
        return Err(Error::DegenerateScore("mean similarity is zero".into()));
    }
    let mut scored = Vec::with_capacity(raw.len());
    for (w, theta, beta) in raw {
        let (num, den) = match direction {
            ScoreDirection::Printed => (beta, theta),
            ScoreDirection::Inverted => (theta, beta),
        };
        if den == 0.0 {
            return Err(Error::DegenerateScore(format!("zero similarity for {w:?}")));
        }
        let s = (num_mean / den) * (num / den_mean);
        scored.push(CandidateScore { w, theta, beta, s });
    }
    scored.sort_by(|a, b| b.s.total_cmp(&a.s).then_with(|| a.w.cmp(&b.w)));
    Ok(scored)
}

pub fn build_u(o: &str, q: &str, w: &str, store: &EmbeddingStore) -> Result<UVector> {
    let mut scorer = Scorer::new(store)?;
    let (oi, qi, wi) = (scorer.index(o)?, scorer.index(q)?, scorer.index(w)?);
    Ok(UVector {
        words: scorer.basis(oi, qi, wi).into_iter().map(|i| store.word(i).to_string()).collect(),
    })
}

/// Proximities of `anchor` to each word of `u`.
pub fn distance_vector(anchor: &str, u: &UVector, store: &EmbeddingStore) -> Result<Vec<f64>> {
    u.words.iter().map(|w| store.proximity(anchor, w)).collect()
}

/// Scores every candidate of `vk` for a slot whose original word is `o`.
pub fn score_candidates(o: &str, q: &str, vk: &[String], store: &EmbeddingStore, direction: ScoreDirection) -> Result<Vec<CandidateScore>> {
    Scorer::new(store)?.score(o, q, vk, direction)
}

/// The slot's candidate set: the `cap_m` most frequent in-vocabulary words
/// of `TA[tag]`.
pub fn candidate_set(tag: &str, res: &Resources, cap_m: usize) -> Result<Vec<String>> {
    let words = res.table.get(tag).ok_or_else(|| Error::Table(tag.to_string()))?;
    Ok(words
        .iter()
        .filter(|(w, _)| res.store.contains(w))
        .take(cap_m)
        .map(|(w, _)| w.clone())
        .collect())
}

fn fill_by_score<R: Rng>(
    template: &EgpSkeleton,
    query: &str,
    res: &Resources,
    opts: &GenerateOptions,
    scorer: &mut Scorer,
    rng: &mut R,
) -> Result<Draft> {
    let mut tokens = Vec::with_capacity(template.len());
    let mut trace = Vec::new();
    for (position, item) in template.items.iter().enumerate() {
        let (tag, orig) = match item {
            TemplateItem::Literal { w } => {
                tokens.push(w.clone());
                continue;
            }
            TemplateItem::Slot { tag, orig } => (tag, orig),
        };
        let o = orig.to_lowercase();
        let slot = if res.store.contains(&o) {
            let vk = candidate_set(tag, res, opts.cap_m).map_err(|e| e.at_slot(position))?;
            let scored = scorer
                .score(&o, query, &vk, opts.direction)
                .map_err(|e| match e {
                    Error::EmptyRank { .. } => Error::EmptyRank { tag: tag.clone() },
                    e => e,
                })
                .map_err(|e| e.at_slot(position))?;
            let chosen = choose_top3(&scored, rng).expect("at least two candidates").w.clone();
            SlotTrace {
                position,
                tag: tag.clone(),
                o: Some(o),
                candidates: scored
                    .into_iter()
                    .map(|c| CandidateTrace {
                        w: c.w,
                        proximity: None,
                        theta: Some(c.theta),
                        beta: Some(c.beta),
                        s: Some(c.s),
                    })
                    .collect(),
                chosen,
                source: FillSource::Score,
                queries: vec![],
                hops: None,
            }
        } else {
            let ranked = rank_vocabulary(query, tag, &res.table, &res.store).map_err(|e| e.at_slot(position))?;
            let chosen = choose_top3(&ranked, rng).expect("ranking is non-empty").0.clone();
            SlotTrace {
                position,
                tag: tag.clone(),
                o: Some(o),
                candidates: ranked.iter().take(3).map(|(w, p)| CandidateTrace::ranked(w, *p)).collect(),
                chosen,
                source: FillSource::RankingFallback,
                queries: vec![],
                hops: None,
            }
        };
        tokens.push(slot.chosen.clone());
        trace.push(slot);
    }
    Ok(Draft {
        tokens,
        skeleton: SkeletonRef::Template {
            id: template.id,
            source_id: template.source_id.clone(),
        },
        trace,
    })
}

fn attempt<R: Rng>(query: &str, n: usize, res: &Resources, opts: &GenerateOptions, scorer: &mut Scorer, rng: &mut R) -> Result<Draft> {
    let template = res.templates.select(n, rng)?;
    match fill_by_score(template, query, res, opts, scorer, rng) {
        Err(e) if matches!(e.root(), Error::EmptyRank { .. }) => {
            let template = res.templates.select(n, rng)?;
            fill_by_score(template, query, res, opts, scorer, rng)
        }
        other => other,
    }
}

pub fn generate_model3(query: &str, n: usize, res: &Resources, seed: u64, opts: &GenerateOptions) -> Result<GeneratedSentence> {
    check_request(query, n, res)?;
    if opts.cap_m < 2 {
        return Err(Error::Config("candidate cap must be at least 2".into()));
    }
    let mut scorer = Scorer::new(&res.store)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_novel(Model::Three, query, res, opts, |_| false, || {
        attempt(query, n, res, opts, &mut scorer, &mut rng)
    })
}
