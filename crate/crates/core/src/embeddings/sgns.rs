//! Single-threaded skip-gram with negative sampling.
//!
//! Deliberately small: no subsampling, no hierarchical softmax, a linearly
//! decaying learning rate. Given the same corpus, config and seed the output
//! is bit-for-bit identical.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EmbeddingStore;
use crate::corpus::SentenceRecord;
use crate::error::{Error, Result};

pub const MIN_SENTENCES: usize = 100;
pub const MIN_DIMS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub dims: usize,
    pub window: usize,
    pub epochs: usize,
    pub negatives: usize,
    pub min_count: u64,
    pub learning_rate: f32,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dims: 64,
            window: 5,
            epochs: 5,
            negatives: 5,
            min_count: 2,
            learning_rate: 0.025,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean negative-sampling loss per positive pair, one value per epoch.
    pub epoch_losses: Vec<f64>,
    pub vocab_size: usize,
    pub training_tokens: usize,
}

/// Lowercased alphabetic tokens; punctuation, numbers and mixed tokens are dropped.
fn training_tokens(sentence: &SentenceRecord) -> impl Iterator<Item = String> + '_ {
    sentence
        .tokens
        .iter()
        .filter(|t| t.chars().all(char::is_alphabetic))
        .map(|t| t.to_lowercase())
}

pub fn train_embeddings(corpus: &[SentenceRecord], cfg: &TrainConfig) -> Result<(EmbeddingStore, TrainReport)> {
    if corpus.len() < MIN_SENTENCES {
        return Err(Error::Train(format!(
            "need at least {MIN_SENTENCES} sentences, got {}",
            corpus.len()
        )));
    }
    if cfg.dims < MIN_DIMS {
        return Err(Error::Train(format!("dimension must be at least {MIN_DIMS}, got {}", cfg.dims)));
    }
    if cfg.window == 0 || cfg.epochs == 0 {
        return Err(Error::Train("window and epochs must be positive".into()));
    }

    let mut counts: HashMap<String, u64> = HashMap::new();
    for s in corpus {
        for t in training_tokens(s) {
            *counts.entry(t).or_default() += 1;
        }
    }
    let mut vocab: Vec<(String, u64)> = counts.into_iter().filter(|(_, c)| *c >= cfg.min_count).collect();
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    if vocab.len() < 2 {
        return Err(Error::Train("fewer than two words reach the minimum count".into()));
    }
    let index: HashMap<&str, usize> = vocab.iter().enumerate().map(|(i, (w, _))| (w.as_str(), i)).collect();
    let sentences: Vec<Vec<usize>> = corpus
        .iter()
        .map(|s| training_tokens(s).filter_map(|t| index.get(t.as_str()).copied()).collect())
        .filter(|s: &Vec<usize>| s.len() > 1)
        .collect();
    let total_tokens: usize = sentences.iter().map(Vec::len).sum();

    // unigram^0.75 noise distribution
    let mut cumulative = Vec::with_capacity(vocab.len());
    let mut acc = 0.0f64;
    for (_, c) in &vocab {
        acc += (*c as f64).powf(0.75);
        cumulative.push(acc);
    }
    let noise_total = acc;

    let dims = cfg.dims;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut input: Vec<f32> = (0..vocab.len() * dims)
        .map(|_| (rng.gen::<f32>() - 0.5) / dims as f32)
        .collect();
    let mut output = vec![0.0f32; vocab.len() * dims];
    let mut grad = vec![0.0f32; dims];

    let schedule = (total_tokens * cfg.epochs) as f32 + 1.0;
    let mut processed = 0usize;
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        let mut loss = 0.0f64;
        let mut pairs = 0usize;
        for sentence in &sentences {
            for (pos, &center) in sentence.iter().enumerate() {
                let lr = cfg.learning_rate * (1.0 - processed as f32 / schedule).max(1e-4);
                processed += 1;
                let reach = cfg.window - rng.gen_range(0..cfg.window);
                let lo = pos.saturating_sub(reach);
                let hi = (pos + reach).min(sentence.len() - 1);
                for (ctx_pos, &context) in sentence.iter().enumerate().take(hi + 1).skip(lo) {
                    if ctx_pos == pos {
                        continue;
                    }
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    let h = center * dims;
                    for k in 0..=cfg.negatives {
                        let (target, label) = if k == 0 {
                            (context, 1.0f32)
                        } else {
                            let x = rng.gen::<f64>() * noise_total;
                            let t = cumulative.partition_point(|&c| c <= x).min(vocab.len() - 1);
                            if t == context {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let o = target * dims;
                        let f: f32 = (0..dims).map(|d| input[h + d] * output[o + d]).sum();
                        let sig = 1.0 / (1.0 + (-f).exp());
                        let p = if label > 0.5 { sig } else { 1.0 - sig };
                        loss -= f64::from(p.max(1e-7)).ln();
                        let g = (label - sig) * lr;
                        for d in 0..dims {
                            grad[d] += g * output[o + d];
                            output[o + d] += g * input[h + d];
                        }
                    }
                    for d in 0..dims {
                        input[h + d] += grad[d];
                    }
                    pairs += 1;
                }
            }
        }
        epoch_losses.push(if pairs == 0 { 0.0 } else { loss / pairs as f64 });
    }

    let words: Vec<String> = vocab.into_iter().map(|(w, _)| w).collect();
    let vocab_size = words.len();
    let store = EmbeddingStore::new(words, dims, input)?;
    Ok((
        store,
        TrainReport {
            epoch_losses,
            vocab_size,
            training_tokens: total_tokens,
        },
    ))
}
