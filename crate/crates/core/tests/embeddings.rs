mod common;

use std::fs::File;
use std::io::BufReader;

use common::{fixtures, resources};
use homosyntax::corpus::read_sentence_lines;
use homosyntax::embeddings::{train_embeddings, EmbeddingStore, TrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn trained_vectors_separate_topics() {
    let corpus = read_sentence_lines(BufReader::new(File::open(fixtures().join("5kl-sample.txt")).unwrap()), "5kl").unwrap();
    let cfg = TrainConfig {
        dims: 16,
        seed: 1,
        ..TrainConfig::default()
    };
    let (store, report) = train_embeddings(&corpus, &cfg).unwrap();
    assert!(store.proximity("rey", "reina").unwrap() > store.proximity("rey", "mesa").unwrap());
    assert!(store.proximity("sol", "luna").unwrap() > store.proximity("sol", "espada").unwrap());
    assert!(report.epoch_losses.last() < report.epoch_losses.first());
}

#[test]
fn neighbors_match_brute_force() {
    let store = &resources().store;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let q = store.word(rng.gen_range(0..store.len()));
        let mut all: Vec<(String, f64)> = store
            .words()
            .iter()
            .filter(|w| w.as_str() != q)
            .map(|w| (w.clone(), store.proximity(q, w).unwrap()))
            .collect();
        all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        all.truncate(10);
        assert_eq!(store.neighbors(q, 10).unwrap().entries, all);
    }
}

#[test]
fn fixture_vectors_round_trip_bytes() {
    let path = common::resource_dir().join("vectors.txt");
    let store = EmbeddingStore::load(&path).unwrap();
    let mut buf = Vec::new();
    store.write_text(&mut buf).unwrap();
    assert_eq!(buf, std::fs::read(&path).unwrap());
}
