mod common;

use std::collections::HashMap;

use common::resources;
use homosyntax::generate::{generate, normalize, FillSource, GenerateOptions, Model, SkeletonRef};
use homosyntax::model3::{build_u, distance_vector, score_candidates, ScoreDirection};
use homosyntax::pos::PosTag;
use homosyntax::Error;

fn opts() -> GenerateOptions {
    GenerateOptions::default()
}

#[test]
fn seeded_goldens() {
    let res = resources();
    let cases = [
        (Model::One, "Estos astro brillante giró a aquella"),
        (Model::Two, "Aquella luz lejana resplandece siempre."),
        (Model::Three, "Aquella arena inmensa navega siempre."),
    ];
    for (model, expected) in cases {
        let g = generate(model, "sol", 6, res, 3, &opts()).unwrap();
        assert_eq!(g.text, expected, "model {model}");
    }
    let inverted = GenerateOptions {
        direction: ScoreDirection::Inverted,
        ..opts()
    };
    let g = generate(Model::Three, "sol", 6, res, 3, &inverted).unwrap();
    assert_eq!(g.text, "Aquella luna oscuras amanecen siempre.");
}

#[test]
fn model1_skeleton_is_followed() {
    let res = resources();
    let mut produced = 0;
    for seed in 0..40 {
        let Ok(g) = generate(Model::One, "guerra", 7, res, seed, &opts()) else { continue };
        produced += 1;
        let SkeletonRef::Egv { tags } = &g.skeleton else { panic!("model 1 uses tag skeletons") };
        assert_eq!(tags.len(), 7);
        assert_eq!(g.tokens.len(), 7);
        for (slot, tag) in g.trace.iter().zip(tags) {
            let t = PosTag::new(tag).unwrap();
            match slot.source {
                FillSource::Dictionary => assert!(res.dictionary.get(tag).unwrap().contains(&slot.chosen)),
                FillSource::Neighbor | FillSource::Inflection => {
                    assert!(res.forms.matches_tag(&slot.chosen, &t), "{} !~ {tag}", slot.chosen);
                    assert_eq!(slot.queries.len(), slot.hops.unwrap() + 1);
                    assert_eq!(slot.queries[0], "guerra");
                    assert!(slot.hops.unwrap() <= 5);
                }
                other => panic!("unexpected source {other:?}"),
            }
        }
        // consecutive tags are observed bigrams
        for w in tags.windows(2) {
            assert!(res.matrix.prob_of(&w[0], &w[1]) > 0.0);
        }
    }
    assert!(produced >= 30, "only {produced} of 40 seeds produced a sentence");
}

#[test]
fn model1_relaxation_failure_carries_context() {
    let res = resources();
    let failure = (0..200)
        .filter_map(|seed| generate(Model::One, "amor", 7, res, seed, &opts()).err())
        .next()
        .expect("some seed exhausts its attempts");
    match failure.root() {
        Error::Relaxation { hops, visited, .. } => {
            assert_eq!(*hops, 5);
            assert_eq!(visited.len(), 6);
            assert_eq!(visited[0], "amor");
        }
        Error::Generation { .. } => {}
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn model2_choices_are_top3_of_ranking() {
    let res = resources();
    for seed in 0..30 {
        let g = generate(Model::Two, "mar", 8, res, seed, &opts()).unwrap();
        for slot in &g.trace {
            let ranked = homosyntax::model2::rank_vocabulary("mar", &slot.tag, &res.table, &res.store).unwrap();
            let top: Vec<&str> = ranked.iter().take(3).map(|r| r.0.as_str()).collect();
            assert!(top.contains(&slot.chosen.as_str()), "{} not in {top:?}", slot.chosen);
        }
    }
}

#[test]
fn models_reject_bad_requests() {
    let res = resources();
    for model in [Model::One, Model::Two, Model::Three] {
        assert!(matches!(generate(model, "nadaquever", 6, res, 1, &opts()), Err(Error::Oov(_))));
        assert!(matches!(generate(model, "sol", 2, res, 1, &opts()), Err(Error::Config(_))));
        assert!(matches!(generate(model, "sol", 16, res, 1, &opts()), Err(Error::Config(_))));
    }
}

#[test]
fn model3_moves_away_from_original_word() {
    let res = resources();
    let (mut slots, mut changed) = (0, 0);
    for q in ["sol", "amor", "guerra", "rey", "mar", "cielo"] {
        for seed in 0..20 {
            let g = generate(Model::Three, q, 8, res, seed, &opts()).unwrap();
            for s in g.trace.iter().filter(|s| s.source == FillSource::Score) {
                slots += 1;
                changed += usize::from(Some(&s.chosen) != s.o.as_ref());
            }
        }
    }
    let rate = changed as f64 / slots as f64;
    assert!(rate >= 0.80, "chosen != o in {rate:.3} of {slots} slots");
}

#[test]
fn u_vector_matches_brute_force_neighbors() {
    let store = &resources().store;
    let brute = |w: &str| -> Vec<String> {
        let mut all: Vec<(String, f64)> = store
            .words()
            .iter()
            .filter(|x| x.as_str() != w)
            .map(|x| (x.clone(), store.proximity(w, x).unwrap()))
            .collect();
        all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        all.into_iter().take(10).map(|p| p.0).collect()
    };
    let u = build_u("rey", "sol", "mesa", store).unwrap();
    let expected: Vec<String> = [brute("rey"), brute("sol"), brute("mesa")].concat();
    assert_eq!(u.words, expected);
    let same = build_u("sol", "sol", "mar", store).unwrap();
    assert_eq!(same.words[..10], same.words[10..20]);

    let x = distance_vector("rey", &u, store).unwrap();
    for (j, w) in u.words.iter().enumerate() {
        assert_eq!(x[j], store.proximity("rey", w).unwrap());
    }
    // an anchor that appears in U has proximity exactly 1 at its position
    let anchor = u.words[12].clone();
    assert_eq!(distance_vector(&anchor, &u, store).unwrap()[12], 1.0);
}

#[test]
fn two_candidate_scores_multiply_to_one_when_roles_swap() {
    // With two candidates the means are midpoints, so s_1 * s_2 =
    // (mt^2 / (t1 t2)) * (b1 b2 / mb^2) for any inputs.
    let store = &resources().store;
    let vk = vec!["luna".to_string(), "mesa".to_string()];
    let scored = score_candidates("rey", "sol", &vk, store, ScoreDirection::Printed).unwrap();
    let by: HashMap<&str, (f64, f64, f64)> = scored.iter().map(|c| (c.w.as_str(), (c.theta, c.beta, c.s))).collect();
    let (t1, b1, s1) = by["luna"];
    let (t2, b2, s2) = by["mesa"];
    let mt = (t1 + t2) / 2.0;
    let mb = (b1 + b2) / 2.0;
    assert!((s1 * s2 - (mt * mt / (t1 * t2)) * (b1 * b2 / (mb * mb))).abs() < 1e-12);
    let swapped = homosyntax::model3::finish_scores(
        vec![("a".into(), 0.4, 0.6), ("b".into(), 0.6, 0.4)],
        ScoreDirection::Printed,
    )
    .unwrap();
    // t and b ratios invert between the two: (0.5/0.4)(0.6/0.5) * (0.5/0.6)(0.4/0.5) = 1
    assert!((swapped[0].s * swapped[1].s - 1.0).abs() < 1e-12);
}

#[test]
fn generated_sentences_are_novel() {
    let res = resources();
    let tagged = res.tagged.as_ref().unwrap();
    let corpus: std::collections::HashSet<String> = tagged
        .iter()
        .map(|s| normalize(&s.surfaces().collect::<Vec<_>>().join(" ")))
        .collect();
    for model in [Model::Two, Model::Three] {
        for seed in 0..25 {
            let g = generate(model, "rey", 6, res, seed, &opts()).unwrap();
            assert!(!corpus.contains(&normalize(&g.text)), "{}", g.text);
        }
    }
}
