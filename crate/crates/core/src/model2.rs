//! Model 2: a corpus template whose slots are filled from the associative
//! table, choosing among the three words closest to the query.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embeddings::{AssociativeTable, EmbeddingStore};
use crate::error::{Error, Result};
use crate::generate::{check_request, generate_novel, CandidateTrace, Draft, FillSource, GenerateOptions, GeneratedSentence, Model, SkeletonRef, SlotTrace};
use crate::resources::Resources;
use crate::templates::{EgpSkeleton, TemplateItem};

/// In-vocabulary words of `TA[tag]` by descending proximity to `query`,
/// ties broken by word.
pub fn rank_vocabulary(query: &str, tag: &str, table: &AssociativeTable, store: &EmbeddingStore) -> Result<Vec<(String, f64)>> {
    let qi = store.index_of(query).ok_or_else(|| Error::Oov(query.to_string()))?;
    let words = table.get(tag).ok_or_else(|| Error::Table(tag.to_string()))?;
    let mut ranked: Vec<(String, f64)> = words
        .iter()
        .filter_map(|(w, _)| store.index_of(w).map(|i| (w.clone(), store.proximity_idx(qi, i))))
        .collect();
    if ranked.is_empty() {
        return Err(Error::EmptyRank { tag: tag.to_string() });
    }
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(ranked)
}

/// Uniform draw among the first three entries (all of them if fewer).
pub fn choose_top3<'a, T, R: Rng>(ranked: &'a [T], rng: &mut R) -> Option<&'a T> {
    if ranked.is_empty() {
        return None;
    }
    Some(&ranked[rng.gen_range(0..ranked.len().min(3))])
}

/// Fills every slot of `template` by query ranking.
pub(crate) fn fill_by_ranking<R: Rng>(
    template: &EgpSkeleton,
    query: &str,
    res: &Resources,
    rng: &mut R,
) -> Result<Draft> {
    let mut tokens = Vec::with_capacity(template.len());
    let mut trace = Vec::new();
    for (position, item) in template.items.iter().enumerate() {
        match item {
            TemplateItem::Literal { w } => tokens.push(w.clone()),
            TemplateItem::Slot { tag, orig } => {
                let ranked = rank_vocabulary(query, tag, &res.table, &res.store).map_err(|e| e.at_slot(position))?;
                let chosen = choose_top3(&ranked, rng).expect("ranking is non-empty").0.clone();
                trace.push(SlotTrace {
                    position,
                    tag: tag.clone(),
                    o: Some(orig.clone()),
                    candidates: ranked.iter().take(3).map(|(w, p)| CandidateTrace::ranked(w, *p)).collect(),
                    chosen: chosen.clone(),
                    source: FillSource::Ranking,
                    queries: vec![],
                    hops: None,
                });
                tokens.push(chosen);
            }
        }
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

/// One template draw plus a single reselection when a slot has no
/// in-vocabulary candidate.
fn attempt<R: Rng>(query: &str, n: usize, res: &Resources, rng: &mut R) -> Result<Draft> {
    let template = res.templates.select(n, rng)?;
    match fill_by_ranking(template, query, res, rng) {
        Err(e) if matches!(e.root(), Error::EmptyRank { .. }) => {
            let template = res.templates.select(n, rng)?;
            fill_by_ranking(template, query, res, rng)
        }
        other => other,
    }
}

pub fn generate_model2(query: &str, n: usize, res: &Resources, seed: u64, opts: &GenerateOptions) -> Result<GeneratedSentence> {
    check_request(query, n, res)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_novel(Model::Two, query, res, opts, |_| false, || attempt(query, n, res, &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn store() -> EmbeddingStore {
        let words = ["sol", "luz", "mar", "mesa", "rey"];
        let vecs = [[1.0, 0.0], [0.9, 0.2], [0.5, 0.5], [-1.0, 0.1], [0.0, 1.0]];
        EmbeddingStore::new(words.iter().map(|w| w.to_string()).collect(), 2, vecs.iter().flatten().copied().collect()).unwrap()
    }

    fn table() -> AssociativeTable {
        let mut ta = AssociativeTable::default();
        ta.insert(
            "NCMS",
            vec![("mar".into(), 3), ("mesa".into(), 2), ("rey".into(), 1), ("fantasma".into(), 9), ("luz".into(), 1)],
        );
        ta.insert("VMIP", vec![("zzz".into(), 1)]);
        ta
    }

    #[test]
    fn ranking_orders_by_proximity_and_drops_oov() {
        let ranked = rank_vocabulary("sol", "NCMS", &table(), &store()).unwrap();
        let words: Vec<&str> = ranked.iter().map(|r| r.0.as_str()).collect();
        assert_eq!(words, ["luz", "mar", "rey", "mesa"]);
        assert!(ranked.windows(2).all(|w| w[0].1 >= w[1].1));
    }

    #[test]
    fn ranking_errors() {
        assert!(matches!(rank_vocabulary("sol", "VMIP", &table(), &store()), Err(Error::EmptyRank { .. })));
        assert!(matches!(rank_vocabulary("sol", "AQ0M", &table(), &store()), Err(Error::Table(_))));
        assert!(matches!(rank_vocabulary("nada", "NCMS", &table(), &store()), Err(Error::Oov(_))));
    }

    #[test]
    fn top3_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let items = [1, 2, 3, 4, 5];
        let mut seen = [false; 5];
        for _ in 0..300 {
            seen[*choose_top3(&items, &mut rng).unwrap() - 1] = true;
        }
        assert_eq!(seen, [true, true, true, false, false]);
        assert_eq!(choose_top3(&[7], &mut rng), Some(&7));
        assert_eq!(choose_top3::<u8, _>(&[], &mut rng), None);
    }
}
