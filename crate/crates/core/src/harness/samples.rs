//! Seeded sample sets shared by the suite, the CLI and the tests.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use itertools::Itertools;
use rand::Rng;

use crate::encoding::{DataQueryPair, Instance};
use crate::language::LanguageOfPairs;
use crate::problems::bds::{self, BdsInstance, NumberedGraph};
use crate::problems::cvp::{self, Circuit};
use crate::problems::wordstats::{self, Lexicon};

use super::config::SuiteConfig;
use super::generate::rng_for;

/// Exhaustive BDS instances on `2..=max_n` nodes, one chunk per edge set
/// (all numberings and ordered query pairs of that edge set).
pub fn bds_exhaustive_chunks(max_n: usize) -> impl Iterator<Item = Vec<BdsInstance>> {
    (2..=max_n).flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (1..=n).tuple_combinations().collect();
        (0..1u64 << pairs.len()).map(move |mask| {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let mut chunk = Vec::new();
            for numbering in (1..=n).permutations(n) {
                let g = NumberedGraph::new(numbering, edges.iter().copied()).expect("enumerated graph");
                for uv in (1..=n).permutations(2) {
                    chunk.push(BdsInstance::new(g.clone(), uv[0], uv[1]));
                }
            }
            chunk
        })
    })
}

pub fn bds_exhaustive(max_n: usize) -> Vec<BdsInstance> {
    bds_exhaustive_chunks(max_n).flatten().collect()
}

/// Random BDS instances with node counts drawn from the configured range.
pub fn bds_random(count: usize, seed: u64, config: &SuiteConfig) -> Vec<BdsInstance> {
    let mut rng = rng_for(seed, "bds-random", count as u64);
    let (lo, hi) = (config.budgets.random_min_nodes, config.budgets.random_max_nodes);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(lo..=hi);
            bds::random_instance(n, config.generator.edge_probability(n), &mut rng)
        })
        .collect()
}

/// Exhaustive instances up to `max_n` nodes plus `random` random ones.
pub fn bds_universe(max_n: usize, random: usize, seed: u64, config: &SuiteConfig) -> Vec<BdsInstance> {
    let mut all = bds_exhaustive(max_n);
    all.extend(bds_random(random, seed, config));
    all
}

/// Splits instances into members and non-members of BDS; swapping `(u,v)`
/// turns every instance into its opposite.
pub fn bds_labelled(count: usize, seed: u64, config: &SuiteConfig) -> (Vec<BdsInstance>, Vec<BdsInstance>) {
    let mut pos = Vec::with_capacity(count);
    let mut neg = Vec::with_capacity(count);
    for b in bds_random(count, seed, config) {
        let swapped = b.swapped();
        if b.decide().expect("generated query is valid") {
            pos.push(b);
            neg.push(swapped);
        } else {
            pos.push(swapped);
            neg.push(b);
        }
    }
    (pos, neg)
}

/// Exhaustive circuits with `inputs` inputs and up to `max_gates` gates.
pub fn cvp_exhaustive(inputs: usize, max_gates: usize) -> Vec<Circuit> {
    let mut out = Vec::new();
    for gates in 0..=max_gates {
        cvp::for_each_circuit(inputs, gates, |c| out.push(c.clone()));
    }
    out
}

/// True and false circuits, at least `count` of each. False samples come from
/// flipping one input of a generated circuit and re-labelling it.
pub fn cvp_labelled(count: usize, max_gates: usize, seed: u64, config: &SuiteConfig) -> (Vec<Circuit>, Vec<Circuit>) {
    let mut rng = rng_for(seed, "cvp-labelled", count as u64);
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    let mut attempts = 0;
    while (pos.len() < count || neg.len() < count) && attempts < count * 100 {
        attempts += 1;
        let inputs = rng.gen_range(1..=config.generator.circuit_inputs.clamp(1, 4));
        let gates = rng.gen_range(0..=max_gates);
        let c = cvp::random_circuit(inputs, gates, config.generator.gate_mix, &mut rng);
        let mut flipped = c.clone();
        let i = rng.gen_range(0..flipped.inputs.len());
        flipped.inputs[i] = !flipped.inputs[i];
        for q in [c, flipped] {
            let target = if cvp::cvp_eval(&q).expect("generated circuit is valid") {
                &mut pos
            } else {
                &mut neg
            };
            if target.len() < count {
                target.push(q);
            }
        }
    }
    (pos, neg)
}

/// A novel with labelled `(p,k)` queries.
#[derive(Clone, Debug)]
pub struct CorpusSample {
    pub text: Instance,
    pub words: usize,
    pub queries: Vec<(String, u64, bool)>,
}

impl CorpusSample {
    pub fn pairs(&self) -> (Vec<DataQueryPair>, Vec<DataQueryPair>) {
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for (p, k, label) in &self.queries {
            let pair = DataQueryPair::new(self.text.clone(), wordstats::query_text(p, *k));
            if *label {
                pos.push(pair);
            } else {
                neg.push(pair);
            }
        }
        (pos, neg)
    }
}

/// `corpora` novels whose sizes cycle through `sizes`, each with `queries`
/// queries labelled by a scan of the text.
pub fn wordstats_corpora(
    corpora: usize,
    queries: usize,
    sizes: &[usize],
    seed: u64,
    lexicon: &Lexicon,
    config: &SuiteConfig,
) -> Vec<CorpusSample> {
    (0..corpora)
        .map(|i| {
            let words = sizes[i % sizes.len()];
            let mut rng = rng_for(seed, "wordstats-corpus", i as u64);
            let text = wordstats::synthetic_corpus(words, lexicon, &config.generator.corpus, &mut rng);
            let counts = wordstats::preposition_digest(&text, lexicon);
            let queries = wordstats::random_queries(&counts, lexicon, queries, &mut rng);
            CorpusSample {
                text: Instance::from(text),
                words,
                queries,
            }
        })
        .collect()
}

/// `S_Q` with per-text count caches, so repeated queries against one large
/// novel do not rescan it. Texts are identified by storage.
pub fn cached_wordstats_pairs(lexicon: &Lexicon) -> LanguageOfPairs {
    type Cache = Vec<(Instance, HashMap<String, u64>)>;
    let cache: Arc<Mutex<Cache>> = Arc::default();
    let lex = lexicon.clone();
    let bound = wordstats::pairs(lexicon).short_query_bound();
    LanguageOfPairs::new("wordstats", bound, move |d, q| {
        let Some((p, k)) = wordstats::parse_query(q) else { return false };
        if lex.index_of(p).is_none() {
            return false;
        }
        let mut cache = cache.lock().expect("cache lock");
        let pos = match cache.iter().position(|(text, _)| text.shares_storage(d)) {
            Some(pos) => pos,
            None => {
                cache.push((d.clone(), HashMap::new()));
                cache.len() - 1
            }
        };
        let counts = &mut cache[pos].1;
        let count = *counts.entry(p.to_owned()).or_insert_with(|| {
            let text = d.to_text_lossy();
            wordstats::tokens(&text).filter(|t| t == p).count() as u64
        });
        count >= k
    })
}
