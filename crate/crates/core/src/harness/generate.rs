use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::encoding::Instance;
use crate::error::{Error, Result};
use crate::problems::{bds, cvp, wordstats};

use super::config::SuiteConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    Bds,
    Cvp,
    Wordstats,
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bds" => Ok(ProblemKind::Bds),
            "cvp" => Ok(ProblemKind::Cvp),
            "wordstats" => Ok(ProblemKind::Wordstats),
            other => Err(Error::UnknownProblem(other.to_owned())),
        }
    }
}

/// SplitMix64 finalizer, used to derive independent streams from one seed.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A generator stream determined by `(seed, tag, index)`.
pub fn rng_for(seed: u64, tag: &str, index: u64) -> ChaCha8Rng {
    let tag_hash = tag.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3));
    ChaCha8Rng::seed_from_u64(mix(seed ^ mix(tag_hash ^ mix(index))))
}

/// Node and gate split for a circuit of `size` nodes in total.
pub fn circuit_shape(size: usize, max_inputs: usize) -> (usize, usize) {
    let size = size.max(2);
    let inputs = max_inputs.clamp(1, ((size - 1) / 2).max(1));
    (inputs, size - inputs - 1)
}

pub fn generate_bds(n: usize, seed: u64, config: &SuiteConfig) -> bds::BdsInstance {
    let n = n.max(2);
    let mut rng = rng_for(seed, "bds", n as u64);
    bds::random_instance(n, config.generator.edge_probability(n), &mut rng)
}

pub fn generate_cvp(size: usize, seed: u64, config: &SuiteConfig) -> cvp::Circuit {
    let (inputs, gates) = circuit_shape(size, config.generator.circuit_inputs);
    let mut rng = rng_for(seed, "cvp", size as u64);
    cvp::random_circuit(inputs, gates, config.generator.gate_mix, &mut rng)
}

pub fn generate_corpus(words: usize, seed: u64, config: &SuiteConfig) -> Result<String> {
    let mut rng = rng_for(seed, "wordstats", words as u64);
    Ok(wordstats::synthetic_corpus(words, &config.lexicon()?, &config.generator.corpus, &mut rng))
}

/// A deterministic instance of the named problem: a BDS instance on `size`
/// nodes, a circuit with `size` nodes, or a novel of `size` words.
pub fn generate(problem: &str, size: usize, seed: u64, config: &SuiteConfig) -> Result<Instance> {
    Ok(match problem.parse()? {
        ProblemKind::Bds => generate_bds(size, seed, config).to_instance(),
        ProblemKind::Cvp => generate_cvp(size, seed, config).to_instance(),
        ProblemKind::Wordstats => Instance::from(generate_corpus(size, seed, config)?),
    })
}
