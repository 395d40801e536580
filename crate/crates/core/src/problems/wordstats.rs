//! Preposition counting over a plain-text novel.
//!
//! A query `(p,k)` asks whether preposition `p` occurs at least `k` times. The
//! digest stores one fixed-width binary count per lexicon word.

use std::collections::HashMap;
use std::sync::Arc;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bound::PolylogBound;
use crate::encoding::{decode_pair, encode_pair, DataQueryPair, Instance};
use crate::error::{Error, Result};
use crate::factorization::CrFactorization;
use crate::language::{DecisionProblem, InstanceMap, LanguageOfPairs, RestoreMap};
use crate::preprocessing::PreprocessingWitness;

pub const DEFAULT_PREPOSITIONS: [&str; 20] = [
    "about", "above", "across", "after", "against", "along", "among", "around", "at", "before",
    "behind", "between", "by", "during", "for", "from", "in", "into", "of", "on",
];

/// The frozen list of `m` preposition words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lexicon {
    words: Arc<[String]>,
    index: Arc<HashMap<String, usize>>,
}

impl Lexicon {
    pub fn new<S: AsRef<str>>(words: impl IntoIterator<Item = S>) -> Result<Self> {
        let words: Vec<String> = words.into_iter().map(|w| w.as_ref().to_owned()).collect();
        if words.is_empty() {
            return Err(Error::Config("preposition lexicon is empty".into()));
        }
        let mut index = HashMap::new();
        for (i, w) in words.iter().enumerate() {
            if w.is_empty() || !w.chars().all(|c| c.is_alphanumeric() && !c.is_uppercase()) {
                return Err(Error::Config(format!("lexicon word {w:?} is not a lowercase token")));
            }
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::Config(format!("lexicon word {w:?} is listed twice")));
            }
        }
        Ok(Lexicon {
            words: words.into(),
            index: Arc::new(index),
        })
    }

    pub fn english() -> Self {
        Lexicon::new(DEFAULT_PREPOSITIONS).expect("default lexicon is valid")
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

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn max_word_len(&self) -> usize {
        self.words.iter().map(String::len).max().unwrap_or(0)
    }
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon::english()
    }
}

/// Lowercased maximal alphanumeric runs.
pub fn tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

pub fn word_count(text: &str) -> usize {
    text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()).count()
}

/// Digest of counts, one per lexicon word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counts(pub Vec<u64>);

pub fn preposition_digest(text: &str, lexicon: &Lexicon) -> Counts {
    let mut counts = vec![0u64; lexicon.len()];
    let mut buf = String::new();
    for raw in text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()) {
        let word = if raw.chars().any(char::is_uppercase) {
            buf.clear();
            buf.extend(raw.chars().flat_map(char::to_lowercase));
            buf.as_str()
        } else {
            raw
        };
        if let Some(i) = lexicon.index_of(word) {
            counts[i] += 1;
        }
    }
    Counts(counts)
}

/// Bits needed for any count in `0..=n`, i.e. `ceil(log2(n + 1))`.
pub fn count_width(n: u64) -> usize {
    (u64::BITS - n.leading_zeros()) as usize
}

/// Serializes counts as `m` big-endian binary fields of `count_width(n)`
/// `0`/`1` symbols each, where `n` is the corpus word count.
pub fn serialize_digest(counts: &Counts, n: u64) -> Instance {
    let w = count_width(n);
    let mut out = Vec::with_capacity(counts.0.len() * w);
    for &c in &counts.0 {
        debug_assert!(c <= n, "count exceeds word count");
        for bit in (0..w).rev() {
            out.push(if c >> bit & 1 == 1 { b'1' } else { b'0' });
        }
    }
    Instance::from(out)
}

pub fn deserialize_digest(digest: &Instance, m: usize) -> Result<Counts> {
    let bytes = digest.as_bytes();
    if m == 0 || bytes.len() % m != 0 {
        return Err(Error::malformed(format!(
            "digest of {} symbols does not split into {m} fields",
            bytes.len()
        )));
    }
    let w = bytes.len() / m;
    if w > 64 {
        return Err(Error::malformed("digest field wider than 64 bits"));
    }
    bytes
        .chunks(w.max(1))
        .take(m)
        .map(|field| {
            field.iter().try_fold(0u64, |acc, &b| match b {
                b'0' => Ok(acc << 1),
                b'1' => Ok(acc << 1 | 1),
                _ => Err(Error::malformed("digest symbol is not 0 or 1")),
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(|mut v| {
            v.resize(m, 0);
            Counts(v)
        })
}

/// Is the count for `p` at least `k`?
pub fn preposition_decide(counts: &Counts, lexicon: &Lexicon, p: &str, k: u64) -> Result<bool> {
    let i = lexicon
        .index_of(p)
        .ok_or_else(|| Error::UnknownPreposition(p.to_owned()))?;
    Ok(counts.0[i] >= k)
}

pub fn query_text(p: &str, k: u64) -> String {
    format!("({p},{k})")
}

pub fn parse_query(q: &Instance) -> Option<(&str, u64)> {
    let inner = q.as_str()?.strip_prefix('(')?.strip_suffix(')')?;
    let (p, k) = inner.split_once(',')?;
    if k.is_empty() || !k.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((p, k.parse().ok()?))
}

/// `S_Q`, decided by a direct scan of the novel.
pub fn pairs(lexicon: &Lexicon) -> LanguageOfPairs {
    let lex = lexicon.clone();
    let bound = PolylogBound {
        a: 1.0,
        k: 1,
        b: (lexicon.max_word_len() + 4) as f64,
    };
    LanguageOfPairs::new("wordstats", bound, move |d, q| {
        let Some((p, k)) = parse_query(q) else { return false };
        if lex.index_of(p).is_none() {
            return false;
        }
        let text = d.to_text_lossy();
        (tokens(&text).filter(|t| t == p).count() as u64) >= k
    })
}

/// The decision problem `L_Q = { N#(p,k) }`.
pub fn problem(lexicon: &Lexicon) -> DecisionProblem {
    DecisionProblem::for_query_class(&pairs(lexicon))
}

/// Π counts prepositions; `S′` reads the count back out of the digest.
pub fn example1_witness(lexicon: &Lexicon) -> PreprocessingWitness {
    let m = lexicon.len();
    let pre_lex = lexicon.clone();
    let pre = InstanceMap::new(move |d| {
        let text = d.to_text_lossy();
        let n = word_count(&text) as u64;
        serialize_digest(&preposition_digest(&text, &pre_lex), n)
    });
    let post_lex = lexicon.clone();
    let post = LanguageOfPairs::new("wordstats-digest", pairs(lexicon).short_query_bound(), move |l, q| {
        let Some((p, k)) = parse_query(q) else { return false };
        match deserialize_digest(l, post_lex.len()) {
            Ok(counts) => preposition_decide(&counts, &post_lex, p, k).unwrap_or(false),
            Err(_) => false,
        }
    });
    let output_bound = PolylogBound {
        a: m as f64,
        k: 1,
        b: m as f64,
    };
    PreprocessingWitness::new("wordstats-example1", pre, post, output_bound)
}

/// `N#(p,k) ↦ ⟨N, (p,k)⟩`; the `#` is dropped so `c = −1`.
pub fn split_factorization(lexicon: &Lexicon) -> CrFactorization {
    let bound = pairs(lexicon).short_query_bound();
    CrFactorization::new(
        "wordstats-split",
        InstanceMap::new(|x| decode_pair(x).map(|p| p.data).unwrap_or_else(|_| x.clone())),
        InstanceMap::new(|x| decode_pair(x).map(|p| p.query).unwrap_or_default()),
        RestoreMap::new(|d, q| encode_pair(&DataQueryPair::new(d.clone(), q.clone()))),
        -1,
        bound,
    )
}

/// Knobs for synthetic novels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusParams {
    pub preposition_rate: f64,
    pub zipf_exponent: f64,
    pub capitalization_rate: f64,
    pub punctuation_rate: f64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            preposition_rate: 0.12,
            zipf_exponent: 1.0,
            capitalization_rate: 0.05,
            punctuation_rate: 0.08,
        }
    }
}

const FILLER: [&str; 32] = [
    "the", "a", "house", "dark", "was", "she", "he", "said", "and", "it", "old", "man", "door",
    "night", "walked", "slowly", "river", "light", "they", "had", "never", "seen", "such", "cold",
    "morning", "letter", "window", "quiet", "road", "town", "voice", "story",
];

/// A synthetic novel of exactly `words` tokens.
pub fn synthetic_corpus<R: Rng + ?Sized>(words: usize, lexicon: &Lexicon, params: &CorpusParams, rng: &mut R) -> String {
    let weights: Vec<f64> = (1..=lexicon.len())
        .map(|r| 1.0 / (r as f64).powf(params.zipf_exponent))
        .collect();
    let zipf = WeightedIndex::new(&weights).expect("zipf weights are positive");
    let filler: Vec<&str> = FILLER
        .iter()
        .copied()
        .filter(|w| lexicon.index_of(w).is_none())
        .collect();
    let mut text = String::with_capacity(words * 6);
    for i in 0..words {
        if i > 0 {
            text.push(' ');
        }
        let word = if rng.gen_bool(params.preposition_rate.clamp(0.0, 1.0)) {
            lexicon.words()[zipf.sample(rng)].as_str()
        } else {
            filler[rng.gen_range(0..filler.len())]
        };
        if rng.gen_bool(params.capitalization_rate.clamp(0.0, 1.0)) {
            let mut chars = word.chars();
            if let Some(first) = chars.next() {
                text.extend(first.to_uppercase());
                text.push_str(chars.as_str());
            }
        } else {
            text.push_str(word);
        }
        if rng.gen_bool(params.punctuation_rate.clamp(0.0, 1.0)) {
            text.push(if rng.gen_bool(0.5) { ',' } else { '.' });
        }
    }
    text
}

/// Random queries against `text`, about half true and half false.
pub fn random_queries<R: Rng + ?Sized>(counts: &Counts, lexicon: &Lexicon, count: usize, rng: &mut R) -> Vec<(String, u64, bool)> {
    (0..count)
        .map(|_| {
            let i = rng.gen_range(0..lexicon.len());
            let have = counts.0[i];
            let positive = rng.gen_bool(0.5);
            let k = if positive {
                rng.gen_range(0..=have)
            } else {
                have + 1 + rng.gen_range(0..=have / 4)
            };
            (lexicon.words()[i].clone(), k, positive)
        })
        .collect()
}
