use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bound::PolylogBound;
use crate::error::{Error, Result};
use crate::problems::cvp::GateMix;
use crate::problems::wordstats::{CorpusParams, Lexicon, DEFAULT_PREPOSITIONS};

pub const INJECT_IDENTITY_PREPROCESSING: &str = "identity-preprocessing";
const KNOWN_INJECTIONS: [&str; 1] = [INJECT_IDENTITY_PREPROCESSING];

/// A bound written as `"a,k,b"` in config files.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundSpec(pub PolylogBound);

impl Serialize for BoundSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for BoundSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        PolylogBound::from_str(&text).map(BoundSpec).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for BoundSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    /// Exhaustive BDS graphs up to this many nodes.
    pub bds_nodes: usize,
    /// Exhaustive BDS graphs used by reduction checks.
    pub reduction_nodes: usize,
    /// Exhaustive circuits with up to this many gates.
    pub cvp_gates: usize,
    /// Inputs used by exhaustive circuits.
    pub cvp_inputs: usize,
    /// Largest `n` whose visit orders are enumerated.
    pub separation_nodes: usize,
    /// Largest `n` in the arithmetic separation table.
    pub separation_table: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            bds_nodes: 4,
            reduction_nodes: 4,
            cvp_gates: 2,
            cvp_inputs: 2,
            separation_nodes: 7,
            separation_table: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budgets {
    /// Random instances added on top of every exhaustive sample set.
    pub random: usize,
    /// Positive and negative samples per witness check.
    pub witness_samples: usize,
    /// Corpora in the preposition witness check.
    pub corpora: usize,
    pub queries_per_corpus: usize,
    /// Node range of random BDS graphs.
    pub random_min_nodes: usize,
    pub random_max_nodes: usize,
    /// Gate count of random circuits.
    pub random_max_gates: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            random: 200,
            witness_samples: 500,
            corpora: 11,
            queries_per_corpus: 200,
            random_min_nodes: 5,
            random_max_nodes: 50,
            random_max_gates: 12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorParams {
    pub edge_density: f64,
    pub max_avg_degree: f64,
    pub circuit_inputs: usize,
    pub gate_mix: GateMix,
    pub corpus: CorpusParams,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            edge_density: 0.25,
            max_avg_degree: 8.0,
            circuit_inputs: 8,
            gate_mix: GateMix::default(),
            corpus: CorpusParams::default(),
        }
    }
}

impl GeneratorParams {
    /// Edge probability on `n` nodes: the density, capped so the expected
    /// degree stays at most `max_avg_degree`.
    pub fn edge_probability(&self, n: usize) -> f64 {
        if n < 2 {
            return 0.0;
        }
        self.edge_density.min(self.max_avg_degree / (n - 1) as f64).clamp(0.0, 1.0)
    }
}

fn default_bounds() -> BTreeMap<String, BoundSpec> {
    [
        ("bds-query", PolylogBound::constant(32.0)),
        ("qbds-query", PolylogBound { a: 2.0, k: 1, b: 5.0 }),
        ("separation", PolylogBound { a: 1.0, k: 2, b: 0.0 }),
        ("synthetic-prop1", PolylogBound { a: 1.0, k: 1, b: 0.0 }),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_owned(), BoundSpec(v)))
    .collect()
}

fn pow2_ladder(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|e| 1usize << e).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Corpus word counts for the preposition witness and timing fits.
    pub ladder: Vec<usize>,
    /// Node counts for BDS digest ladders and slack profiles.
    pub bds_ladder: Vec<usize>,
    /// Node counts for the circuit digest ladder and latency fit.
    pub cvp_ladder: Vec<usize>,
    /// Instances generated per ladder rung.
    pub ladder_samples: usize,
    pub slope_slack: f64,
    pub fit_max_degree: u32,
    pub residual_threshold: f64,
    pub warmup: usize,
    pub repeats: usize,
    /// Queries timed per latency measurement.
    pub query_batch: usize,
    /// Whether `run-suite` runs the runtime fits.
    pub measure_runtime: bool,
    pub caps: Caps,
    pub budgets: Budgets,
    pub bounds: BTreeMap<String, BoundSpec>,
    pub generator: GeneratorParams,
    pub lexicon: Vec<String>,
    /// Named faults to inject; see README.
    pub inject: Vec<String>,
    pub output_path: Option<PathBuf>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 1,
            ladder: pow2_ladder(10, 20),
            bds_ladder: pow2_ladder(4, 10),
            cvp_ladder: pow2_ladder(10, 20),
            ladder_samples: 1,
            slope_slack: 0.5,
            fit_max_degree: 3,
            residual_threshold: 0.5,
            warmup: 3,
            repeats: 5,
            query_batch: 2000,
            measure_runtime: true,
            caps: Caps::default(),
            budgets: Budgets::default(),
            bounds: default_bounds(),
            generator: GeneratorParams::default(),
            lexicon: DEFAULT_PREPOSITIONS.iter().map(|s| (*s).to_owned()).collect(),
            inject: Vec::new(),
            output_path: None,
        }
    }
}

fn check_ladder(name: &str, ladder: &[usize]) -> Result<()> {
    if ladder.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{name} needs at least 4 rungs, got {}",
            ladder.len()
        )));
    }
    if ladder.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::Config(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut config: SuiteConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        // Named bounds not mentioned in the file keep their defaults.
        for (k, v) in default_bounds() {
            config.bounds.entry(k).or_insert(v);
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        SuiteConfig::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        check_ladder("ladder", &self.ladder)?;
        check_ladder("bds_ladder", &self.bds_ladder)?;
        check_ladder("cvp_ladder", &self.cvp_ladder)?;
        if self.bds_ladder[0] < 2 {
            return Err(Error::Config("bds_ladder sizes must be at least 2".into()));
        }
        if self.ladder_samples == 0 || self.repeats == 0 || self.query_batch == 0 {
            return Err(Error::Config("ladder_samples, repeats and query_batch must be positive".into()));
        }
        if !(self.slope_slack >= 0.0 && self.residual_threshold >= 0.0) {
            return Err(Error::Config("slope_slack and residual_threshold must be nonnegative".into()));
        }
        let b = &self.budgets;
        if b.random_min_nodes < 2 || b.random_min_nodes > b.random_max_nodes {
            return Err(Error::Config("random node range must satisfy 2 <= min <= max".into()));
        }
        if self.caps.bds_nodes > 5 || self.caps.reduction_nodes > 5 {
            return Err(Error::Config("exhaustive BDS caps above 5 nodes are not supported".into()));
        }
        if self.caps.cvp_gates > 3 || self.caps.cvp_inputs > 3 {
            return Err(Error::Config("exhaustive circuit caps above 3 are not supported".into()));
        }
        if self.caps.separation_nodes > 9 {
            return Err(Error::Config("separation enumeration cap above 9 is not supported".into()));
        }
        for name in &self.inject {
            if !KNOWN_INJECTIONS.contains(&name.as_str()) {
                return Err(Error::Config(format!("unknown fault injection {name:?}")));
            }
        }
        self.lexicon()?;
        Ok(())
    }

    pub fn lexicon(&self) -> Result<Lexicon> {
        Lexicon::new(&self.lexicon)
    }

    pub fn bound(&self, name: &str) -> Result<PolylogBound> {
        self.bounds
            .get(name)
            .map(|b| b.0)
            .ok_or_else(|| Error::Config(format!("no bound named {name:?}")))
    }

    pub fn injects(&self, name: &str) -> bool {
        self.inject.iter().any(|i| i == name)
    }
}
