//! Decision problems, languages of pairs, and the maps between instances.

use std::fmt;
use std::sync::Arc;

use crate::bound::PolylogBound;
use crate::encoding::{decode_pair, DataQueryPair, Instance};
use crate::error::{Error, Result};
use crate::report::Report;

/// A total function `Instance → Instance`.
#[derive(Clone)]
pub struct InstanceMap(Arc<dyn Fn(&Instance) -> Instance + Send + Sync>);

impl InstanceMap {
    pub fn new(f: impl Fn(&Instance) -> Instance + Send + Sync + 'static) -> Self {
        InstanceMap(Arc::new(f))
    }

    pub fn identity() -> Self {
        InstanceMap::new(Instance::clone)
    }

    /// The map sending everything to ε.
    pub fn empty() -> Self {
        InstanceMap::constant(Instance::empty())
    }

    pub fn constant(value: Instance) -> Self {
        InstanceMap::new(move |_| value.clone())
    }

    pub fn apply(&self, x: &Instance) -> Instance {
        (self.0)(x)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &InstanceMap) -> InstanceMap {
        let (first, second) = (self.clone(), other.clone());
        InstanceMap::new(move |x| second.apply(&first.apply(x)))
    }
}

impl fmt::Debug for InstanceMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("InstanceMap(..)")
    }
}

/// A total function `(Instance, Instance) → Instance`.
#[derive(Clone)]
pub struct RestoreMap(Arc<dyn Fn(&Instance, &Instance) -> Instance + Send + Sync>);

impl RestoreMap {
    pub fn new(f: impl Fn(&Instance, &Instance) -> Instance + Send + Sync + 'static) -> Self {
        RestoreMap(Arc::new(f))
    }

    /// `(d, q) ↦ d`.
    pub fn left() -> Self {
        RestoreMap::new(|d, _| d.clone())
    }

    pub fn apply(&self, data: &Instance, query: &Instance) -> Instance {
        (self.0)(data, query)
    }
}

impl fmt::Debug for RestoreMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("RestoreMap(..)")
    }
}

/// A decision problem given by its membership oracle.
#[derive(Clone)]
pub struct DecisionProblem {
    name: String,
    oracle: Arc<dyn Fn(&Instance) -> bool + Send + Sync>,
}

impl DecisionProblem {
    pub fn new(name: impl Into<String>, oracle: impl Fn(&Instance) -> bool + Send + Sync + 'static) -> Self {
        DecisionProblem {
            name: name.into(),
            oracle: Arc::new(oracle),
        }
    }

    /// `L_Q = { D#Q | ⟨D,Q⟩ ∈ S_Q }`.
    pub fn for_query_class(pairs: &LanguageOfPairs) -> Self {
        let s = pairs.clone();
        DecisionProblem::new(format!("L[{}]", pairs.name()), move |x| match decode_pair(x) {
            Ok(p) => s.contains(&p.data, &p.query),
            Err(_) => false,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn contains(&self, x: &Instance) -> bool {
        (self.oracle)(x)
    }
}

impl fmt::Debug for DecisionProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DecisionProblem").field("name", &self.name).finish()
    }
}

/// A set of ⟨D, Q⟩ pairs decided by a reference oracle, together with the
/// bound `|Q| ≤ short_query_bound(|D|)` its members are expected to obey.
#[derive(Clone)]
pub struct LanguageOfPairs {
    name: String,
    membership: Arc<dyn Fn(&Instance, &Instance) -> bool + Send + Sync>,
    short_query_bound: PolylogBound,
}

impl LanguageOfPairs {
    pub fn new(
        name: impl Into<String>,
        short_query_bound: PolylogBound,
        membership: impl Fn(&Instance, &Instance) -> bool + Send + Sync + 'static,
    ) -> Self {
        LanguageOfPairs {
            name: name.into(),
            membership: Arc::new(membership),
            short_query_bound,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn short_query_bound(&self) -> PolylogBound {
        self.short_query_bound
    }

    pub fn with_short_query_bound(mut self, bound: PolylogBound) -> Self {
        self.short_query_bound = bound;
        self
    }

    pub fn contains(&self, data: &Instance, query: &Instance) -> bool {
        (self.membership)(data, query)
    }

    pub fn contains_pair(&self, pair: &DataQueryPair) -> bool {
        self.contains(&pair.data, &pair.query)
    }
}

impl fmt::Debug for LanguageOfPairs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LanguageOfPairs")
            .field("name", &self.name)
            .field("short_query_bound", &self.short_query_bound)
            .finish()
    }
}

/// Checks `|Q| ≤ shortQueryBound(|D|)` on member samples.
pub fn check_short_query(language: &LanguageOfPairs, samples: &[DataQueryPair]) -> Result<Report> {
    let bound = language.short_query_bound();
    let mut report = Report::new(format!("short-query/{}", language.name())).with_samples(samples.len());
    let mut violations = 0;
    let mut worst = 0f64;
    for (i, pair) in samples.iter().enumerate() {
        if !language.contains_pair(pair) {
            return Err(Error::NonMemberSample {
                index: i,
                language: language.name().to_owned(),
            });
        }
        let limit = bound.eval(pair.data.len());
        worst = worst.max(pair.query.len() as f64 - limit);
        if !bound.allows(pair.query.len(), pair.data.len()) {
            violations += 1;
            report.violation(
                i,
                "short-query",
                format!("|Q| = {} > {limit:.3} at |D| = {}", pair.query.len(), pair.data.len()),
            );
        }
    }
    report.check_zero("query-length-violations", violations);
    if !samples.is_empty() {
        report.check_at_most("max-excess-over-bound", worst, 0.0);
    }
    Ok(report)
}
