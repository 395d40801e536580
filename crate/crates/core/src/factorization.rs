//! Factorizations with constant redundancy and the languages of pairs they induce.

use std::fmt;

use serde::Serialize;

use crate::bound::PolylogBound;
use crate::encoding::{DataQueryPair, Instance};
use crate::error::{Error, Result};
use crate::language::{DecisionProblem, InstanceMap, LanguageOfPairs, RestoreMap};
use crate::report::Report;

/// `(π1, π2, ρ, c)` plus the concrete bound used for `|π2(x)| ≤ bound(|π1(x)|)`.
#[derive(Clone)]
pub struct CrFactorization {
    name: String,
    pub pi1: InstanceMap,
    pub pi2: InstanceMap,
    pub rho: RestoreMap,
    pub c: i64,
    pub query_bound: PolylogBound,
}

impl CrFactorization {
    pub fn new(
        name: impl Into<String>,
        pi1: InstanceMap,
        pi2: InstanceMap,
        rho: RestoreMap,
        c: i64,
        query_bound: PolylogBound,
    ) -> Self {
        CrFactorization {
            name: name.into(),
            pi1,
            pi2,
            rho,
            c,
            query_bound,
        }
    }

    /// `(id, ε, left, 0)`.
    pub fn identity(name: impl Into<String>) -> Self {
        CrFactorization::new(
            name,
            InstanceMap::identity(),
            InstanceMap::empty(),
            RestoreMap::left(),
            0,
            PolylogBound::constant(0.0),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn split(&self, x: &Instance) -> DataQueryPair {
        DataQueryPair {
            data: self.pi1.apply(x),
            query: self.pi2.apply(x),
        }
    }

    pub fn restore(&self, data: &Instance, query: &Instance) -> Instance {
        self.rho.apply(data, query)
    }

    /// `|π1(x)| + |π2(x)| − |x|`.
    pub fn slack(&self, x: &Instance) -> i64 {
        let p = self.split(x);
        (p.data.len() + p.query.len()) as i64 - x.len() as i64
    }

    /// The Proposition-1 style bound on `|π2(x)|` in terms of `|x|`: substitute
    /// `|x| + c` for `|π1(x)|` in the query bound.
    pub fn derived_query_bound(&self) -> PolylogBound {
        self.query_bound.shifted(self.c)
    }
}

impl fmt::Debug for CrFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CrFactorization")
            .field("name", &self.name)
            .field("c", &self.c)
            .field("query_bound", &self.query_bound)
            .finish()
    }
}

pub fn apply_factorization(f: &CrFactorization, x: &Instance) -> DataQueryPair {
    f.split(x)
}

/// A decision problem together with a factorization of it.
#[derive(Clone, Debug)]
pub struct FactoredLanguage {
    pub base: DecisionProblem,
    pub fact: CrFactorization,
}

impl FactoredLanguage {
    pub fn new(base: DecisionProblem, fact: CrFactorization) -> Self {
        FactoredLanguage { base, fact }
    }

    /// `⟨D,Q⟩ ∈ S_(L,Υ)`: some member `x` splits into `⟨D,Q⟩`. On members `ρ`
    /// inverts the split, so the only candidate is `x = ρ(D,Q)`.
    pub fn contains(&self, data: &Instance, query: &Instance) -> bool {
        let x = self.fact.restore(data, query);
        self.base.contains(&x) && self.fact.pi1.apply(&x) == *data && self.fact.pi2.apply(&x) == *query
    }

    /// `S_(L,Υ)` as a language of pairs.
    pub fn induced(&self) -> LanguageOfPairs {
        let me = self.clone();
        LanguageOfPairs::new(
            format!("S[{},{}]", self.base.name(), self.fact.name()),
            self.fact.query_bound,
            move |d, q| me.contains(d, q),
        )
    }
}

/// Minimum and maximum observed slack over a sample set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SlackRange {
    pub min: i64,
    pub max: i64,
}

pub fn slack_range(f: &CrFactorization, samples: &[Instance]) -> Option<SlackRange> {
    samples.iter().map(|x| f.slack(x)).fold(None, |acc, s| {
        Some(match acc {
            None => SlackRange { min: s, max: s },
            Some(r) => SlackRange {
                min: r.min.min(s),
                max: r.max.max(s),
            },
        })
    })
}

fn require_members(fl: &FactoredLanguage, samples: &[Instance]) -> Result<()> {
    match samples.iter().position(|x| !fl.base.contains(x)) {
        Some(index) => Err(Error::NonMemberSample {
            index,
            language: fl.base.name().to_owned(),
        }),
        None => Ok(()),
    }
}

/// Checks round-trip, redundancy and the query bound on every sample.
///
/// Each failing sample is listed once, under the first condition it violates.
/// The report also records the observed slack range.
pub fn verify_factorization(fl: &FactoredLanguage, samples: &[Instance]) -> Result<Report> {
    require_members(fl, samples)?;
    let f = &fl.fact;
    let mut report = Report::new(format!("factorization/{}", f.name())).with_samples(samples.len());
    let (mut round_trip, mut redundancy, mut query) = (0, 0, 0);
    for (i, x) in samples.iter().enumerate() {
        let p = f.split(x);
        let slack = (p.data.len() + p.query.len()) as i64 - x.len() as i64;
        if f.restore(&p.data, &p.query) != *x {
            round_trip += 1;
            report.violation(i, "round-trip", format!("rho(pi1(x), pi2(x)) != x for |x| = {}", x.len()));
        } else if slack > f.c {
            redundancy += 1;
            report.violation(i, "redundancy", format!("slack {slack} > c = {}", f.c));
        } else if !f.query_bound.allows(p.query.len(), p.data.len()) {
            query += 1;
            report.violation(
                i,
                "query-bound",
                format!(
                    "|pi2(x)| = {} > {:.3} at |pi1(x)| = {}",
                    p.query.len(),
                    f.query_bound.eval(p.data.len()),
                    p.data.len()
                ),
            );
        }
    }
    report.check_zero("round-trip-violations", round_trip);
    report.check_zero("redundancy-violations", redundancy);
    report.check_zero("query-bound-violations", query);
    if let Some(range) = slack_range(f, samples) {
        report.check("max-slack", range.max as f64, f.c as f64, range.max <= f.c);
        report.check("min-slack", range.min as f64, f.c as f64, true);
    }
    Ok(report)
}

/// `|π2(x)| ≤ bound(|x|)` on every sample.
pub fn check_prop1(fl: &FactoredLanguage, samples: &[Instance], bound: PolylogBound) -> Result<Report> {
    require_members(fl, samples)?;
    let mut report = Report::new(format!("prop1/{}", fl.fact.name())).with_samples(samples.len());
    let mut violations = 0;
    for (i, x) in samples.iter().enumerate() {
        let q = fl.fact.pi2.apply(x).len();
        if !bound.allows(q, x.len()) {
            violations += 1;
            report.violation(
                i,
                "prop1",
                format!("|pi2(x)| = {q} > {:.3} at |x| = {}", bound.eval(x.len()), x.len()),
            );
        }
    }
    report.check_zero("prop1-violations", violations);
    Ok(report)
}

/// Per-rung slack ranges; the redundancy constant should not drift with size.
pub fn slack_profile(f: &CrFactorization, rungs: &[Vec<Instance>]) -> Vec<Option<SlackRange>> {
    rungs.iter().map(|r| slack_range(f, r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn everything() -> DecisionProblem {
        DecisionProblem::new("all", |_| true)
    }

    #[test]
    fn identity_factorization_splits_to_data() {
        let f = CrFactorization::identity("identity");
        let x = Instance::from("abc");
        assert_eq!(apply_factorization(&f, &x), DataQueryPair::new("abc", ""));
        let fl = FactoredLanguage::new(everything(), f);
        let r = verify_factorization(&fl, &[x, Instance::empty()]).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.get("max-slack").unwrap().measured, 0.0);
    }

    #[test]
    fn duplicating_factorization_fails_redundancy() {
        let f = CrFactorization::new(
            "dup",
            InstanceMap::identity(),
            InstanceMap::identity(),
            RestoreMap::left(),
            0,
            PolylogBound::constant(1e9),
        );
        let fl = FactoredLanguage::new(everything(), f);
        let r = verify_factorization(&fl, &["ab".into()]).unwrap();
        assert!(!r.passed());
        assert_eq!(r.violations[0].condition, "redundancy");
        assert!(!r.get("redundancy-violations").unwrap().pass);
    }

    #[test]
    fn induced_language_requires_round_trip() {
        let fl = FactoredLanguage::new(everything(), CrFactorization::identity("identity"));
        assert!(fl.contains(&"a".into(), &Instance::empty()));
        assert!(!fl.contains(&"a".into(), &"q".into()));
    }

    #[test]
    fn non_members_are_rejected() {
        let fl = FactoredLanguage::new(DecisionProblem::new("none", |_| false), CrFactorization::identity("i"));
        assert!(matches!(
            verify_factorization(&fl, &["x".into()]),
            Err(Error::NonMemberSample { index: 0, .. })
        ));
    }

    #[test]
    fn half_length_query_fails_prop1() {
        let f = CrFactorization::new(
            "half",
            InstanceMap::new(|x| Instance::from_bytes(&x.as_bytes()[..x.len() / 2])),
            InstanceMap::new(|x| Instance::from_bytes(&x.as_bytes()[x.len() / 2..])),
            RestoreMap::new(|d, q| d.concat(q)),
            0,
            PolylogBound::constant(4.0),
        );
        let fl = FactoredLanguage::new(everything(), f);
        let small: Instance = "abcd".into();
        let big: Instance = "x".repeat(4096).into();
        let bound = PolylogBound::new(1.0, 1, 0.0).unwrap();
        assert!(check_prop1(&fl, &[small], bound).unwrap().passed());
        assert!(!check_prop1(&fl, &[big], bound).unwrap().passed());
    }
}
