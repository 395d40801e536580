//! Preprocessing witnesses `(Π, S′)` and their checks.

use std::fmt;
use std::time::Instant;

use serde::Serialize;

use crate::bound::PolylogBound;
use crate::encoding::{DataQueryPair, Instance};
use crate::error::{Error, Result};
use crate::factorization::FactoredLanguage;
use crate::harness::fit::least_squares;
use crate::language::{InstanceMap, LanguageOfPairs};
use crate::report::{Report, Verdict};

/// How many distinct data parts are preprocessed twice to check determinism.
const DETERMINISM_PROBES: usize = 4;

#[derive(Clone)]
pub struct PreprocessingWitness {
    name: String,
    pub pre: InstanceMap,
    pub post: LanguageOfPairs,
    pub output_bound: PolylogBound,
}

impl PreprocessingWitness {
    pub fn new(name: impl Into<String>, pre: InstanceMap, post: LanguageOfPairs, output_bound: PolylogBound) -> Self {
        PreprocessingWitness {
            name: name.into(),
            pre,
            post,
            output_bound,
        }
    }

    /// The witness whose `S′` is `{⟨"1", ε⟩}` and whose `Π` reports the
    /// answer of `decide` as one symbol.
    pub fn decided(name: impl Into<String>, decide: impl Fn(&Instance) -> bool + Send + Sync + 'static) -> Self {
        PreprocessingWitness::new(
            name,
            InstanceMap::new(move |x| Instance::from(if decide(x) { "1" } else { "0" })),
            LanguageOfPairs::new("accept-one", PolylogBound::constant(0.0), |d, q| {
                d.as_bytes() == b"1" && q.is_empty()
            }),
            PolylogBound::constant(1.0),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn digest(&self, data: &Instance) -> Instance {
        self.pre.apply(data)
    }

    /// `⟨Π(D), Q⟩ ∈ S′`.
    pub fn accepts(&self, data: &Instance, query: &Instance) -> bool {
        self.post.contains(&self.digest(data), query)
    }

    /// The same `S′` and bound with `Π` replaced.
    pub fn with_pre(&self, name: impl Into<String>, pre: InstanceMap) -> Self {
        PreprocessingWitness {
            name: name.into(),
            pre,
            ..self.clone()
        }
    }
}

impl fmt::Debug for PreprocessingWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PreprocessingWitness")
            .field("name", &self.name)
            .field("post", &self.post)
            .field("output_bound", &self.output_bound)
            .finish()
    }
}

/// Checks `⟨D,Q⟩ ∈ S ⇔ ⟨Π(D),Q⟩ ∈ S′` on both sample sets and the output
/// bound on every `D`.
///
/// Consecutive samples with the same data part reuse its digest.
pub fn verify_witness(
    s: &LanguageOfPairs,
    w: &PreprocessingWitness,
    positives: &[DataQueryPair],
    negatives: &[DataQueryPair],
) -> Result<Report> {
    let mut report = Report::new(format!("witness/{}", w.name())).with_samples(positives.len() + negatives.len());
    let mut wrong = [0usize; 2];
    let mut over_bound = 0;
    let mut worst_ratio = 0f64;
    let mut probes: Vec<(Instance, Instance)> = Vec::new();
    let mut last: Option<(Instance, Instance)> = None;
    let labelled = positives.iter().map(|p| (p, true)).chain(negatives.iter().map(|p| (p, false)));
    for (index, (pair, positive)) in labelled.enumerate() {
        let member = s.contains_pair(pair);
        if member != positive {
            return Err(Error::MislabeledSample {
                index,
                labelled: if positive { "positive" } else { "negative" },
                actual: if member { "member" } else { "non-member" },
            });
        }
        let digest = match &last {
            Some((d, digest)) if d.shares_storage(&pair.data) || *d == pair.data => digest.clone(),
            _ => {
                let digest = w.digest(&pair.data);
                let limit = w.output_bound.eval(pair.data.len());
                worst_ratio = worst_ratio.max(digest.len() as f64 / limit.max(f64::MIN_POSITIVE));
                if !w.output_bound.allows(digest.len(), pair.data.len()) {
                    over_bound += 1;
                    report.violation(
                        index,
                        "output-bound",
                        format!("|Pi(D)| = {} > {limit:.3} at |D| = {}", digest.len(), pair.data.len()),
                    );
                }
                if probes.len() < DETERMINISM_PROBES && !probes.iter().any(|(d, _)| *d == pair.data) {
                    probes.push((pair.data.clone(), digest.clone()));
                }
                last = Some((pair.data.clone(), digest.clone()));
                digest
            }
        };
        if w.post.contains(&digest, &pair.query) != positive {
            wrong[usize::from(!positive)] += 1;
            report.violation(
                index,
                if positive { "positive-rejected" } else { "negative-accepted" },
                format!("|D| = {}, |Q| = {}", pair.data.len(), pair.query.len()),
            );
        }
    }
    let unstable = probes.iter().filter(|(d, digest)| w.digest(d) != *digest).count();
    report.check("positives", positives.len() as f64, 1.0, !positives.is_empty());
    report.check("negatives", negatives.len() as f64, 1.0, !negatives.is_empty());
    report.check_zero("positive-violations", wrong[0]);
    report.check_zero("negative-violations", wrong[1]);
    report.check_zero("output-bound-violations", over_bound);
    report.check_at_most("max-digest-to-bound-ratio", worst_ratio, 1.0);
    report.check_zero("digest-nondeterminism", unstable);
    Ok(report)
}

/// Runs [`verify_witness`] against `S_(L,Υ)`, splitting instances with `Υ`.
pub fn made_tractable_witness(
    fl: &FactoredLanguage,
    w: &PreprocessingWitness,
    positives: &[Instance],
    negatives: &[Instance],
) -> Result<Report> {
    let split = |xs: &[Instance]| xs.iter().map(|x| fl.fact.split(x)).collect::<Vec<_>>();
    let mut report = verify_witness(&fl.induced(), w, &split(positives), &split(negatives))?;
    report.subject = format!("made-tractable/{}/{}", fl.fact.name(), w.name());
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderRung {
    pub nominal_size: usize,
    pub input_size: usize,
    pub max_digest_size: usize,
    pub bound_at_input: f64,
    pub instances: usize,
    pub bound_violations: usize,
    pub wall_time_ns: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderReport {
    pub subject: String,
    pub rungs: Vec<LadderRung>,
    pub slope: f64,
    pub slope_cap: f64,
    pub verdict: Verdict,
    pub report: Report,
}

impl LadderReport {
    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }
}

/// Max digest size per rung against the output bound, plus the slope of
/// `ln|Π(x)|` against `ln log₂|x|`, which must not exceed `k + slack`.
///
/// `generate(rung, size)` supplies the instances of each rung.
pub fn digest_size_ladder(
    w: &PreprocessingWitness,
    generate: &mut dyn FnMut(usize, usize) -> Vec<Instance>,
    sizes: &[usize],
    slope_slack: f64,
) -> Result<LadderReport> {
    if sizes.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "digest ladder needs at least 4 rungs, got {}",
            sizes.len()
        )));
    }
    if sizes.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InsufficientData("ladder sizes must be strictly increasing".into()));
    }
    let mut rungs = Vec::with_capacity(sizes.len());
    let mut report = Report::new(format!("digest-ladder/{}", w.name()));
    for (rung, &size) in sizes.iter().enumerate() {
        let xs = generate(rung, size);
        if xs.is_empty() {
            return Err(Error::GeneratorExhausted { rung, size });
        }
        let start = Instant::now();
        let digests: Vec<usize> = xs.iter().map(|x| w.digest(x).len()).collect();
        let wall_time_ns = start.elapsed().as_nanos();
        let mut bound_violations = 0;
        for (x, &d) in xs.iter().zip(&digests) {
            if !w.output_bound.allows(d, x.len()) {
                bound_violations += 1;
                report.violation(
                    rung,
                    "output-bound",
                    format!("|Pi(x)| = {d} > {:.3} at |x| = {}", w.output_bound.eval(x.len()), x.len()),
                );
            }
        }
        let input_size = xs.iter().map(Instance::len).max().unwrap_or(0);
        report.samples += xs.len();
        rungs.push(LadderRung {
            nominal_size: size,
            input_size,
            max_digest_size: digests.iter().copied().max().unwrap_or(0),
            bound_at_input: w.output_bound.eval(input_size),
            instances: xs.len(),
            bound_violations,
            wall_time_ns,
        });
    }
    let xs: Vec<f64> = rungs.iter().map(|r| (r.input_size.max(2) as f64).log2().ln()).collect();
    let ys: Vec<f64> = rungs.iter().map(|r| (r.max_digest_size.max(1) as f64).ln()).collect();
    let slope = least_squares(&xs, &ys).map(|f| f.slope).unwrap_or(0.0);
    let slope_cap = f64::from(w.output_bound.k) + slope_slack;
    report.check_zero("ladder-bound-violations", rungs.iter().map(|r| r.bound_violations).sum());
    report.check_at_most("digest-slope", slope, slope_cap);
    Ok(LadderReport {
        subject: w.name().to_owned(),
        verdict: report.verdict,
        rungs,
        slope,
        slope_cap,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parity() -> LanguageOfPairs {
        LanguageOfPairs::new("even-length", PolylogBound::constant(0.0), |d, q| q.is_empty() && d.len() % 2 == 0)
    }

    fn parity_witness() -> PreprocessingWitness {
        PreprocessingWitness::decided("parity", |d| d.len() % 2 == 0)
    }

    #[test]
    fn two_sided_pass() {
        let pos = vec![DataQueryPair::new("ab", ""), DataQueryPair::new("", "")];
        let neg = vec![DataQueryPair::new("a", ""), DataQueryPair::new("ab", "q")];
        let r = verify_witness(&parity(), &parity_witness(), &pos, &neg).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn mislabeled_samples_are_errors() {
        let err = verify_witness(&parity(), &parity_witness(), &[DataQueryPair::new("a", "")], &[]).unwrap_err();
        assert!(matches!(err, Error::MislabeledSample { index: 0, .. }));
    }

    #[test]
    fn wrong_witness_fails() {
        let w = PreprocessingWitness::decided("always", |_| true);
        let r = verify_witness(&parity(), &w, &[DataQueryPair::new("ab", "")], &[DataQueryPair::new("a", "")]).unwrap();
        assert!(!r.passed());
        assert_eq!(r.get("negative-violations").unwrap().measured, 1.0);
    }

    #[test]
    fn identity_digest_fails_the_ladder() {
        let w = parity_witness().with_pre("identity", InstanceMap::identity());
        let sizes = [16, 64, 256, 1024];
        let r = digest_size_ladder(&w, &mut |_, n| vec![Instance::from("x".repeat(n))], &sizes, 0.5).unwrap();
        assert!(!r.passed());
        let ok = digest_size_ladder(&parity_witness(), &mut |_, n| vec![Instance::from("x".repeat(n))], &sizes, 0.5)
            .unwrap();
        assert!(ok.passed());
        assert_eq!(ok.slope, 0.0);
    }

    #[test]
    fn ladder_errors() {
        let w = parity_witness();
        assert!(matches!(
            digest_size_ladder(&w, &mut |_, _| vec![Instance::empty()], &[1, 2, 3], 0.5),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            digest_size_ladder(&w, &mut |r, _| if r == 2 { vec![] } else { vec![Instance::empty()] }, &[1, 2, 3, 4], 0.5),
            Err(Error::GeneratorExhausted { rung: 2, size: 3 })
        ));
    }
}
