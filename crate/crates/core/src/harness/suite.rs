//! The end-to-end battery behind `run-suite`.
//!
//! Everything outside `timing` is a function of the config. Timing data lives
//! under keys stripped by [`strip_timing`], so two runs with one seed compare
//! equal after stripping.

use serde::Serialize;
use serde_json::Value;

use crate::encoding::{DataQueryPair, Instance};
use crate::error::{Error, Result};
use crate::factorization::{check_prop1, slack_profile, CrFactorization, FactoredLanguage, SlackRange};
use crate::language::{check_short_query, DecisionProblem, InstanceMap, LanguageOfPairs, RestoreMap};
use crate::preprocessing::{verify_witness, LadderReport};
use crate::problems::{bds, cvp, wordstats};
use crate::reductions::{self, catalog as red};
use crate::report::{Report, Verdict};
use crate::separation::{self, Collision, GraphFamily, SeparationReport, ALL_GRAPHS_CAP};

use super::bench::{self, BenchFit};
use super::catalog::{self, SampleSpec};
use super::config::{SuiteConfig, INJECT_IDENTITY_PREPROCESSING};
use super::generate::generate_bds;
use super::samples;

pub const SCHEMA_VERSION: u32 = 1;

/// Keys removed before comparing two runs.
pub const TIMING_KEYS: [&str; 3] = ["timing", "timings", "wall_time_ns"];

#[derive(Clone, Debug, Serialize)]
pub struct Environment {
    pub seed: u64,
    pub config: SuiteConfig,
}

#[derive(Clone, Debug, Serialize)]
pub struct SlackProfile {
    pub factorization: String,
    pub c: i64,
    pub rungs: Vec<SlackRung>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SlackRung {
    pub nodes: usize,
    pub slack: Option<SlackRange>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TimingSection {
    pub verdict: Verdict,
    pub fits: Vec<BenchFit>,
    pub errors: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    /// Verdict of every deterministic check; timing has its own.
    pub verdict: Verdict,
    pub environment: Environment,
    pub sections: Vec<Report>,
    pub ladders: Vec<LadderReport>,
    pub slack_profiles: Vec<SlackProfile>,
    pub separation: SeparationReport,
    pub collision: Option<Collision>,
    pub timing: Option<TimingSection>,
}

impl SuiteReport {
    /// Deterministic checks and, when measured, timing fits all pass.
    pub fn passed(&self) -> bool {
        self.verdict.is_pass() && self.timing.as_ref().map_or(true, |t| t.verdict.is_pass())
    }

    pub fn section(&self, subject: &str) -> Option<&Report> {
        self.sections.iter().find(|r| r.subject == subject)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Removes every timing key, at any depth.
pub fn strip_timing(value: &mut Value) {
    match value {
        Value::Object(map) => {
            map.retain(|k, _| !TIMING_KEYS.contains(&k.as_str()));
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

/// A check that passes iff `inner` fails: deliberately broken constructions
/// the checkers must reject.
fn negative_control(subject: &str, inner: &Report) -> Report {
    let mut r = Report::new(format!("negative-control/{subject}")).with_samples(inner.samples);
    let failing = inner.failing_checks().count();
    r.check("failing-checks", failing as f64, 1.0, failing >= 1);
    r
}

/// A construction that must be refused; `outcome` is the refusal reason.
fn refused(subject: &str, outcome: std::result::Result<(), String>) -> Report {
    let mut r = Report::new(format!("negative-control/{subject}"));
    let refused = outcome.is_err();
    r.check("refused", f64::from(u8::from(refused)), 1.0, refused);
    if !refused {
        r.violation(0, "accepted", "construction was accepted");
    }
    r
}

fn short_query_sections(config: &SuiteConfig, spec: SampleSpec) -> Result<Vec<Report>> {
    let instances = catalog::bds_instances(spec, config);
    let members: Vec<_> = instances.iter().filter(|b| b.member).collect();
    let mut out = Vec::new();

    let qbds = bds::query_pairs().with_short_query_bound(config.bound("qbds-query")?);
    let pairs: Vec<_> = members
        .iter()
        .map(|b| crate::encoding::decode_pair(&b.qbds).expect("encoded pair"))
        .collect();
    out.push(check_short_query(&qbds, &pairs)?);

    // Node ids stay short at desk scale, so a constant bound holds as well.
    let constant = bds::query_pairs().with_short_query_bound(config.bound("bds-query")?);
    let mut r = check_short_query(&constant, &pairs)?;
    r.subject = "short-query/qbds-constant".to_owned();
    out.push(r);

    let lexicon = config.lexicon()?;
    let corpora = samples::wordstats_corpora(4, 50, &[256, 1024, 4096, 16384], config.seed, &lexicon, config);
    let pairs: Vec<_> = corpora.iter().flat_map(|c| c.pairs().0).collect();
    out.push(check_short_query(&wordstats::pairs(&lexicon), &pairs)?);

    // Q = D cannot stay under a polylog bound once |D| is past the crossover.
    let bound = config.bound("synthetic-prop1")?;
    let echo = LanguageOfPairs::new("synthetic-q-equals-d", bound, |d, q| d == q);
    let pairs: Vec<_> = (4..=12)
        .map(|e| {
            let d = Instance::from("a".repeat(1 << e));
            DataQueryPair::new(d.clone(), d)
        })
        .collect();
    out.push(negative_control("short-query/synthetic-q-equals-d", &check_short_query(&echo, &pairs)?));

    // |π2(x)| = |x|/2 violates the same bound for large |x|.
    let half = CrFactorization::new(
        "synthetic-half",
        InstanceMap::new(|x| Instance::from(&x.as_bytes()[..x.len() / 2])),
        InstanceMap::new(|x| Instance::from(&x.as_bytes()[x.len() / 2..])),
        RestoreMap::new(|d, q| d.concat(q)),
        0,
        bound,
    );
    let fl = FactoredLanguage::new(DecisionProblem::new("all", |_| true), half);
    let xs: Vec<_> = (4..=12).map(|e| Instance::from("a".repeat(1 << e))).collect();
    out.push(negative_control("prop1/synthetic-half", &check_prop1(&fl, &xs, bound)?));
    Ok(out)
}

fn factorization_sections(config: &SuiteConfig, spec: SampleSpec) -> Result<(Vec<Report>, Vec<SlackProfile>)> {
    let mut out = Vec::new();
    for name in catalog::FACTORIZATIONS {
        let r = catalog::factorization_report(name, spec, config)?;
        out.push(if name == "duplicate-broken" { negative_control(name, &r) } else { r });
    }

    let mut profiles = Vec::new();
    let facts = [
        (bds::example3_factorization(), false),
        (bds::example4_factorization(), true),
    ];
    for (fact, qbds) in facts {
        let rungs: Vec<Vec<Instance>> = config
            .bds_ladder
            .iter()
            .enumerate()
            .map(|(rung, &n)| {
                (0..config.ladder_samples.max(4))
                    .map(|i| {
                        let b = generate_bds(n, config.seed ^ (rung * 1000 + i) as u64, config);
                        if qbds {
                            bds::query_instance(&b)
                        } else {
                            b.to_instance()
                        }
                    })
                    .collect()
            })
            .collect();
        let ranges = slack_profile(&fact, &rungs);
        let mut r = Report::new(format!("slack-constancy/{}", fact.name())).with_samples(rungs.iter().map(Vec::len).sum());
        let drift = ranges
            .iter()
            .filter(|s| !matches!(s, Some(SlackRange { min, max }) if *min == fact.c && *max == fact.c))
            .count();
        r.check_zero("rungs-with-slack-other-than-c", drift);
        out.push(r);
        profiles.push(SlackProfile {
            factorization: fact.name().to_owned(),
            c: fact.c,
            rungs: config
                .bds_ladder
                .iter()
                .zip(ranges)
                .map(|(&nodes, slack)| SlackRung { nodes, slack })
                .collect(),
        });
    }
    Ok((out, profiles))
}

fn witness_sections(config: &SuiteConfig) -> Result<(Vec<Report>, Vec<LadderReport>)> {
    let inject = config.injects(INJECT_IDENTITY_PREPROCESSING);
    let (mut out, mut ladders) = (Vec::new(), Vec::new());
    for name in catalog::WITNESSES {
        let (report, ladder) = catalog::witness_report(name, config, inject)?;
        out.push(report);
        ladders.push(ladder);
    }

    // Π on exhaustive circuits is exactly the one-symbol answer.
    let circuits = samples::cvp_exhaustive(config.caps.cvp_inputs, config.caps.cvp_gates);
    let w = cvp::example2_witness();
    let mut r = Report::new("exhaustive-digest/cvp-example2").with_samples(circuits.len());
    let mut wrong = 0;
    for (i, c) in circuits.iter().enumerate() {
        let expected = if cvp::cvp_eval(c)? { "1" } else { "0" };
        if w.digest(&c.to_instance()) != Instance::from(expected) {
            wrong += 1;
            r.violation(i, "digest", format!("expected {expected}"));
        }
    }
    r.check_zero("digest-mismatches", wrong);
    out.push(r);

    // Identity preprocessing must blow the digest bound.
    if !inject {
        let (_, ladder) = catalog::witness_report("qbds-transfer", config, true)?;
        out.push(negative_control(INJECT_IDENTITY_PREPROCESSING, &ladder.report));
    }
    Ok((out, ladders))
}

fn cvp_pairs(config: &SuiteConfig) -> (Vec<DataQueryPair>, Vec<DataQueryPair>) {
    let (pos, neg) = samples::cvp_labelled(config.budgets.witness_samples, config.budgets.random_max_gates, config.seed, config);
    let pair = |c: &cvp::Circuit| DataQueryPair::new(c.to_instance(), Instance::empty());
    (pos.iter().map(pair).collect(), neg.iter().map(pair).collect())
}

fn reduction_sections(config: &SuiteConfig) -> Result<Vec<Report>> {
    let spec = SampleSpec {
        max_exhaustive: config.caps.reduction_nodes,
        ..SampleSpec::from_config(config)
    };
    let mut out = Vec::new();
    for name in catalog::REDUCTIONS {
        let r = catalog::reduction_report(name, spec, config)?;
        out.push(if name == "qbds-to-bds-drop-numbering" { negative_control(name, &r) } else { r });
    }

    // Composite and hardness factorizations carry the packing slack c + 1.
    let mut r = Report::new("packing-slack");
    let f3 = bds::example3_factorization();
    for name in ["compose-identity", "compose-qbds-bds", "hardness-qbds"] {
        if let catalog::ReductionCase::Fcr { reduction, .. } = catalog::reduction_case(name, spec, config)? {
            r.check(format!("{name}/target-c"), reduction.target_fact.c as f64, (f3.c + 1) as f64, reduction.target_fact.c == f3.c + 1);
            let expected_source = if name == "hardness-qbds" {
                0
            } else if name == "compose-qbds-bds" {
                bds::example4_factorization().c + 1
            } else {
                f3.c + 1
            };
            r.check(
                format!("{name}/source-c"),
                reduction.source_fact.c as f64,
                expected_source as f64,
                reduction.source_fact.c == expected_source,
            );
        }
    }
    out.push(r);

    let validation: Vec<Instance> = catalog::bds_instances(spec, config).into_iter().map(|b| b.qbds).collect();
    let constant_yes = reductions::hardness_pack(
        &bds::query_problem(),
        &bds::problem(),
        red::constant_yes_map(),
        &f3,
        &validation,
    );
    out.push(refused(
        "hardness/constant-yes-map",
        match constant_yes {
            Err(Error::InvalidManyOneMap { .. }) => Err("invalid many-one map".into()),
            Err(e) => return Err(e),
            Ok(_) => Ok(()),
        },
    ));

    let mismatch = reductions::compose_fcr(
        &red::qbds_to_bds(),
        &red::bds_identity(),
        (&bds::example4_factorization(), &f3),
        &bds::problem(),
        &[],
    );
    out.push(refused(
        "compose/name-mismatch",
        match mismatch {
            Err(Error::FactorizationMismatch(m)) => Err(m),
            Err(e) => return Err(e),
            Ok(_) => Ok(()),
        },
    ));

    // Example 2 pulled back across double negation.
    let pulled = reductions::pull_back_witness(&red::cvp_double_negation(), &cvp::example2_witness(), 1);
    let (pos, neg) = cvp_pairs(config);
    let mut r = verify_witness(&cvp::pairs(), &pulled, &pos, &neg)?;
    r.subject = "witness/pull-back-double-negation".to_owned();
    out.push(r);

    // Example 3 moved across the identity reduction.
    let (fact, w) = reductions::transfer_witness(&red::bds_identity(), &bds::example3_witness(), &f3, 1);
    let fl = FactoredLanguage::new(bds::problem(), fact);
    let (pos, neg) = samples::bds_labelled(config.budgets.witness_samples, config.seed, config);
    let split = |xs: Vec<bds::BdsInstance>| -> Vec<DataQueryPair> { xs.iter().map(|b| fl.fact.split(&b.to_instance())).collect() };
    let mut r = verify_witness(&fl.induced(), &w, &split(pos), &split(neg))?;
    r.subject = "witness/transfer-identity".to_owned();
    out.push(r);
    Ok(out)
}

fn separation_sections(config: &SuiteConfig) -> Result<(Vec<Report>, SeparationReport, Option<Collision>)> {
    let report = separation::separation_report(
        1..=config.caps.separation_table,
        config.bound("separation")?,
        config.caps.separation_nodes,
    )?;
    let mut out = vec![report.report.clone()];

    let mut r = Report::new("separation/all-graphs");
    for n in 1..=ALL_GRAPHS_CAP {
        let count = separation::count_realizable_orders(n, GraphFamily::AllGraphs, ALL_GRAPHS_CAP)?;
        let expected = separation::factorial(n);
        r.samples += 1;
        r.check(
            format!("orders-n{n}"),
            count as f64,
            expected.to_string().parse().unwrap_or(f64::NAN),
            num_bigint::BigUint::from(count) == expected,
        );
    }
    out.push(r);

    // Fewer bits than log2(5!) cannot separate all 120 orders.
    let n = 5;
    let bits = (separation::factorial(n).bits() - 1) as usize;
    let collision = separation::truncation_collision(n, bits, config.caps.separation_nodes)?;
    let mut r = Report::new(format!("separation/truncation-collision-n{n}"));
    r.check("collision-found", f64::from(u8::from(collision.is_some())), 1.0, collision.is_some());
    out.push(r);
    Ok((out, report, collision))
}

fn timing_section(config: &SuiteConfig) -> TimingSection {
    let (mut fits, mut errors) = (Vec::new(), Vec::new());
    for name in ["wordstats-example1", "cvp-example2"] {
        for fit in [bench::preprocessing_fit(name, config), bench::query_latency_fit(name, config)] {
            match fit {
                Ok(f) => fits.push(f),
                Err(e) => errors.push(format!("{name}: {e}")),
            }
        }
    }
    TimingSection {
        verdict: Verdict::from_pass(errors.is_empty() && fits.iter().all(|f| f.pass)),
        fits,
        errors,
    }
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let spec = SampleSpec::from_config(config);
    let mut sections = short_query_sections(config, spec)?;
    let (reports, slack_profiles) = factorization_sections(config, spec)?;
    sections.extend(reports);
    let (reports, ladders) = witness_sections(config)?;
    sections.extend(reports);
    sections.extend(reduction_sections(config)?);
    let (reports, separation, collision) = separation_sections(config)?;
    sections.extend(reports);

    let verdict = Verdict::from_pass(sections.iter().all(Report::passed) && ladders.iter().all(LadderReport::passed));
    let timing = config.measure_runtime.then(|| timing_section(config));
    Ok(SuiteReport {
        schema_version: SCHEMA_VERSION,
        verdict,
        environment: Environment {
            seed: config.seed,
            config: config.clone(),
        },
        sections,
        ladders,
        slack_profiles,
        separation,
        collision,
        timing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        let mut c = SuiteConfig::default();
        c.ladder = vec![256, 512, 1024, 2048];
        c.cvp_ladder = vec![64, 128, 256, 512];
        c.bds_ladder = vec![8, 16, 32, 64];
        c.caps.bds_nodes = 3;
        c.caps.reduction_nodes = 3;
        c.budgets.random = 20;
        c.budgets.witness_samples = 30;
        c.budgets.corpora = 2;
        c.budgets.queries_per_corpus = 20;
        c.caps.separation_nodes = 5;
        c.measure_runtime = false;
        c
    }

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let c = small();
        let a = run_suite(&c).unwrap();
        let failing: Vec<_> = a.sections.iter().filter(|r| !r.passed()).map(|r| &r.subject).collect();
        assert!(failing.is_empty(), "{failing:?}");
        assert!(a.passed());
        let (mut x, mut y) = (a.to_json(), run_suite(&c).unwrap().to_json());
        strip_timing(&mut x);
        strip_timing(&mut y);
        assert_eq!(x, y);
    }

    #[test]
    fn identity_injection_fails_ladders() {
        let mut c = small();
        c.inject.push(INJECT_IDENTITY_PREPROCESSING.to_owned());
        let r = run_suite(&c).unwrap();
        assert!(!r.passed());
        assert!(r.ladders.iter().any(|l| !l.passed()));
    }

    #[test]
    fn strip_removes_nested_keys() {
        let mut v = serde_json::json!({"a": [{"wall_time_ns": 3, "b": 1}], "timing": {}});
        strip_timing(&mut v);
        assert_eq!(v, serde_json::json!({"a": [{"b": 1}]}));
    }
}
