//! Named factorizations, witnesses and reductions with their sample sets.

use crate::bound::PolylogBound;
use crate::encoding::{encode_pair, DataQueryPair, Instance};
use crate::error::{Error, Result};
use crate::factorization::{check_prop1, verify_factorization, CrFactorization, FactoredLanguage};
use crate::language::{DecisionProblem, InstanceMap, LanguageOfPairs, RestoreMap};
use crate::preprocessing::{digest_size_ladder, verify_witness, LadderReport, PreprocessingWitness};
use crate::problems::{bds, cvp, wordstats};
use crate::reductions::{self, catalog as red, FcrReduction};
use crate::report::Report;

use super::config::SuiteConfig;
use super::generate::{generate_bds, generate_corpus, generate_cvp};
use super::samples;

/// How many instances a check draws: exhaustive up to a size cap, plus random.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleSpec {
    pub max_exhaustive: usize,
    pub random: usize,
    pub seed: u64,
}

impl SampleSpec {
    pub fn from_config(config: &SuiteConfig) -> Self {
        SampleSpec {
            max_exhaustive: config.caps.bds_nodes,
            random: config.budgets.random,
            seed: config.seed,
        }
    }
}

pub const FACTORIZATIONS: [&str; 6] = [
    "bds-example3",
    "qbds-example4",
    "identity",
    "wordstats-split",
    "cvp-split",
    "duplicate-broken",
];

pub const WITNESSES: [&str; 5] = [
    "wordstats-example1",
    "cvp-example2",
    "bds-example3",
    "qbds-example4",
    "qbds-transfer",
];

pub const REDUCTIONS: [&str; 8] = [
    "qbds-to-bds",
    "bds-to-qbds",
    "bds-identity",
    "qbds-to-bds-drop-numbering",
    "compose-identity",
    "compose-qbds-bds",
    "hardness-qbds",
    "cvp-double-negation",
];

/// `(G,(u,v))` strings: exhaustive up to the cap plus random ones.
pub fn bds_instances(spec: SampleSpec, config: &SuiteConfig) -> Vec<BdsInstanceText> {
    samples::bds_universe(spec.max_exhaustive, spec.random, spec.seed, config)
        .into_iter()
        .map(|b| BdsInstanceText {
            bds: b.to_instance(),
            qbds: bds::query_instance(&b),
            member: b.decide().expect("sampled query is valid"),
        })
        .collect()
}

/// One sampled BDS instance in both encodings.
#[derive(Clone, Debug)]
pub struct BdsInstanceText {
    pub bds: Instance,
    pub qbds: Instance,
    pub member: bool,
}

fn duplicate_broken() -> CrFactorization {
    CrFactorization::new(
        "duplicate-broken",
        InstanceMap::identity(),
        InstanceMap::identity(),
        RestoreMap::left(),
        0,
        PolylogBound::constant(0.0),
    )
}

/// The factored problem and member samples behind a factorization name.
pub fn factorization(name: &str, spec: SampleSpec, config: &SuiteConfig) -> Result<(FactoredLanguage, Vec<Instance>)> {
    let bds_members = || -> Vec<Instance> {
        bds_instances(spec, config).into_iter().filter(|b| b.member).map(|b| b.bds).collect()
    };
    let qbds_members = || -> Vec<Instance> {
        bds_instances(spec, config).into_iter().filter(|b| b.member).map(|b| b.qbds).collect()
    };
    Ok(match name {
        "bds-example3" => (FactoredLanguage::new(bds::problem(), bds::example3_factorization()), bds_members()),
        "duplicate-broken" => (FactoredLanguage::new(bds::problem(), duplicate_broken()), bds_members()),
        "qbds-example4" => (FactoredLanguage::new(bds::query_problem(), bds::example4_factorization()), qbds_members()),
        "identity" => (FactoredLanguage::new(bds::query_problem(), CrFactorization::identity("identity")), qbds_members()),
        "wordstats-split" => {
            let lexicon = config.lexicon()?;
            let sizes = [64, 256, 1024, 4096];
            let corpora = samples::wordstats_corpora(8, (spec.random / 8).max(4), &sizes, spec.seed, &lexicon, config);
            let members = corpora
                .iter()
                .flat_map(|c| c.pairs().0)
                .map(|p| encode_pair(&p))
                .collect();
            (FactoredLanguage::new(wordstats::problem(&lexicon), wordstats::split_factorization(&lexicon)), members)
        }
        "cvp-split" => {
            let mut circuits = samples::cvp_exhaustive(config.caps.cvp_inputs, config.caps.cvp_gates.min(spec.max_exhaustive));
            circuits.extend(samples::cvp_labelled(spec.random, config.budgets.random_max_gates, spec.seed, config).0);
            let members = circuits
                .iter()
                .filter(|c| cvp::cvp_eval(c).unwrap_or(false))
                .map(|c| encode_pair(&DataQueryPair::new(c.to_instance(), Instance::empty())))
                .collect();
            (FactoredLanguage::new(cvp::query_problem(), cvp::split_factorization()), members)
        }
        other => return Err(Error::UnknownEntry(other.to_owned())),
    })
}

/// Condition checks plus the derived query-length bound.
pub fn factorization_report(name: &str, spec: SampleSpec, config: &SuiteConfig) -> Result<Report> {
    let (fl, members) = factorization(name, spec, config)?;
    let mut report = Report::new(format!("factorization/{name}"));
    report.absorb("conditions", verify_factorization(&fl, &members)?);
    report.absorb("prop1", check_prop1(&fl, &members, fl.fact.derived_query_bound())?);
    Ok(report)
}

/// A witness with the language it is checked against, labelled samples and a
/// ladder generator.
pub struct WitnessCase {
    pub language: LanguageOfPairs,
    pub witness: PreprocessingWitness,
    pub positives: Vec<DataQueryPair>,
    pub negatives: Vec<DataQueryPair>,
    pub ladder: Vec<usize>,
    pub generate: LadderGenerator,
}

fn bds_pairs(fact: &CrFactorization, encode: fn(&bds::BdsInstance) -> Instance, count: usize, seed: u64, config: &SuiteConfig) -> (Vec<DataQueryPair>, Vec<DataQueryPair>) {
    let (pos, neg) = samples::bds_labelled(count, seed, config);
    let split = |xs: Vec<bds::BdsInstance>| xs.iter().map(|b| fact.split(&encode(b))).collect();
    (split(pos), split(neg))
}

pub type LadderGenerator = Box<dyn FnMut(usize, usize) -> Vec<Instance>>;

/// The witness behind a name.
pub fn witness(name: &str, config: &SuiteConfig) -> Result<PreprocessingWitness> {
    Ok(match name {
        "wordstats-example1" => wordstats::example1_witness(&config.lexicon()?),
        "cvp-example2" => cvp::example2_witness(),
        "bds-example3" | "qbds-example4" => bds::example3_witness(),
        "qbds-transfer" => transferred_qbds_witness().1,
        other => return Err(Error::UnknownEntry(other.to_owned())),
    })
}

/// Ladder sizes for a witness and a generator of its `Π` inputs per rung.
pub fn ladder_generator(name: &str, config: &SuiteConfig) -> Result<(Vec<usize>, LadderGenerator)> {
    let seed = config.seed;
    let per_rung = config.ladder_samples;
    let cfg = config.clone();
    let rung_seed = move |rung: usize, i: usize| seed ^ (rung * 1000 + i) as u64;
    Ok(match name {
        "wordstats-example1" => {
            config.lexicon()?;
            let generate: LadderGenerator = Box::new(move |rung, n| {
                (0..per_rung)
                    .map(|i| Instance::from(generate_corpus(n, rung_seed(rung, i), &cfg).expect("lexicon validated")))
                    .collect()
            });
            (config.ladder.clone(), generate)
        }
        "cvp-example2" => {
            let generate: LadderGenerator = Box::new(move |rung, n| {
                (0..per_rung)
                    .map(|i| generate_cvp(n, rung_seed(rung, i), &cfg).to_instance())
                    .collect()
            });
            (config.cvp_ladder.clone(), generate)
        }
        "bds-example3" => {
            let generate: LadderGenerator = Box::new(move |rung, n| {
                (0..per_rung)
                    .map(|i| generate_bds(n, rung_seed(rung, i), &cfg).to_instance())
                    .collect()
            });
            (config.bds_ladder.clone(), generate)
        }
        "qbds-example4" | "qbds-transfer" => {
            let fact = if name == "qbds-transfer" {
                transferred_qbds_witness().0
            } else {
                bds::example4_factorization()
            };
            let generate: LadderGenerator = Box::new(move |rung, n| {
                (0..per_rung)
                    .map(|i| fact.split(&bds::query_instance(&generate_bds(n, rung_seed(rung, i), &cfg))).data)
                    .collect()
            });
            (config.bds_ladder.clone(), generate)
        }
        other => return Err(Error::UnknownEntry(other.to_owned())),
    })
}

pub fn witness_case(name: &str, config: &SuiteConfig) -> Result<WitnessCase> {
    let seed = config.seed;
    let count = config.budgets.witness_samples;
    let witness = witness(name, config)?;
    let (ladder, generate) = ladder_generator(name, config)?;
    let (language, positives, negatives) = match name {
        "wordstats-example1" => {
            let lexicon = config.lexicon()?;
            let corpora = samples::wordstats_corpora(
                config.budgets.corpora,
                config.budgets.queries_per_corpus,
                &config.ladder,
                seed,
                &lexicon,
                config,
            );
            let (mut positives, mut negatives) = (Vec::new(), Vec::new());
            for c in &corpora {
                let (p, n) = c.pairs();
                positives.extend(p);
                negatives.extend(n);
            }
            (samples::cached_wordstats_pairs(&lexicon), positives, negatives)
        }
        "cvp-example2" => {
            let (pos, neg) = samples::cvp_labelled(count, config.budgets.random_max_gates, seed, config);
            let pair = |c: &cvp::Circuit| DataQueryPair::new(c.to_instance(), Instance::empty());
            (cvp::pairs(), pos.iter().map(pair).collect(), neg.iter().map(pair).collect())
        }
        "bds-example3" => {
            let fl = FactoredLanguage::new(bds::problem(), bds::example3_factorization());
            let (p, n) = bds_pairs(&fl.fact, |b| b.to_instance(), count, seed, config);
            (fl.induced(), p, n)
        }
        _ => {
            let fact = if name == "qbds-transfer" {
                transferred_qbds_witness().0
            } else {
                bds::example4_factorization()
            };
            let fl = FactoredLanguage::new(bds::query_problem(), fact);
            let (p, n) = bds_pairs(&fl.fact, bds::query_instance, count, seed, config);
            (fl.induced(), p, n)
        }
    };
    Ok(WitnessCase {
        language,
        witness,
        positives,
        negatives,
        ladder,
        generate,
    })
}

/// The example-3 witness moved back across `qbds-to-bds`.
pub fn transferred_qbds_witness() -> (CrFactorization, PreprocessingWitness) {
    reductions::transfer_witness(&red::qbds_to_bds(), &bds::example3_witness(), &bds::example3_factorization(), 1)
}

/// Two-sided check and digest ladder for a witness; `identity_pre` swaps in
/// `Π = id` for the ladder.
pub fn witness_report(name: &str, config: &SuiteConfig, identity_pre: bool) -> Result<(Report, LadderReport)> {
    let mut case = witness_case(name, config)?;
    let mut report = verify_witness(&case.language, &case.witness, &case.positives, &case.negatives)?;
    report.subject = format!("witness/{name}");
    let ladder_witness = if identity_pre {
        case.witness.with_pre(format!("{}+identity-preprocessing", case.witness.name()), InstanceMap::identity())
    } else {
        case.witness.clone()
    };
    let mut ladder = digest_size_ladder(&ladder_witness, &mut case.generate, &case.ladder, config.slope_slack)?;
    if !identity_pre {
        ladder.subject = name.to_owned();
    }
    Ok((report, ladder))
}

/// A reduction with its endpoint problems and source samples.
pub enum ReductionCase {
    Fcr {
        reduction: FcrReduction,
        source: DecisionProblem,
        target: DecisionProblem,
    },
    F {
        reduction: reductions::FReduction,
        source: LanguageOfPairs,
        target: LanguageOfPairs,
    },
}

fn endpoints(name: &str) -> Option<(DecisionProblem, DecisionProblem)> {
    Some(match name {
        "qbds-to-bds" | "qbds-to-bds-drop-numbering" => (bds::query_problem(), bds::problem()),
        "bds-to-qbds" => (bds::problem(), bds::query_problem()),
        "bds-identity" => (bds::problem(), bds::problem()),
        _ => return None,
    })
}

pub fn reduction_case(name: &str, spec: SampleSpec, config: &SuiteConfig) -> Result<ReductionCase> {
    if let (Some(reduction), Some((source, target))) = (red::by_name(name), endpoints(name)) {
        return Ok(ReductionCase::Fcr { reduction, source, target });
    }
    let probes = || -> Vec<Instance> {
        bds_instances(SampleSpec { max_exhaustive: spec.max_exhaustive.min(3), random: 20, seed: spec.seed }, config)
            .into_iter()
            .map(|b| b.bds)
            .collect()
    };
    Ok(match name {
        "compose-identity" => {
            let id = red::bds_identity();
            let f = bds::example3_factorization();
            let reduction = reductions::compose_fcr(&id, &id, (&f, &f), &bds::problem(), &probes())?;
            ReductionCase::Fcr {
                reduction,
                source: bds::problem(),
                target: bds::problem(),
            }
        }
        "compose-qbds-bds" => {
            let f = bds::example3_factorization();
            let reduction = reductions::compose_fcr(&red::qbds_to_bds(), &red::bds_identity(), (&f, &f), &bds::problem(), &probes())?;
            ReductionCase::Fcr {
                reduction,
                source: bds::query_problem(),
                target: bds::problem(),
            }
        }
        "hardness-qbds" => {
            let validation: Vec<Instance> = bds_instances(spec, config).into_iter().map(|b| b.qbds).collect();
            let reduction = reductions::hardness_pack(
                &bds::query_problem(),
                &bds::problem(),
                red::qbds_many_one(),
                &bds::example3_factorization(),
                &validation,
            )?;
            ReductionCase::Fcr {
                reduction,
                source: bds::query_problem(),
                target: bds::problem(),
            }
        }
        "cvp-double-negation" => ReductionCase::F {
            reduction: red::cvp_double_negation(),
            source: cvp::pairs(),
            target: cvp::pairs(),
        },
        other => return Err(Error::UnknownEntry(other.to_owned())),
    })
}

/// Source samples for a reduction: every sampled instance, member or not, in
/// the source problem's encoding.
fn source_samples(source: &DecisionProblem, spec: SampleSpec, config: &SuiteConfig) -> Vec<Instance> {
    let qbds = source.name() != bds::problem().name();
    bds_instances(spec, config)
        .into_iter()
        .map(|b| if qbds { b.qbds } else { b.bds })
        .collect()
}

pub fn reduction_report(name: &str, spec: SampleSpec, config: &SuiteConfig) -> Result<Report> {
    Ok(match reduction_case(name, spec, config)? {
        ReductionCase::Fcr { reduction, source, target } => {
            let xs = source_samples(&source, spec, config);
            reductions::verify_fcr_reduction(&reduction, &source, &target, &xs)
        }
        ReductionCase::F { reduction, source, target } => {
            let mut circuits = samples::cvp_exhaustive(config.caps.cvp_inputs, config.caps.cvp_gates.min(spec.max_exhaustive));
            let (pos, neg) = samples::cvp_labelled(spec.random, config.budgets.random_max_gates, spec.seed, config);
            circuits.extend(pos);
            circuits.extend(neg);
            let pairs: Vec<_> = circuits
                .iter()
                .map(|c| DataQueryPair::new(c.to_instance(), Instance::empty()))
                .collect();
            reductions::verify_f_reduction(&reduction, &source, &target, &pairs)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> (SampleSpec, SuiteConfig) {
        let mut config = SuiteConfig::default();
        config.budgets.random = 20;
        config.budgets.witness_samples = 20;
        (SampleSpec { max_exhaustive: 3, random: 20, seed: 1 }, config)
    }

    #[test]
    fn every_factorization_resolves() {
        let (spec, config) = small();
        for name in FACTORIZATIONS {
            let r = factorization_report(name, spec, &config).unwrap();
            assert_eq!(r.passed(), name != "duplicate-broken", "{name}: {r:?}");
        }
        assert!(matches!(factorization("nope", spec, &config), Err(Error::UnknownEntry(_))));
    }

    #[test]
    fn every_reduction_resolves() {
        let (spec, config) = small();
        for name in REDUCTIONS {
            let r = reduction_report(name, spec, &config).unwrap();
            assert_eq!(r.passed(), name != "qbds-to-bds-drop-numbering", "{name}: {r:?}");
        }
    }
}
