use prepq::encoding::{DataQueryPair, Instance};
use prepq::factorization::{check_prop1, verify_factorization, CrFactorization, FactoredLanguage};
use prepq::harness::catalog::{self, SampleSpec};
use prepq::harness::generate::generate_bds;
use prepq::harness::SuiteConfig;
use prepq::language::{check_short_query, InstanceMap, LanguageOfPairs, RestoreMap};
use prepq::preprocessing::{digest_size_ladder, verify_witness};
use prepq::problems::{bds, cvp, wordstats};
use prepq::PolylogBound;

fn spec() -> SampleSpec {
    SampleSpec { max_exhaustive: 4, random: 100, seed: 2 }
}

#[test]
fn passing_conditions_imply_the_derived_query_bound() {
    let config = SuiteConfig::default();
    for name in ["bds-example3", "qbds-example4", "identity", "wordstats-split", "cvp-split"] {
        let (fl, members) = catalog::factorization(name, spec(), &config).unwrap();
        let conditions = verify_factorization(&fl, &members).unwrap();
        assert!(conditions.passed(), "{name}");
        let prop1 = check_prop1(&fl, &members, fl.fact.derived_query_bound()).unwrap();
        assert!(prop1.passed(), "{name}: {prop1:?}");
    }
}

#[test]
fn splitting_examples() {
    let b = generate_bds(4, 1, &SuiteConfig::default());
    let x = b.to_instance();
    let p = bds::example3_factorization().split(&x);
    assert_eq!((p.data, p.query), (x.clone(), Instance::empty()));
    let p = bds::example4_factorization().split(&bds::query_instance(&b));
    assert_eq!((p.data, p.query), (x, Instance::empty()));
}

#[test]
fn duplicating_into_both_parts_breaks_redundancy() {
    let config = SuiteConfig::default();
    let (fl, members) = catalog::factorization("duplicate-broken", spec(), &config).unwrap();
    let r = verify_factorization(&fl, &members).unwrap();
    assert!(!r.get("redundancy-violations").unwrap().pass);
}

#[test]
fn half_split_outgrows_a_polylog_query_bound() {
    let bound = PolylogBound::new(1.0, 1, 0.0).unwrap();
    let half = CrFactorization::new(
        "half",
        InstanceMap::new(|x| Instance::from(&x.as_bytes()[..x.len() / 2])),
        InstanceMap::new(|x| Instance::from(&x.as_bytes()[x.len() / 2..])),
        RestoreMap::new(|d, q| d.concat(q)),
        0,
        bound,
    );
    let fl = FactoredLanguage::new(prepq::DecisionProblem::new("all", |_| true), half);
    let small: Vec<_> = [2, 4].iter().map(|&n| Instance::from("a".repeat(n))).collect();
    assert!(check_prop1(&fl, &small, bound).unwrap().passed());
    let large = vec![Instance::from("a".repeat(4096))];
    assert!(!check_prop1(&fl, &large, bound).unwrap().passed());
}

#[test]
fn short_query_property() {
    let bound = PolylogBound::new(1.0, 1, 0.0).unwrap();
    let echo = LanguageOfPairs::new("echo", bound, |d, q| d == q);
    assert!(check_short_query(&echo, &[]).unwrap().passed());
    let big = Instance::from("z".repeat(1000));
    assert!(!check_short_query(&echo, &[DataQueryPair::new(big.clone(), big)]).unwrap().passed());
}

#[test]
fn example_1_on_a_small_novel() {
    let lex = wordstats::Lexicon::english();
    let w = wordstats::example1_witness(&lex);
    let novel = Instance::from("They met in May, in Paris, and walked on.");
    assert!(w.accepts(&novel, &"(in,2)".into()));
    assert!(!w.accepts(&novel, &"(in,3)".into()));
    assert!(w.accepts(&novel, &"(on,1)".into()));
}

#[test]
fn example_2_digests_are_single_symbols() {
    let w = cvp::example2_witness();
    let t = cvp::Circuit::parse("inputs 1\n1 input 1\n2 output 1\n").unwrap();
    let f = cvp::Circuit::parse("inputs 0\n1 input 1\n2 output 1\n").unwrap();
    assert_eq!(w.digest(&t.to_instance()), Instance::from("1"));
    assert_eq!(w.digest(&f.to_instance()), Instance::from("0"));
    let r = verify_witness(
        &cvp::pairs(),
        &w,
        &[DataQueryPair::new(t.to_instance(), "")],
        &[DataQueryPair::new(f.to_instance(), "")],
    )
    .unwrap();
    assert!(r.passed());
}

#[test]
fn identity_preprocessing_fails_the_ladder() {
    let config = SuiteConfig::default();
    let w = bds::example3_witness().with_pre("identity", InstanceMap::identity());
    let mut generate = |rung: usize, n: usize| vec![generate_bds(n, rung as u64, &config).to_instance()];
    let ladder = digest_size_ladder(&w, &mut generate, &config.bds_ladder, config.slope_slack).unwrap();
    assert!(!ladder.passed());
    assert!(!ladder.report.get("ladder-bound-violations").unwrap().pass);
}

#[test]
fn catalog_witnesses_pass_on_small_budgets() {
    let mut config = SuiteConfig::default();
    config.budgets.witness_samples = 60;
    config.budgets.corpora = 2;
    config.budgets.queries_per_corpus = 50;
    config.ladder = vec![512, 1024, 2048, 4096];
    for name in catalog::WITNESSES {
        let (r, ladder) = catalog::witness_report(name, &config, false).unwrap();
        assert!(r.passed() && ladder.passed(), "{name}");
    }
}
