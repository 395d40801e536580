use prepq::encoding::Instance;
use prepq::factorization::FactoredLanguage;
use prepq::harness::samples::{bds_exhaustive, bds_exhaustive_chunks, bds_labelled};
use prepq::harness::SuiteConfig;
use prepq::preprocessing::verify_witness;
use prepq::problems::bds::{self, BdsInstance};
use prepq::reductions::{self, catalog as red};
use prepq::Error;

fn qbds(xs: &[BdsInstance]) -> Vec<Instance> {
    xs.iter().map(bds::query_instance).collect()
}

fn plain(xs: &[BdsInstance]) -> Vec<Instance> {
    xs.iter().map(BdsInstance::to_instance).collect()
}

#[test]
fn repackaging_and_hardness_hold_on_every_graph_up_to_five_nodes() {
    let (p, q) = (bds::problem(), bds::query_problem());
    let r = red::qbds_to_bds();
    let h = reductions::hardness_pack(&q, &p, red::qbds_many_one(), &bds::example3_factorization(), &[]).unwrap();
    let mut seen = 0;
    for chunk in bds_exhaustive_chunks(5) {
        let ys = qbds(&chunk);
        seen += ys.len();
        let a = reductions::verify_fcr_reduction(&r, &q, &p, &ys);
        assert!(a.passed(), "{a:?}");
        let b = reductions::verify_fcr_reduction(&h, &q, &p, &ys);
        assert!(b.passed(), "{b:?}");
    }
    assert_eq!(seen, 8 + 6 * 8 * 6 + 64 * 24 * 12 + 1024 * 120 * 20);
}

#[test]
fn dropping_the_numbering_is_caught() {
    let xs = bds_exhaustive(3);
    let r = reductions::verify_fcr_reduction(&red::broken_numbering(), &bds::query_problem(), &bds::problem(), &qbds(&xs));
    assert!(!r.passed());
    assert!(r.get("iff-violations").is_some_and(|c| c.measured > 0.0));
}

#[test]
fn composite_of_repackaging_and_identity_on_five_nodes() {
    let f3 = bds::example3_factorization();
    let probes = plain(&bds_exhaustive(3));
    let composed = reductions::compose_fcr(&red::qbds_to_bds(), &red::bds_identity(), (&f3, &f3), &bds::problem(), &probes).unwrap();
    assert_eq!(composed.source_fact.c, bds::example4_factorization().c + 1);
    assert_eq!(composed.target_fact.c, f3.c + 1);
    // Every fourth edge set keeps the run short while still covering n = 5.
    for chunk in bds_exhaustive_chunks(5).step_by(4) {
        let r = reductions::verify_fcr_reduction(&composed, &bds::query_problem(), &bds::problem(), &qbds(&chunk));
        assert!(r.passed(), "{r:?}");
    }
}

#[test]
fn identity_composition_agrees_with_the_identity() {
    let f3 = bds::example3_factorization();
    let xs = plain(&bds_exhaustive(4));
    let id = red::bds_identity();
    let composed = reductions::compose_fcr(&id, &id, (&f3, &f3), &bds::problem(), &xs).unwrap();
    let a = reductions::verify_fcr_reduction(&composed, &bds::problem(), &bds::problem(), &xs);
    let b = reductions::verify_fcr_reduction(&id, &bds::problem(), &bds::problem(), &xs);
    assert!(a.passed() && b.passed());
    assert_eq!(a.get("positives").unwrap().measured, b.get("positives").unwrap().measured);
}

#[test]
fn refused_constructions() {
    let xs = qbds(&bds_exhaustive(3));
    let bad = reductions::hardness_pack(&bds::query_problem(), &bds::problem(), red::constant_yes_map(), &bds::example3_factorization(), &xs);
    assert!(matches!(bad, Err(Error::InvalidManyOneMap { source_member: false, target_member: true, .. })));
    let f3 = bds::example3_factorization();
    let f4 = bds::example4_factorization();
    let mismatch = reductions::compose_fcr(&red::qbds_to_bds(), &red::bds_identity(), (&f4, &f3), &bds::problem(), &[]);
    assert!(matches!(mismatch, Err(Error::FactorizationMismatch(_))));
}

#[test]
fn transferred_witness_works_on_five_node_graphs() {
    let (fact, w) = reductions::transfer_witness(&red::qbds_to_bds(), &bds::example3_witness(), &bds::example3_factorization(), 1);
    let fl = FactoredLanguage::new(bds::query_problem(), fact);
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for chunk in bds_exhaustive_chunks(5).step_by(16) {
        for b in chunk {
            let pair = fl.fact.split(&bds::query_instance(&b));
            if b.decide().unwrap() {
                pos.push(pair);
            } else {
                neg.push(pair);
            }
        }
    }
    let r = verify_witness(&fl.induced(), &w, &pos, &neg).unwrap();
    assert!(r.passed(), "{r:?}");
}

#[test]
fn transfer_across_identity_keeps_verdicts() {
    let config = SuiteConfig::default();
    let f3 = bds::example3_factorization();
    let (fact, w) = reductions::transfer_witness(&red::bds_identity(), &bds::example3_witness(), &f3, 1);
    let original = bds::example3_witness();
    let (pos, neg) = bds_labelled(200, 3, &config);
    for b in pos.iter().chain(&neg) {
        let packed = fact.split(&b.to_instance());
        let plain = f3.split(&b.to_instance());
        assert!(packed.query.is_empty());
        assert_eq!(
            w.accepts(&packed.data, &packed.query),
            original.accepts(&plain.data, &plain.query)
        );
    }
}

#[test]
fn pulled_back_witness_across_double_negation() {
    let config = SuiteConfig::default();
    let (pos, neg) = prepq::harness::samples::cvp_labelled(200, 12, 9, &config);
    let pair = |c: &prepq::problems::cvp::Circuit| prepq::DataQueryPair::new(c.to_instance(), Instance::empty());
    let (pos, neg): (Vec<_>, Vec<_>) = (pos.iter().map(pair).collect(), neg.iter().map(pair).collect());
    let r = red::cvp_double_negation();
    let s = prepq::problems::cvp::pairs();
    let both: Vec<_> = pos.iter().chain(&neg).cloned().collect();
    assert!(reductions::verify_f_reduction(&r, &s, &s, &both).passed());
    let w = reductions::pull_back_witness(&r, &prepq::problems::cvp::example2_witness(), 1);
    assert!(verify_witness(&s, &w, &pos, &neg).unwrap().passed());
}
