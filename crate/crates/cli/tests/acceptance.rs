//! Acceptance criteria 1-10, one PASS/FAIL line each.
//!
//! Reference values come from oracles written here, independently of the
//! library code they check.

use std::collections::HashMap;
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use prepq::encoding::{DataQueryPair, Instance};
use prepq::factorization::{slack_range, verify_factorization, FactoredLanguage};
use prepq::harness::bench;
use prepq::harness::fit::{fit_runtime, Model};
use prepq::harness::generate::{generate_bds, rng_for};
use prepq::harness::samples;
use prepq::harness::suite::strip_timing;
use prepq::harness::SuiteConfig;
use prepq::language::InstanceMap;
use prepq::preprocessing::{digest_size_ladder, verify_witness};
use prepq::problems::bds::{self, BdsInstance, NumberedGraph};
use prepq::problems::cvp::{self, Circuit, Node};
use prepq::problems::wordstats::{self, Lexicon};
use prepq::reductions::{self, catalog as red};
use prepq::separation::{self, GraphFamily};
use prepq::DecisionProblem;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- oracles

/// Literal stack simulation of breadth-depth search over labels.
fn oracle_bds_order(g: &NumberedGraph) -> Vec<usize> {
    let n = g.node_count();
    let num = |l: usize| g.number_of(l);
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for (a, b) in g.edges() {
        nbrs[a].push(b);
        nbrs[b].push(a);
    }
    let mut by_number: Vec<usize> = (1..=n).collect();
    by_number.sort_by_key(|&l| num(l));

    let mut seen = vec![false; n + 1];
    let mut order = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    while order.len() < n {
        // Restart at the minimum-numbered unvisited node.
        let s = *by_number.iter().find(|&&l| !seen[l]).unwrap();
        seen[s] = true;
        order.push(s);
        let mut current = Some(s);
        while let Some(t) = current {
            let mut kids: Vec<usize> = nbrs[t].iter().copied().filter(|&c| !seen[c]).collect();
            kids.sort_by_key(|&c| num(c));
            for &c in &kids {
                seen[c] = true;
                order.push(c);
            }
            // Reverse numbering order, so the smallest lands on top.
            for &c in kids.iter().rev() {
                stack.push(c);
            }
            current = stack.pop();
        }
    }
    order
}

fn oracle_bds_member(b: &BdsInstance) -> bool {
    let order = oracle_bds_order(&b.graph);
    let at = |x| order.iter().position(|&l| l == x).unwrap();
    at(b.u) < at(b.v)
}

/// Memoized recursive evaluation from the output node.
fn oracle_cvp(c: &Circuit) -> bool {
    fn value(c: &Circuit, id: usize, memo: &mut HashMap<usize, bool>) -> bool {
        if let Some(&v) = memo.get(&id) {
            return v;
        }
        let v = match c.nodes[id - 1] {
            Node::Input(i) => c.inputs[i - 1],
            Node::Not(a) => !value(c, a, memo),
            Node::And(a, b) => value(c, a, memo) & value(c, b, memo),
            Node::Or(a, b) => value(c, a, memo) | value(c, b, memo),
            Node::Output(a) => value(c, a, memo),
        };
        memo.insert(id, v);
        v
    }
    let out = c.nodes.iter().position(|n| matches!(n, Node::Output(_))).unwrap() + 1;
    value(c, out, &mut HashMap::new())
}

/// Word frequencies by lowercasing alphanumeric runs.
fn oracle_word_counts(text: &str) -> (u64, HashMap<String, u64>) {
    let mut counts = HashMap::new();
    let mut total = 0;
    let mut word = String::new();
    for ch in text.chars().chain(std::iter::once(' ')) {
        if ch.is_alphanumeric() {
            word.extend(ch.to_lowercase());
        } else if !word.is_empty() {
            total += 1;
            *counts.entry(std::mem::take(&mut word)).or_insert(0) += 1;
        }
    }
    (total, counts)
}

fn ceil_log2_plus_one(n: u64) -> u64 {
    let mut bits = 0;
    while (1u128 << bits) < u128::from(n) + 1 {
        bits += 1;
    }
    bits
}

fn config() -> SuiteConfig {
    SuiteConfig::default()
}

// --------------------------------------------------------------- criteria

fn c1_bds() -> Outcome {
    let start = Instant::now();
    let mut graphs = 0;
    let mut mismatches = 0;
    for n in 1..=4 {
        for g in bds::all_graphs(n) {
            graphs += 1;
            if bds::bds_order(&g) != oracle_bds_order(&g) {
                mismatches += 1;
            }
        }
    }
    let exhaustive = graphs;
    let cfg = config();
    let mut rng = rng_for(11, "acceptance-bds", 0);
    for _ in 0..1000 {
        use rand::Rng;
        let n = rng.gen_range(5..=50);
        let g = bds::random_graph(n, cfg.generator.edge_probability(n), &mut rng);
        graphs += 1;
        if bds::bds_order(&g) != oracle_bds_order(&g) {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(exhaustive == 1 + 2 * 2 + 8 * 6 + 64 * 24, || format!("enumerated {exhaustive} graphs for n <= 4"))?;
    ensure(mismatches == 0, || format!("{mismatches} mismatches of {graphs}"))?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{graphs} graphs ({exhaustive} exhaustive), 0 mismatches, {:.1}s", elapsed.as_secs_f64()))
}

fn c2_cvp() -> Outcome {
    let (mut checked, mut mismatches) = (0usize, 0usize);
    let mut check = |c: &Circuit, checked: &mut usize| {
        *checked += 1;
        let lib = cvp::is_member(&c.to_instance());
        if lib != oracle_cvp(c) || cvp::cvp_eval(c).ok() != Some(lib) {
            mismatches += 1;
        }
    };
    for inputs in 1..=3 {
        for gates in 0..=3 {
            cvp::for_each_circuit(inputs, gates, |c| check(c, &mut checked));
        }
    }
    let exhaustive = checked;
    let cfg = config();
    let mut rng = rng_for(12, "acceptance-cvp", 0);
    for _ in 0..10_000 {
        use rand::Rng;
        let inputs = rng.gen_range(1..=4);
        let gates = rng.gen_range(0..=12);
        check(&cvp::random_circuit(inputs, gates, cfg.generator.gate_mix, &mut rng), &mut checked);
    }
    ensure(mismatches == 0, || format!("{mismatches} mismatches of {checked}"))?;
    Ok(format!("{checked} circuits ({exhaustive} exhaustive, <= 3 gates), 0 mismatches"))
}

fn c3_wordstats() -> Outcome {
    let cfg = config();
    let lexicon = Lexicon::english();
    let m = lexicon.len() as u64;
    let w = wordstats::example1_witness(&lexicon);
    let sizes: Vec<usize> = (10..=20).map(|e| 1usize << e).collect();
    let (mut queries, mut pos, mut neg) = (0usize, 0usize, 0usize);
    let (mut iff_violations, mut size_violations) = (0usize, 0usize);
    for i in 0..100 {
        let words = sizes[i % sizes.len()];
        let mut rng = rng_for(cfg.seed, "acceptance-corpus", i as u64);
        let text = wordstats::synthetic_corpus(words, &lexicon, &cfg.generator.corpus, &mut rng);
        let (n, counts) = oracle_word_counts(&text);
        ensure(n == words as u64, || format!("corpus {i} has {n} words, expected {words}"))?;
        let digest = w.digest(&Instance::from(text.as_str()));
        if digest.len() as u64 > m * ceil_log2_plus_one(n) {
            size_violations += 1;
        }
        let library_counts = wordstats::preposition_digest(&text, &lexicon);
        for (p, k, _) in wordstats::random_queries(&library_counts, &lexicon, 1000, &mut rng) {
            let truth = counts.get(&p).copied().unwrap_or(0) >= k;
            let q = Instance::from(wordstats::query_text(&p, k));
            queries += 1;
            if truth {
                pos += 1;
            } else {
                neg += 1;
            }
            if w.post.contains(&digest, &q) != truth {
                iff_violations += 1;
            }
        }
    }
    ensure(iff_violations == 0, || format!("{iff_violations} iff violations"))?;
    ensure(size_violations == 0, || format!("{size_violations} digests above m*ceil(log2(n+1))"))?;
    ensure(pos > 0 && neg > 0, || "queries are one-sided".into())?;
    Ok(format!("100 corpora, {queries} queries ({pos} true, {neg} false), 0 violations"))
}

fn c4_witnesses() -> Outcome {
    let mut cfg = config();
    cfg.budgets.witness_samples = 600;
    let (cpos, cneg) = samples::cvp_labelled(600, 12, 4, &cfg);
    ensure(cpos.iter().all(oracle_cvp) && !cneg.iter().any(oracle_cvp), || "circuit labels disagree with oracle".into())?;
    let pair = |c: &Circuit| DataQueryPair::new(c.to_instance(), Instance::empty());
    let cp: Vec<_> = cpos.iter().map(pair).collect();
    let cn: Vec<_> = cneg.iter().map(pair).collect();
    let w2 = cvp::example2_witness();
    let r2 = verify_witness(&cvp::pairs(), &w2, &cp, &cn).map_err(|e| e.to_string())?;
    ensure(r2.passed(), || format!("example 2 witness failed: {:?}", r2.failing_checks().collect::<Vec<_>>()))?;

    let (bpos, bneg) = samples::bds_labelled(600, 4, &cfg);
    ensure(bpos.iter().all(oracle_bds_member) && !bneg.iter().any(oracle_bds_member), || "BDS labels disagree with oracle".into())?;
    let fl = FactoredLanguage::new(bds::problem(), bds::example3_factorization());
    let split = |xs: &[BdsInstance]| xs.iter().map(|b| fl.fact.split(&b.to_instance())).collect::<Vec<_>>();
    let w3 = bds::example3_witness();
    let r3 = verify_witness(&fl.induced(), &w3, &split(&bpos), &split(&bneg)).map_err(|e| e.to_string())?;
    ensure(r3.passed(), || "example 3 witness failed".into())?;

    let mut generate = |rung: usize, n: usize| -> Vec<Instance> {
        (0..3).map(|i| prepq::harness::generate::generate_cvp(n, (rung * 10 + i) as u64, &cfg).to_instance()).collect()
    };
    let ladder = digest_size_ladder(&w2, &mut generate, &cfg.cvp_ladder, cfg.slope_slack).map_err(|e| e.to_string())?;
    ensure(ladder.passed() && ladder.slope.abs() <= 0.1, || format!("example 2 ladder slope {}", ladder.slope))?;
    Ok(format!(
        "example 2: {}+/{}- pass; example 3: {}+/{}- pass; example 2 digest slope {:.3}",
        cp.len(),
        cn.len(),
        bpos.len(),
        bneg.len(),
        ladder.slope
    ))
}

fn bds_sample_set(random: usize, seed: u64) -> Vec<BdsInstance> {
    samples::bds_universe(4, random, seed, &config())
}

fn c5_factorizations() -> Outcome {
    let all = bds_sample_set(1000, 5);
    let cases = [
        (FactoredLanguage::new(bds::problem(), bds::example3_factorization()), false, 0i64),
        (FactoredLanguage::new(bds::query_problem(), bds::example4_factorization()), true, -1),
    ];
    let mut lines = Vec::new();
    for (fl, qbds, c) in cases {
        ensure(fl.fact.c == c, || format!("{} declares c = {}", fl.fact.name(), fl.fact.c))?;
        let encode = |b: &BdsInstance| if qbds { bds::query_instance(b) } else { b.to_instance() };
        let members: Vec<_> = all.iter().filter(|b| oracle_bds_member(b)).map(encode).collect();
        let everything: Vec<_> = all.iter().map(encode).collect();
        let r = verify_factorization(&fl, &members).map_err(|e| e.to_string())?;
        ensure(r.passed(), || format!("{} conditions failed", fl.fact.name()))?;
        let off = everything.iter().filter(|x| fl.fact.slack(x) != c).count();
        ensure(off == 0, || format!("{}: {off} samples with slack != {c}", fl.fact.name()))?;
        let range = slack_range(&fl.fact, &everything).unwrap();
        lines.push(format!("{} c={} on {} members, slack [{},{}]", fl.fact.name(), c, members.len(), range.min, range.max));
    }
    Ok(lines.join("; "))
}

fn c6_composition() -> Outcome {
    let xs = bds_sample_set(200, 6);
    let encode_for = |p: &DecisionProblem| -> Vec<Instance> {
        let qbds = p.name() != bds::problem().name();
        xs.iter().map(|b| if qbds { bds::query_instance(b) } else { b.to_instance() }).collect()
    };
    let (p, q) = (bds::problem(), bds::query_problem());
    let (f3, f4) = (bds::example3_factorization(), bds::example4_factorization());
    let probes: Vec<Instance> = bds_sample_set(20, 60).iter().map(BdsInstance::to_instance).collect();
    let qprobes: Vec<Instance> = bds_sample_set(20, 60).iter().map(bds::query_instance).collect();
    let cases = [
        ("identity;identity", red::bds_identity(), red::bds_identity(), (&f3, &f3), [&p, &p, &p], &probes),
        ("qbds-to-bds;identity", red::qbds_to_bds(), red::bds_identity(), (&f3, &f3), [&q, &p, &p], &probes),
        ("bds-to-qbds;qbds-to-bds", red::bds_to_qbds(), red::qbds_to_bds(), (&f4, &f4), [&p, &q, &p], &qprobes),
    ];
    let mut done = Vec::new();
    for (name, r12, r23, mid, [l1, l2, l3], probes) in cases {
        let first = reductions::verify_fcr_reduction(&r12, l1, l2, &encode_for(l1));
        let second = reductions::verify_fcr_reduction(&r23, l2, l3, &encode_for(l2));
        ensure(first.passed() && second.passed(), || format!("{name}: component reductions fail"))?;
        let composed = reductions::compose_fcr(&r12, &r23, mid, l2, probes).map_err(|e| format!("{name}: {e}"))?;
        let r = reductions::verify_fcr_reduction(&composed, l1, l3, &encode_for(l1));
        ensure(r.passed(), || format!("{name}: composite fails"))?;
        ensure(composed.source_fact.c == r12.source_fact.c + 1, || format!("{name}: source c = {}", composed.source_fact.c))?;
        ensure(composed.target_fact.c == r23.target_fact.c + 1, || format!("{name}: target c = {}", composed.target_fact.c))?;
        done.push(format!("{name} (c {}→{}, {}→{})", r12.source_fact.c, composed.source_fact.c, r23.target_fact.c, composed.target_fact.c));
    }
    Ok(format!("{} samples each: {}", xs.len(), done.join(", ")))
}

fn c7_transfer() -> Outcome {
    let cfg = config();
    let (fact, w) = reductions::transfer_witness(&red::qbds_to_bds(), &bds::example3_witness(), &bds::example3_factorization(), 1);
    let fl = FactoredLanguage::new(bds::query_problem(), fact);
    let (pos, neg) = samples::bds_labelled(600, 7, &cfg);
    ensure(pos.iter().all(oracle_bds_member) && !neg.iter().any(oracle_bds_member), || "labels disagree with oracle".into())?;
    let split = |xs: &[BdsInstance]| xs.iter().map(|b| fl.fact.split(&bds::query_instance(b))).collect::<Vec<_>>();
    let r = verify_witness(&fl.induced(), &w, &split(&pos), &split(&neg)).map_err(|e| e.to_string())?;
    ensure(r.passed(), || "transferred witness fails the two-sided check".into())?;

    let data_at = |rung: usize, n: usize| -> Vec<Instance> {
        (0..3)
            .map(|i| fl.fact.split(&bds::query_instance(&generate_bds(n, (rung * 10 + i) as u64, &cfg))).data)
            .collect()
    };
    let ladder = digest_size_ladder(&w, &mut |r, n| data_at(r, n), &cfg.bds_ladder, cfg.slope_slack).map_err(|e| e.to_string())?;
    ensure(ladder.passed(), || "transferred witness fails the ladder".into())?;

    let broken = w.with_pre("identity-preprocessing", InstanceMap::identity());
    let r = verify_witness(&fl.induced(), &broken, &split(&pos[..50]), &split(&neg[..50]));
    let injected = digest_size_ladder(&broken, &mut |r, n| data_at(r, n), &cfg.bds_ladder, cfg.slope_slack).map_err(|e| e.to_string())?;
    let failed_at_ladder = !injected.passed()
        && injected.report.get("ladder-bound-violations").is_some_and(|c| !c.pass);
    ensure(failed_at_ladder, || "identity preprocessing was not caught by the ladder".into())?;
    Ok(format!(
        "{}+/{}- pass, ladder slope {:.3}; identity preprocessing fails ladder-bound-violations ({}), two-sided check {}",
        pos.len(),
        neg.len(),
        ladder.slope,
        injected.report.get("ladder-bound-violations").unwrap().measured,
        match r {
            Ok(r) if r.passed() => "passes",
            _ => "fails",
        }
    ))
}

fn c8_separation() -> Outcome {
    for (n, expected) in [(1, 1), (2, 2), (3, 6), (4, 24), (5, 120)] {
        let got = separation::count_realizable_orders(n, GraphFamily::Edgeless, 7).map_err(|e| e.to_string())?;
        ensure(got == expected, || format!("n = {n}: {got} orders, expected {expected}"))?;
    }
    let s = separation::separation_report(4..=20, prepq::PolylogBound::new(1.0, 2, 0.0).unwrap(), 5).map_err(|e| e.to_string())?;
    for row in &s.rows {
        let fact: u128 = (1..=row.n as u128).product();
        let pow: u128 = 1u128 << row.n;
        ensure(row.factorial == fact.to_string() && row.pow2_n == pow.to_string(), || format!("n = {}: table values wrong", row.n))?;
        ensure(fact > pow && row.exceeds_pow2_n, || format!("n = {}: n! not above 2^n", row.n))?;
    }
    ensure(s.report.passed(), || "separation report fails".into())?;
    let bits = 6; // 2^6 < 5! = 120
    let c = separation::truncation_collision(5, bits, 7).map_err(|e| e.to_string())?.ok_or("no collision at n = 5")?;
    let (g1, g2) = (NumberedGraph::parse(&c.first).unwrap(), NumberedGraph::parse(&c.second).unwrap());
    ensure(separation::truncation_digest(&g1, bits) == separation::truncation_digest(&g2, bits), || "digests differ".into())?;
    ensure(oracle_bds_order(&g1) != oracle_bds_order(&g2), || "orders coincide".into())?;
    Ok(format!(
        "orders 1,2,6,24,120; n! > 2^n for n in 4..=20; collision at n=5 on {bits}-bit digest {} ({:?} vs {:?})",
        c.digest,
        oracle_bds_order(&g1),
        oracle_bds_order(&g2)
    ))
}

fn c9_scaling() -> Outcome {
    let ladder: Vec<usize> = (10..=20).map(|e| 1usize << e).collect();
    let quad: Vec<_> = ladder.iter().map(|&n| (n, (n as f64).powi(2))).collect();
    let cubic: Vec<_> = ladder.iter().map(|&n| (n, (n as f64).log2().powi(3))).collect();
    let q = fit_runtime(&quad, Model::PolyInN, 2.0, 0.1).map_err(|e| e.to_string())?;
    let c = fit_runtime(&cubic, Model::PolyInLogN, 3.0, 0.2).map_err(|e| e.to_string())?;
    ensure((q.exponent - 2.0).abs() <= 0.1, || format!("quadratic exponent {}", q.exponent))?;
    ensure((c.exponent - 3.0).abs() <= 0.2, || format!("cubic-in-log exponent {}", c.exponent))?;
    let cfg = config();
    ensure(cfg.ladder == ladder && cfg.cvp_ladder == ladder, || "default ladders changed".into())?;
    let mut parts = vec![format!("synthetic {:.3}, {:.3}", q.exponent, c.exponent)];
    for name in ["wordstats-example1", "cvp-example2"] {
        let f = bench::query_latency_fit(name, &cfg).map_err(|e| e.to_string())?;
        ensure(f.pass && f.fit.exponent <= f.fit.cap + 0.5, || {
            format!("{name}: latency exponent {:.3} > {} + 0.5", f.fit.exponent, f.fit.cap)
        })?;
        parts.push(format!("{name} latency exponent {:.3} <= {} + 0.5", f.fit.exponent, f.fit.cap));
    }
    Ok(parts.join("; "))
}

fn c10_reproducibility() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut stripped = Vec::new();
    let mut raw = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("run{i}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_prepq"))
            .args(["run-suite", "--seed", "1", "--json"])
            .arg(&path)
            .stderr(std::process::Stdio::null())
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.code() == Some(0), || format!("run {i} exited with {status}"))?;
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let mut v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        strip_timing(&mut v);
        stripped.push(serde_json::to_string_pretty(&v).unwrap());
        raw.push(text);
    }
    ensure(stripped[0] == stripped[1], || "stripped reports differ".into())?;
    Ok(format!(
        "two runs identical after stripping timing ({} bytes; raw files {})",
        stripped[0].len(),
        if raw[0] == raw[1] { "identical" } else { "differ only in timing" }
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("BDS order vs stack-simulation oracle", c1_bds),
        ("CVP evaluation vs memoized recursive oracle", c2_cvp),
        ("wordstats witness on 100 corpora", c3_wordstats),
        ("CVP and BDS witnesses", c4_witnesses),
        ("BDS and QBDS factorizations", c5_factorizations),
        ("reduction composition", c6_composition),
        ("witness transfer and fault injection", c7_transfer),
        ("separation counting", c8_separation),
        ("scaling proxy fits", c9_scaling),
        ("run-suite reproducibility", c10_reproducibility),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| (*s).to_owned()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
