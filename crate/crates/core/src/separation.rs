//! Counting BDS visit orders against the number of short digests.
//!
//! Edgeless graphs under all `n!` numberings realize every permutation as a
//! visit order, while a digest of at most `b` bits takes at most `2^(b+1) − 1`
//! values. Once `n!` is larger, two graphs with different orders must share a
//! digest.

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::bound::PolylogBound;
use crate::error::{Error, Result};
use crate::problems::bds::{all_graphs, bds_order, NumberedGraph};
use crate::report::Report;

pub const DEFAULT_ENUMERATION_CAP: usize = 7;
pub const ALL_GRAPHS_CAP: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFamily {
    /// No edges, every numbering.
    Edgeless,
    /// Every edge subset under every numbering.
    AllGraphs,
}

/// The distinct visit orders produced over the family on `n` nodes.
pub fn realizable_orders(n: usize, family: GraphFamily, cap: usize) -> Result<BTreeSet<Vec<usize>>> {
    let cap = match family {
        GraphFamily::Edgeless => cap,
        GraphFamily::AllGraphs => cap.min(ALL_GRAPHS_CAP),
    };
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let orders = match family {
        GraphFamily::Edgeless => (1..=n)
            .permutations(n)
            .map(|numbering| bds_order(&NumberedGraph::edgeless(numbering).expect("permutation numbering")))
            .collect(),
        GraphFamily::AllGraphs => all_graphs(n).map(|g| bds_order(&g)).collect(),
    };
    Ok(orders)
}

pub fn count_realizable_orders(n: usize, family: GraphFamily, cap: usize) -> Result<usize> {
    realizable_orders(n, family, cap).map(|s| s.len())
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// `2^bits`, the figure used for digests of `bits` bits.
pub fn digest_capacity(bits: u64) -> BigUint {
    BigUint::one() << bits
}

/// Number of binary strings of length at most `bits`: `2^(bits+1) − 1`.
pub fn exact_digest_count(bits: u64) -> BigUint {
    (BigUint::one() << (bits + 1)) - 1u32
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationRow {
    pub n: usize,
    pub factorial: String,
    pub pow2_n: String,
    /// Strings of length `< n`: `2^n − 1`.
    pub strings_shorter_than_n: String,
    pub bound_value: f64,
    pub bound_bits: u64,
    pub pow2_bound: String,
    /// Strings of length `≤ floor(bound(n))`.
    pub strings_within_bound: String,
    pub realizable: Option<usize>,
    pub exceeds_pow2_n: bool,
    pub exceeds_pow2_bound: bool,
    pub exceeds_strings_within_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationReport {
    pub bound: PolylogBound,
    pub rows: Vec<SeparationRow>,
    /// Smallest `n` in range with `n! > 2^n`.
    pub crossover_pow2_n: Option<usize>,
    /// Smallest `n` in range with `n! > 2^floor(bound(n))`.
    pub crossover_bound: Option<usize>,
    pub report: Report,
}

/// Tabulates `n!` against both capacity figures for every `n` in range,
/// enumerating realizable orders up to `enumeration_cap`.
pub fn separation_report(
    n_range: std::ops::RangeInclusive<usize>,
    bound: PolylogBound,
    enumeration_cap: usize,
) -> Result<SeparationReport> {
    let mut rows = Vec::new();
    let mut report = Report::new(format!("separation/{bound}"));
    let (mut below_at_4, mut realizable_wrong) = (0, 0);
    for n in n_range {
        let fact = factorial(n);
        let pow2_n = digest_capacity(n as u64);
        let bound_value = bound.eval(n);
        let bound_bits = bound_value.floor() as u64;
        let pow2_bound = digest_capacity(bound_bits);
        let within = exact_digest_count(bound_bits);
        let realizable = if n <= enumeration_cap {
            Some(count_realizable_orders(n, GraphFamily::Edgeless, enumeration_cap)?)
        } else {
            None
        };
        if n >= 4 && fact <= pow2_n {
            below_at_4 += 1;
            report.violation(n, "factorial-exceeds-pow2", format!("{n}! = {fact} <= 2^{n}"));
        }
        if let Some(r) = realizable {
            if BigUint::from(r) != fact {
                realizable_wrong += 1;
                report.violation(n, "realizable-orders", format!("{r} orders realized, {n}! = {fact}"));
            }
        }
        report.samples += 1;
        rows.push(SeparationRow {
            n,
            exceeds_pow2_n: fact > pow2_n,
            exceeds_pow2_bound: fact > pow2_bound,
            exceeds_strings_within_bound: fact > within,
            factorial: fact.to_string(),
            pow2_n: pow2_n.to_string(),
            strings_shorter_than_n: (pow2_n.clone() - 1u32).to_string(),
            bound_value,
            bound_bits,
            pow2_bound: pow2_bound.to_string(),
            strings_within_bound: within.to_string(),
            realizable,
        });
    }
    report.check_zero("factorial-not-above-pow2-n-for-n>=4", below_at_4);
    report.check_zero("realizable-count-mismatches", realizable_wrong);
    Ok(SeparationReport {
        bound,
        crossover_pow2_n: rows.iter().find(|r| r.exceeds_pow2_n).map(|r| r.n),
        crossover_bound: rows.iter().find(|r| r.exceeds_pow2_bound).map(|r| r.n),
        rows,
        report,
    })
}

impl SeparationReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::Config(format!("csv: {e}")))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// The first `bits` bits of the graph's text form, as a `0`/`1` string.
pub fn truncation_digest(g: &NumberedGraph, bits: usize) -> String {
    g.to_text()
        .bytes()
        .flat_map(|b| (0..8).rev().map(move |i| if b >> i & 1 == 1 { '1' } else { '0' }))
        .take(bits)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Collision {
    pub digest: String,
    pub first: String,
    pub second: String,
    pub first_order: Vec<usize>,
    pub second_order: Vec<usize>,
}

/// Two edgeless `n`-node graphs with different visit orders and equal
/// truncation digests, if any exist.
pub fn truncation_collision(n: usize, bits: usize, cap: usize) -> Result<Option<Collision>> {
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let mut seen: HashMap<String, (NumberedGraph, Vec<usize>)> = HashMap::new();
    for numbering in (1..=n).permutations(n) {
        let g = NumberedGraph::edgeless(numbering).expect("permutation numbering");
        let order = bds_order(&g);
        let digest = truncation_digest(&g, bits);
        match seen.get(&digest) {
            Some((other, other_order)) if *other_order != order => {
                return Ok(Some(Collision {
                    digest,
                    first: other.to_text(),
                    second: g.to_text(),
                    first_order: other_order.clone(),
                    second_order: order,
                }))
            }
            Some(_) => {}
            None => {
                seen.insert(digest, (g, order));
            }
        }
    }
    Ok(None)
}
