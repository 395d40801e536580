//! Breadth-depth search over undirected graphs with numbered nodes.
//!
//! Nodes carry labels `1..=n`; the numbering is a separate bijection onto
//! `1..=n` that drives the traversal. Queries `(u, v)` name nodes by label.
//!
//! Text form (also the instance encoding):
//!
//! ```text
//! 3          node count n
//! 2 1 3      the number of labels 1..=n, in label order
//! 1 2        one edge per line, by label
//! 1 3
//! ```
//!
//! A BDS instance `(G,(u,v))` is the graph text immediately followed by
//! `(u,v)`, with no separator.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::bound::PolylogBound;
use crate::encoding::{decode_pair, encode_pair, DataQueryPair, Instance};
use crate::factorization::CrFactorization;
use crate::language::{DecisionProblem, InstanceMap, LanguageOfPairs, RestoreMap};
use crate::preprocessing::PreprocessingWitness;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("malformed graph at line {line}: {reason}")]
    MalformedGraph { line: usize, reason: String },
    #[error("query names the same node {0} twice")]
    SameNode(usize),
    #[error("unknown node {0}")]
    UnknownNode(usize),
}

fn malformed(line: usize, reason: impl Into<String>) -> GraphError {
    GraphError::MalformedGraph {
        line,
        reason: reason.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NumberedGraph {
    /// `numbering[label - 1]` is the number of `label`.
    numbering: Vec<usize>,
    /// Edges `(a, b)` between labels with `a < b`.
    edges: BTreeSet<(usize, usize)>,
}

impl NumberedGraph {
    pub fn new(
        numbering: Vec<usize>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let n = numbering.len();
        let mut seen = vec![false; n];
        for &k in &numbering {
            if k == 0 || k > n || std::mem::replace(&mut seen[k - 1], true) {
                return Err(malformed(0, format!("numbering is not a bijection onto 1..={n}")));
            }
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            for x in [a, b] {
                if x == 0 || x > n {
                    return Err(GraphError::UnknownNode(x));
                }
            }
            if a == b {
                return Err(malformed(0, format!("self-loop on node {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(malformed(0, format!("duplicate edge {{{a},{b}}}")));
            }
        }
        Ok(NumberedGraph { numbering, edges: set })
    }

    pub fn with_identity_numbering(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        NumberedGraph::new((1..=n).collect(), edges)
    }

    pub fn edgeless(numbering: Vec<usize>) -> Result<Self, GraphError> {
        NumberedGraph::new(numbering, [])
    }

    pub fn node_count(&self) -> usize {
        self.numbering.len()
    }

    pub fn numbering(&self) -> &[usize] {
        &self.numbering
    }

    pub fn number_of(&self, label: usize) -> usize {
        self.numbering[label - 1]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_node(&self, label: usize) -> bool {
        (1..=self.node_count()).contains(&label)
    }

    /// The same edges with a different numbering.
    pub fn renumbered(&self, numbering: Vec<usize>) -> Result<Self, GraphError> {
        NumberedGraph::new(numbering, self.edges())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.node_count());
        let _ = writeln!(out, "{}", self.numbering.iter().join(" "));
        for (a, b) in &self.edges {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l.trim()));
        let (_, header) = lines.next().ok_or_else(|| malformed(1, "missing node count"))?;
        let n: usize = header
            .parse()
            .map_err(|_| malformed(1, format!("node count {header:?} is not a number")))?;
        let (_, numbering_line) = lines.next().ok_or_else(|| malformed(2, "missing numbering line"))?;
        let numbering = numbering_line
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| malformed(2, format!("bad number {t:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if numbering.len() != n {
            return Err(malformed(
                2,
                format!("numbering has {} entries, expected {n}", numbering.len()),
            ));
        }
        let mut edges = Vec::new();
        for (line, l) in lines {
            if l.is_empty() {
                continue;
            }
            let ends: Vec<_> = l.split_whitespace().collect();
            let [a, b] = ends.as_slice() else {
                return Err(malformed(line, format!("expected `u v`, got {l:?}")));
            };
            let parse = |t: &str| t.parse::<usize>().map_err(|_| malformed(line, format!("bad node {t:?}")));
            edges.push((line, parse(a)?, parse(b)?));
        }
        // Re-run validation edge by edge so errors carry the offending line.
        let mut set = BTreeSet::new();
        for &(line, a, b) in &edges {
            if a == 0 || a > n || b == 0 || b > n {
                return Err(malformed(line, format!("edge {{{a},{b}}} references a node outside 1..={n}")));
            }
            if a == b {
                return Err(malformed(line, format!("self-loop on node {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(malformed(line, format!("duplicate edge {{{a},{b}}}")));
            }
        }
        NumberedGraph::new(numbering, set).map_err(|e| match e {
            GraphError::MalformedGraph { reason, .. } => malformed(2, reason),
            other => other,
        })
    }

    /// Neighbours of each label, sorted by number.
    fn adjacency_by_number(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut adj = vec![Vec::new(); n + 1];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|&l| self.numbering[l - 1]);
        }
        adj
    }

    /// Labels sorted by number.
    fn labels_by_number(&self) -> Vec<usize> {
        let mut labels = vec![0; self.node_count()];
        for (i, &k) in self.numbering.iter().enumerate() {
            labels[k - 1] = i + 1;
        }
        labels
    }
}

/// The breadth-depth visit order, as node labels.
///
/// Expanding a node visits all of its not-yet-visited neighbours in
/// increasing number order and pushes them so that the smallest number ends
/// up on top of the stack. The search starts by expanding the minimum-numbered
/// node (visited, never pushed) and keeps expanding whatever it pops. When the
/// stack runs dry it restarts at the minimum-numbered unvisited node.
pub fn bds_order(g: &NumberedGraph) -> Vec<usize> {
    let n = g.node_count();
    let adj = g.adjacency_by_number();
    let starts = g.labels_by_number();
    let mut visited = vec![false; n + 1];
    let mut order = Vec::with_capacity(n);
    let mut stack = Vec::new();
    let mut children = Vec::new();

    let mut expand = |t: usize, visited: &mut Vec<bool>, order: &mut Vec<usize>, stack: &mut Vec<usize>| {
        children.clear();
        for &c in &adj[t] {
            if !visited[c] {
                visited[c] = true;
                order.push(c);
                children.push(c);
            }
        }
        stack.extend(children.iter().rev());
    };

    for &s in &starts {
        if visited[s] {
            continue;
        }
        visited[s] = true;
        order.push(s);
        expand(s, &mut visited, &mut order, &mut stack);
        while let Some(t) = stack.pop() {
            expand(t, &mut visited, &mut order, &mut stack);
        }
    }
    order
}

/// Index of each label in `order`, indexed by label.
pub fn positions(order: &[usize]) -> Vec<usize> {
    let mut pos = vec![usize::MAX; order.len() + 1];
    for (i, &l) in order.iter().enumerate() {
        pos[l] = i;
    }
    pos
}

/// Is `u` visited before `v`?
pub fn bds_decide(g: &NumberedGraph, u: usize, v: usize) -> Result<bool, GraphError> {
    for x in [u, v] {
        if !g.has_node(x) {
            return Err(GraphError::UnknownNode(x));
        }
    }
    if u == v {
        return Err(GraphError::SameNode(u));
    }
    let pos = positions(&bds_order(g));
    Ok(pos[u] < pos[v])
}

pub fn query_text(u: usize, v: usize) -> String {
    format!("({u},{v})")
}

pub fn parse_query(text: &str) -> Option<(usize, usize)> {
    let inner = text.strip_prefix('(')?.strip_suffix(')')?;
    let (u, v) = inner.split_once(',')?;
    let num = |s: &str| {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            None
        } else {
            s.parse().ok()
        }
    };
    Some((num(u)?, num(v)?))
}

/// A decoded `(G,(u,v))` instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BdsInstance {
    pub graph: NumberedGraph,
    pub u: usize,
    pub v: usize,
}

impl BdsInstance {
    pub fn new(graph: NumberedGraph, u: usize, v: usize) -> Self {
        BdsInstance { graph, u, v }
    }

    pub fn to_instance(&self) -> Instance {
        Instance::from(self.graph.to_text() + &query_text(self.u, self.v))
    }

    pub fn decide(&self) -> Result<bool, GraphError> {
        bds_decide(&self.graph, self.u, self.v)
    }

    pub fn swapped(&self) -> Self {
        BdsInstance::new(self.graph.clone(), self.v, self.u)
    }
}

/// Splits the text of `(G,(u,v))` at the query's opening parenthesis.
pub fn split_graph_query(text: &str) -> Option<(&str, &str)> {
    let at = text.rfind('(')?;
    Some((&text[..at], &text[at..]))
}

pub fn parse_instance(x: &Instance) -> Option<BdsInstance> {
    let text = x.as_str()?;
    let (graph, query) = split_graph_query(text)?;
    let (u, v) = parse_query(query)?;
    let graph = NumberedGraph::parse(graph).ok()?;
    Some(BdsInstance { graph, u, v })
}

/// Membership in BDS; malformed instances and `u = v` are non-members.
pub fn is_member(x: &Instance) -> bool {
    parse_instance(x).is_some_and(|b| b.decide().unwrap_or(false))
}

/// All numbered graphs on `n` nodes: every edge subset under every numbering.
pub fn all_graphs(n: usize) -> impl Iterator<Item = NumberedGraph> {
    let pairs: Vec<(usize, usize)> = (1..=n).tuple_combinations().collect();
    let subsets = 1u64 << pairs.len();
    (0..subsets).flat_map(move |mask| {
        let edges: Vec<_> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        (1..=n).permutations(n).map(move |numbering| {
            NumberedGraph::new(numbering, edges.iter().copied()).expect("enumerated graph is valid")
        })
    })
}

/// Every `(G,(u,v))` with `u ≠ v` over [`all_graphs`] for sizes `2..=max_n`.
pub fn all_instances(max_n: usize) -> impl Iterator<Item = BdsInstance> {
    (2..=max_n).flat_map(|n| {
        all_graphs(n).flat_map(move |g| {
            (1..=n)
                .permutations(2)
                .map(move |uv| BdsInstance::new(g.clone(), uv[0], uv[1]))
        })
    })
}

/// Random graph with a uniformly random numbering; each edge present with
/// probability `p`.
pub fn random_graph<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> NumberedGraph {
    let mut numbering: Vec<usize> = (1..=n).collect();
    numbering.shuffle(rng);
    let mut edges = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            if rng.gen_bool(p.clamp(0.0, 1.0)) {
                edges.push((a, b));
            }
        }
    }
    NumberedGraph::new(numbering, edges).expect("generated graph is valid")
}

/// Random instance on `n ≥ 2` nodes with a random query pair.
pub fn random_instance<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> BdsInstance {
    assert!(n >= 2, "a BDS query needs two distinct nodes");
    let graph = random_graph(n, p, rng);
    let u = rng.gen_range(1..=n);
    let mut v = rng.gen_range(1..n);
    if v >= u {
        v += 1;
    }
    BdsInstance::new(graph, u, v)
}

/// BDS as a decision problem over `(G,(u,v))` strings.
pub fn problem() -> DecisionProblem {
    DecisionProblem::new("bds", is_member)
}

/// `S_QBDS`: data is the graph text, query is `(u,v)`.
pub fn query_pairs() -> LanguageOfPairs {
    LanguageOfPairs::new("qbds", PolylogBound { a: 2.0, k: 1, b: 5.0 }, |d, q| {
        let (Some(graph), Some((u, v))) = (d.as_str(), q.as_str().and_then(parse_query)) else {
            return false;
        };
        NumberedGraph::parse(graph).is_ok_and(|g| bds_decide(&g, u, v).unwrap_or(false))
    })
}

/// `L_QBDS = { G#(u,v) }`.
pub fn query_problem() -> DecisionProblem {
    DecisionProblem::for_query_class(&query_pairs())
}

/// `G#(u,v)` for a decoded instance.
pub fn query_instance(b: &BdsInstance) -> Instance {
    encode_pair(&DataQueryPair::new(b.graph.to_text(), query_text(b.u, b.v)))
}

/// `π1 = id`, `π2 = ε`, `ρ = left`, `c = 0`.
pub fn example3_factorization() -> CrFactorization {
    CrFactorization::identity("bds-example3")
}

/// `G#(u,v) ↦ ⟨(G,(u,v)), ε⟩`; dropping the `#` gives `c = −1`.
pub fn example4_factorization() -> CrFactorization {
    CrFactorization::new(
        "qbds-example4",
        InstanceMap::new(|y| match decode_pair(y) {
            Ok(p) => p.data.concat(&p.query),
            Err(_) => y.clone(),
        }),
        InstanceMap::empty(),
        RestoreMap::new(|d, _| {
            match d.as_str().and_then(split_graph_query) {
                Some((graph, query)) => encode_pair(&DataQueryPair::new(graph, query)),
                None => d.clone(),
            }
        }),
        -1,
        PolylogBound::constant(0.0),
    )
}

/// `Π` runs the search; `S′ = {⟨1, ε⟩}`.
pub fn example3_witness() -> PreprocessingWitness {
    PreprocessingWitness::decided("bds-example3", is_member)
}
