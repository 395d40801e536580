//! The circuit value problem.
//!
//! Text form, one node per line after an input-assignment header:
//!
//! ```text
//! inputs 1 0
//! 1 input 1
//! 2 input 2
//! 3 and 1 2
//! 4 not 3
//! 5 output 4
//! ```
//!
//! Node ids are dense from 1 and may be referenced before they are defined.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::bound::PolylogBound;
use crate::encoding::{decode_pair, encode_pair, DataQueryPair, Instance};
use crate::factorization::CrFactorization;
use crate::language::{DecisionProblem, InstanceMap, LanguageOfPairs, RestoreMap};
use crate::preprocessing::PreprocessingWitness;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("malformed circuit at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("circuit contains a cycle through node {0}")]
    CyclicCircuit(usize),
    #[error("node {node} references {target}, which does not exist")]
    DanglingRef { node: usize, target: usize },
    #[error("{kind} at line {line} takes {expected} argument(s), got {got}")]
    ArityError {
        line: usize,
        kind: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("circuit must have exactly one output node, found {0}")]
    OutputCount(usize),
}

fn malformed(line: usize, reason: impl Into<String>) -> CircuitError {
    CircuitError::Malformed {
        line,
        reason: reason.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    /// Reads input `x_i` (1-based).
    Input(usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Output(usize),
}

impl Node {
    pub fn kind(&self) -> &'static str {
        match self {
            Node::Input(_) => "input",
            Node::Not(_) => "not",
            Node::And(..) => "and",
            Node::Or(..) => "or",
            Node::Output(_) => "output",
        }
    }

    /// The node ids this node reads from.
    pub fn children(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            Node::Input(_) => (None, None),
            Node::Not(a) | Node::Output(a) => (Some(a), None),
            Node::And(a, b) | Node::Or(a, b) => (Some(a), Some(b)),
        };
        a.into_iter().chain(b)
    }

    pub fn is_gate(&self) -> bool {
        matches!(self, Node::Not(_) | Node::And(..) | Node::Or(..))
    }

    fn map_children(&self, f: impl Fn(usize) -> usize) -> Node {
        match *self {
            Node::Input(i) => Node::Input(i),
            Node::Not(a) => Node::Not(f(a)),
            Node::And(a, b) => Node::And(f(a), f(b)),
            Node::Or(a, b) => Node::Or(f(a), f(b)),
            Node::Output(a) => Node::Output(f(a)),
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind())?;
        match *self {
            Node::Input(i) => write!(f, " {i}"),
            _ => self.children().try_for_each(|c| write!(f, " {c}")),
        }
    }
}

/// A circuit with its input assignment. Node `i` (1-based) is `nodes[i - 1]`.
///
/// Construction does not validate; [`Circuit::validate`] and [`cvp_eval`] do.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Circuit {
    pub inputs: Vec<bool>,
    pub nodes: Vec<Node>,
}

impl Circuit {
    pub fn new(inputs: Vec<bool>, nodes: Vec<Node>) -> Self {
        Circuit { inputs, nodes }
    }

    pub fn node(&self, id: usize) -> Option<&Node> {
        id.checked_sub(1).and_then(|i| self.nodes.get(i))
    }

    pub fn gate_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_gate()).count()
    }

    /// The id of the unique output node.
    pub fn output(&self) -> Result<usize, CircuitError> {
        let outputs: Vec<usize> = (1..=self.nodes.len())
            .filter(|&id| matches!(self.nodes[id - 1], Node::Output(_)))
            .collect();
        match outputs.as_slice() {
            [id] => Ok(*id),
            _ => Err(CircuitError::OutputCount(outputs.len())),
        }
    }

    /// Reference, output-count and acyclicity checks; returns a topological
    /// order of node ids (children first).
    pub fn validate(&self) -> Result<Vec<usize>, CircuitError> {
        let n = self.nodes.len();
        let mut indegree = vec![0usize; n + 1];
        let mut parents = vec![Vec::new(); n + 1];
        for (i, node) in self.nodes.iter().enumerate() {
            let id = i + 1;
            if let Node::Input(k) = *node {
                if k == 0 || k > self.inputs.len() {
                    return Err(CircuitError::DanglingRef { node: id, target: k });
                }
            }
            for c in node.children() {
                if c == 0 || c > n {
                    return Err(CircuitError::DanglingRef { node: id, target: c });
                }
                if matches!(self.nodes[c - 1], Node::Output(_)) {
                    return Err(CircuitError::DanglingRef { node: id, target: c });
                }
                indegree[id] += 1;
                parents[c].push(id);
            }
        }
        self.output()?;
        let mut ready: VecDeque<usize> = (1..=n).filter(|&id| indegree[id] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(id) = ready.pop_front() {
            order.push(id);
            for &p in &parents[id] {
                indegree[p] -= 1;
                if indegree[p] == 0 {
                    ready.push_back(p);
                }
            }
        }
        if order.len() < n {
            let stuck = (1..=n).find(|&id| indegree[id] > 0).unwrap_or(0);
            return Err(CircuitError::CyclicCircuit(stuck));
        }
        Ok(order)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("inputs");
        for &b in &self.inputs {
            out.push_str(if b { " 1" } else { " 0" });
        }
        out.push('\n');
        for (i, node) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "{} {node}", i + 1);
        }
        out
    }

    /// Parses the text form. Syntax and arity are checked here; references,
    /// cycles and the output count are checked by [`Circuit::validate`].
    pub fn parse(text: &str) -> Result<Self, CircuitError> {
        let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l.trim()));
        let (_, header) = lines.next().ok_or_else(|| malformed(1, "missing inputs header"))?;
        let mut tokens = header.split_whitespace();
        if tokens.next() != Some("inputs") {
            return Err(malformed(1, "header must start with `inputs`"));
        }
        let inputs = tokens
            .map(|t| match t {
                "1" => Ok(true),
                "0" => Ok(false),
                _ => Err(malformed(1, format!("input value {t:?} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut nodes = Vec::new();
        for (line, l) in lines {
            if l.is_empty() {
                continue;
            }
            let mut tokens = l.split_whitespace();
            let id = tokens.next().unwrap_or_default();
            let expected_id = nodes.len() + 1;
            if id.parse::<usize>().ok() != Some(expected_id) {
                return Err(malformed(line, format!("expected node id {expected_id}, got {id:?}")));
            }
            let kind = tokens
                .next()
                .ok_or_else(|| malformed(line, "missing node kind"))?;
            let args = tokens
                .map(|t| t.parse::<usize>().map_err(|_| malformed(line, format!("bad reference {t:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let (kind, expected): (&'static str, usize) = match kind {
                "input" => ("input", 1),
                "not" => ("not", 1),
                "and" => ("and", 2),
                "or" => ("or", 2),
                "output" => ("output", 1),
                other => return Err(malformed(line, format!("unknown node kind {other:?}"))),
            };
            if args.len() != expected {
                return Err(CircuitError::ArityError {
                    line,
                    kind,
                    expected,
                    got: args.len(),
                });
            }
            nodes.push(match kind {
                "input" => Node::Input(args[0]),
                "not" => Node::Not(args[0]),
                "and" => Node::And(args[0], args[1]),
                "or" => Node::Or(args[0], args[1]),
                _ => Node::Output(args[0]),
            });
        }
        Ok(Circuit { inputs, nodes })
    }

    pub fn to_instance(&self) -> Instance {
        Instance::from(self.to_text())
    }

    /// Relabels node ids: the node at old id `i` moves to `perm[i - 1]`.
    pub fn relabeled(&self, perm: &[usize]) -> Circuit {
        let mut nodes = vec![Node::Input(0); self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            nodes[perm[i] - 1] = node.map_children(|c| perm[c - 1]);
        }
        Circuit::new(self.inputs.clone(), nodes)
    }

    /// `NOT(NOT(·))` spliced in front of the output node.
    pub fn double_negated(&self) -> Result<Circuit, CircuitError> {
        let out = self.output()?;
        let Node::Output(target) = self.nodes[out - 1] else {
            unreachable!("output() returned a non-output node")
        };
        let mut nodes = self.nodes.clone();
        let first = nodes.len() + 1;
        nodes.push(Node::Not(target));
        nodes.push(Node::Not(first));
        nodes[out - 1] = Node::Output(first + 1);
        Ok(Circuit::new(self.inputs.clone(), nodes))
    }
}

/// Value of the designated output, evaluated in topological order.
pub fn cvp_eval(q: &Circuit) -> Result<bool, CircuitError> {
    let order = q.validate()?;
    let mut value = vec![false; q.nodes.len() + 1];
    for id in order {
        value[id] = match q.nodes[id - 1] {
            Node::Input(k) => q.inputs[k - 1],
            Node::Not(a) => !value[a],
            Node::And(a, b) => value[a] && value[b],
            Node::Or(a, b) => value[a] || value[b],
            Node::Output(a) => value[a],
        };
    }
    Ok(value[q.output()?])
}

pub fn parse_instance(x: &Instance) -> Option<Circuit> {
    let c = Circuit::parse(x.as_str()?).ok()?;
    c.validate().ok()?;
    Some(c)
}

/// Membership in CVP; malformed circuits are non-members.
pub fn is_member(x: &Instance) -> bool {
    parse_instance(x).is_some_and(|c| cvp_eval(&c).unwrap_or(false))
}

/// Relative weights of NOT/AND/OR when generating gates.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GateMix {
    pub not: f64,
    pub and: f64,
    pub or: f64,
}

impl Default for GateMix {
    fn default() -> Self {
        GateMix {
            not: 1.0,
            and: 2.0,
            or: 2.0,
        }
    }
}

/// A random well-formed circuit with `inputs ≥ 1` inputs and `gates` gates.
///
/// Gates read from uniformly chosen earlier nodes, the output reads the last
/// node, and node ids are shuffled so that references run in both directions.
pub fn random_circuit<R: Rng + ?Sized>(inputs: usize, gates: usize, mix: GateMix, rng: &mut R) -> Circuit {
    let inputs = inputs.max(1);
    let values = (0..inputs).map(|_| rng.gen_bool(0.5)).collect();
    let mut nodes: Vec<Node> = (1..=inputs).map(Node::Input).collect();
    let total = (mix.not + mix.and + mix.or).max(f64::MIN_POSITIVE);
    for _ in 0..gates {
        let pick = |rng: &mut R, len: usize| rng.gen_range(1..=len);
        let len = nodes.len();
        let r = rng.gen::<f64>() * total;
        let node = if r < mix.not {
            Node::Not(pick(rng, len))
        } else if r < mix.not + mix.and {
            Node::And(pick(rng, len), pick(rng, len))
        } else {
            Node::Or(pick(rng, len), pick(rng, len))
        };
        nodes.push(node);
    }
    nodes.push(Node::Output(nodes.len()));
    let mut perm: Vec<usize> = (1..=nodes.len()).collect();
    perm.shuffle(rng);
    Circuit::new(values, nodes).relabeled(&perm)
}

/// Calls `visit` on every circuit with `inputs` inputs, exactly `gates` gates
/// wired to earlier nodes, every choice of output source, and every input
/// assignment.
pub fn for_each_circuit(inputs: usize, gates: usize, mut visit: impl FnMut(&Circuit)) {
    let mut nodes: Vec<Node> = (1..=inputs).map(Node::Input).collect();
    fn rec(nodes: &mut Vec<Node>, inputs: usize, remaining: usize, visit: &mut dyn FnMut(&Circuit)) {
        if remaining == 0 {
            for source in 1..=nodes.len() {
                nodes.push(Node::Output(source));
                for mask in 0..1u32 << inputs {
                    let values = (0..inputs).map(|i| mask >> i & 1 == 1).collect();
                    visit(&Circuit::new(values, nodes.clone()));
                }
                nodes.pop();
            }
            return;
        }
        let len = nodes.len();
        let mut candidates = Vec::with_capacity(len + 2 * len * len);
        candidates.extend((1..=len).map(Node::Not));
        for a in 1..=len {
            for b in 1..=len {
                candidates.push(Node::And(a, b));
                candidates.push(Node::Or(a, b));
            }
        }
        for g in candidates {
            nodes.push(g);
            rec(nodes, inputs, remaining - 1, visit);
            nodes.pop();
        }
    }
    rec(&mut nodes, inputs, gates, &mut visit);
}

/// `S_CVP = { ⟨q, ε⟩ | q evaluates to true }`.
pub fn pairs() -> LanguageOfPairs {
    LanguageOfPairs::new("cvp", PolylogBound::constant(0.0), |d, q| q.is_empty() && is_member(d))
}

/// CVP as a decision problem over circuit text.
pub fn problem() -> DecisionProblem {
    DecisionProblem::new("cvp", is_member)
}

/// `L_CVP = { q# }`.
pub fn query_problem() -> DecisionProblem {
    DecisionProblem::for_query_class(&pairs())
}

/// `Π(q)` is `1` or `0`; `S′ = {⟨1, ε⟩}`.
pub fn example2_witness() -> PreprocessingWitness {
    PreprocessingWitness::decided("cvp-example2", is_member)
}

/// `q# ↦ ⟨q, ε⟩`, `c = −1`.
pub fn split_factorization() -> CrFactorization {
    CrFactorization::new(
        "cvp-split",
        InstanceMap::new(|x| decode_pair(x).map(|p| p.data).unwrap_or_else(|_| x.clone())),
        InstanceMap::new(|x| decode_pair(x).map(|p| p.query).unwrap_or_default()),
        RestoreMap::new(|d, q| encode_pair(&DataQueryPair::new(d.clone(), q.clone()))),
        -1,
        PolylogBound::constant(0.0),
    )
}
