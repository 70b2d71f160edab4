//! Transition graphs of the difference D_n = T^n(0⁻) − T^n(0⁺).
//!
//! Nodes are exact signed differences. An edge D → D' carries the offset
//! ℓ = b − a of the two digits, with D' = βD − ℓ. States with βD ∈ ℤ match at
//! the next step; the full graph keeps them and sends them to Matching with
//! label βD, the collapsed view folds them into Matching.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::dynamics::{self, MatchKind};
use crate::numberfield::{FieldElement, NumberField};
use crate::paramsweep::{self, SweepError, SweepOptions, SweepResult};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Start,
    Diff(FieldElement),
    Matching,
}

impl Node {
    pub fn value(&self) -> Option<&FieldElement> {
        match self {
            Node::Diff(d) => Some(d),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeInfo {
    /// Number of observed traversals.
    pub count: u64,
    /// Distinct (plus digit, minus digit) pairs realising the edge.
    pub digit_pairs: BTreeSet<(i64, i64)>,
}

impl EdgeInfo {
    pub fn multiplicity(&self) -> usize {
        self.digit_pairs.len()
    }
}

#[derive(Debug, Clone)]
pub struct DifferenceGraph {
    pub field: NumberField,
    pub nodes: BTreeSet<Node>,
    /// Keyed by (from, to, offset).
    pub edges: BTreeMap<(Node, Node, i64), EdgeInfo>,
}

impl PartialEq for DifferenceGraph {
    fn eq(&self, other: &Self) -> bool {
        self.field.same(&other.field) && self.nodes == other.nodes && self.edges == other.edges
    }
}

impl DifferenceGraph {
    /// Start and Matching only.
    pub fn empty(f: &NumberField) -> Self {
        DifferenceGraph {
            field: f.clone(),
            nodes: [Node::Start, Node::Matching].into_iter().collect(),
            edges: BTreeMap::new(),
        }
    }

    /// Node value, with Start read as D_0 = 1.
    fn node_value(&self, n: &Node) -> Option<FieldElement> {
        match n {
            Node::Start => Some(self.field.one()),
            Node::Diff(d) => Some(d.clone()),
            Node::Matching => None,
        }
    }

    fn add_edge(&mut self, from: Node, to: Node, label: i64, pair: Option<(i64, i64)>, count: u64) {
        self.nodes.insert(from.clone());
        self.nodes.insert(to.clone());
        let e = self.edges.entry((from, to, label)).or_default();
        e.count += count;
        if let Some(p) = pair {
            e.digit_pairs.insert(p);
        }
    }

    /// Union of two graphs over the same field.
    pub fn merge(mut self, other: DifferenceGraph) -> DifferenceGraph {
        assert!(self.field.same(&other.field), "graphs over different fields");
        self.nodes.extend(other.nodes);
        for (k, v) in other.edges {
            let e = self.edges.entry(k).or_default();
            e.count += v.count;
            e.digit_pairs.extend(v.digit_pairs);
        }
        self
    }

    pub fn difference_nodes(&self) -> Vec<&FieldElement> {
        self.nodes.iter().filter_map(Node::value).collect()
    }

    pub fn edges_from<'a>(&'a self, n: &'a Node) -> impl Iterator<Item = (&'a Node, i64, &'a EdgeInfo)> + 'a {
        self.edges
            .iter()
            .filter(move |((a, _, _), _)| a == n)
            .map(|((_, b, l), e)| (b, *l, e))
    }

    /// States with βD ∈ ℤ, which match at the next step.
    pub fn prematching(&self) -> Vec<&FieldElement> {
        let beta = self.field.beta();
        self.difference_nodes()
            .into_iter()
            .filter(|d| (&beta * *d).is_integer())
            .collect()
    }

    /// Fold the pre-matching states into Matching.
    pub fn collapsed(&self) -> DifferenceGraph {
        let beta = self.field.beta();
        let pre = |n: &Node| matches!(n, Node::Diff(d) if (&beta * d).is_integer());
        let mut g = DifferenceGraph::empty(&self.field);
        for n in &self.nodes {
            if !pre(n) {
                g.nodes.insert(n.clone());
            }
        }
        for ((a, b, l), e) in &self.edges {
            if pre(a) {
                continue;
            }
            let to = if pre(b) { Node::Matching } else { b.clone() };
            let entry = g.edges.entry((a.clone(), to, *l)).or_default();
            entry.count += e.count;
            entry.digit_pairs.extend(e.digit_pairs.iter().cloned());
        }
        g
    }

    /// Every edge satisfies D' = βD − ℓ. Edges into Matching need βD − ℓ ∈ ℤ,
    /// or β(βD − ℓ) ∈ ℤ when the target was a folded pre-matching state.
    pub fn edge_law_holds(&self) -> bool {
        let beta = self.field.beta();
        self.edges.keys().all(|(a, b, l)| {
            let Some(from) = self.node_value(a) else {
                return false;
            };
            let image = (&beta * &from).add_int(-l);
            match b {
                Node::Matching => image.is_integer() || (&beta * &image).is_integer(),
                Node::Diff(d) => &image == d,
                Node::Start => false,
            }
        })
    }

    /// "±e₁e₂…e_k" when |D| = Σ e_i β^{-i} in a multinacci field.
    pub fn code(&self, d: &FieldElement) -> Option<String> {
        multinacci_code(&self.field, d)
    }

    fn node_label(&self, n: &Node) -> String {
        match n {
            Node::Start => {
                let code = self.code(&self.field.one());
                match code {
                    Some(c) => format!("start {}", c.trim_start_matches('+')),
                    None => "start 1".into(),
                }
            }
            Node::Matching => "matching".into(),
            Node::Diff(d) => match self.code(d) {
                Some(c) => format!("{} ({c})", d.to_decimal(6)),
                None => d.to_decimal(6),
            },
        }
    }

    /// DOT text with nodes in increasing order of value.
    pub fn to_dot(&self) -> String {
        let ids: HashMap<&Node, usize> = self.nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let mut out = String::from("digraph differences {\n  rankdir=LR;\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let style = match n {
                Node::Matching => ", shape=doublecircle, style=filled, fillcolor=\"#f4a6a6\"",
                Node::Start => ", shape=box",
                Node::Diff(_) => "",
            };
            out += &format!("  n{i} [label=\"{}\"{style}];\n", self.node_label(n));
        }
        for ((a, b, l), e) in &self.edges {
            let label = if e.multiplicity() > 1 {
                format!("{l} x{}", e.multiplicity())
            } else {
                l.to_string()
            };
            out += &format!("  n{} -> n{} [label=\"{label}\"];\n", ids[a], ids[b]);
        }
        out += "}\n";
        out
    }

    pub fn to_json(&self) -> Value {
        let ids: HashMap<&Node, usize> = self.nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let kind = match n {
                    Node::Start => "start",
                    Node::Diff(_) => "difference",
                    Node::Matching => "matching",
                };
                let v = self.node_value(n);
                json!({
                    "id": i,
                    "kind": kind,
                    "coeffs": v.as_ref().map(|x| x.coeff_strings()),
                    "decimal": v.as_ref().map(|x| x.to_decimal(15)),
                    "code": v.as_ref().and_then(|x| self.code(x)),
                })
            })
            .collect();
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|((a, b, l), e)| {
                json!({
                    "from": ids[a],
                    "to": ids[b],
                    "label": l,
                    "count": e.count,
                    "digit_pairs": e.digit_pairs.iter().map(|p| [p.0, p.1]).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({ "field": self.field.spec(), "nodes": nodes, "edges": edges })
    }
}

/// Accumulates paths with a cache of D' = βD − ℓ.
struct Builder {
    graph: DifferenceGraph,
    beta: FieldElement,
    cache: HashMap<(FieldElement, i64), FieldElement>,
}

impl Builder {
    fn new(f: &NumberField) -> Self {
        Builder {
            graph: DifferenceGraph::empty(f),
            beta: f.beta(),
            cache: HashMap::new(),
        }
    }

    /// Replay one itinerary. `matched` sends the final state to Matching.
    fn add_path(&mut self, digits_plus: &[i64], digits_minus: &[i64], matched: bool) {
        let mut d = self.graph.field.one();
        let mut node = Node::Start;
        for (a, b) in digits_plus.iter().zip(digits_minus) {
            let l = b - a;
            let next = match self.cache.get(&(d.clone(), l)) {
                Some(x) => x.clone(),
                None => {
                    let x = (&self.beta * &d).add_int(-l);
                    self.cache.insert((d.clone(), l), x.clone());
                    x
                }
            };
            let to = if next.is_integer() {
                Node::Matching
            } else {
                Node::Diff(next.clone())
            };
            self.graph.add_edge(node, to.clone(), l, Some((*a, *b)), 1);
            if to == Node::Matching {
                return;
            }
            node = to;
            d = next;
        }
        if matched {
            let bd = &self.beta * &d;
            let l = bd.as_integer().expect("final state matches at the next step");
            let l = i64::try_from(l).expect("small offset");
            self.graph.add_edge(node, Node::Matching, l, None, 1);
        }
    }
}

fn widen(d: &[u8]) -> Vec<i64> {
    d.iter().map(|x| *x as i64).collect()
}

/// Graph of all itineraries in a sweep: matched intervals end in Matching,
/// unresolved pieces end where the sweep stopped.
pub fn build_graph(result: &SweepResult) -> DifferenceGraph {
    let f = &result.field;
    let matched = result
        .matched
        .par_iter()
        .fold(
            || Builder::new(f),
            |mut b, m| {
                b.add_path(&widen(&m.digits_plus), &widen(&m.digits_minus), true);
                b
            },
        )
        .map(|b| b.graph)
        .reduce(|| DifferenceGraph::empty(f), DifferenceGraph::merge);
    let open = result
        .unresolved
        .par_iter()
        .fold(
            || Builder::new(f),
            |mut b, p| {
                b.add_path(&widen(&p.digits_plus), &widen(&p.digits_minus), false);
                b
            },
        )
        .map(|b| b.graph)
        .reduce(|| DifferenceGraph::empty(f), DifferenceGraph::merge);
    matched.merge(open)
}

/// Graph from pointwise orbits of sampled α, each followed for `depth` steps.
pub fn build_graph_from_samples(
    f: &NumberField,
    alphas: &[FieldElement],
    depth: usize,
) -> Result<DifferenceGraph, dynamics::DynamicsError> {
    let mut b = Builder::new(f);
    for a in alphas {
        let out = dynamics::matching_index(f, a, depth)?;
        // a match at m is recorded from the pre-matching state D_{m−1}
        let (steps, matched) = match out.kind {
            MatchKind::MatchedAt(m) => (m - 1, true),
            MatchKind::NoMatchWithin(n) => (n, false),
        };
        let (p, m) = dynamics::critical_orbits(f, a, steps)?;
        b.add_path(&p.digits, &m.digits, matched);
    }
    Ok(b.graph)
}

/// Closure over all offsets ℓ with |βD − ℓ| < 1, starting from D_0 = 1.
/// Returns None when more than `max_nodes` states appear.
pub fn symbolic_closure(f: &NumberField, max_nodes: usize) -> Option<DifferenceGraph> {
    let beta = f.beta();
    let mut g = DifferenceGraph::empty(f);
    let mut queue = vec![(Node::Start, f.one())];
    let mut seen: BTreeSet<FieldElement> = BTreeSet::new();
    while let Some((node, d)) = queue.pop() {
        let bd = &beta * &d;
        if bd.is_integer() {
            let l = i64::try_from(bd.as_integer().unwrap()).ok()?;
            g.add_edge(node, Node::Matching, l, None, 0);
            continue;
        }
        let lo = i64::try_from(bd.floor()).ok()?;
        for l in [lo, lo + 1] {
            let next = bd.add_int(-l);
            let to = if next.is_integer() {
                Node::Matching
            } else {
                Node::Diff(next.clone())
            };
            g.add_edge(node.clone(), to.clone(), l, None, 0);
            if let Node::Diff(x) = to {
                if seen.insert(x.clone()) {
                    if seen.len() > max_nodes {
                        return None;
                    }
                    queue.push((Node::Diff(x.clone()), x));
                }
            }
        }
    }
    Some(g)
}

/// True when the minimal polynomial is x^k − x^{k−1} − ⋯ − 1.
pub fn is_multinacci(f: &NumberField) -> bool {
    f.degree() >= 2 && f.minpoly().iter().all(|c| *c == (-1).into())
}

/// Σ_{i=1}^k e_i β^{-i} for each 0/1 code e, in code order 00…1 to 11…1.
pub fn multinacci_states(f: &NumberField) -> Vec<(String, FieldElement)> {
    let k = f.degree();
    (1u32..(1 << k))
        .map(|mask| {
            let mut code = String::new();
            let mut v = f.zero();
            for i in 1..=k {
                let bit = (mask >> (k - i)) & 1;
                code.push(if bit == 1 { '1' } else { '0' });
                if bit == 1 {
                    v = &v + &f.beta_pow(-(i as i64));
                }
            }
            (code, v)
        })
        .collect()
}

/// Signed 0/1 code of a difference in a multinacci field.
pub fn multinacci_code(f: &NumberField, d: &FieldElement) -> Option<String> {
    if !is_multinacci(f) {
        return None;
    }
    let abs = d.abs();
    let sign = if d.is_negative() { '-' } else { '+' };
    multinacci_states(f)
        .into_iter()
        .find(|(_, v)| *v == abs)
        .map(|(c, _)| format!("{sign}{c}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Finiteness {
    /// Node count unchanged between the two depths.
    FiniteWithin(usize),
    GrewBeyond(usize),
}

#[derive(Debug, Clone)]
pub struct FinitenessReport {
    pub verdict: Finiteness,
    pub depths: (usize, usize),
    pub node_counts: (usize, usize),
    /// For multinacci fields: every difference lies in the code set.
    pub within_code_set: Option<bool>,
}

/// Collapsed node count after sweeping to `depth` and to twice that depth.
pub fn finiteness_check(
    f: &NumberField,
    depth: usize,
    opts: SweepOptions,
) -> Result<FinitenessReport, SweepError> {
    let shallow = paramsweep::sweep_region(f, f.zero(), f.one(), depth, opts)?;
    let deep = paramsweep::refine_with(&shallow, depth, opts)?;
    let g1 = build_graph(&shallow).collapsed();
    let g2 = build_graph(&deep).collapsed();
    let (n1, n2) = (g1.nodes.len(), g2.nodes.len());
    let within_code_set = is_multinacci(f).then(|| {
        build_graph(&deep)
            .difference_nodes()
            .iter()
            .all(|d| multinacci_code(f, d).is_some())
    });
    Ok(FinitenessReport {
        verdict: if n1 == n2 {
            Finiteness::FiniteWithin(n2)
        } else {
            Finiteness::GrewBeyond(n2)
        },
        depths: (depth, 2 * depth),
        node_counts: (n1, n2),
        within_code_set,
    })
}
