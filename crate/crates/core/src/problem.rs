//! Problem instances: graphs, QUBO cost functions and brute-force optima.
//!
//! Bitstrings are `&[u8]` with entry `v` the value of vertex `v`. Spins use
//! `z_v = (−1)^{x_v}`, so bit 0 is spin +1. A basis index `k` encodes the
//! bitstring with `x_v = (k >> v) & 1`.

use std::collections::BTreeMap;

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest instance accepted by the exhaustive solvers.
pub const MAX_BRUTE_FORCE: usize = 24;

/// A simple undirected graph; edges are stored with `u < v`, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for {n} vertices"
                )));
            }
            out.push((a.min(b), a.max(b)));
        }
        out.sort_unstable();
        let before = out.len();
        out.dedup();
        if out.len() != before {
            return Err(Error::InvalidGraph("duplicate edge".into()));
        }
        Ok(Graph { n, edges: out })
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, edges: Vec::new() }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
        Graph::new(n, edges).unwrap()
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|v| (v - 1, v))).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        Graph::new(n, (0..n).map(|v| (v, (v + 1) % n))).unwrap()
    }

    pub fn star(leaves: usize) -> Self {
        Graph::new(leaves + 1, (1..=leaves).map(|v| (0, v))).unwrap()
    }

    pub fn petersen() -> Self {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        Graph::new(10, outer.chain(spokes).chain(inner)).unwrap()
    }

    /// Erdős–Rényi `G(n, p)`.
    pub fn random<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Self {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(p) {
                    edges.push((a, b));
                }
            }
        }
        Graph { n, edges }
    }

    /// Graph on `n` vertices whose edge set is the set bits of `mask` over
    /// the pairs `(a, b)`, `a < b`, in lexicographic order.
    pub fn from_edge_mask(n: usize, mask: u64) -> Self {
        let pairs = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
        let edges = pairs
            .enumerate()
            .filter(|(i, _)| (mask >> i) & 1 == 1)
            .map(|(_, e)| e);
        Graph::new(n, edges).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    /// Sorted neighbourhood `N(v)`.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn complement(&self) -> Graph {
        let edges = (0..self.n)
            .flat_map(|a| (a + 1..self.n).map(move |b| (a, b)))
            .filter(|&(a, b)| !self.has_edge(a, b));
        Graph::new(self.n, edges).unwrap()
    }
}

/// `constant + Σ h_v z_v + Σ J_uv z_u z_v`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuboProblem {
    n: usize,
    quadratic: BTreeMap<(usize, usize), f64>,
    linear: BTreeMap<usize, f64>,
    constant: f64,
}

impl QuboProblem {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("a problem needs at least one vertex".into()));
        }
        Ok(QuboProblem {
            n,
            quadratic: BTreeMap::new(),
            linear: BTreeMap::new(),
            constant: 0.0,
        })
    }

    /// Adds `w·z_u·z_v` to the cost.
    pub fn add_quadratic(&mut self, u: usize, v: usize, w: f64) -> Result<()> {
        if u == v {
            return Err(Error::InvalidGraph(format!("self-loop on vertex {u}")));
        }
        if u >= self.n || v >= self.n {
            return Err(Error::InvalidInput(format!("term ({u}, {v}) out of range")));
        }
        *self.quadratic.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        Ok(())
    }

    /// Adds `w·z_v` to the cost.
    pub fn add_linear(&mut self, v: usize, w: f64) -> Result<()> {
        if v >= self.n {
            return Err(Error::InvalidInput(format!("term {v} out of range")));
        }
        *self.linear.entry(v).or_insert(0.0) += w;
        Ok(())
    }

    pub fn set_constant(&mut self, c: f64) {
        self.constant = c;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Nonzero quadratic terms in ascending key order.
    pub fn quadratic(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.quadratic
            .iter()
            .filter(|(_, w)| **w != 0.0)
            .map(|(k, w)| (*k, *w))
    }

    /// Nonzero linear terms in ascending vertex order.
    pub fn linear(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.linear
            .iter()
            .filter(|(_, w)| **w != 0.0)
            .map(|(k, w)| (*k, *w))
    }

    /// The interaction graph: one edge per nonzero quadratic term.
    pub fn interaction_graph(&self) -> Graph {
        Graph::new(self.n, self.quadratic().map(|(k, _)| k)).unwrap()
    }

    /// Returns a copy with every coefficient (including the constant)
    /// multiplied by `s`.
    pub fn scaled(&self, s: f64) -> QuboProblem {
        QuboProblem {
            n: self.n,
            quadratic: self.quadratic.iter().map(|(k, w)| (*k, w * s)).collect(),
            linear: self.linear.iter().map(|(k, w)| (*k, w * s)).collect(),
            constant: self.constant * s,
        }
    }

    /// Cost of a bitstring. Panics if `x.len() != n`.
    pub fn cost(&self, x: &[u8]) -> f64 {
        assert_eq!(x.len(), self.n, "bitstring length must equal n");
        let z = |v: usize| if x[v] == 0 { 1.0 } else { -1.0 };
        self.constant
            + self.linear().map(|(v, h)| h * z(v)).sum::<f64>()
            + self.quadratic().map(|((u, v), j)| j * z(u) * z(v)).sum::<f64>()
    }

    /// Cost of the basis state with index `k`.
    pub fn cost_index(&self, k: usize) -> f64 {
        self.cost(&bits_of(k, self.n))
    }

    /// Cost of every basis state, indexed by basis index.
    pub fn cost_table(&self) -> Result<Vec<f64>> {
        if self.n > MAX_BRUTE_FORCE {
            return Err(Error::limit("cost table size", MAX_BRUTE_FORCE, self.n));
        }
        Ok((0..1usize << self.n).map(|k| self.cost_index(k)).collect())
    }

    /// Maximizing bitstring; ties go to the lexicographically smallest.
    pub fn brute_force_optimum(&self) -> Result<CostReport> {
        if self.n > MAX_BRUTE_FORCE {
            return Err(Error::limit("brute-force vertices", MAX_BRUTE_FORCE, self.n));
        }
        best_over(self.n, |x| Some(self.cost(x)))
    }
}

/// Bit vector of basis index `k` on `n` qubits.
pub fn bits_of(k: usize, n: usize) -> Vec<u8> {
    (0..n).map(|v| ((k >> v) & 1) as u8).collect()
}

/// Basis index of a bit vector.
pub fn index_of(x: &[u8]) -> usize {
    x.iter()
        .enumerate()
        .fold(0, |acc, (v, &b)| acc | ((b as usize & 1) << v))
}

/// Renders `x` as a string with vertex 0 first.
pub fn bitstring(x: &[u8]) -> String {
    x.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect()
}

/// Enumerates bitstrings in lexicographic order (vertex 0 most significant)
/// and keeps the first strict maximum.
fn best_over(n: usize, mut f: impl FnMut(&[u8]) -> Option<f64>) -> Result<CostReport> {
    let mut best: Option<CostReport> = None;
    let mut x = vec![0u8; n];
    for lex in 0..1usize << n {
        for (v, b) in x.iter_mut().enumerate() {
            *b = ((lex >> (n - 1 - v)) & 1) as u8;
        }
        if let Some(value) = f(&x) {
            if best.as_ref().is_none_or(|b| value > b.value + 1e-12) {
                best = Some(CostReport {
                    bitstring: x.clone(),
                    value,
                });
            }
        }
    }
    best.ok_or_else(|| Error::InvalidInput("no candidate bitstring".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub bitstring: Vec<u8>,
    pub value: f64,
}

/// `C = |E|/2 − ½ Σ z_u z_v`, the number of cut edges.
pub fn maxcut_to_qubo(g: &Graph) -> Result<QuboProblem> {
    let mut q = QuboProblem::new(g.n())?;
    for &(u, v) in g.edges() {
        q.add_quadratic(u, v, -0.5)?;
    }
    q.set_constant(g.edges().len() as f64 / 2.0);
    Ok(q)
}

/// Directly counted cut size.
pub fn cut_size(g: &Graph, x: &[u8]) -> usize {
    g.edges().iter().filter(|&&(u, v)| x[u] != x[v]).count()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MisInstance {
    graph: Graph,
}

impl MisInstance {
    pub fn new(graph: Graph) -> Self {
        MisInstance { graph }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Panics if `x.len() != n`.
    pub fn is_independent(&self, x: &[u8]) -> bool {
        assert_eq!(x.len(), self.n(), "bitstring length must equal n");
        self.graph.edges().iter().all(|&(u, v)| !(x[u] == 1 && x[v] == 1))
    }

    pub fn is_independent_index(&self, k: usize) -> bool {
        self.graph
            .edges()
            .iter()
            .all(|&(u, v)| (k >> u) & 1 == 0 || (k >> v) & 1 == 0)
    }

    /// Largest independent set; ties go to the lexicographically smallest.
    pub fn brute_force(&self) -> Result<CostReport> {
        if self.n() > MAX_BRUTE_FORCE {
            return Err(Error::limit("brute-force vertices", MAX_BRUTE_FORCE, self.n()));
        }
        best_over(self.n(), |x| {
            self.is_independent(x).then(|| x.iter().map(|&b| b as f64).sum())
        })
    }

    /// The objective `Σ x_v = n/2 − ½ Σ z_v` as a QUBO.
    pub fn objective(&self) -> QuboProblem {
        let mut q = QuboProblem::new(self.n().max(1)).unwrap();
        for v in 0..self.n() {
            q.add_linear(v, -0.5).unwrap();
        }
        q.set_constant(self.n() as f64 / 2.0);
        q
    }
}

/// Free function form of [`MisInstance::is_independent`].
pub fn is_independent(m: &MisInstance, x: &[u8]) -> bool {
    m.is_independent(x)
}

/// Free function form of [`MisInstance::brute_force`].
pub fn mis_brute_force(m: &MisInstance) -> Result<CostReport> {
    m.brute_force()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadDoc {
    u: usize,
    v: usize,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinDoc {
    v: usize,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemDoc {
    n: usize,
    #[serde(default)]
    quadratic: Vec<QuadDoc>,
    #[serde(default)]
    linear: Vec<LinDoc>,
    #[serde(default)]
    constant: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl QuboProblem {
    pub fn to_json(&self) -> String {
        let doc = ProblemDoc {
            n: self.n,
            quadratic: self
                .quadratic
                .iter()
                .map(|(&(u, v), &weight)| QuadDoc { u, v, weight })
                .collect(),
            linear: self
                .linear
                .iter()
                .map(|(&v, &weight)| LinDoc { v, weight })
                .collect(),
            constant: self.constant,
        };
        serde_json::to_string_pretty(&doc).expect("problem serialization cannot fail")
    }

    /// Parses a problem document.
    pub fn from_json(text: &str) -> Result<QuboProblem> {
        let doc: ProblemDoc = serde_json::from_str(text)?;
        let mut q = QuboProblem::new(doc.n)?;
        for t in doc.quadratic {
            q.add_quadratic(t.u, t.v, t.weight)?;
        }
        for t in doc.linear {
            q.add_linear(t.v, t.weight)?;
        }
        q.set_constant(doc.constant);
        Ok(q)
    }
}

impl Graph {
    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            n: self.n,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        };
        serde_json::to_string(&doc).expect("graph serialization cannot fail")
    }

    /// Accepts `{n, edges}` or a bare edge list `[[u, v], …]`, in which case
    /// `n` is one more than the largest vertex.
    pub fn from_json(text: &str) -> Result<Graph> {
        if text.trim_start().starts_with('[') {
            let edges: Vec<[usize; 2]> = serde_json::from_str(text)?;
            let n = edges.iter().flatten().max().map_or(0, |m| m + 1);
            return Graph::new(n, edges.into_iter().map(|[a, b]| (a, b)));
        }
        let doc: GraphDoc = serde_json::from_str(text)?;
        Graph::new(doc.n, doc.edges.into_iter().map(|[a, b]| (a, b)))
    }
}

/// Reads either a problem document or a graph document (taken as MaxCut).
pub fn problem_from_json(text: &str) -> Result<QuboProblem> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let is_graph = value.is_array() || value.get("edges").is_some();
    if is_graph {
        maxcut_to_qubo(&Graph::from_json(text)?)
    } else {
        QuboProblem::from_json(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn triangle_maxcut() {
        let q = maxcut_to_qubo(&Graph::complete(3)).unwrap();
        assert_eq!(q.constant(), 1.5);
        assert_eq!(q.quadratic().count(), 3);
        assert!(q.quadratic().all(|(_, w)| w == -0.5));
        assert_eq!(q.cost(&[0, 1, 0]), 2.0);
        assert_eq!(q.cost(&[0, 0, 0]), 0.0);
        assert_eq!(q.cost(&[0, 1, 1]), 2.0);
        assert_eq!(q.brute_force_optimum().unwrap().value, 2.0);
    }

    #[test]
    fn single_edge() {
        let q = maxcut_to_qubo(&Graph::path(2)).unwrap();
        assert_eq!(q.cost(&[0, 1]), 1.0);
        assert_eq!(q.cost(&[0, 0]), 0.0);
    }

    #[test]
    fn self_loop_rejected() {
        assert!(matches!(Graph::new(2, [(1, 1)]), Err(Error::InvalidGraph(_))));
        let mut q = QuboProblem::new(2).unwrap();
        assert!(matches!(q.add_quadratic(0, 0, 1.0), Err(Error::InvalidGraph(_))));
    }

    #[test]
    #[should_panic(expected = "bitstring length")]
    fn length_mismatch_panics() {
        maxcut_to_qubo(&Graph::path(3)).unwrap().cost(&[0, 1]);
    }

    #[test]
    fn c5_optimum_and_tie_break() {
        let q = maxcut_to_qubo(&Graph::cycle(5)).unwrap();
        let best = q.brute_force_optimum().unwrap();
        assert_eq!(best.value, 4.0);
        // lexicographically first string with a cut of 4
        assert_eq!(best.bitstring, vec![0, 0, 1, 0, 1]);
    }

    #[test]
    fn path_mis() {
        let m = MisInstance::new(Graph::path(3));
        assert!(m.is_independent(&[1, 0, 1]));
        let best = mis_brute_force(&m).unwrap();
        assert_eq!(best.value, 2.0);
        assert_eq!(best.bitstring, vec![1, 0, 1]);
        assert!(!is_independent(&MisInstance::new(Graph::complete(3)), &[1, 1, 0]));
    }

    #[test]
    fn json_forms() {
        let g = Graph::from_json("[[0,1],[1,2]]").unwrap();
        assert_eq!(g, Graph::path(3));
        let q = problem_from_json(r#"{"n":3,"edges":[[0,1],[1,2]]}"#).unwrap();
        assert_eq!(q, maxcut_to_qubo(&g).unwrap());
        let mut w = QuboProblem::new(3).unwrap();
        w.add_quadratic(0, 2, 1.25).unwrap();
        w.add_linear(1, -0.5).unwrap();
        w.set_constant(0.75);
        assert_eq!(QuboProblem::from_json(&w.to_json()).unwrap(), w);
        let err = QuboProblem::from_json(r#"{"n":2,"quadratic":[{"u":0,"v":1,"wieght":1}]}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("wieght"), "{err}");
    }

    #[test]
    fn complete_graph_optimum() {
        for n in 1..=7 {
            let q = maxcut_to_qubo(&Graph::complete(n)).unwrap();
            assert_eq!(
                q.brute_force_optimum().unwrap().value,
                ((n / 2) * n.div_ceil(2)) as f64
            );
        }
    }

    proptest! {
        #[test]
        fn cut_symmetry(mask in 0u64..(1 << 10), bits in proptest::collection::vec(0u8..2, 5)) {
            let g = Graph::from_edge_mask(5, mask);
            let q = maxcut_to_qubo(&g).unwrap();
            let flipped: Vec<u8> = bits.iter().map(|b| 1 - b).collect();
            prop_assert_eq!(q.cost(&bits), q.cost(&flipped));
            prop_assert_eq!(q.cost(&bits), cut_size(&g, &bits) as f64);
        }

        #[test]
        fn cost_is_affine(j in -3.0f64..3.0, h in -3.0f64..3.0, d in 0.1f64..2.0, bits in proptest::collection::vec(0u8..2, 3)) {
            let build = |j: f64, h: f64| {
                let mut q = QuboProblem::new(3).unwrap();
                q.add_quadratic(0, 1, j).unwrap();
                q.add_quadratic(1, 2, 0.7).unwrap();
                q.add_linear(2, h).unwrap();
                q
            };
            let c = |j, h| build(j, h).cost(&bits);
            let dj = c(j + d, h) - c(j, h);
            prop_assert!((c(j + 2.0 * d, h) - c(j + d, h) - dj).abs() < 1e-12);
            let dh = c(j, h + d) - c(j, h);
            prop_assert!((c(j, h + 2.0 * d) - c(j, h + d) - dh).abs() < 1e-12);
        }
    }
}
