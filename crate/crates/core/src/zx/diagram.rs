use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, C64};

use super::phase::Phase;

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    Z,
    X,
}

impl Color {
    pub fn flipped(self) -> Color {
        match self {
            Color::Z => Color::X,
            Color::X => Color::Z,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spider {
    pub color: Color,
    pub phase: Phase,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Node {
    /// An open input or output port.
    Boundary,
    Spider(Spider),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Plain,
    Hadamard,
}

impl EdgeKind {
    pub fn toggled(self) -> EdgeKind {
        match self {
            EdgeKind::Plain => EdgeKind::Hadamard,
            EdgeKind::Hadamard => EdgeKind::Plain,
        }
    }

    /// Composition of two edges in series through an identity spider.
    pub fn then(self, other: EdgeKind) -> EdgeKind {
        if self == other {
            EdgeKind::Plain
        } else {
            EdgeKind::Hadamard
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn touches(&self, n: NodeId) -> bool {
        self.a == n || self.b == n
    }

    pub fn is_self_loop(&self) -> bool {
        self.a == self.b
    }

    pub fn connects(&self, x: NodeId, y: NodeId) -> bool {
        (self.a == x && self.b == y) || (self.a == y && self.b == x)
    }

    /// The endpoint that is not `n` (or `n` itself for a self-loop).
    pub fn other(&self, n: NodeId) -> NodeId {
        if self.a == n {
            self.b
        } else {
            self.a
        }
    }
}

/// An open graph of Z/X spiders. Rewrites return new values; a diagram is
/// never mutated once handed out.
#[derive(Clone, Debug, PartialEq)]
pub struct ZxDiagram {
    pub(crate) nodes: BTreeMap<NodeId, Node>,
    pub(crate) edges: Vec<Edge>,
    pub(crate) inputs: Vec<NodeId>,
    pub(crate) outputs: Vec<NodeId>,
    pub(crate) scalar: C64,
    pub(crate) next_id: NodeId,
}

impl Default for ZxDiagram {
    fn default() -> Self {
        Self::new()
    }
}

impl ZxDiagram {
    pub fn new() -> Self {
        ZxDiagram {
            nodes: BTreeMap::new(),
            edges: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            scalar: c64(1.0, 0.0),
            next_id: 0,
        }
    }

    fn fresh(&mut self, node: Node) -> NodeId {
        let id = self.next_id;
        self.next_id += 1;
        self.nodes.insert(id, node);
        id
    }

    pub fn add_spider(&mut self, color: Color, phase: Phase) -> NodeId {
        self.fresh(Node::Spider(Spider { color, phase }))
    }

    pub fn add_z(&mut self, phase: Phase) -> NodeId {
        self.add_spider(Color::Z, phase)
    }

    pub fn add_x(&mut self, phase: Phase) -> NodeId {
        self.add_spider(Color::X, phase)
    }

    pub fn add_input(&mut self) -> NodeId {
        let id = self.fresh(Node::Boundary);
        self.inputs.push(id);
        id
    }

    pub fn add_output(&mut self) -> NodeId {
        let id = self.fresh(Node::Boundary);
        self.outputs.push(id);
        id
    }

    pub fn add_edge(&mut self, a: NodeId, b: NodeId, kind: EdgeKind) {
        self.edges.push(Edge { a, b, kind });
    }

    pub fn plain(&mut self, a: NodeId, b: NodeId) {
        self.add_edge(a, b, EdgeKind::Plain);
    }

    pub fn hadamard(&mut self, a: NodeId, b: NodeId) {
        self.add_edge(a, b, EdgeKind::Hadamard);
    }

    pub fn set_scalar(&mut self, s: C64) {
        self.scalar = s;
    }

    pub fn scalar(&self) -> C64 {
        self.scalar
    }

    pub fn inputs(&self) -> &[NodeId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[NodeId] {
        &self.outputs
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Id the next created node will receive.
    pub fn next_id(&self) -> NodeId {
        self.next_id
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(&id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Node)> {
        self.nodes.iter().map(|(k, v)| (*k, v))
    }

    pub fn spider(&self, id: NodeId) -> Option<Spider> {
        match self.nodes.get(&id) {
            Some(Node::Spider(s)) => Some(*s),
            _ => None,
        }
    }

    pub fn spider_ids(&self) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|(_, n)| matches!(n, Node::Spider(_)))
            .map(|(k, _)| *k)
            .collect()
    }

    pub fn num_spiders(&self) -> usize {
        self.nodes
            .values()
            .filter(|n| matches!(n, Node::Spider(_)))
            .count()
    }

    pub(crate) fn spider_mut(&mut self, id: NodeId) -> &mut Spider {
        match self.nodes.get_mut(&id) {
            Some(Node::Spider(s)) => s,
            _ => panic!("node {id} is not a spider"),
        }
    }

    /// Indices into `edges()` touching `n`; self-loops appear once.
    pub fn incident(&self, n: NodeId) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.touches(n))
            .map(|(i, _)| i)
            .collect()
    }

    /// Number of edge ends at `n` (self-loops count twice).
    pub fn degree(&self, n: NodeId) -> usize {
        self.edges
            .iter()
            .map(|e| (e.a == n) as usize + (e.b == n) as usize)
            .sum()
    }

    pub fn edges_between(&self, x: NodeId, y: NodeId) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.connects(x, y))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn neighbors(&self, n: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .edges
            .iter()
            .filter(|e| e.touches(n))
            .map(|e| e.other(n))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub(crate) fn remove_node(&mut self, n: NodeId) {
        self.nodes.remove(&n);
        self.edges.retain(|e| !e.touches(n));
    }

    pub(crate) fn remove_edges(&mut self, mut idx: Vec<usize>) {
        idx.sort_unstable();
        idx.dedup();
        for i in idx.into_iter().rev() {
            self.edges.remove(i);
        }
    }

    /// Checks the structural invariants: endpoints exist, every boundary
    /// is listed exactly once as input or output and has degree 1, and the
    /// scalar is nonzero.
    pub fn validate(&self) -> Result<()> {
        for e in &self.edges {
            for end in [e.a, e.b] {
                if !self.nodes.contains_key(&end) {
                    return Err(Error::MalformedDiagram(format!(
                        "edge {}-{} references missing node {end}",
                        e.a, e.b
                    )));
                }
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for &b in self.inputs.iter().chain(&self.outputs) {
            if !seen.insert(b) {
                return Err(Error::MalformedDiagram(format!("boundary {b} listed twice")));
            }
            match self.nodes.get(&b) {
                Some(Node::Boundary) => {}
                _ => {
                    return Err(Error::MalformedDiagram(format!(
                        "boundary {b} is not a boundary node"
                    )))
                }
            }
            let d = self.degree(b);
            if d != 1 {
                return Err(Error::MalformedDiagram(format!(
                    "boundary {b} has degree {d}, expected 1"
                )));
            }
        }
        for (id, n) in &self.nodes {
            if matches!(n, Node::Boundary) && !seen.contains(id) {
                return Err(Error::MalformedDiagram(format!(
                    "boundary {id} is neither an input nor an output"
                )));
            }
        }
        if self.scalar.norm() == 0.0 || !self.scalar.is_finite() {
            return Err(Error::MalformedDiagram("scalar must be nonzero".into()));
        }
        Ok(())
    }
}

/// A wire `in - spider - out`; a convenient start for single-qubit chains.
pub fn single_spider(color: Color, phase: Phase) -> (ZxDiagram, NodeId) {
    let mut d = ZxDiagram::new();
    let i = d.add_input();
    let s = d.add_spider(color, phase);
    let o = d.add_output();
    d.plain(i, s);
    d.plain(s, o);
    (d, s)
}
