//! QAOA to measurement-pattern compilation.
//!
//! Every logical qubit is a wire whose current physical node (the carrier)
//! differs from the logical state by a Pauli frame `X^x Z^z`, with `x` and
//! `z` the parities of sets of measured nodes. Fragments extend the wires
//! and update the frames; nothing is ever corrected mid-pattern; frames are
//! folded into later measurement angles and flushed by terminal
//! corrections.
//!
//! Angle conventions match [`crate::gatesim`]: a phase gadget realizes
//! `ZZ(θ) = e^{iθ Z⊗Z}`, a Z rotation `RZ(θ) = e^{iθZ}` and an X rotation
//! `RX(θ) = e^{iθX}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rustworkx_core::petgraph::graph::UnGraph;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gatesim::{QaoaParams, PHASE_SCALE};
use crate::pattern::{Correction, MeasureCmd, MeasurementPattern, NodeId, Pauli, Plane};
use crate::problem::QuboProblem;
use crate::zx::Phase;

/// Sign of the YZ measurement angle of a gadget ancilla relative to `2θ`.
///
/// Measuring `a` at `α` after `CZ(a,u)`, `CZ(a,v)` leaves `e^{−iα/2·Z_uZ_v}`.
pub const EDGE_ANGLE_SIGN: f64 = -1.0;
/// Sign of the XY measurement angle of a mixer prime relative to `2θ`.
///
/// Teleporting through an XY measurement at `α` applies `H·e^{iα/2·Z}`.
pub const MIXER_ANGLE_SIGN: f64 = 1.0;

/// Largest pattern the compiler will emit.
pub const MAX_PATTERN_NODES: usize = 1 << 20;

/// Pauli frame of one wire.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Frame {
    pub x: BTreeSet<NodeId>,
    pub z: BTreeSet<NodeId>,
}

fn toggle(set: &mut BTreeSet<NodeId>, n: NodeId) {
    if !set.remove(&n) {
        set.insert(n);
    }
}

fn sym_diff(a: &BTreeSet<NodeId>, b: &BTreeSet<NodeId>) -> BTreeSet<NodeId> {
    a.symmetric_difference(b).copied().collect()
}

/// What a node is for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeRole {
    /// Starting node of a wire, an input or a `|+⟩` preparation.
    Initial { wire: usize },
    /// Gadget ancilla of a `Z_uZ_v` term.
    Edge { u: usize, v: usize },
    /// Ancilla of a single `Z_v` term.
    Linear { wire: usize },
    /// First teleportation node of an X rotation.
    Prime { wire: usize },
    /// Carrier produced by an X rotation.
    Carrier { wire: usize },
}

impl NodeRole {
    /// Wires whose frames this node's outcome can enter.
    pub fn wires(&self) -> Vec<usize> {
        match *self {
            NodeRole::Edge { u, v } => vec![u, v],
            NodeRole::Initial { wire }
            | NodeRole::Linear { wire }
            | NodeRole::Prime { wire }
            | NodeRole::Carrier { wire } => vec![wire],
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeInfo {
    pub node: NodeId,
    pub role: NodeRole,
    /// Layer index, `None` for initial nodes.
    pub layer: Option<usize>,
}

/// A pattern under construction with open wires.
#[derive(Clone, Debug)]
pub struct FragmentContext {
    nodes: Vec<NodeId>,
    inputs: Vec<NodeId>,
    entangle: Vec<(NodeId, NodeId)>,
    measurements: Vec<MeasureCmd>,
    carriers: Vec<NodeId>,
    frames: Vec<Frame>,
    info: Vec<NodeInfo>,
    layer: Option<usize>,
}

/// A closed-off view of a context: the pattern with the carriers as outputs
/// and the frames flushed as corrections, together with the frames.
#[derive(Clone, Debug)]
pub struct PatternFragment {
    pub pattern: MeasurementPattern,
    pub carriers: Vec<NodeId>,
    pub frames: Vec<Frame>,
}

impl FragmentContext {
    fn empty() -> Self {
        FragmentContext {
            nodes: Vec::new(),
            inputs: Vec::new(),
            entangle: Vec::new(),
            measurements: Vec::new(),
            carriers: Vec::new(),
            frames: Vec::new(),
            info: Vec::new(),
            layer: None,
        }
    }

    /// `n` wires starting on pattern inputs.
    pub fn with_inputs(n: usize) -> Self {
        let mut c = Self::empty();
        for w in 0..n {
            let id = c.fresh(NodeRole::Initial { wire: w });
            c.inputs.push(id);
            c.carriers.push(id);
            c.frames.push(Frame::default());
        }
        c
    }

    /// `n` wires starting in `|+⟩`; the pattern has no inputs.
    pub fn plus(n: usize) -> Self {
        let mut c = Self::empty();
        for w in 0..n {
            let id = c.fresh(NodeRole::Initial { wire: w });
            c.carriers.push(id);
            c.frames.push(Frame::default());
        }
        c
    }

    pub fn wires(&self) -> usize {
        self.carriers.len()
    }

    pub fn carrier(&self, w: usize) -> Option<NodeId> {
        self.carriers.get(w).copied()
    }

    pub fn frame(&self, w: usize) -> Option<&Frame> {
        self.frames.get(w)
    }

    pub fn node_info(&self) -> &[NodeInfo] {
        &self.info
    }

    /// Tags subsequently created nodes with a layer index.
    pub fn set_layer(&mut self, layer: Option<usize>) {
        self.layer = layer;
    }

    fn fresh(&mut self, role: NodeRole) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(id);
        self.info.push(NodeInfo {
            node: id,
            role,
            layer: self.layer,
        });
        id
    }

    fn check_wire(&self, w: usize) -> Result<()> {
        if w >= self.carriers.len() {
            return Err(Error::CompilerState(format!(
                "wire {w} does not exist ({} wires)",
                self.carriers.len()
            )));
        }
        Ok(())
    }

    fn guard(&self, extra: usize) -> Result<()> {
        let want = self.nodes.len() + extra;
        if want > MAX_PATTERN_NODES {
            return Err(Error::limit("pattern nodes", MAX_PATTERN_NODES, want));
        }
        Ok(())
    }

    /// `e^{iθ Z_u Z_v}` through one YZ-measured ancilla joined to both
    /// carriers. The outcome enters the Z frames of `u` and `v`.
    pub fn phase_gadget(&mut self, u: usize, v: usize, theta: f64) -> Result<NodeId> {
        self.check_wire(u)?;
        self.check_wire(v)?;
        if u == v {
            return Err(Error::CompilerState(format!(
                "phase gadget needs two distinct wires, got {u} twice"
            )));
        }
        self.guard(1)?;
        let a = self.fresh(NodeRole::Edge {
            u: u.min(v),
            v: u.max(v),
        });
        self.entangle.push((a, self.carriers[u]));
        self.entangle.push((a, self.carriers[v]));
        let mut m = MeasureCmd::new(a, Plane::YZ, Phase::from_radians(EDGE_ANGLE_SIGN * 2.0 * theta));
        m.sign_domain = sym_diff(&self.frames[u].x, &self.frames[v].x);
        self.measurements.push(m);
        toggle(&mut self.frames[u].z, a);
        toggle(&mut self.frames[v].z, a);
        Ok(a)
    }

    /// `e^{iθ Z_v}` through a one-legged gadget: a YZ-measured ancilla
    /// joined to the carrier. The outcome enters the Z frame of `v`.
    pub fn z_rotation(&mut self, v: usize, theta: f64) -> Result<NodeId> {
        self.check_wire(v)?;
        self.guard(1)?;
        let b = self.fresh(NodeRole::Linear { wire: v });
        self.entangle.push((b, self.carriers[v]));
        let mut m = MeasureCmd::new(b, Plane::YZ, Phase::from_radians(EDGE_ANGLE_SIGN * 2.0 * theta));
        m.sign_domain = self.frames[v].x.clone();
        self.measurements.push(m);
        toggle(&mut self.frames[v].z, b);
        Ok(b)
    }

    /// `e^{iθ_k X}` on every listed wire by two teleportation steps each.
    ///
    /// All carriers are measured before any prime, so the XY angle of each
    /// prime can depend on its own carrier's outcome.
    pub fn x_rotations(&mut self, rotations: &[(usize, f64)]) -> Result<()> {
        let mut seen = BTreeSet::new();
        for &(v, _) in rotations {
            self.check_wire(v)?;
            if !seen.insert(v) {
                return Err(Error::CompilerState(format!(
                    "wire {v} rotated twice in one mixer pass"
                )));
            }
        }
        self.guard(2 * rotations.len())?;
        let mut staged = Vec::with_capacity(rotations.len());
        for &(v, theta) in rotations {
            let c = self.carriers[v];
            let p = self.fresh(NodeRole::Prime { wire: v });
            let n = self.fresh(NodeRole::Carrier { wire: v });
            self.entangle.push((c, p));
            self.entangle.push((p, n));
            // Z byproducts on the carrier become a π shift of its angle
            let mut m = MeasureCmd::new(c, Plane::XY, Phase::zero());
            m.offset_domain = self.frames[v].z.clone();
            self.measurements.push(m);
            staged.push((v, theta, c, p, n));
        }
        for (v, theta, c, p, n) in staged {
            // after the first step the prime holds X^c Z^x H|ψ⟩
            let mut m = MeasureCmd::new(p, Plane::XY, Phase::from_radians(MIXER_ANGLE_SIGN * 2.0 * theta));
            m.sign_domain = [c].into();
            m.offset_domain = std::mem::take(&mut self.frames[v].x);
            self.measurements.push(m);
            self.carriers[v] = n;
            self.frames[v] = Frame {
                x: [p].into(),
                z: [c].into(),
            };
        }
        Ok(())
    }

    pub fn x_rotation(&mut self, v: usize, theta: f64) -> Result<()> {
        self.x_rotations(&[(v, theta)])
    }

    /// The pattern so far with carriers as outputs and frames flushed.
    pub fn fragment(&self) -> PatternFragment {
        let mut corrections = Vec::new();
        for (w, f) in self.frames.iter().enumerate() {
            if !f.x.is_empty() {
                corrections.push(Correction {
                    node: self.carriers[w],
                    pauli: Pauli::X,
                    domain: f.x.clone(),
                });
            }
        }
        for (w, f) in self.frames.iter().enumerate() {
            if !f.z.is_empty() {
                corrections.push(Correction {
                    node: self.carriers[w],
                    pauli: Pauli::Z,
                    domain: f.z.clone(),
                });
            }
        }
        PatternFragment {
            pattern: MeasurementPattern {
                nodes: self.nodes.clone(),
                inputs: self.inputs.clone(),
                outputs: self.carriers.clone(),
                entangle: self.entangle.clone(),
                measurements: self.measurements.clone(),
                corrections,
            },
            carriers: self.carriers.clone(),
            frames: self.frames.clone(),
        }
    }
}

/// Phase gadget fragment on wires `u`, `v` of `ctx` realizing `ZZ(θ)`.
pub fn compile_phase_gadget(
    ctx: &mut FragmentContext,
    u: usize,
    v: usize,
    theta: f64,
) -> Result<PatternFragment> {
    ctx.phase_gadget(u, v, theta)?;
    Ok(ctx.fragment())
}

/// Z rotation fragment realizing `RZ(θ)`.
pub fn compile_z_rotation(ctx: &mut FragmentContext, v: usize, theta: f64) -> Result<PatternFragment> {
    ctx.z_rotation(v, theta)?;
    Ok(ctx.fragment())
}

/// X rotation fragment realizing `RX(θ)`.
pub fn compile_x_rotation(ctx: &mut FragmentContext, v: usize, theta: f64) -> Result<PatternFragment> {
    ctx.x_rotation(v, theta)?;
    Ok(ctx.fragment())
}

/// A compiled QAOA instance with the role of every node.
#[derive(Clone, Debug)]
pub struct CompiledQaoa {
    pub pattern: MeasurementPattern,
    pub nodes: Vec<NodeInfo>,
}

/// The layered pattern for `q` at `params`; outputs are the final carriers
/// with output `k` holding vertex `k`.
pub fn compile_qaoa_annotated(q: &QuboProblem, params: &QaoaParams) -> Result<CompiledQaoa> {
    params.validate()?;
    let n = q.n();
    let estimate = resource_estimate(q, params.p());
    let total = n + estimate.ancillas_total;
    if total > MAX_PATTERN_NODES {
        return Err(Error::limit("pattern nodes", MAX_PATTERN_NODES, total));
    }
    let mut ctx = FragmentContext::plus(n);
    for (k, (&gamma, &beta)) in params.gammas.iter().zip(&params.betas).enumerate() {
        ctx.set_layer(Some(k));
        for ((u, v), j) in q.quadratic() {
            ctx.phase_gadget(u, v, -gamma * j * PHASE_SCALE)?;
        }
        for (v, h) in q.linear() {
            ctx.z_rotation(v, -gamma * h * PHASE_SCALE)?;
        }
        let mixers: Vec<(usize, f64)> = (0..n).map(|v| (v, -beta)).collect();
        ctx.x_rotations(&mixers)?;
    }
    let frag = ctx.fragment();
    Ok(CompiledQaoa {
        pattern: frag.pattern,
        nodes: ctx.info,
    })
}

pub fn compile_qaoa(q: &QuboProblem, params: &QaoaParams) -> Result<MeasurementPattern> {
    Ok(compile_qaoa_annotated(q, params)?.pattern)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LayerResources {
    pub edge_ancillas: usize,
    pub vertex_ancillas: usize,
    pub linear_ancillas: usize,
    pub cz_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResourceEstimate {
    pub format: u32,
    pub depth: usize,
    pub logical_qubits: usize,
    pub edges: usize,
    pub linear_terms: usize,
    pub ancillas_total: usize,
    pub entangling_edges_total: usize,
    pub per_layer: Vec<LayerResources>,
    /// `p(|E| + 2|V|)`.
    pub bound_qubits: usize,
    /// `p(2|E| + 2|V|)`.
    pub bound_edges: usize,
    pub gate_model_qubits: usize,
    /// `2p|E|` CNOTs for the cost layers.
    pub gate_model_entangling: usize,
}

impl ResourceEstimate {
    /// Whether the counts meet the closed-form bounds, allowing `p·|V_h|`
    /// extra for linear terms.
    pub fn within_bounds(&self) -> bool {
        let extra = self.depth * self.linear_terms;
        self.ancillas_total <= self.bound_qubits + extra
            && self.entangling_edges_total <= self.bound_edges + extra
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Exact counts of the construction used by [`compile_qaoa`].
pub fn resource_estimate(q: &QuboProblem, depth: usize) -> ResourceEstimate {
    let n = q.n();
    let e = q.quadratic().count();
    let h = q.linear().count();
    let layer = LayerResources {
        edge_ancillas: e,
        vertex_ancillas: 2 * n,
        linear_ancillas: h,
        cz_count: 2 * e + 2 * n + h,
    };
    ResourceEstimate {
        format: 1,
        depth,
        logical_qubits: n,
        edges: e,
        linear_terms: h,
        ancillas_total: depth * (e + 2 * n + h),
        entangling_edges_total: depth * layer.cz_count,
        per_layer: vec![layer; depth],
        bound_qubits: depth * (e + 2 * n),
        bound_edges: depth * (2 * e + 2 * n),
        gate_model_qubits: n,
        gate_model_entangling: 2 * depth * e,
    }
}

/// Counts read off an emitted pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PatternCounts {
    pub nodes: usize,
    /// Nodes other than the initial wire nodes.
    pub ancillas: usize,
    pub entangling_edges: usize,
}

/// Recounts a pattern whose wires equal its outputs.
pub fn recount(p: &MeasurementPattern) -> PatternCounts {
    PatternCounts {
        nodes: p.nodes.len(),
        ancillas: p.nodes.len() - p.outputs.len(),
        entangling_edges: p.entangle.len(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphNode {
    pub id: NodeId,
    pub input: bool,
    pub output: bool,
    /// Position in the measurement sequence.
    pub order: Option<usize>,
}

/// Graph-state skeleton of a pattern.
#[derive(Clone, Debug, Serialize)]
pub struct ResourceGraph {
    pub format: u32,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<[NodeId; 2]>,
    pub planar: bool,
}

impl ResourceGraph {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serialization cannot fail")
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph resource {\n");
        for n in &self.nodes {
            let label = match n.order {
                Some(k) => format!("{} (m{})", n.id, k),
                None => format!("{}", n.id),
            };
            let shape = if n.output {
                "doublecircle"
            } else if n.input {
                "box"
            } else {
                "circle"
            };
            let _ = writeln!(s, "  n{} [label=\"{}\", shape={}];", n.id, label, shape);
        }
        for [a, b] in &self.edges {
            let _ = writeln!(s, "  n{a} -- n{b};");
        }
        let _ = writeln!(s, "  // planar: {}", self.planar);
        s.push_str("}\n");
        s
    }
}

pub fn export_resource_graph(p: &MeasurementPattern) -> ResourceGraph {
    let order = p.measurement_index();
    let inputs: BTreeSet<NodeId> = p.inputs.iter().copied().collect();
    let outputs: BTreeSet<NodeId> = p.outputs.iter().copied().collect();
    let index: BTreeMap<NodeId, u32> = p.nodes.iter().enumerate().map(|(i, &n)| (n, i as u32)).collect();
    let g = UnGraph::<(), ()>::from_edges(
        p.entangle
            .iter()
            .filter_map(|(a, b)| Some((*index.get(a)?, *index.get(b)?))),
    );
    ResourceGraph {
        format: 1,
        nodes: p
            .nodes
            .iter()
            .map(|&id| GraphNode {
                id,
                input: inputs.contains(&id),
                output: outputs.contains(&id),
                order: order.get(&id).copied(),
            })
            .collect(),
        edges: p.entangle.iter().map(|&(a, b)| [a, b]).collect(),
        planar: rustworkx_core::planar::is_planar(&g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::check_determinism;
    use crate::problem::{maxcut_to_qubo, Graph};

    #[test]
    fn k3_counts() {
        let q = maxcut_to_qubo(&Graph::complete(3)).unwrap();
        let r = resource_estimate(&q, 1);
        assert_eq!((r.ancillas_total, r.entangling_edges_total), (9, 12));
        assert_eq!((r.bound_qubits, r.bound_edges), (9, 12));
        let p = compile_qaoa(&q, &QaoaParams::new(vec![0.3], vec![0.2]).unwrap()).unwrap();
        let c = recount(&p);
        assert_eq!((c.ancillas, c.entangling_edges), (9, 12));
        assert!(p.validate().is_empty());
    }

    #[test]
    fn p3_counts() {
        let q = maxcut_to_qubo(&Graph::path(3)).unwrap();
        let r = resource_estimate(&q, 2);
        assert_eq!((r.ancillas_total, r.entangling_edges_total), (16, 20));
        assert!(r.within_bounds());
    }

    #[test]
    fn measurement_order_is_layer_major() {
        let q = maxcut_to_qubo(&Graph::path(3)).unwrap();
        let c = compile_qaoa_annotated(&q, &QaoaParams::new(vec![0.1], vec![0.2]).unwrap()).unwrap();
        let roles: Vec<_> = c
            .pattern
            .measurements
            .iter()
            .map(|m| match c.nodes[m.node].role {
                NodeRole::Edge { .. } => 'e',
                NodeRole::Linear { .. } => 'l',
                NodeRole::Initial { .. } | NodeRole::Carrier { .. } => 'c',
                NodeRole::Prime { .. } => 'p',
            })
            .collect();
        assert_eq!(roles.iter().collect::<String>(), "eecccppp");
    }

    #[test]
    fn dead_wire_rejected() {
        let mut ctx = FragmentContext::plus(2);
        assert!(matches!(
            ctx.phase_gadget(0, 2, 0.1),
            Err(Error::CompilerState(_))
        ));
        assert!(matches!(
            ctx.phase_gadget(1, 1, 0.1),
            Err(Error::CompilerState(_))
        ));
        assert!(matches!(ctx.x_rotation(5, 0.1), Err(Error::CompilerState(_))));
    }

    #[test]
    fn fragments_are_deterministic() {
        let mut ctx = FragmentContext::with_inputs(2);
        ctx.phase_gadget(0, 1, 0.8).unwrap();
        ctx.x_rotation(0, 0.3).unwrap();
        ctx.z_rotation(0, -0.4).unwrap();
        ctx.phase_gadget(0, 1, 0.2).unwrap();
        assert!(check_determinism(&ctx.fragment().pattern).unwrap());
    }

    #[test]
    fn identity_wire_graph() {
        let p = MeasurementPattern {
            nodes: vec![0, 1],
            inputs: vec![0],
            outputs: vec![1],
            entangle: vec![(0, 1)],
            measurements: vec![MeasureCmd::new(0, Plane::XY, Phase::zero())],
            corrections: vec![],
        };
        let g = export_resource_graph(&p);
        assert_eq!(g.nodes.len(), 2);
        assert_eq!(g.edges, vec![[0, 1]]);
        assert!(g.planar);
        assert!(g.to_dot().contains("n0 -- n1"));
    }
}
