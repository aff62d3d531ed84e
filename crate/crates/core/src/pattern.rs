//! Measurement patterns and their exact execution.
//!
//! A pattern prepares every non-input node in `|+⟩`, applies CZs, measures
//! non-output nodes in order with adaptive angles
//! `θ = (−1)^{parity(sign_domain)}·angle + π·parity(offset_domain)` and
//! finally applies Pauli corrections to the outputs.
//!
//! Execution is lazy: a node is prepared just before it is first needed and
//! dropped from the register as soon as it is measured, so memory follows
//! the active window rather than the node count.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::FRAC_1_SQRT_2;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gatesim::Statevector;
use crate::linalg::{c64, C64};
use crate::zx::Phase;

pub type NodeId = usize;

/// Widest active window the runtime will simulate.
pub const MAX_WINDOW: usize = 20;
/// Most measurements [`enumerate_branches`] will expand without merging.
pub const MAX_ENUMERATED_MEASUREMENTS: usize = 20;
/// Most amplitudes held across all live branches during exact execution.
pub const MAX_STORED_AMPLITUDES: usize = 1 << 24;
/// Tolerance used by [`check_determinism`].
pub const DETERMINISM_TOL: f64 = 1e-9;
/// Outcomes whose conditional probability falls below this are dropped.
const OUTCOME_FLOOR: f64 = 1e-14;
/// States closer than this (up to phase) are merged during exploration.
const MERGE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Plane {
    /// Basis `(|0⟩ ± e^{iθ}|1⟩)/√2`.
    #[default]
    XY,
    /// Basis `cos(θ/2)|0⟩ + i·sin(θ/2)|1⟩`, `sin(θ/2)|0⟩ − i·cos(θ/2)|1⟩`.
    YZ,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Z,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureCmd {
    pub node: NodeId,
    pub plane: Plane,
    pub angle: Phase,
    pub sign_domain: BTreeSet<NodeId>,
    pub offset_domain: BTreeSet<NodeId>,
}

impl MeasureCmd {
    pub fn new(node: NodeId, plane: Plane, angle: Phase) -> Self {
        MeasureCmd {
            node,
            plane,
            angle,
            sign_domain: BTreeSet::new(),
            offset_domain: BTreeSet::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correction {
    pub node: NodeId,
    pub pauli: Pauli,
    pub domain: BTreeSet<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct MeasurementPattern {
    pub nodes: Vec<NodeId>,
    pub inputs: Vec<NodeId>,
    pub outputs: Vec<NodeId>,
    pub entangle: Vec<(NodeId, NodeId)>,
    pub measurements: Vec<MeasureCmd>,
    pub corrections: Vec<Correction>,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Violation {
    #[error("node {0} is declared twice")]
    DuplicateNode(NodeId),
    #[error("{context} references unknown node {node}")]
    UnknownNode { context: &'static str, node: NodeId },
    #[error("entangle pair ({0}, {0}) is a self-loop")]
    EntangleSelfLoop(NodeId),
    #[error("entangle pair ({0}, {1}) appears twice")]
    DuplicateEntangle(NodeId, NodeId),
    #[error("node {0} is measured more than once")]
    MeasuredTwice(NodeId),
    #[error("non-output node {0} is never measured")]
    NotMeasured(NodeId),
    #[error("output node {0} is measured")]
    OutputMeasured(NodeId),
    #[error("{kind} domain of node {node} cites {cited}, which is not measured earlier")]
    Causality {
        node: NodeId,
        cited: NodeId,
        kind: &'static str,
    },
    #[error("correction targets non-output node {0}")]
    CorrectionOnNonOutput(NodeId),
}

impl MeasurementPattern {
    /// Every causality and uniqueness violation; empty iff valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let mut nodes = BTreeSet::new();
        for &n in &self.nodes {
            if !nodes.insert(n) {
                v.push(Violation::DuplicateNode(n));
            }
        }
        let known = |n: NodeId, context: &'static str, v: &mut Vec<Violation>| {
            if !nodes.contains(&n) {
                v.push(Violation::UnknownNode { context, node: n });
            }
        };
        for &n in &self.inputs {
            known(n, "inputs", &mut v);
        }
        for &n in &self.outputs {
            known(n, "outputs", &mut v);
        }
        let mut pairs = BTreeSet::new();
        for &(a, b) in &self.entangle {
            known(a, "entangle", &mut v);
            known(b, "entangle", &mut v);
            if a == b {
                v.push(Violation::EntangleSelfLoop(a));
            } else if !pairs.insert((a.min(b), a.max(b))) {
                v.push(Violation::DuplicateEntangle(a.min(b), a.max(b)));
            }
        }
        let outputs: BTreeSet<NodeId> = self.outputs.iter().copied().collect();
        let mut measured = BTreeSet::new();
        for m in &self.measurements {
            known(m.node, "measurement", &mut v);
            if outputs.contains(&m.node) {
                v.push(Violation::OutputMeasured(m.node));
            }
            for (kind, dom) in [("sign", &m.sign_domain), ("offset", &m.offset_domain)] {
                for &c in dom {
                    if !measured.contains(&c) {
                        v.push(Violation::Causality {
                            node: m.node,
                            cited: c,
                            kind,
                        });
                    }
                }
            }
            if !measured.insert(m.node) {
                v.push(Violation::MeasuredTwice(m.node));
            }
        }
        for &n in &nodes {
            if !outputs.contains(&n) && !measured.contains(&n) {
                v.push(Violation::NotMeasured(n));
            }
        }
        for c in &self.corrections {
            if !outputs.contains(&c.node) {
                v.push(Violation::CorrectionOnNonOutput(c.node));
            }
            for &d in &c.domain {
                if !measured.contains(&d) {
                    v.push(Violation::Causality {
                        node: c.node,
                        cited: d,
                        kind: "correction",
                    });
                }
            }
        }
        v
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            let text: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            Err(Error::InvalidPattern(text.join("; ")))
        }
    }

    /// The position of each node in the measurement order.
    pub fn measurement_index(&self) -> BTreeMap<NodeId, usize> {
        self.measurements
            .iter()
            .enumerate()
            .map(|(i, m)| (m.node, i))
            .collect()
    }

    /// The same pattern with its CZ list permuted by `order`.
    pub fn with_entangle_order(&self, order: &[usize]) -> MeasurementPattern {
        let mut p = self.clone();
        p.entangle = order.iter().map(|&i| self.entangle[i]).collect();
        p
    }
}

#[derive(Clone, Debug)]
enum Op {
    Prepare(NodeId),
    Cz(NodeId, NodeId),
    Measure(usize),
}

/// Outcome-independent command schedule with register positions resolved.
#[derive(Clone, Debug)]
struct Schedule {
    ops: Vec<ResolvedOp>,
    /// Final register order as node ids.
    final_layout: Vec<NodeId>,
    peak: usize,
}

#[derive(Clone, Debug)]
enum ResolvedOp {
    /// Append a `|+⟩` qubit at the top of the register.
    Prepare,
    Cz(usize, usize),
    /// Measure the qubit at this register position (command index).
    Measure {
        pos: usize,
        cmd: usize,
    },
}

fn build_schedule(p: &MeasurementPattern) -> Result<Schedule> {
    p.ensure_valid()?;
    let mut incident: HashMap<NodeId, Vec<usize>> = HashMap::new();
    for (i, &(a, b)) in p.entangle.iter().enumerate() {
        incident.entry(a).or_default().push(i);
        incident.entry(b).or_default().push(i);
    }
    let mut applied = vec![false; p.entangle.len()];
    let mut layout: Vec<NodeId> = p.inputs.clone();
    let mut ops = Vec::new();
    let mut peak = layout.len();
    let ensure = |n: NodeId, layout: &mut Vec<NodeId>, ops: &mut Vec<Op>| {
        if !layout.contains(&n) {
            layout.push(n);
            ops.push(Op::Prepare(n));
        }
    };
    let mut raw = Vec::new();
    for (ci, m) in p.measurements.iter().enumerate() {
        for &e in incident.get(&m.node).map(Vec::as_slice).unwrap_or(&[]) {
            if !applied[e] {
                let (a, b) = p.entangle[e];
                ensure(a, &mut layout, &mut raw);
                ensure(b, &mut layout, &mut raw);
                raw.push(Op::Cz(a, b));
                applied[e] = true;
                peak = peak.max(layout.len());
            }
        }
        ensure(m.node, &mut layout, &mut raw);
        peak = peak.max(layout.len());
        raw.push(Op::Measure(ci));
        layout.retain(|&n| n != m.node);
    }
    for &o in &p.outputs {
        ensure(o, &mut layout, &mut raw);
    }
    for (e, &(a, b)) in p.entangle.iter().enumerate() {
        if !applied[e] {
            raw.push(Op::Cz(a, b));
        }
    }
    peak = peak.max(layout.len());
    if peak > MAX_WINDOW {
        return Err(Error::limit("active window qubits", MAX_WINDOW, peak));
    }
    // resolve node ids to positions by replaying the layout
    let mut layout: Vec<NodeId> = p.inputs.clone();
    let pos = |layout: &Vec<NodeId>, n: NodeId| layout.iter().position(|&x| x == n).unwrap();
    for op in raw {
        ops.push(match op {
            Op::Prepare(n) => {
                layout.push(n);
                ResolvedOp::Prepare
            }
            Op::Cz(a, b) => ResolvedOp::Cz(pos(&layout, a), pos(&layout, b)),
            Op::Measure(ci) => {
                let n = p.measurements[ci].node;
                let at = pos(&layout, n);
                layout.remove(at);
                ResolvedOp::Measure { pos: at, cmd: ci }
            }
        });
    }
    Ok(Schedule {
        ops,
        final_layout: layout,
        peak,
    })
}

/// Domains of all commands, each tagged with the step that consumes it.
struct Domains {
    /// For each measured node, the domains containing it.
    containing: HashMap<NodeId, Vec<usize>>,
    words: usize,
    /// `future[t]`: bit mask of domains still needed once `t` measurements
    /// are done.
    future: Vec<Vec<u64>>,
    sign: Vec<usize>,
    offset: Vec<usize>,
    correction: Vec<usize>,
}

impl Domains {
    fn new(p: &MeasurementPattern) -> Self {
        let mut owner = Vec::new();
        let mut sets: Vec<&BTreeSet<NodeId>> = Vec::new();
        let mut sign = Vec::new();
        let mut offset = Vec::new();
        for (i, m) in p.measurements.iter().enumerate() {
            sign.push(sets.len());
            sets.push(&m.sign_domain);
            owner.push(i);
            offset.push(sets.len());
            sets.push(&m.offset_domain);
            owner.push(i);
        }
        let mut correction = Vec::new();
        for c in &p.corrections {
            correction.push(sets.len());
            sets.push(&c.domain);
            owner.push(usize::MAX);
        }
        let mut containing: HashMap<NodeId, Vec<usize>> = HashMap::new();
        for (d, s) in sets.iter().enumerate() {
            for &n in s.iter() {
                containing.entry(n).or_default().push(d);
            }
        }
        let words = sets.len().div_ceil(64).max(1);
        let future = (0..=p.measurements.len())
            .map(|t| {
                let mut mask = vec![0u64; words];
                for (d, &o) in owner.iter().enumerate() {
                    if o >= t {
                        mask[d / 64] |= 1 << (d % 64);
                    }
                }
                mask
            })
            .collect();
        Domains {
            containing,
            words,
            future,
            sign,
            offset,
            correction,
        }
    }
}

fn bit(words: &[u64], d: usize) -> bool {
    (words[d / 64] >> (d % 64)) & 1 == 1
}

#[derive(Clone, Debug)]
struct Branch {
    amps: Vec<C64>,
    probability: f64,
    parities: Vec<u64>,
    outcomes: Vec<u8>,
}

/// Bras `⟨b_s|` of a single-qubit measurement at effective angle `theta`.
fn measurement_bra(plane: Plane, theta: f64, s: u8) -> [C64; 2] {
    match plane {
        Plane::XY => {
            let e = C64::from_polar(FRAC_1_SQRT_2, -theta);
            let sign = if s == 0 { 1.0 } else { -1.0 };
            [c64(FRAC_1_SQRT_2, 0.0), e * sign]
        }
        Plane::YZ => {
            let (c, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
            if s == 0 {
                [c64(c, 0.0), c64(0.0, -si)]
            } else {
                [c64(si, 0.0), c64(0.0, c)]
            }
        }
    }
}

fn prepare_plus(amps: &[C64]) -> Vec<C64> {
    let h = FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(2 * amps.len());
    out.extend(amps.iter().map(|a| a * h));
    out.extend(amps.iter().map(|a| a * h));
    out
}

fn apply_cz(amps: &mut [C64], a: usize, b: usize) {
    let m = (1 << a) | (1 << b);
    for (k, amp) in amps.iter_mut().enumerate() {
        if k & m == m {
            *amp = -*amp;
        }
    }
}

/// Contracts qubit `pos` with `bra`; returns the unnormalized remainder.
fn project(amps: &[C64], pos: usize, bra: [C64; 2]) -> Vec<C64> {
    let low = (1usize << pos) - 1;
    let half = amps.len() / 2;
    (0..half)
        .map(|k| {
            let i0 = (k & low) | ((k & !low) << 1);
            bra[0] * amps[i0] + bra[1] * amps[i0 | (1 << pos)]
        })
        .collect()
}

fn norm_sqr(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

fn phase_distance(a: &[C64], b: &[C64]) -> f64 {
    let ip: C64 = b.iter().zip(a).map(|(x, y)| x.conj() * y).sum();
    let ph = if ip.norm() == 0.0 {
        c64(1.0, 0.0)
    } else {
        ip / ip.norm()
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - ph * y).norm())
        .fold(0.0, f64::max)
}

struct Engine<'a> {
    p: &'a MeasurementPattern,
    schedule: Schedule,
    domains: Domains,
}

impl<'a> Engine<'a> {
    fn new(p: &'a MeasurementPattern, input: &Statevector) -> Result<Self> {
        let schedule = build_schedule(p)?;
        if input.n() != p.inputs.len() {
            return Err(Error::InvalidInput(format!(
                "pattern has {} inputs but the state has {} qubits",
                p.inputs.len(),
                input.n()
            )));
        }
        Ok(Engine {
            p,
            schedule,
            domains: Domains::new(p),
        })
    }

    fn angle(&self, b: &Branch, cmd: usize) -> f64 {
        let m = &self.p.measurements[cmd];
        let base = m.angle.radians();
        let flip = bit(&b.parities, self.domains.sign[cmd]);
        let shift = bit(&b.parities, self.domains.offset[cmd]);
        (if flip { -base } else { base }) + if shift { std::f64::consts::PI } else { 0.0 }
    }

    fn record(&self, b: &mut Branch, cmd: usize, s: u8, keep_outcomes: bool) {
        if keep_outcomes {
            b.outcomes.push(s);
        }
        if s == 1 {
            let node = self.p.measurements[cmd].node;
            for &d in self.domains.containing.get(&node).into_iter().flatten() {
                b.parities[d / 64] ^= 1 << (d % 64);
            }
        }
    }

    /// Both outcome branches of measuring `cmd` at `pos`, with conditional
    /// probabilities.
    fn split(&self, b: &Branch, pos: usize, cmd: usize) -> [(Vec<C64>, f64); 2] {
        let theta = self.angle(b, cmd);
        let plane = self.p.measurements[cmd].plane;
        [0u8, 1].map(|s| {
            let out = project(&b.amps, pos, measurement_bra(plane, theta, s));
            let p = norm_sqr(&out);
            (out, p)
        })
    }

    fn finish(&self, mut b: Branch) -> (Statevector, f64, Vec<u8>) {
        let layout = &self.schedule.final_layout;
        for (ci, c) in self.p.corrections.iter().enumerate() {
            if bit(&b.parities, self.domains.correction[ci]) {
                let q = layout.iter().position(|&n| n == c.node).unwrap();
                let mask = 1 << q;
                match c.pauli {
                    Pauli::X => {
                        for k in 0..b.amps.len() {
                            if k & mask == 0 {
                                b.amps.swap(k, k | mask);
                            }
                        }
                    }
                    Pauli::Z => {
                        for (k, a) in b.amps.iter_mut().enumerate() {
                            if k & mask != 0 {
                                *a = -*a;
                            }
                        }
                    }
                }
            }
        }
        // reorder register to the declared output order
        let perm: Vec<usize> = self
            .p
            .outputs
            .iter()
            .map(|o| layout.iter().position(|n| n == o).unwrap())
            .collect();
        let n = perm.len();
        let mut amps = vec![c64(0.0, 0.0); 1 << n];
        for (k, a) in b.amps.iter().enumerate() {
            let idx = (0..n).fold(0, |acc, j| acc | (((k >> perm[j]) & 1) << j));
            amps[idx] = *a;
        }
        let norm = norm_sqr(&amps).sqrt();
        for a in amps.iter_mut() {
            *a /= norm;
        }
        (Statevector::from_raw(n, amps), b.probability, b.outcomes)
    }

    fn initial(&self, input: &Statevector) -> Branch {
        Branch {
            amps: input.amplitudes().to_vec(),
            probability: 1.0,
            parities: vec![0; self.domains.words],
            outcomes: Vec::new(),
        }
    }

    /// Breadth-first expansion of every outcome. With `merge`, branches
    /// whose future-relevant parities agree and whose states are equal up
    /// to phase are combined.
    fn expand(&self, input: &Statevector, merge: bool) -> Result<Expansion> {
        let mut branches = vec![self.initial(input)];
        let mut stats = Expansion::default();
        let mut done = 0;
        for op in &self.schedule.ops {
            match *op {
                ResolvedOp::Prepare => {
                    for b in branches.iter_mut() {
                        b.amps = prepare_plus(&b.amps);
                    }
                }
                ResolvedOp::Cz(a, c) => {
                    for b in branches.iter_mut() {
                        apply_cz(&mut b.amps, a, c);
                    }
                }
                ResolvedOp::Measure { pos, cmd } => {
                    let mut next = Vec::with_capacity(branches.len() * 2);
                    for b in &branches {
                        let parts = self.split(b, pos, cmd);
                        let total = parts[0].1 + parts[1].1;
                        let p0 = parts[0].1 / total;
                        stats.max_outcome_bias = stats.max_outcome_bias.max((p0 - 0.5).abs());
                        for (s, (amps, pr)) in parts.into_iter().enumerate() {
                            let cond = pr / total;
                            if cond < OUTCOME_FLOOR {
                                stats.dropped_mass += b.probability * cond;
                                continue;
                            }
                            let scale = 1.0 / pr.sqrt();
                            let mut nb = Branch {
                                amps: amps.into_iter().map(|a| a * scale).collect(),
                                probability: b.probability * cond,
                                parities: b.parities.clone(),
                                outcomes: b.outcomes.clone(),
                            };
                            self.record(&mut nb, cmd, s as u8, !merge);
                            next.push(nb);
                        }
                        let stored = next.len() * (b.amps.len() / 2);
                        if stored > MAX_STORED_AMPLITUDES {
                            return Err(Error::limit(
                                "stored branch amplitudes",
                                MAX_STORED_AMPLITUDES,
                                stored,
                            ));
                        }
                    }
                    done += 1;
                    branches = if merge { self.merge(next, done) } else { next };
                    stats.peak_branches = stats.peak_branches.max(branches.len());
                }
            }
        }
        stats.finals = branches.into_iter().map(|b| self.finish(b)).collect();
        Ok(stats)
    }

    fn merge(&self, branches: Vec<Branch>, done: usize) -> Vec<Branch> {
        let mask = &self.domains.future[done];
        let mut classes: HashMap<Vec<u64>, Vec<Branch>> = HashMap::new();
        let mut order = Vec::new();
        for b in branches {
            let key: Vec<u64> = b.parities.iter().zip(mask).map(|(x, m)| x & m).collect();
            let class = classes.entry(key.clone()).or_insert_with(|| {
                order.push(key.clone());
                Vec::new()
            });
            match class
                .iter_mut()
                .find(|c| phase_distance(&c.amps, &b.amps) <= MERGE_TOL)
            {
                Some(c) => c.probability += b.probability,
                None => class.push(b),
            }
        }
        order
            .into_iter()
            .flat_map(|k| classes.remove(&k).unwrap())
            .collect()
    }

    /// One random run; returns the output basis index.
    fn sample_once(&self, input: &Statevector, rng: &mut ChaCha8Rng) -> usize {
        let mut b = self.initial(input);
        for op in &self.schedule.ops {
            match *op {
                ResolvedOp::Prepare => b.amps = prepare_plus(&b.amps),
                ResolvedOp::Cz(a, c) => apply_cz(&mut b.amps, a, c),
                ResolvedOp::Measure { pos, cmd } => {
                    let parts = self.split(&b, pos, cmd);
                    let total = parts[0].1 + parts[1].1;
                    let s = if rng.random::<f64>() * total < parts[0].1 {
                        0
                    } else {
                        1
                    };
                    let [(a0, p0), (a1, p1)] = parts;
                    let (amps, pr) = if s == 0 { (a0, p0) } else { (a1, p1) };
                    let scale = 1.0 / pr.sqrt();
                    b.amps = amps.into_iter().map(|a| a * scale).collect();
                    self.record(&mut b, cmd, s, false);
                }
            }
        }
        let (out, _, _) = self.finish(b);
        let probs = out.probabilities();
        let r = rng.random::<f64>();
        let mut acc = 0.0;
        for (k, p) in probs.iter().enumerate() {
            acc += p;
            if r < acc {
                return k;
            }
        }
        probs.len() - 1
    }
}

#[derive(Default)]
struct Expansion {
    finals: Vec<(Statevector, f64, Vec<u8>)>,
    dropped_mass: f64,
    max_outcome_bias: f64,
    peak_branches: usize,
}

#[derive(Clone, Debug)]
pub struct BranchResult {
    pub outcomes: BTreeMap<NodeId, u8>,
    pub probability: f64,
    pub output_state: Statevector,
}

/// Every outcome branch with its probability and corrected output state.
pub fn enumerate_branches(p: &MeasurementPattern, input: &Statevector) -> Result<Vec<BranchResult>> {
    if p.measurements.len() > MAX_ENUMERATED_MEASUREMENTS {
        return Err(Error::limit(
            "enumerated measurements",
            MAX_ENUMERATED_MEASUREMENTS,
            p.measurements.len(),
        ));
    }
    let engine = Engine::new(p, input)?;
    let exp = engine.expand(input, false)?;
    Ok(exp
        .finals
        .into_iter()
        .map(|(output_state, probability, bits)| BranchResult {
            outcomes: p.measurements.iter().map(|m| m.node).zip(bits).collect(),
            probability,
            output_state,
        })
        .collect())
}

/// A class of branches with equal output state, after merging.
#[derive(Clone, Debug)]
pub struct MergedBranch {
    pub probability: f64,
    pub output_state: Statevector,
}

/// Exact execution with branch merging.
#[derive(Clone, Debug)]
pub struct Exploration {
    pub branches: Vec<MergedBranch>,
    /// Probability mass of outcomes with vanishing conditional probability.
    pub dropped_mass: f64,
    /// Largest `|P(outcome 0) − ½|` seen at any measurement.
    pub max_outcome_bias: f64,
    pub peak_window: usize,
    pub peak_branches: usize,
}

impl Exploration {
    /// `Σ_branches P(branch) · |⟨x|ψ_branch⟩|²`.
    pub fn output_distribution(&self) -> Vec<f64> {
        let len = self
            .branches
            .first()
            .map_or(1, |b| b.output_state.amplitudes().len());
        let mut out = vec![0.0; len];
        for b in &self.branches {
            for (o, p) in out.iter_mut().zip(b.output_state.probabilities()) {
                *o += b.probability * p;
            }
        }
        out
    }

    /// Largest phase-aligned distance between any branch state and the
    /// first one.
    pub fn max_branch_deviation(&self) -> f64 {
        let Some(first) = self.branches.first() else {
            return 0.0;
        };
        self.branches
            .iter()
            .map(|b| b.output_state.phase_distance(&first.output_state))
            .fold(0.0, f64::max)
    }

    pub fn is_deterministic(&self, tol: f64) -> bool {
        self.max_branch_deviation() <= tol
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum::<f64>() + self.dropped_mass
    }
}

pub fn explore(p: &MeasurementPattern, input: &Statevector) -> Result<Exploration> {
    let engine = Engine::new(p, input)?;
    let exp = engine.expand(input, true)?;
    Ok(Exploration {
        branches: exp
            .finals
            .into_iter()
            .map(|(output_state, probability, _)| MergedBranch {
                probability,
                output_state,
            })
            .collect(),
        dropped_mass: exp.dropped_mass,
        max_outcome_bias: exp.max_outcome_bias,
        peak_window: engine.schedule.peak,
        peak_branches: exp.peak_branches,
    })
}

/// The probe inputs used by [`check_determinism`]: every basis state (up to
/// four inputs), `|+…+⟩` and a fixed pseudo-random state. A pattern without
/// inputs has the single empty state.
pub fn probe_inputs(k: usize) -> Vec<Statevector> {
    if k == 0 {
        return vec![Statevector::zero(0)];
    }
    let mut out = Vec::new();
    if k <= 4 {
        out.extend((0..1usize << k).map(|i| Statevector::basis(k, i)));
    }
    out.push(Statevector::plus(k));
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let amps = (0..1usize << k)
        .map(|_| c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    out.push(Statevector::from_amplitudes(k, amps).expect("random state is nonzero"));
    out
}

/// True iff, for every probe input, all branch output states agree up to
/// global phase within [`DETERMINISM_TOL`].
pub fn check_determinism(p: &MeasurementPattern) -> Result<bool> {
    for input in probe_inputs(p.inputs.len()) {
        if !explore(p, &input)?.is_deterministic(DETERMINISM_TOL) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Finite-shot execution. Counts are keyed by output basis index, with
/// output `k` on bit `k`; equal seeds give equal counts.
pub fn sample(
    p: &MeasurementPattern,
    input: &Statevector,
    shots: usize,
    seed: u64,
) -> Result<BTreeMap<usize, usize>> {
    let engine = Engine::new(p, input)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(engine.sample_once(input, &mut rng)).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Wire form of a measurement command.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureDoc {
    node: NodeId,
    #[serde(default, skip_serializing_if = "is_xy")]
    plane: Plane,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle_num: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle_den_pi: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
    #[serde(default)]
    sign_domain: BTreeSet<NodeId>,
    #[serde(default)]
    offset_domain: BTreeSet<NodeId>,
}

fn is_xy(p: &Plane) -> bool {
    *p == Plane::XY
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternDoc {
    format: u32,
    nodes: Vec<NodeId>,
    inputs: Vec<NodeId>,
    outputs: Vec<NodeId>,
    entangle: Vec<[NodeId; 2]>,
    measure: Vec<MeasureDoc>,
    corrections: Vec<Correction>,
}

pub const PATTERN_FORMAT: u32 = 1;

impl MeasurementPattern {
    pub fn to_json(&self) -> String {
        let doc = PatternDoc {
            format: PATTERN_FORMAT,
            nodes: self.nodes.clone(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            entangle: self.entangle.iter().map(|&(a, b)| [a, b]).collect(),
            measure: self
                .measurements
                .iter()
                .map(|m| {
                    let (num, den, angle) = match m.angle.as_pi_fraction() {
                        Some(r) => (Some(*r.numer()), Some(*r.denom()), None),
                        None => (None, None, Some(m.angle.radians())),
                    };
                    MeasureDoc {
                        node: m.node,
                        plane: m.plane,
                        angle_num: num,
                        angle_den_pi: den,
                        angle,
                        sign_domain: m.sign_domain.clone(),
                        offset_domain: m.offset_domain.clone(),
                    }
                })
                .collect(),
            corrections: self.corrections.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("pattern serialization cannot fail")
    }

    /// Parses a pattern document; the result is not validated.
    pub fn from_json(text: &str) -> Result<MeasurementPattern> {
        let doc: PatternDoc = serde_json::from_str(text)?;
        if doc.format != PATTERN_FORMAT {
            return Err(Error::InvalidPattern(format!(
                "unsupported format {}",
                doc.format
            )));
        }
        let measurements = doc
            .measure
            .into_iter()
            .map(|m| {
                let angle = match (m.angle_num, m.angle_den_pi, m.angle) {
                    (Some(_), Some(0), _) => {
                        return Err(Error::InvalidPattern(format!(
                            "node {} has angle denominator 0",
                            m.node
                        )))
                    }
                    (Some(n), Some(d), None) => Phase::from_pi_fraction(n, d),
                    (None, None, Some(x)) if x.is_finite() => Phase::from_radians(x),
                    (None, None, None) => Phase::zero(),
                    _ => {
                        return Err(Error::InvalidPattern(format!(
                            "node {} has an inconsistent angle",
                            m.node
                        )))
                    }
                };
                Ok(MeasureCmd {
                    node: m.node,
                    plane: m.plane,
                    angle,
                    sign_domain: m.sign_domain,
                    offset_domain: m.offset_domain,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MeasurementPattern {
            nodes: doc.nodes,
            inputs: doc.inputs,
            outputs: doc.outputs,
            entangle: doc.entangle.into_iter().map(|[a, b]| (a, b)).collect(),
            measurements,
            corrections: doc.corrections,
        })
    }
}
