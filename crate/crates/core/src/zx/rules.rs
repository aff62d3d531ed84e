//! Local rewrite rules.
//!
//! Each rule is addressed explicitly by the spiders it acts on. Rules
//! return a new diagram and multiply the tracked scalar by whatever factor
//! the rewrite introduces under the unnormalized spider semantics of
//! [`super::tensor`], so rewrites preserve the linear map exactly.
//! Nodes created by a rule receive consecutive ids starting at the input
//! diagram's [`ZxDiagram::next_id`], in the order documented per variant.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, C64};

use super::diagram::{Color, Edge, EdgeKind, Node, NodeId, Spider, ZxDiagram};
use super::phase::Phase;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    /// (S) merge `b` into `a` along their plain edges.
    Fuse { a: NodeId, b: NodeId },
    /// (S) reversed: split `phase` off `spider` into a new spider that takes
    /// over every edge towards the listed neighbours. Creates one node.
    Unfuse {
        spider: NodeId,
        phase: Phase,
        moved: Vec<NodeId>,
    },
    /// (Id) drop a phase-free degree-2 spider.
    RemoveIdentity { spider: NodeId },
    /// (Id) reversed: put a phase-free spider on the first edge `a`-`b`.
    /// The new spider inherits the edge kind towards `a` and connects to
    /// `b` plainly. Creates one node.
    InsertIdentity { a: NodeId, b: NodeId, color: Color },
    /// (H) flip the color and toggle every incident edge.
    ColorChange { spider: NodeId },
    /// (HH) remove a phase-free spider sitting between two Hadamard edges.
    CancelHadamards { spider: NodeId },
    /// (HH) reversed: replace the first plain edge `a`-`b` by
    /// `a`-H-Z(0)-H-`b`. Creates one node.
    InsertHadamards { a: NodeId, b: NodeId },
    /// (π) push the Pauli spider `pi` (phase 0 or π, degree 2) through
    /// `target`; one Pauli spider is created per remaining target leg.
    PiCopy { pi: NodeId, target: NodeId },
    /// (K) a Pauli state `state` absorbed by `target` and copied onto each
    /// remaining target leg; creates one state per leg.
    Copy { state: NodeId, target: NodeId },
    /// (B) the complete bipartite Z-Z/X-X square becomes an X-Z pair.
    /// Creates the X spider, then the Z spider.
    Bialgebra { z: [NodeId; 2], x: [NodeId; 2] },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Fuse { .. } => "fuse",
            Rule::Unfuse { .. } => "unfuse",
            Rule::RemoveIdentity { .. } => "remove_identity",
            Rule::InsertIdentity { .. } => "insert_identity",
            Rule::ColorChange { .. } => "color_change",
            Rule::CancelHadamards { .. } => "cancel_hadamards",
            Rule::InsertHadamards { .. } => "insert_hadamards",
            Rule::PiCopy { .. } => "pi_copy",
            Rule::Copy { .. } => "copy",
            Rule::Bialgebra { .. } => "bialgebra",
        }
    }
}

fn spider_of(d: &ZxDiagram, id: NodeId, rule: &'static str) -> Result<Spider> {
    d.spider(id)
        .ok_or_else(|| Error::not_applicable(rule, format!("node {id} is not a spider")))
}

/// Applies `rule` to `d`, returning the rewritten diagram.
pub fn apply_rule(d: &ZxDiagram, rule: &Rule) -> Result<ZxDiagram> {
    let mut out = d.clone();
    match rule {
        Rule::Fuse { a, b } => fuse_in(&mut out, *a, *b)?,
        Rule::Unfuse { spider, phase, moved } => unfuse_in(&mut out, *spider, *phase, moved)?,
        Rule::RemoveIdentity { spider } => remove_identity_in(&mut out, *spider, false)?,
        Rule::InsertIdentity { a, b, color } => insert_identity_in(&mut out, *a, *b, *color)?,
        Rule::ColorChange { spider } => color_change_in(&mut out, *spider)?,
        Rule::CancelHadamards { spider } => remove_identity_in(&mut out, *spider, true)?,
        Rule::InsertHadamards { a, b } => insert_hadamards_in(&mut out, *a, *b)?,
        Rule::PiCopy { pi, target } => pi_copy_in(&mut out, *pi, *target)?,
        Rule::Copy { state, target } => copy_in(&mut out, *state, *target)?,
        Rule::Bialgebra { z, x } => bialgebra_in(&mut out, *z, *x)?,
    }
    Ok(out)
}

/// Rule (S).
pub fn fuse(d: &ZxDiagram, a: NodeId, b: NodeId) -> Result<ZxDiagram> {
    apply_rule(d, &Rule::Fuse { a, b })
}

fn fuse_in(d: &mut ZxDiagram, a: NodeId, b: NodeId) -> Result<()> {
    const R: &str = "fuse";
    if a == b {
        return Err(Error::not_applicable(R, "cannot fuse a spider with itself"));
    }
    let sa = spider_of(d, a, R)?;
    let sb = spider_of(d, b, R)?;
    if sa.color != sb.color {
        return Err(Error::not_applicable(R, "spiders have different colors"));
    }
    let between = d.edges_between(a, b);
    let plain: Vec<usize> = between
        .iter()
        .copied()
        .filter(|&i| d.edges[i].kind == EdgeKind::Plain)
        .collect();
    if plain.is_empty() {
        return Err(Error::not_applicable(R, "no plain edge between the spiders"));
    }
    d.remove_edges(plain);
    for e in d.edges.iter_mut() {
        if e.a == b {
            e.a = a;
        }
        if e.b == b {
            e.b = a;
        }
    }
    d.nodes.remove(&b);
    d.spider_mut(a).phase = sa.phase + sb.phase;
    resolve_self_loops(d, a);
    Ok(())
}

/// Plain self-loops are identities; Hadamard self-loops add π and 1/√2.
fn resolve_self_loops(d: &mut ZxDiagram, s: NodeId) {
    let loops: Vec<usize> = d
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.a == s && e.b == s)
        .map(|(i, _)| i)
        .collect();
    let h = loops
        .iter()
        .filter(|&&i| d.edges[i].kind == EdgeKind::Hadamard)
        .count();
    d.remove_edges(loops);
    if h > 0 {
        let sp = d.spider_mut(s);
        sp.phase = sp.phase + Phase::pi_times(h as i64);
        d.scalar *= FRAC_1_SQRT_2.powi(h as i32);
    }
}

fn unfuse_in(d: &mut ZxDiagram, s: NodeId, phase: Phase, moved: &[NodeId]) -> Result<()> {
    const R: &str = "unfuse";
    let sp = spider_of(d, s, R)?;
    for &m in moved {
        if m == s {
            return Err(Error::not_applicable(R, "cannot move a self-loop"));
        }
        if d.edges_between(s, m).is_empty() {
            return Err(Error::not_applicable(
                R,
                format!("node {m} is not adjacent to {s}"),
            ));
        }
    }
    let n = d.add_spider(sp.color, phase);
    for e in d.edges.iter_mut() {
        if e.is_self_loop() {
            continue;
        }
        if e.a == s && moved.contains(&e.b) {
            e.a = n;
        } else if e.b == s && moved.contains(&e.a) {
            e.b = n;
        }
    }
    d.spider_mut(s).phase = sp.phase - phase;
    d.plain(s, n);
    Ok(())
}

fn remove_identity_in(d: &mut ZxDiagram, s: NodeId, hh: bool) -> Result<()> {
    let r: &'static str = if hh { "cancel_hadamards" } else { "remove_identity" };
    let sp = spider_of(d, s, r)?;
    if !sp.phase.is_zero() {
        return Err(Error::not_applicable(r, "spider phase is not zero"));
    }
    let inc = d.incident(s);
    if inc.len() != 2 || d.degree(s) != 2 {
        return Err(Error::not_applicable(
            r,
            "spider must have exactly two non-loop edges",
        ));
    }
    let (e1, e2) = (d.edges[inc[0]], d.edges[inc[1]]);
    if hh && (e1.kind != EdgeKind::Hadamard || e2.kind != EdgeKind::Hadamard) {
        return Err(Error::not_applicable(r, "both edges must be Hadamard edges"));
    }
    let (x, y) = (e1.other(s), e2.other(s));
    d.remove_node(s);
    d.add_edge(x, y, e1.kind.then(e2.kind));
    if x == y {
        if let Some(Node::Spider(_)) = d.node(x) {
            resolve_self_loops(d, x);
        }
    }
    Ok(())
}

fn first_edge(d: &ZxDiagram, a: NodeId, b: NodeId, kind: Option<EdgeKind>) -> Option<usize> {
    d.edges_between(a, b)
        .into_iter()
        .find(|&i| kind.is_none_or(|k| d.edges[i].kind == k) && !d.edges[i].is_self_loop())
}

fn insert_identity_in(d: &mut ZxDiagram, a: NodeId, b: NodeId, color: Color) -> Result<()> {
    const R: &str = "insert_identity";
    let i = first_edge(d, a, b, None)
        .ok_or_else(|| Error::not_applicable(R, format!("no edge between {a} and {b}")))?;
    let kind = d.edges[i].kind;
    d.remove_edges(vec![i]);
    let n = d.add_spider(color, Phase::zero());
    d.add_edge(a, n, kind);
    d.plain(n, b);
    Ok(())
}

fn insert_hadamards_in(d: &mut ZxDiagram, a: NodeId, b: NodeId) -> Result<()> {
    const R: &str = "insert_hadamards";
    let i = first_edge(d, a, b, Some(EdgeKind::Plain))
        .ok_or_else(|| Error::not_applicable(R, format!("no plain edge between {a} and {b}")))?;
    d.remove_edges(vec![i]);
    let n = d.add_z(Phase::zero());
    d.hadamard(a, n);
    d.hadamard(n, b);
    Ok(())
}

fn color_change_in(d: &mut ZxDiagram, s: NodeId) -> Result<()> {
    let sp = spider_of(d, s, "color_change")?;
    d.spider_mut(s).color = sp.color.flipped();
    for e in d.edges.iter_mut() {
        // a self-loop receives a Hadamard at both ends, which cancel
        if e.touches(s) && !e.is_self_loop() {
            e.kind = e.kind.toggled();
        }
    }
    Ok(())
}

/// Edges of `t` other than the single plain edge to `via`, in index order.
fn other_legs(d: &ZxDiagram, t: NodeId, via: NodeId, r: &'static str) -> Result<Vec<Edge>> {
    let between = d.edges_between(t, via);
    if between.len() != 1 || d.edges[between[0]].kind != EdgeKind::Plain {
        return Err(Error::not_applicable(
            r,
            "the spiders must share exactly one plain edge",
        ));
    }
    let legs: Vec<Edge> = d
        .edges
        .iter()
        .filter(|e| e.touches(t) && !e.touches(via))
        .copied()
        .collect();
    if legs.iter().any(|e| e.is_self_loop()) {
        return Err(Error::not_applicable(r, "target has a self-loop"));
    }
    Ok(legs)
}

fn pi_copy_in(d: &mut ZxDiagram, pi: NodeId, t: NodeId) -> Result<()> {
    const R: &str = "pi_copy";
    let sp = spider_of(d, pi, R)?;
    let st = spider_of(d, t, R)?;
    if sp.color == st.color {
        return Err(Error::not_applicable(R, "spiders must differ in color"));
    }
    let m = sp
        .phase
        .pauli_bit()
        .ok_or_else(|| Error::not_applicable(R, "pi spider phase must be 0 or π"))?;
    if d.degree(pi) != 2 || d.incident(pi).len() != 2 {
        return Err(Error::not_applicable(R, "pi spider must have degree 2"));
    }
    let legs = other_legs(d, t, pi, R)?;
    let far = d.edges[d
        .incident(pi)
        .into_iter()
        .find(|&i| !d.edges[i].touches(t))
        .ok_or_else(|| Error::not_applicable(R, "pi spider has no far leg"))?];
    let far_node = far.other(pi);

    d.remove_node(pi);
    d.edges.retain(|e| !(e.touches(t)));
    d.add_edge(far_node, t, far.kind);
    for leg in &legs {
        let x = leg.other(t);
        let p = d.add_spider(sp.color, sp.phase);
        d.plain(t, p);
        d.add_edge(p, x, leg.kind);
    }
    if m == 1 {
        d.spider_mut(t).phase = -st.phase;
        d.scalar *= C64::from_polar(1.0, st.phase.radians());
    }
    Ok(())
}

fn copy_in(d: &mut ZxDiagram, s: NodeId, t: NodeId) -> Result<()> {
    const R: &str = "copy";
    let ss = spider_of(d, s, R)?;
    let st = spider_of(d, t, R)?;
    if ss.color == st.color {
        return Err(Error::not_applicable(R, "spiders must differ in color"));
    }
    let a = ss
        .phase
        .pauli_bit()
        .ok_or_else(|| Error::not_applicable(R, "state phase must be 0 or π"))?;
    if d.degree(s) != 1 {
        return Err(Error::not_applicable(R, "state spider must have degree 1"));
    }
    let legs = other_legs(d, t, s, R)?;
    d.remove_node(s);
    d.remove_node(t);
    for leg in &legs {
        let x = leg.other(t);
        let n = d.add_spider(ss.color, ss.phase);
        d.add_edge(n, x, leg.kind);
    }
    let phase = if a == 1 { st.phase.radians() } else { 0.0 };
    d.scalar *= C64::from_polar(SQRT_2, phase) * c64(FRAC_1_SQRT_2.powi(legs.len() as i32), 0.0);
    Ok(())
}

fn bialgebra_in(d: &mut ZxDiagram, z: [NodeId; 2], x: [NodeId; 2]) -> Result<()> {
    const R: &str = "bialgebra";
    let all = [z[0], z[1], x[0], x[1]];
    for (k, &n) in all.iter().enumerate() {
        let s = spider_of(d, n, R)?;
        let want = if k < 2 { Color::Z } else { Color::X };
        if s.color != want {
            return Err(Error::not_applicable(
                R,
                format!("spider {n} has the wrong color"),
            ));
        }
        if !s.phase.is_zero() {
            return Err(Error::not_applicable(R, format!("spider {n} has nonzero phase")));
        }
        if d.degree(n) != 3 {
            return Err(Error::not_applicable(
                R,
                format!("spider {n} must have exactly one external edge"),
            ));
        }
    }
    if all.iter().collect::<std::collections::BTreeSet<_>>().len() != 4 {
        return Err(Error::not_applicable(R, "site spiders must be distinct"));
    }
    for &zi in &z {
        for &xi in &x {
            let between = d.edges_between(zi, xi);
            if between.len() != 1 || d.edges[between[0]].kind != EdgeKind::Plain {
                return Err(Error::not_applicable(
                    R,
                    format!("spiders {zi} and {xi} must share exactly one plain edge"),
                ));
            }
        }
    }
    if !d.edges_between(z[0], z[1]).is_empty() || !d.edges_between(x[0], x[1]).is_empty() {
        return Err(Error::not_applicable(R, "site is not bipartite"));
    }
    let external = |d: &ZxDiagram, n: NodeId| -> Edge {
        *d.edges
            .iter()
            .find(|e| e.touches(n) && !all.contains(&e.other(n)))
            .expect("degree checked")
    };
    let ext: Vec<(NodeId, Edge)> = all.iter().map(|&n| (n, external(d, n))).collect();
    for n in all {
        d.remove_node(n);
    }
    let nx = d.add_x(Phase::zero());
    let nz = d.add_z(Phase::zero());
    d.plain(nx, nz);
    for (k, (n, e)) in ext.iter().enumerate() {
        let far = e.other(*n);
        let far = if all.contains(&far) { unreachable!() } else { far };
        d.add_edge(if k < 2 { nx } else { nz }, far, e.kind);
    }
    d.scalar *= FRAC_1_SQRT_2;
    Ok(())
}

/// Every rule instance applicable to `d` that needs no extra parameters,
/// plus unfusions and insertions with zero phase on single edges.
pub fn applicable_rules(d: &ZxDiagram) -> Vec<Rule> {
    let mut out = Vec::new();
    let ids = d.spider_ids();
    let mut edge_pairs: Vec<(NodeId, NodeId)> = d
        .edges
        .iter()
        .filter(|e| !e.is_self_loop())
        .map(|e| (e.a.min(e.b), e.a.max(e.b)))
        .collect();
    edge_pairs.sort_unstable();
    edge_pairs.dedup();
    let candidates = |rule: Rule, out: &mut Vec<Rule>| {
        if apply_rule(d, &rule).is_ok() {
            out.push(rule);
        }
    };
    for &(a, b) in &edge_pairs {
        if d.spider(a).is_some() && d.spider(b).is_some() {
            candidates(Rule::Fuse { a, b }, &mut out);
            candidates(Rule::PiCopy { pi: a, target: b }, &mut out);
            candidates(Rule::PiCopy { pi: b, target: a }, &mut out);
            candidates(Rule::Copy { state: a, target: b }, &mut out);
            candidates(Rule::Copy { state: b, target: a }, &mut out);
        }
        candidates(Rule::InsertHadamards { a, b }, &mut out);
        for color in [Color::Z, Color::X] {
            candidates(Rule::InsertIdentity { a, b, color }, &mut out);
        }
    }
    for &s in &ids {
        candidates(Rule::RemoveIdentity { spider: s }, &mut out);
        candidates(Rule::CancelHadamards { spider: s }, &mut out);
        candidates(Rule::ColorChange { spider: s }, &mut out);
        let nb: Vec<NodeId> = d.neighbors(s).into_iter().filter(|&n| n != s).collect();
        if let Some(&first) = nb.first() {
            let phase = d.spider(s).unwrap().phase;
            candidates(
                Rule::Unfuse {
                    spider: s,
                    phase,
                    moved: vec![first],
                },
                &mut out,
            );
        }
    }
    let z: Vec<NodeId> = ids
        .iter()
        .copied()
        .filter(|&i| d.spider(i).unwrap().color == Color::Z)
        .collect();
    let x: Vec<NodeId> = ids
        .iter()
        .copied()
        .filter(|&i| d.spider(i).unwrap().color == Color::X)
        .collect();
    for (i, &z0) in z.iter().enumerate() {
        for &z1 in &z[i + 1..] {
            for (j, &x0) in x.iter().enumerate() {
                for &x1 in &x[j + 1..] {
                    candidates(
                        Rule::Bialgebra {
                            z: [z0, z1],
                            x: [x0, x1],
                        },
                        &mut out,
                    );
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{equal_up_to_scalar, LinearMap};
    use crate::zx::diagram::single_spider;
    use crate::zx::tensor::to_matrix;

    fn exact(a: &ZxDiagram, b: &ZxDiagram) -> f64 {
        to_matrix(a).unwrap().max_diff(&to_matrix(b).unwrap())
    }

    fn wire(color: Color, phases: &[Phase]) -> (ZxDiagram, Vec<NodeId>) {
        let mut d = ZxDiagram::new();
        let i = d.add_input();
        let mut prev = i;
        let mut ids = Vec::new();
        for &p in phases {
            let s = d.add_spider(color, p);
            d.plain(prev, s);
            prev = s;
            ids.push(s);
        }
        let o = d.add_output();
        d.plain(prev, o);
        (d, ids)
    }

    #[test]
    fn fuse_adds_phases() {
        let a = Phase::from_pi_fraction(1, 4);
        let b = Phase::from_pi_fraction(1, 2);
        let (d, ids) = wire(Color::Z, &[a, b]);
        let f = fuse(&d, ids[0], ids[1]).unwrap();
        assert_eq!(f.spider(ids[0]).unwrap().phase, Phase::from_pi_fraction(3, 4));
        assert_eq!(f.num_spiders(), 1);
        assert!(exact(&d, &f) < 1e-14);
    }

    #[test]
    fn pi_pi_fuses_to_removable_identity() {
        let (d, ids) = wire(Color::Z, &[Phase::pi(), Phase::pi()]);
        let f = fuse(&d, ids[0], ids[1]).unwrap();
        assert!(f.spider(ids[0]).unwrap().phase.is_zero());
        let g = apply_rule(&f, &Rule::RemoveIdentity { spider: ids[0] }).unwrap();
        assert_eq!(g.num_spiders(), 0);
        assert!(to_matrix(&g).unwrap().max_diff(&LinearMap::identity(1)) < 1e-15);
    }

    #[test]
    fn fuse_rejects_mixed_colors() {
        let mut d = ZxDiagram::new();
        let i = d.add_input();
        let z = d.add_z(Phase::zero());
        let x = d.add_x(Phase::zero());
        let o = d.add_output();
        d.plain(i, z);
        d.plain(z, x);
        d.plain(x, o);
        let err = fuse(&d, z, x).unwrap_err();
        assert!(matches!(err, Error::RuleNotApplicable { rule: "fuse", .. }));
    }

    #[test]
    fn hh_cancel_gives_plain_wire() {
        let mut d = ZxDiagram::new();
        let i = d.add_input();
        let s = d.add_z(Phase::zero());
        let o = d.add_output();
        d.hadamard(i, s);
        d.hadamard(s, o);
        let g = apply_rule(&d, &Rule::CancelHadamards { spider: s }).unwrap();
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.edges()[0].kind, EdgeKind::Plain);
        assert!(exact(&d, &g) < 1e-15);
    }

    #[test]
    fn pi_copy_negates_phase() {
        let alpha = Phase::from_radians(0.9);
        let mut d = ZxDiagram::new();
        let i = d.add_input();
        let p = d.add_x(Phase::pi());
        let t = d.add_z(alpha);
        let o = d.add_output();
        d.plain(i, p);
        d.plain(p, t);
        d.plain(t, o);
        let g = apply_rule(&d, &Rule::PiCopy { pi: p, target: t }).unwrap();
        assert!(g.spider(t).unwrap().phase.approx_eq(&-alpha, 1e-15));
        assert_eq!(g.spider(g.next_id() - 1).unwrap().phase, Phase::pi());
        assert!(exact(&d, &g) < 1e-14);
    }

    #[test]
    fn minus_pi_equals_pi_after_pi_copy() {
        let (mut d, ids) = wire(Color::Z, &[Phase::pi()]);
        let t = ids[0];
        let i = d.inputs()[0];
        d.edges.retain(|e| !e.touches(i));
        let p = d.add_x(Phase::pi());
        d.plain(i, p);
        d.plain(p, t);
        let g = apply_rule(&d, &Rule::PiCopy { pi: p, target: t }).unwrap();
        assert_eq!(g.spider(t).unwrap().phase, Phase::pi());
    }

    #[test]
    fn copy_and_bialgebra_are_exact() {
        // X(π) state into Z(0.3) with two outputs
        let mut d = ZxDiagram::new();
        let s = d.add_x(Phase::pi());
        let t = d.add_z(Phase::from_radians(0.3));
        let o1 = d.add_output();
        let o2 = d.add_output();
        d.plain(s, t);
        d.plain(t, o1);
        d.plain(t, o2);
        let g = apply_rule(&d, &Rule::Copy { state: s, target: t }).unwrap();
        assert!(exact(&d, &g) < 1e-14);

        let mut d = ZxDiagram::new();
        let ins = [d.add_input(), d.add_input()];
        let z = [d.add_z(Phase::zero()), d.add_z(Phase::zero())];
        let x = [d.add_x(Phase::zero()), d.add_x(Phase::zero())];
        let outs = [d.add_output(), d.add_output()];
        for k in 0..2 {
            d.plain(ins[k], z[k]);
            d.hadamard(x[k], outs[k]);
            for &xx in &x {
                d.plain(z[k], xx);
            }
        }
        let g = apply_rule(&d, &Rule::Bialgebra { z, x }).unwrap();
        assert_eq!(g.num_spiders(), 2);
        assert!(exact(&d, &g) < 1e-14);
    }

    #[test]
    fn color_change_and_unfuse() {
        let (d, ids) = wire(Color::X, &[Phase::from_radians(1.3)]);
        let g = apply_rule(&d, &Rule::ColorChange { spider: ids[0] }).unwrap();
        assert!(exact(&d, &g) < 1e-14);
        let out = d.outputs()[0];
        let h = apply_rule(
            &g,
            &Rule::Unfuse {
                spider: ids[0],
                phase: Phase::from_radians(0.3),
                moved: vec![out],
            },
        )
        .unwrap();
        assert!(exact(&d, &h) < 1e-14);
        assert!(apply_rule(
            &h,
            &Rule::Fuse {
                a: ids[0],
                b: h.next_id() - 1
            }
        )
        .is_ok());
    }

    #[test]
    fn enumerated_sites_are_sound() {
        let (d, _) = single_spider(Color::Z, Phase::from_radians(0.2));
        for r in applicable_rules(&d) {
            let g = apply_rule(&d, &r).unwrap();
            assert!(equal_up_to_scalar(
                &to_matrix(&g).unwrap(),
                &to_matrix(&d).unwrap(),
                1e-12
            ));
        }
    }
}
