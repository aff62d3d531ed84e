//! Worked rewrite chains from circuit fragments to measurement form.
//!
//! Each chain starts from the circuit-level diagram of a QAOA building block
//! and ends in graph-state form: Z nodes joined by Hadamard edges, one
//! measurement effect per measured node and Pauli byproducts on the
//! outputs. Outcome bits are plain inputs; callers enumerate them.
//!
//! Measurement effects in the end diagrams read as follows. An XY
//! measurement at angle θ with outcome s is the effect `Z(−θ + sπ)`; a YZ
//! measurement at angle θ with outcome s is `X(θ + sπ)`.

use std::ops::Range;

use crate::error::Result;

use super::derivation::Derivation;
use super::diagram::{Color, NodeId, ZxDiagram};
use super::phase::Phase;
use super::rules::Rule;

fn bit_phase(m: u8) -> Phase {
    Phase::pi_times(m as i64)
}

/// The node in `created` adjacent to `n`.
fn created_next_to(der: &Derivation, created: Range<NodeId>, n: NodeId) -> NodeId {
    let d = der.current();
    created
        .into_iter()
        .find(|&c| d.neighbors(c).contains(&n))
        .expect("rule creates a node next to every leg")
}

fn phase_of(der: &Derivation, n: NodeId) -> Phase {
    der.current().spider(n).expect("spider").phase
}

/// Node ids of a CNOT·(I⊗Z(φ))·CNOT block.
#[derive(Clone, Copy, Debug)]
pub struct CnotBlock {
    pub zc1: NodeId,
    pub zc2: NodeId,
    pub x1: NodeId,
    pub zg: NodeId,
    pub x2: NodeId,
}

/// Wire spiders, hub and leaf of a phase gadget.
#[derive(Clone, Copy, Debug)]
pub struct Gadget {
    pub zu: NodeId,
    pub zv: NodeId,
    pub hub: NodeId,
    pub leaf: NodeId,
}

/// `CNOT(u→v) · Z_v(φ) · CNOT(u→v)` on qubits 0 (u) and 1 (v).
pub fn cnot_rz_cnot(phi: Phase) -> (ZxDiagram, CnotBlock) {
    let mut d = ZxDiagram::new();
    let iu = d.add_input();
    let iv = d.add_input();
    let zc1 = d.add_z(Phase::zero());
    let zc2 = d.add_z(Phase::zero());
    let x1 = d.add_x(Phase::zero());
    let zg = d.add_z(phi);
    let x2 = d.add_x(Phase::zero());
    let ou = d.add_output();
    let ov = d.add_output();
    d.plain(iu, zc1);
    d.plain(zc1, zc2);
    d.plain(zc2, ou);
    d.plain(iv, x1);
    d.plain(x1, zg);
    d.plain(zg, x2);
    d.plain(x2, ov);
    d.plain(zc1, x1);
    d.plain(zc2, x2);
    (d, CnotBlock { zc1, zc2, x1, zg, x2 })
}

/// Two wires joined by a phase gadget: hub X(0), leaf Z(φ).
pub fn phase_gadget(phi: Phase) -> (ZxDiagram, Gadget) {
    let mut d = ZxDiagram::new();
    let iu = d.add_input();
    let iv = d.add_input();
    let zu = d.add_z(Phase::zero());
    let zv = d.add_z(Phase::zero());
    let hub = d.add_x(Phase::zero());
    let leaf = d.add_z(phi);
    let ou = d.add_output();
    let ov = d.add_output();
    d.plain(iu, zu);
    d.plain(zu, ou);
    d.plain(iv, zv);
    d.plain(zv, ov);
    d.plain(zu, hub);
    d.plain(zv, hub);
    d.plain(hub, leaf);
    (d, Gadget { zu, zv, hub, leaf })
}

/// Fold the CNOT block into a phase gadget. `u_prev`/`u_next` are the
/// neighbours of the control spiders along the control wire.
pub fn cnot_block_to_gadget(
    der: &mut Derivation,
    b: CnotBlock,
    u_prev: NodeId,
    u_next: NodeId,
) -> Result<Gadget> {
    der.step(Rule::Fuse { a: b.zc1, b: b.zc2 })?;
    let leaf = der.step_new(Rule::Unfuse {
        spider: b.zg,
        phase: phase_of(der, b.zg),
        moved: vec![],
    })?;
    let zu = der.step_new(Rule::Unfuse {
        spider: b.zc1,
        phase: Phase::zero(),
        moved: vec![u_prev, u_next],
    })?;
    let made = der.step(Rule::Bialgebra {
        z: [b.zc1, b.zg],
        x: [b.x1, b.x2],
    })?;
    Ok(Gadget {
        zu,
        zv: made.start + 1,
        hub: made.start,
        leaf,
    })
}

/// Outcome of rewriting a gadget into measurement form.
#[derive(Clone, Copy, Debug)]
pub struct MeasuredGadget {
    /// The ancilla node, a Z spider with Hadamard edges to both wires.
    pub ancilla: NodeId,
    /// Its YZ effect `X(φ + mπ)`.
    pub effect: NodeId,
    /// `Z(mπ)` byproducts towards the given next nodes.
    pub byproducts: [NodeId; 2],
}

/// Rewrites a phase gadget into an ancilla joined to both wires by
/// Hadamard edges, measured in the YZ plane, with `Z(mπ)` byproducts moved
/// onto each wire towards `next[k]`.
pub fn gadget_to_measurement(
    der: &mut Derivation,
    g: Gadget,
    next: [NodeId; 2],
    m: u8,
) -> Result<MeasuredGadget> {
    let hub = g.hub;
    let leaf = g.leaf;
    der.step(Rule::ColorChange { spider: hub })?;
    let prep = der.step_new(Rule::Unfuse {
        spider: hub,
        phase: Phase::zero(),
        moved: vec![],
    })?;
    der.step(Rule::ColorChange { spider: leaf })?;
    let effect = attach_outcome(der, hub, leaf, Color::X, m)?;
    let made = der.step(Rule::PiCopy {
        pi: effect.1,
        target: hub,
    })?;
    let x_prep = created_next_to(der, made.clone(), prep);
    let new_prep = der.step(Rule::Copy {
        state: prep,
        target: x_prep,
    })?;
    der.step(Rule::Fuse {
        a: hub,
        b: new_prep.start,
    })?;
    let mut byproducts = [0; 2];
    for (k, w) in [g.zu, g.zv].into_iter().enumerate() {
        let x = created_next_to(der, made.clone(), w);
        byproducts[k] = absorb_and_move(der, x, w, next[k], m)?;
    }
    Ok(MeasuredGadget {
        ancilla: hub,
        effect: effect.0,
        byproducts,
    })
}

/// Splits an identity between `node` and its 1-leg effect `leaf` of color
/// `color` into `mπ`, `mπ`, fuses one half into the effect and returns
/// `(leaf, other half)`.
fn attach_outcome(
    der: &mut Derivation,
    node: NodeId,
    leaf: NodeId,
    color: Color,
    m: u8,
) -> Result<(NodeId, NodeId)> {
    let near = der.step_new(Rule::InsertIdentity {
        a: node,
        b: leaf,
        color,
    })?;
    let far = der.step_new(Rule::Unfuse {
        spider: near,
        phase: bit_phase(m),
        moved: vec![leaf],
    })?;
    der.step(Rule::Fuse { a: leaf, b: far })?;
    Ok((leaf, near))
}

/// `x` is an `X(mπ)` between a Hadamard edge and the wire spider `w`:
/// turn it into a `Z(mπ)`, fuse it into `w` and move it out towards `next`.
fn absorb_and_move(der: &mut Derivation, x: NodeId, w: NodeId, next: NodeId, m: u8) -> Result<NodeId> {
    der.step(Rule::ColorChange { spider: x })?;
    der.step(Rule::Fuse { a: w, b: x })?;
    der.step_new(Rule::Unfuse {
        spider: w,
        phase: bit_phase(m),
        moved: vec![next],
    })
}

/// A single wire `in - Z(φ) - out`.
pub fn z_rotation(phi: Phase) -> (ZxDiagram, NodeId) {
    super::diagram::single_spider(Color::Z, phi)
}

/// A single wire `in - X(φ) - out`.
pub fn x_rotation(phi: Phase) -> (ZxDiagram, NodeId) {
    super::diagram::single_spider(Color::X, phi)
}

/// Teleporting form of a Z rotation: the wire spider `w` becomes a node
/// measured in XY with effect `Z(φ + mπ)`, joined by a Hadamard edge to a
/// fresh node `b`; the output then carries `X(mπ)` followed by a Hadamard.
#[derive(Clone, Copy, Debug)]
pub struct Teleported {
    pub measured: NodeId,
    pub effect: NodeId,
    pub fresh: NodeId,
    pub byproduct: NodeId,
}

pub fn z_rotation_teleport(der: &mut Derivation, w: NodeId, out: NodeId, m: u8) -> Result<Teleported> {
    let leaf = der.step_new(Rule::Unfuse {
        spider: w,
        phase: phase_of(der, w),
        moved: vec![],
    })?;
    let b = der.step_new(Rule::InsertHadamards { a: w, b: out })?;
    let prep = der.step_new(Rule::Unfuse {
        spider: b,
        phase: Phase::zero(),
        moved: vec![],
    })?;
    let (leaf, near) = attach_outcome(der, w, leaf, Color::Z, m)?;
    der.step(Rule::Fuse { a: w, b: near })?;
    let k = der.step_new(Rule::Unfuse {
        spider: w,
        phase: bit_phase(m),
        moved: vec![b],
    })?;
    der.step(Rule::ColorChange { spider: k })?;
    let made = der.step(Rule::PiCopy { pi: k, target: b })?;
    let x_prep = created_next_to(der, made.clone(), prep);
    let byproduct = created_next_to(der, made, out);
    der.step(Rule::Copy {
        state: prep,
        target: x_prep,
    })?;
    Ok(Teleported {
        measured: w,
        effect: leaf,
        fresh: b,
        byproduct,
    })
}

/// Z rotation as a one-leg gadget: the wire spider `w` keeps its place and
/// gains a Hadamard edge to an ancilla measured in YZ with effect
/// `X(φ + mπ)`; a `Z(mπ)` byproduct moves out towards `next`.
pub fn z_rotation_gadget(der: &mut Derivation, w: NodeId, next: NodeId, m: u8) -> Result<MeasuredGadget> {
    let leaf = der.step_new(Rule::Unfuse {
        spider: w,
        phase: phase_of(der, w),
        moved: vec![],
    })?;
    let b = der.step_new(Rule::InsertHadamards { a: w, b: leaf })?;
    der.step(Rule::ColorChange { spider: leaf })?;
    let prep = der.step_new(Rule::Unfuse {
        spider: b,
        phase: Phase::zero(),
        moved: vec![],
    })?;
    let effect = attach_outcome(der, b, leaf, Color::X, m)?;
    let made = der.step(Rule::PiCopy {
        pi: effect.1,
        target: b,
    })?;
    let x_prep = created_next_to(der, made.clone(), prep);
    let x_w = created_next_to(der, made, w);
    let new_prep = der.step(Rule::Copy {
        state: prep,
        target: x_prep,
    })?;
    der.step(Rule::Fuse {
        a: b,
        b: new_prep.start,
    })?;
    let by = absorb_and_move(der, x_w, w, next, m)?;
    Ok(MeasuredGadget {
        ancilla: b,
        effect: effect.0,
        byproducts: [by, by],
    })
}

/// Nodes of the two-step teleportation realizing an X rotation.
#[derive(Clone, Copy, Debug)]
pub struct MeasuredMixer {
    /// The carrier, measured in XY at angle 0; effect `Z(mπ)`.
    pub carrier: NodeId,
    pub carrier_effect: NodeId,
    /// First ancilla, measured in XY; effect `Z(−(−1)^m·θ + m'π)` where
    /// the rotation was `X(−θ)`.
    pub prime: NodeId,
    pub prime_effect: NodeId,
    /// Second ancilla, the new carrier.
    pub second: NodeId,
    /// `X(m'π)` then `Z(mπ)` towards the output.
    pub x_byproduct: NodeId,
    pub z_byproduct: NodeId,
}

/// Rewrites `prev - X(φ) - …` into carrier, prime and second nodes
/// joined by Hadamard edges.
pub fn x_rotation_to_measurement(
    der: &mut Derivation,
    xr: NodeId,
    prev: NodeId,
    m: u8,
    m2: u8,
) -> Result<MeasuredMixer> {
    // Z(mπ)·Z(mπ) in front of the rotation, one half pushed through it
    let zm = der.step_new(Rule::InsertIdentity {
        a: prev,
        b: xr,
        color: Color::Z,
    })?;
    let zm2 = der.step_new(Rule::Unfuse {
        spider: zm,
        phase: bit_phase(m),
        moved: vec![xr],
    })?;
    let made = der.step(Rule::PiCopy { pi: zm2, target: xr })?;
    let z_byproduct = made.start;
    // X(m'π)·X(m'π) behind it, one half fused into the rotation
    let xi = der.step_new(Rule::InsertIdentity {
        a: xr,
        b: z_byproduct,
        color: Color::X,
    })?;
    let x_byproduct = der.step_new(Rule::Unfuse {
        spider: xi,
        phase: bit_phase(m2),
        moved: vec![z_byproduct],
    })?;
    der.step(Rule::Fuse { a: xr, b: xi })?;
    der.step(Rule::ColorChange { spider: xr })?;
    let prime_effect = der.step_new(Rule::Unfuse {
        spider: xr,
        phase: phase_of(der, xr),
        moved: vec![],
    })?;
    der.step_new(Rule::Unfuse {
        spider: xr,
        phase: Phase::zero(),
        moved: vec![],
    })?;
    let carrier_effect = der.step_new(Rule::Unfuse {
        spider: zm,
        phase: phase_of(der, zm),
        moved: vec![],
    })?;
    let second = der.step_new(Rule::InsertIdentity {
        a: xr,
        b: x_byproduct,
        color: Color::Z,
    })?;
    der.step_new(Rule::Unfuse {
        spider: second,
        phase: Phase::zero(),
        moved: vec![],
    })?;
    Ok(MeasuredMixer {
        carrier: zm,
        carrier_effect,
        prime: xr,
        prime_effect,
        second,
        x_byproduct,
        z_byproduct,
    })
}

/// Chain from `CNOT·Z_v(φ)·CNOT` to the phase gadget.
pub fn chain_cnot_to_gadget(phi: Phase) -> Result<Derivation> {
    let (d, b) = cnot_rz_cnot(phi);
    let (iu, ou) = (d.inputs()[0], d.outputs()[0]);
    let mut der = Derivation::new(d);
    cnot_block_to_gadget(&mut der, b, iu, ou)?;
    Ok(der)
}

/// Chain from a phase gadget with leaf `Z(φ)` to its measurement form.
pub fn chain_gadget_to_measurement(phi: Phase, m: u8) -> Result<Derivation> {
    let (d, g) = phase_gadget(phi);
    let outs = [d.outputs()[0], d.outputs()[1]];
    let mut der = Derivation::new(d);
    gadget_to_measurement(&mut der, g, outs, m)?;
    Ok(der)
}

/// Chain from `Z(φ)` to its teleporting measurement form.
pub fn chain_z_rotation(phi: Phase, m: u8) -> Result<Derivation> {
    let (d, w) = z_rotation(phi);
    let out = d.outputs()[0];
    let mut der = Derivation::new(d);
    z_rotation_teleport(&mut der, w, out, m)?;
    Ok(der)
}

/// Chain from `Z(φ)` to the one-leg gadget form.
pub fn chain_z_rotation_gadget(phi: Phase, m: u8) -> Result<Derivation> {
    let (d, w) = z_rotation(phi);
    let out = d.outputs()[0];
    let mut der = Derivation::new(d);
    z_rotation_gadget(&mut der, w, out, m)?;
    Ok(der)
}

/// Chain from `X(φ)` to the two-ancilla mixer form.
pub fn chain_x_rotation(phi: Phase, m: u8, m2: u8) -> Result<Derivation> {
    let (d, xr) = x_rotation(phi);
    let i = d.inputs()[0];
    let mut der = Derivation::new(d);
    x_rotation_to_measurement(&mut der, xr, i, m, m2)?;
    Ok(der)
}

/// Angles of one QUBO layer on a single edge with a linear term on `u`.
#[derive(Clone, Copy, Debug)]
pub struct LayerAngles {
    /// Gadget leaf phase.
    pub edge: Phase,
    /// Linear-term phase on `u`.
    pub linear: Phase,
    /// Mixer phase, the same X(φ) on both wires.
    pub mixer: Phase,
}

/// Outcome bits of [`chain_qubo_layer`], in measurement order.
#[derive(Clone, Copy, Debug, Default)]
pub struct LayerBits {
    pub edge: u8,
    pub linear: u8,
    pub u: u8,
    pub u2: u8,
    pub v: u8,
    pub v2: u8,
}

impl LayerBits {
    pub fn from_index(k: u32) -> Self {
        let b = |i: u32| ((k >> i) & 1) as u8;
        LayerBits {
            edge: b(0),
            linear: b(1),
            u: b(2),
            u2: b(3),
            v: b(4),
            v2: b(5),
        }
    }
}

/// The circuit of one layer: `CNOT·Z_v·CNOT`, `Z_u`, then `X` on both.
pub fn qubo_layer_circuit(a: LayerAngles) -> (ZxDiagram, CnotBlock, NodeId, [NodeId; 2]) {
    let mut d = ZxDiagram::new();
    let iu = d.add_input();
    let iv = d.add_input();
    let zc1 = d.add_z(Phase::zero());
    let zc2 = d.add_z(Phase::zero());
    let x1 = d.add_x(Phase::zero());
    let zg = d.add_z(a.edge);
    let x2 = d.add_x(Phase::zero());
    let zl = d.add_z(a.linear);
    let xu = d.add_x(a.mixer);
    let xv = d.add_x(a.mixer);
    let ou = d.add_output();
    let ov = d.add_output();
    for (p, q) in [(iu, zc1), (zc1, zc2), (zc2, zl), (zl, xu), (xu, ou)] {
        d.plain(p, q);
    }
    for (p, q) in [(iv, x1), (x1, zg), (zg, x2), (x2, xv), (xv, ov)] {
        d.plain(p, q);
    }
    d.plain(zc1, x1);
    d.plain(zc2, x2);
    (d, CnotBlock { zc1, zc2, x1, zg, x2 }, zl, [xu, xv])
}

/// One full QUBO layer from circuit to graph-state form. At the end each
/// wire has a single carrier Z spider (edge ancilla, linear ancilla and
/// mixer prime attached by Hadamard edges) whose XY effect at angle 0 has
/// absorbed every Z byproduct produced on that wire during the layer.
pub fn chain_qubo_layer(a: LayerAngles, bits: LayerBits) -> Result<Derivation> {
    let (d, block, zl, [xu, xv]) = qubo_layer_circuit(a);
    let iu = d.inputs()[0];
    let mut der = Derivation::new(d);
    let g = cnot_block_to_gadget(&mut der, block, iu, zl)?;
    let mg = gadget_to_measurement(&mut der, g, [zl, xv], bits.edge)?;
    let lin = z_rotation_gadget(&mut der, zl, xu, bits.linear)?;
    let mu = x_rotation_to_measurement(&mut der, xu, lin.byproducts[0], bits.u, bits.u2)?;
    let mv = x_rotation_to_measurement(&mut der, xv, mg.byproducts[1], bits.v, bits.v2)?;
    // merge each wire into one carrier and re-split its effect
    for (carrier, parts) in [
        (
            g.zu,
            vec![
                mg.byproducts[0],
                zl,
                lin.byproducts[0],
                mu.carrier,
                mu.carrier_effect,
            ],
        ),
        (g.zv, vec![mg.byproducts[1], mv.carrier, mv.carrier_effect]),
    ] {
        for p in parts {
            der.step(Rule::Fuse { a: carrier, b: p })?;
        }
        der.step(Rule::Unfuse {
            spider: carrier,
            phase: phase_of(&der, carrier),
            moved: vec![],
        })?;
    }
    Ok(der)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zx::check_chain;

    #[test]
    fn chains_are_sound() {
        let phi = Phase::from_radians(0.37);
        check_chain(chain_cnot_to_gadget(phi).unwrap().diagrams(), 1e-10).unwrap();
        for m in 0..2 {
            check_chain(chain_gadget_to_measurement(phi, m).unwrap().diagrams(), 1e-10).unwrap();
            check_chain(chain_z_rotation(phi, m).unwrap().diagrams(), 1e-10).unwrap();
            check_chain(chain_z_rotation_gadget(phi, m).unwrap().diagrams(), 1e-10).unwrap();
            for m2 in 0..2 {
                check_chain(chain_x_rotation(phi, m, m2).unwrap().diagrams(), 1e-10).unwrap();
            }
        }
        let a = LayerAngles {
            edge: phi,
            linear: Phase::from_radians(1.1),
            mixer: Phase::from_radians(-0.6),
        };
        for k in [0, 21, 63] {
            check_chain(
                chain_qubo_layer(a, LayerBits::from_index(k)).unwrap().diagrams(),
                1e-10,
            )
            .unwrap();
        }
    }
}
