//! Dense tensor-network semantics for [`ZxDiagram`].
//!
//! Every edge end gets an index variable; plain edges identify the two
//! variables of their ends, Hadamard edges contribute a 2×2 tensor. The
//! network is contracted pairwise, then read out as a matrix with outputs
//! on rows and inputs on columns.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{c64, LinearMap, C64};

use super::diagram::{Color, EdgeKind, Node, ZxDiagram};

/// Maximum number of open boundary ports accepted by [`to_matrix`].
pub const MAX_BOUNDARY: usize = 12;
/// Maximum rank of any intermediate tensor.
pub const MAX_TENSOR_RANK: usize = 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ContractionOrder {
    /// Repeatedly contract the pair with the smallest result.
    #[default]
    Greedy,
    /// Fold tensors left to right in construction order.
    Sequential,
}

type Var = usize;

#[derive(Clone, Debug)]
struct Tensor {
    vars: Vec<Var>,
    data: Vec<C64>,
}

impl Tensor {
    fn scalar(z: C64) -> Self {
        Tensor {
            vars: Vec::new(),
            data: vec![z],
        }
    }

    /// Builds a tensor over the distinct variables of `legs`; `f` receives
    /// one bit per leg, repeated legs getting the same bit.
    fn from_legs(legs: &[Var], f: impl Fn(&[u8]) -> C64) -> Self {
        let mut vars: Vec<Var> = legs.to_vec();
        vars.sort_unstable();
        vars.dedup();
        let pos: Vec<usize> = legs
            .iter()
            .map(|l| vars.iter().position(|v| v == l).unwrap())
            .collect();
        let mut bits = vec![0u8; legs.len()];
        let data = (0..1usize << vars.len())
            .map(|idx| {
                for (b, &p) in bits.iter_mut().zip(&pos) {
                    *b = ((idx >> p) & 1) as u8;
                }
                f(&bits)
            })
            .collect();
        Tensor { vars, data }
    }

    fn contract(&self, other: &Tensor) -> Result<Tensor> {
        let shared: Vec<Var> = self
            .vars
            .iter()
            .copied()
            .filter(|v| other.vars.contains(v))
            .collect();
        let mut out_vars: Vec<Var> = self
            .vars
            .iter()
            .copied()
            .filter(|v| !shared.contains(v))
            .collect();
        out_vars.extend(other.vars.iter().copied().filter(|v| !shared.contains(v)));
        if out_vars.len() > MAX_TENSOR_RANK {
            return Err(Error::limit(
                "intermediate tensor rank",
                MAX_TENSOR_RANK,
                out_vars.len(),
            ));
        }
        // enumeration order: result bits low, shared bits high
        let all: Vec<Var> = out_vars.iter().chain(shared.iter()).copied().collect();
        let a_pos: Vec<Option<usize>> = all
            .iter()
            .map(|v| self.vars.iter().position(|x| x == v))
            .collect();
        let b_pos: Vec<Option<usize>> = all
            .iter()
            .map(|v| other.vars.iter().position(|x| x == v))
            .collect();
        let n_out = out_vars.len();
        let mut data = vec![c64(0.0, 0.0); 1 << n_out];
        for idx in 0..1usize << all.len() {
            let mut ai = 0usize;
            let mut bi = 0usize;
            for k in 0..all.len() {
                let bit = (idx >> k) & 1;
                if let Some(p) = a_pos[k] {
                    ai |= bit << p;
                }
                if let Some(p) = b_pos[k] {
                    bi |= bit << p;
                }
            }
            let a = self.data[ai];
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            data[idx & ((1 << n_out) - 1)] += a * other.data[bi];
        }
        Ok(Tensor { vars: out_vars, data })
    }

    fn value_at(&self, assignment: impl Fn(Var) -> u8) -> C64 {
        let idx = self
            .vars
            .iter()
            .enumerate()
            .fold(0usize, |acc, (k, &v)| acc | ((assignment(v) as usize) << k));
        self.data[idx]
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[rb] = ra;
        }
    }
}

fn spider_value(color: Color, phase: f64, bits: &[u8]) -> C64 {
    let n = bits.len();
    let e = C64::from_polar(1.0, phase);
    match color {
        Color::Z => {
            if bits.iter().all(|&b| b == 0) {
                if n == 0 {
                    c64(1.0, 0.0) + e
                } else {
                    c64(1.0, 0.0)
                }
            } else if bits.iter().all(|&b| b == 1) {
                e
            } else {
                c64(0.0, 0.0)
            }
        }
        Color::X => {
            let parity = bits.iter().map(|&b| b as u32).sum::<u32>() % 2;
            let sign = if parity == 0 { 1.0 } else { -1.0 };
            (c64(1.0, 0.0) + e * sign) * FRAC_1_SQRT_2.powi(n as i32)
        }
    }
}

fn hadamard_value(bits: &[u8]) -> C64 {
    if bits[0] == 1 && bits[1] == 1 {
        c64(-FRAC_1_SQRT_2, 0.0)
    } else {
        c64(FRAC_1_SQRT_2, 0.0)
    }
}

/// Linear map of `d` including its tracked scalar, contracted greedily.
pub fn to_matrix(d: &ZxDiagram) -> Result<LinearMap> {
    to_matrix_with(d, ContractionOrder::Greedy)
}

pub fn to_matrix_with(d: &ZxDiagram, order: ContractionOrder) -> Result<LinearMap> {
    d.validate()?;
    let ports = d.inputs.len() + d.outputs.len();
    if ports > MAX_BOUNDARY {
        return Err(Error::limit("diagram boundary ports", MAX_BOUNDARY, ports));
    }

    let mut uf = UnionFind::new(2 * d.edges.len());
    for (i, e) in d.edges.iter().enumerate() {
        if e.kind == EdgeKind::Plain {
            uf.union(2 * i, 2 * i + 1);
        }
    }

    let mut tensors = Vec::new();
    let mut port_var = std::collections::BTreeMap::new();
    for (id, node) in d.nodes.iter() {
        let mut legs = Vec::new();
        for (i, e) in d.edges.iter().enumerate() {
            if e.a == *id {
                legs.push(uf.find(2 * i));
            }
            if e.b == *id {
                legs.push(uf.find(2 * i + 1));
            }
        }
        match node {
            Node::Boundary => {
                port_var.insert(*id, legs[0]);
            }
            Node::Spider(s) => {
                let phase = s.phase.radians();
                let color = s.color;
                tensors.push(Tensor::from_legs(&legs, |bits| spider_value(color, phase, bits)));
            }
        }
    }
    for (i, e) in d.edges.iter().enumerate() {
        if e.kind == EdgeKind::Hadamard {
            let legs = [uf.find(2 * i), uf.find(2 * i + 1)];
            tensors.push(Tensor::from_legs(&legs, hadamard_value));
        }
    }

    let result = match order {
        ContractionOrder::Greedy => contract_greedy(tensors)?,
        ContractionOrder::Sequential => contract_sequential(tensors)?,
    };

    let rows = 1usize << d.outputs.len();
    let cols = 1usize << d.inputs.len();
    let out_vars: Vec<Var> = d.outputs.iter().map(|o| port_var[o]).collect();
    let in_vars: Vec<Var> = d.inputs.iter().map(|i| port_var[i]).collect();
    let mut data = vec![c64(0.0, 0.0); rows * cols];
    let mut assign: std::collections::BTreeMap<Var, u8> = Default::default();
    for r in 0..rows {
        'col: for c in 0..cols {
            assign.clear();
            let ports = out_vars
                .iter()
                .enumerate()
                .map(|(k, v)| (*v, ((r >> k) & 1) as u8))
                .chain(
                    in_vars
                        .iter()
                        .enumerate()
                        .map(|(k, v)| (*v, ((c >> k) & 1) as u8)),
                );
            for (v, bit) in ports {
                if let Some(prev) = assign.insert(v, bit) {
                    if prev != bit {
                        continue 'col;
                    }
                }
            }
            let val = result.value_at(|v| assign.get(&v).copied().unwrap_or(0));
            data[r * cols + c] = val * d.scalar;
        }
    }
    Ok(LinearMap::from_rows(rows, cols, &data))
}

fn contract_sequential(tensors: Vec<Tensor>) -> Result<Tensor> {
    tensors
        .into_iter()
        .try_fold(Tensor::scalar(c64(1.0, 0.0)), |acc, t| acc.contract(&t))
}

fn contract_greedy(mut tensors: Vec<Tensor>) -> Result<Tensor> {
    if tensors.is_empty() {
        return Ok(Tensor::scalar(c64(1.0, 0.0)));
    }
    while tensors.len() > 1 {
        // only pairs sharing an index are candidates
        let mut owners: std::collections::BTreeMap<Var, Vec<usize>> = Default::default();
        for (i, t) in tensors.iter().enumerate() {
            for &v in &t.vars {
                owners.entry(v).or_default().push(i);
            }
        }
        let mut best: Option<(usize, usize, (usize, usize))> = None;
        for list in owners.values() {
            for (x, &i) in list.iter().enumerate() {
                for &j in &list[x + 1..] {
                    let (a, b) = (&tensors[i], &tensors[j]);
                    let shared = a.vars.iter().filter(|v| b.vars.contains(v)).count();
                    let rank = a.vars.len() + b.vars.len() - 2 * shared;
                    let key = (rank, a.vars.len() + b.vars.len());
                    if best.as_ref().is_none_or(|(_, _, k)| key < *k) {
                        best = Some((i, j, key));
                    }
                }
            }
        }
        let (i, j) = match best {
            Some((i, j, _)) => (i, j),
            None => {
                // disconnected pieces: fold the two smallest
                let mut idx: Vec<usize> = (0..tensors.len()).collect();
                idx.sort_by_key(|&k| tensors[k].vars.len());
                (idx[0].min(idx[1]), idx[0].max(idx[1]))
            }
        };
        let b = tensors.swap_remove(j);
        let a = tensors.swap_remove(i);
        tensors.push(a.contract(&b)?);
    }
    Ok(tensors.pop().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{equal_up_to_scalar, pauli_x};
    use crate::zx::diagram::single_spider;
    use crate::zx::phase::Phase;

    #[test]
    fn z_zero_is_identity() {
        let (d, _) = single_spider(Color::Z, Phase::zero());
        let m = to_matrix(&d).unwrap();
        assert!(m.max_diff(&LinearMap::identity(1)) < 1e-15);
    }

    #[test]
    fn x_pi_is_not() {
        let (d, _) = single_spider(Color::X, Phase::pi());
        let m = to_matrix(&d).unwrap();
        assert!(equal_up_to_scalar(&m, &pauli_x(), 1e-14));
        // unnormalized X(π) with two legs is exactly NOT
        assert!(m.max_diff(&pauli_x()) < 1e-15);
    }

    #[test]
    fn bare_wire_and_crossing() {
        let mut d = ZxDiagram::new();
        let i0 = d.add_input();
        let i1 = d.add_input();
        let o0 = d.add_output();
        let o1 = d.add_output();
        d.plain(i0, o1);
        d.plain(i1, o0);
        let m = to_matrix(&d).unwrap();
        // swap: |ab> -> |ba>
        for c in 0..4usize {
            let r = ((c & 1) << 1) | (c >> 1);
            assert_eq!(m.get(r, c), c64(1.0, 0.0));
        }
    }

    #[test]
    fn zero_leg_spiders() {
        let mut d = ZxDiagram::new();
        d.add_z(Phase::from_pi_fraction(1, 2));
        let m = to_matrix(&d).unwrap();
        assert!((m.get(0, 0) - c64(1.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn too_many_ports() {
        let mut d = ZxDiagram::new();
        for _ in 0..7 {
            let i = d.add_input();
            let o = d.add_output();
            d.plain(i, o);
        }
        assert!(matches!(to_matrix(&d), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn hadamard_self_loop() {
        // Z(α) with an H self-loop equals Z(α+π)/√2
        let (mut d, s) = single_spider(Color::Z, Phase::from_radians(0.4));
        d.hadamard(s, s);
        let (e, _) = single_spider(Color::Z, Phase::from_radians(0.4 + std::f64::consts::PI));
        let a = to_matrix(&d).unwrap();
        let b = to_matrix(&e).unwrap().scale(c64(FRAC_1_SQRT_2, 0.0));
        assert!(a.max_diff(&b) < 1e-14);
    }
}
