//! Dense statevector reference for gate-model QAOA.
//!
//! Rotations are written as exponentials: `RZ(θ) = e^{iθZ}`,
//! `RX(θ) = e^{iθX}`, `ZZ(θ) = e^{iθZ⊗Z}` and `CTRL0_RX(θ)` applies
//! `e^{iθX}` to the target when every control reads 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, C64};
use crate::problem::{Graph, QuboProblem};

/// Largest register simulated densely.
pub const MAX_QUBITS: usize = 14;

/// Factor `s` in `θ = −γ·J·s` (and `−γ·h·s`). With `s = 2` a MaxCut edge
/// term `−½ z_u z_v` becomes exactly `e^{iγZ_uZ_v}`.
pub const PHASE_SCALE: f64 = 2.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<C64>,
}

impl Statevector {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Self {
        let mut amps = vec![c64(0.0, 0.0); 1 << n];
        amps[0] = c64(1.0, 0.0);
        Statevector { n, amps }
    }

    pub fn basis(n: usize, k: usize) -> Self {
        let mut amps = vec![c64(0.0, 0.0); 1 << n];
        amps[k] = c64(1.0, 0.0);
        Statevector { n, amps }
    }

    /// `|+⟩^{⊗n}`.
    pub fn plus(n: usize) -> Self {
        let a = c64((1usize << n) as f64, 0.0).inv().sqrt();
        Statevector {
            n,
            amps: vec![a; 1 << n],
        }
    }

    /// Wraps amplitudes, normalizing them. The length must be `2^n`.
    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != 1 << n {
            return Err(Error::InvalidInput(format!(
                "expected {} amplitudes, got {}",
                1usize << n,
                amps.len()
            )));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidInput("state has zero norm".into()));
        }
        Ok(Statevector {
            n,
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// Wraps amplitudes as given.
    pub(crate) fn from_raw(n: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n);
        Statevector { n, amps }
    }

    /// Tensor product `self ⊗ low`, with `low` on the low qubits.
    pub fn tensor_low(&self, low: &Statevector) -> Statevector {
        let mut amps = Vec::with_capacity(self.amps.len() * low.amps.len());
        for a in &self.amps {
            for b in &low.amps {
                amps.push(a * b);
            }
        }
        Statevector {
            n: self.n + low.n,
            amps,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Statevector) -> C64 {
        assert_eq!(self.n, other.n, "register size mismatch");
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `max_k |a_k − e^{iφ} b_k|` with the phase `φ` aligning the inner
    /// product; zero iff the states agree up to global phase.
    pub fn phase_distance(&self, other: &Statevector) -> f64 {
        let ip = other.inner(self);
        let phase = if ip.norm() == 0.0 {
            c64(1.0, 0.0)
        } else {
            ip / ip.norm()
        };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - phase * b).norm())
            .fold(0.0, f64::max)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_qubit(&self, q: usize) {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
    }

    /// Applies the 2×2 matrix `[[a, b], [c, d]]` to qubit `q` on the basis
    /// states selected by `mask`/`want` (all states when `mask == 0`).
    pub(crate) fn apply_1q_masked(&mut self, q: usize, m: [C64; 4], mask: usize, want: usize) {
        self.check_qubit(q);
        let bit = 1 << q;
        for k in 0..self.amps.len() {
            if k & bit != 0 || k & mask != want {
                continue;
            }
            let (x, y) = (self.amps[k], self.amps[k | bit]);
            self.amps[k] = m[0] * x + m[1] * y;
            self.amps[k | bit] = m[2] * x + m[3] * y;
        }
    }

    pub fn apply(&mut self, op: &GateOp) {
        match op {
            GateOp::Rz { theta, q } => {
                let e = C64::from_polar(1.0, *theta);
                self.apply_1q_masked(*q, [e, c64(0.0, 0.0), c64(0.0, 0.0), e.conj()], 0, 0);
            }
            GateOp::Rx { theta, q } => self.apply_1q_masked(*q, rx_matrix(*theta), 0, 0),
            GateOp::H { q } => {
                let h = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_1q_masked(*q, [h, h, h, -h], 0, 0);
            }
            GateOp::Cz { a, b } => {
                self.check_qubit(*a);
                self.check_qubit(*b);
                assert_ne!(a, b, "CZ needs two distinct qubits");
                let m = (1 << a) | (1 << b);
                for (k, amp) in self.amps.iter_mut().enumerate() {
                    if k & m == m {
                        *amp = -*amp;
                    }
                }
            }
            GateOp::Cnot { control, target } => {
                assert_ne!(control, target, "CNOT needs two distinct qubits");
                self.check_qubit(*control);
                let x = [c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)];
                self.apply_1q_masked(*target, x, 1 << control, 1 << control);
            }
            GateOp::Zz { theta, a, b } => {
                self.check_qubit(*a);
                self.check_qubit(*b);
                assert_ne!(a, b, "ZZ needs two distinct qubits");
                let e = C64::from_polar(1.0, *theta);
                for (k, amp) in self.amps.iter_mut().enumerate() {
                    let parity = ((k >> a) ^ (k >> b)) & 1;
                    *amp *= if parity == 0 { e } else { e.conj() };
                }
            }
            GateOp::Ctrl0Rx {
                theta,
                controls,
                target,
            } => {
                let mut mask = 0;
                for &c in controls {
                    assert_ne!(c, *target, "control equals target");
                    self.check_qubit(c);
                    mask |= 1 << c;
                }
                self.apply_1q_masked(*target, rx_matrix(*theta), mask, 0);
            }
        }
    }
}

fn rx_matrix(theta: f64) -> [C64; 4] {
    let c = c64(theta.cos(), 0.0);
    let s = c64(0.0, theta.sin());
    [c, s, s, c]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "GateDoc", try_from = "GateDoc")]
pub enum GateOp {
    Rz {
        theta: f64,
        q: usize,
    },
    Rx {
        theta: f64,
        q: usize,
    },
    H {
        q: usize,
    },
    Cz {
        a: usize,
        b: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Zz {
        theta: f64,
        a: usize,
        b: usize,
    },
    /// Controls first in `qubits`, target last.
    Ctrl0Rx {
        theta: f64,
        controls: Vec<usize>,
        target: usize,
    },
}

impl GateOp {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            GateOp::Rz { q, .. } | GateOp::Rx { q, .. } | GateOp::H { q } => vec![*q],
            GateOp::Cz { a, b } | GateOp::Zz { a, b, .. } => vec![*a, *b],
            GateOp::Cnot { control, target } => vec![*control, *target],
            GateOp::Ctrl0Rx { controls, target, .. } => controls.iter().copied().chain([*target]).collect(),
        }
    }

    pub fn is_entangling(&self) -> bool {
        self.qubits().len() > 1
    }
}

/// `{kind, qubits, angle}` wire form of a gate.
#[derive(Serialize, Deserialize)]
struct GateDoc {
    kind: String,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
}

impl From<GateOp> for GateDoc {
    fn from(g: GateOp) -> Self {
        let (kind, angle) = match &g {
            GateOp::Rz { theta, .. } => ("RZ", Some(*theta)),
            GateOp::Rx { theta, .. } => ("RX", Some(*theta)),
            GateOp::H { .. } => ("H", None),
            GateOp::Cz { .. } => ("CZ", None),
            GateOp::Cnot { .. } => ("CNOT", None),
            GateOp::Zz { theta, .. } => ("ZZ", Some(*theta)),
            GateOp::Ctrl0Rx { theta, .. } => ("CTRL0_RX", Some(*theta)),
        };
        GateDoc {
            kind: kind.into(),
            qubits: g.qubits(),
            angle,
        }
    }
}

impl TryFrom<GateDoc> for GateOp {
    type Error = String;

    fn try_from(d: GateDoc) -> std::result::Result<Self, String> {
        let q = &d.qubits;
        let angle = || d.angle.ok_or_else(|| format!("{} needs an angle", d.kind));
        let arity = |n: usize| {
            if q.len() == n {
                Ok(())
            } else {
                Err(format!("{} takes {n} qubits, got {}", d.kind, q.len()))
            }
        };
        Ok(match d.kind.as_str() {
            "RZ" => {
                arity(1)?;
                GateOp::Rz {
                    theta: angle()?,
                    q: q[0],
                }
            }
            "RX" => {
                arity(1)?;
                GateOp::Rx {
                    theta: angle()?,
                    q: q[0],
                }
            }
            "H" => {
                arity(1)?;
                GateOp::H { q: q[0] }
            }
            "CZ" => {
                arity(2)?;
                GateOp::Cz { a: q[0], b: q[1] }
            }
            "CNOT" => {
                arity(2)?;
                GateOp::Cnot {
                    control: q[0],
                    target: q[1],
                }
            }
            "ZZ" => {
                arity(2)?;
                GateOp::Zz {
                    theta: angle()?,
                    a: q[0],
                    b: q[1],
                }
            }
            "CTRL0_RX" => {
                if q.is_empty() {
                    return Err("CTRL0_RX needs a target".into());
                }
                GateOp::Ctrl0Rx {
                    theta: angle()?,
                    controls: q[..q.len() - 1].to_vec(),
                    target: q[q.len() - 1],
                }
            }
            other => return Err(format!("unknown gate kind {other}")),
        })
    }
}

pub fn circuit_to_json(c: &[GateOp]) -> String {
    serde_json::to_string_pretty(c).expect("circuit serialization cannot fail")
}

pub fn circuit_from_json(text: &str) -> Result<Vec<GateOp>> {
    Ok(serde_json::from_str(text)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        let p = QaoaParams { gammas, betas };
        p.validate()?;
        Ok(p)
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.gammas.is_empty() {
            return Err(Error::InvalidInput("depth p must be at least 1".into()));
        }
        if self.gammas.len() != self.betas.len() {
            return Err(Error::InvalidInput(format!(
                "{} gammas but {} betas",
                self.gammas.len(),
                self.betas.len()
            )));
        }
        if self.gammas.iter().chain(&self.betas).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("angles must be finite".into()));
        }
        Ok(())
    }
}

fn check_width(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::limit("statevector qubits", MAX_QUBITS, n));
    }
    Ok(())
}

/// `H^{⊗n}`, then per layer: `ZZ` per quadratic term, `RZ` per linear term
/// and `RX(−β)` on every vertex.
pub fn build_qaoa_circuit(q: &QuboProblem, params: &QaoaParams) -> Result<Vec<GateOp>> {
    params.validate()?;
    let mut c: Vec<GateOp> = (0..q.n()).map(|v| GateOp::H { q: v }).collect();
    for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
        for ((a, b), j) in q.quadratic() {
            c.push(GateOp::Zz {
                theta: -gamma * j * PHASE_SCALE,
                a,
                b,
            });
        }
        for (v, h) in q.linear() {
            c.push(GateOp::Rz {
                theta: -gamma * h * PHASE_SCALE,
                q: v,
            });
        }
        for v in 0..q.n() {
            c.push(GateOp::Rx { theta: -beta, q: v });
        }
    }
    Ok(c)
}

/// Runs `circuit` on `|0…0⟩`.
pub fn run(circuit: &[GateOp], n: usize) -> Result<Statevector> {
    run_from(circuit, Statevector::zero(n))
}

pub fn run_from(circuit: &[GateOp], mut sv: Statevector) -> Result<Statevector> {
    check_width(sv.n())?;
    for op in circuit {
        if let Some(&q) = op.qubits().iter().find(|&&q| q >= sv.n()) {
            return Err(Error::InvalidInput(format!(
                "gate acts on qubit {q} of a {}-qubit register",
                sv.n()
            )));
        }
        sv.apply(op);
    }
    Ok(sv)
}

pub fn distribution(sv: &Statevector) -> Vec<f64> {
    sv.probabilities()
}

/// `Σ_x P(x)·cost(x)`.
pub fn expectation_cost(sv: &Statevector, q: &QuboProblem) -> f64 {
    assert_eq!(sv.n(), q.n(), "register size must equal problem size");
    sv.probabilities()
        .iter()
        .enumerate()
        .map(|(k, p)| p * q.cost_index(k))
        .sum()
}

/// Total variation distance `½ Σ |p − q|`.
pub fn tvd(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "distribution length mismatch");
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Output distribution of the QAOA circuit for `q`.
pub fn qaoa_distribution(q: &QuboProblem, params: &QaoaParams) -> Result<Vec<f64>> {
    check_width(q.n())?;
    Ok(distribution(&run(&build_qaoa_circuit(q, params)?, q.n())?))
}

pub fn qaoa_expectation(q: &QuboProblem, params: &QaoaParams) -> Result<f64> {
    check_width(q.n())?;
    let sv = run(&build_qaoa_circuit(q, params)?, q.n())?;
    Ok(expectation_cost(&sv, q))
}

/// A uniform grid over one `(γ, β)` pair shared by every layer; upper
/// ends are exclusive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points: usize,
    pub gamma_range: (f64, f64),
    pub beta_range: (f64, f64),
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points: 16,
            gamma_range: (0.0, std::f64::consts::PI),
            beta_range: (0.0, std::f64::consts::FRAC_PI_2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub gamma: f64,
    pub beta: f64,
    pub expectation: f64,
}

/// The grid point with the largest expected cost; ties go to the first.
pub fn grid_sweep(q: &QuboProblem, depth: usize, grid: &GridSpec) -> Result<SweepResult> {
    if grid.points == 0 || depth == 0 {
        return Err(Error::InvalidInput(
            "grid points and depth must be positive".into(),
        ));
    }
    check_width(q.n())?;
    let at = |(lo, hi): (f64, f64), i: usize| lo + (hi - lo) * i as f64 / grid.points as f64;
    let mut best = SweepResult {
        gamma: 0.0,
        beta: 0.0,
        expectation: f64::NEG_INFINITY,
    };
    for i in 0..grid.points {
        let gamma = at(grid.gamma_range, i);
        for j in 0..grid.points {
            let beta = at(grid.beta_range, j);
            let params = QaoaParams::new(vec![gamma; depth], vec![beta; depth])?;
            let e = qaoa_expectation(q, &params)?;
            if e > best.expectation + 1e-12 {
                best = SweepResult {
                    gamma,
                    beta,
                    expectation: e,
                };
            }
        }
    }
    Ok(best)
}

/// `Λ_{N(v)}(e^{iβX_v})`: rotates `v` only where all neighbours are 0.
pub fn apply_partial_mixer(sv: &Statevector, g: &Graph, v: usize, beta: f64) -> Statevector {
    assert!(v < g.n(), "vertex {v} out of range");
    let mask = g.neighbors(v).iter().fold(0, |m, &w| m | (1 << w));
    let mut out = sv.clone();
    out.apply_1q_masked(v, rx_matrix(beta), mask, 0);
    out
}

/// Initial state of the independent-set ansatz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MisInit {
    /// `|0…0⟩`, the empty set.
    AllZeros,
    /// A classical independent set followed by one mixer pass at `beta`.
    ClassicalSet { set: Vec<u8>, beta: f64 },
}

/// Phase separator `RZ` on every vertex for the objective `Σ x_v`, then
/// the ordered product of partial mixers `U_v(β) = CTRL0_RX(β)`.
pub fn build_mis_qaoa(
    g: &Graph,
    params: &QaoaParams,
    order: &[usize],
    init: &MisInit,
) -> Result<Vec<GateOp>> {
    params.validate()?;
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..g.n()).collect::<Vec<_>>() {
        return Err(Error::InvalidInput(
            "mixer order must be a permutation of the vertices".into(),
        ));
    }
    let mixer = |beta: f64| {
        order.iter().map(move |&v| GateOp::Ctrl0Rx {
            theta: beta,
            controls: g.neighbors(v),
            target: v,
        })
    };
    let mut c = Vec::new();
    match init {
        MisInit::AllZeros => {}
        MisInit::ClassicalSet { set, beta } => {
            if set.len() != g.n() {
                return Err(Error::InvalidInput("initial set has the wrong length".into()));
            }
            if g.edges().iter().any(|&(a, b)| set[a] == 1 && set[b] == 1) {
                return Err(Error::InvalidInput("initial set is not independent".into()));
            }
            for (v, &b) in set.iter().enumerate() {
                if b == 1 {
                    // e^{iπ/2·X} = iX
                    c.push(GateOp::Rx {
                        theta: std::f64::consts::FRAC_PI_2,
                        q: v,
                    });
                }
            }
            c.extend(mixer(*beta));
        }
    }
    // objective Σ x_v: h_v = −½, so θ = −γ·h·s = γ
    for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
        for v in 0..g.n() {
            c.push(GateOp::Rz {
                theta: gamma * 0.5 * PHASE_SCALE,
                q: v,
            });
        }
        c.extend(mixer(beta));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::maxcut_to_qubo;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn hadamard_on_zero() {
        let sv = run(&[GateOp::H { q: 0 }], 1).unwrap();
        for a in sv.amplitudes() {
            assert!((a - c64(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn cz_on_plus_plus() {
        let sv = run_from(&[GateOp::Cz { a: 0, b: 1 }], Statevector::plus(2)).unwrap();
        let want = [0.5, 0.5, 0.5, -0.5];
        for (a, w) in sv.amplitudes().iter().zip(want) {
            assert!((a - c64(w, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn zz_phase_on_00() {
        let sv = run(
            &[GateOp::Zz {
                theta: 0.3,
                a: 0,
                b: 1,
            }],
            2,
        )
        .unwrap();
        assert!((sv.amplitudes()[0] - C64::from_polar(1.0, 0.3)).norm() < 1e-15);
    }

    #[test]
    fn width_guard() {
        assert!(matches!(run(&[], 15), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn k2_optimum() {
        let q = maxcut_to_qubo(&Graph::path(2)).unwrap();
        let params = QaoaParams::new(vec![PI / 4.0], vec![PI / 8.0]).unwrap();
        assert!((qaoa_expectation(&q, &params).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gate_json_round_trip() {
        let c = vec![
            GateOp::H { q: 0 },
            GateOp::Zz {
                theta: 0.5,
                a: 0,
                b: 1,
            },
            GateOp::Ctrl0Rx {
                theta: -0.2,
                controls: vec![1, 2],
                target: 0,
            },
        ];
        let text = circuit_to_json(&c);
        assert!(text.contains("\"CTRL0_RX\""));
        assert_eq!(circuit_from_json(&text).unwrap(), c);
    }

    #[test]
    fn infeasible_classical_init_rejected() {
        let g = Graph::path(2);
        let p = QaoaParams::new(vec![0.1], vec![0.2]).unwrap();
        let init = MisInit::ClassicalSet {
            set: vec![1, 1],
            beta: 0.3,
        };
        assert!(matches!(
            build_mis_qaoa(&g, &p, &[0, 1], &init),
            Err(Error::InvalidInput(_))
        ));
    }
}
