//! Constraint-preserving QAOA for maximum independent set.
//!
//! The mixer is an ordered product of partial mixers
//! `U_v(β) = Λ_{N(v)}(e^{iβX_v})`, each rotating `v` only when all of its
//! neighbours are 0, so independent sets are mapped to superpositions of
//! independent sets.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gatesim::{self, apply_partial_mixer, MisInit, QaoaParams, Statevector};
use crate::linalg::{c64, LinearMap, C64};
use crate::problem::MisInstance;

/// Largest neighbourhood [`partial_mixer_matrix`] will expand.
pub const MAX_MIXER_DEGREE: usize = 10;
/// Largest instance simulated by the feasibility suite and expectations.
pub const MAX_MIS_QUBITS: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartialMixerSpec {
    pub vertex: usize,
    /// Zero-controls, the neighbourhood of `vertex` in ascending order.
    pub controls: Vec<usize>,
    pub angle: f64,
}

impl PartialMixerSpec {
    pub fn new(m: &MisInstance, vertex: usize, angle: f64) -> Result<Self> {
        if vertex >= m.n() {
            return Err(Error::InvalidInput(format!("vertex {vertex} out of range")));
        }
        Ok(PartialMixerSpec {
            vertex,
            controls: m.graph().neighbors(vertex),
            angle,
        })
    }
}

/// Dense `U_v(β)` on the register `[v, N(v)…]`: `v` is qubit 0 and the
/// neighbours follow in ascending order.
pub fn partial_mixer_matrix(m: &MisInstance, v: usize, beta: f64) -> Result<LinearMap> {
    let spec = PartialMixerSpec::new(m, v, beta)?;
    let d = spec.controls.len();
    if d > MAX_MIXER_DEGREE {
        return Err(Error::limit("partial mixer degree", MAX_MIXER_DEGREE, d));
    }
    let dim = 1usize << (d + 1);
    let (c, s) = (c64(beta.cos(), 0.0), c64(0.0, beta.sin()));
    let mut data = vec![c64(0.0, 0.0); dim * dim];
    for col in 0..dim {
        if col >> 1 == 0 {
            // all controls 0: e^{iβX} on qubit 0
            data[col * dim + col] = c;
            data[(col ^ 1) * dim + col] = s;
        } else {
            data[col * dim + col] = c64(1.0, 0.0);
        }
    }
    Ok(LinearMap::from_rows(dim, dim, &data))
}

/// The same unitary from its phase form: `H_v · Λ_{N(v)}(e^{iβZ_v}) · H_v`,
/// where the controlled phase is diagonal with `e^{±iβ}` on the all-zero
/// control block.
pub fn partial_mixer_phase_form(degree: usize, beta: f64) -> Result<LinearMap> {
    if degree > MAX_MIXER_DEGREE {
        return Err(Error::limit("partial mixer degree", MAX_MIXER_DEGREE, degree));
    }
    let dim = 1usize << (degree + 1);
    let diag: Vec<C64> = (0..dim)
        .map(|k| match (k >> 1 == 0, k & 1) {
            (true, 0) => C64::from_polar(1.0, beta),
            (true, _) => C64::from_polar(1.0, -beta),
            _ => c64(1.0, 0.0),
        })
        .collect();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = vec![c64(0.0, 0.0); dim * dim];
    for col in 0..dim {
        // H_v on column, phase, H_v on rows
        let pair = [col & !1, col | 1];
        let sign_in = |b: usize| if b & col & 1 == 1 { -h } else { h };
        for &mid in &pair {
            let a = sign_in(mid & 1) * diag[mid];
            for &row in &pair {
                let sign_out = if row & mid & 1 == 1 { -h } else { h };
                out[row * dim + col] += a * sign_out;
            }
        }
    }
    Ok(LinearMap::from_rows(dim, dim, &out))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub trials: usize,
    pub partial_mixers_checked: usize,
    /// Largest total probability found outside the feasible subspace.
    pub max_leakage: f64,
}

impl FeasibilityReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_leakage <= tol
    }
}

fn check_size(m: &MisInstance) -> Result<()> {
    if m.n() > MAX_MIS_QUBITS {
        return Err(Error::limit("MIS qubits", MAX_MIS_QUBITS, m.n()));
    }
    Ok(())
}

/// Mass of `sv` on basis states that are not independent sets.
pub fn infeasible_mass(m: &MisInstance, sv: &Statevector) -> f64 {
    sv.probabilities()
        .iter()
        .enumerate()
        .filter(|(k, _)| !m.is_independent_index(*k))
        .map(|(_, p)| p)
        .sum()
}

/// A random normalized superposition of independent sets.
pub fn random_feasible_state(m: &MisInstance, rng: &mut ChaCha8Rng) -> Statevector {
    let amps = (0..1usize << m.n())
        .map(|k| {
            if m.is_independent_index(k) {
                c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            } else {
                c64(0.0, 0.0)
            }
        })
        .collect();
    // the empty set always has a nonzero weight with probability 1
    Statevector::from_amplitudes(m.n(), amps).unwrap_or_else(|_| Statevector::zero(m.n()))
}

/// Applies every partial mixer at a random angle to random feasible
/// states and reports the worst leakage.
pub fn feasibility_check_suite(m: &MisInstance, trials: usize, seed: u64) -> Result<FeasibilityReport> {
    check_size(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_leakage: f64 = 0.0;
    let mut checked = 0;
    for _ in 0..trials {
        let sv = random_feasible_state(m, &mut rng);
        for v in 0..m.n() {
            let beta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            let out = apply_partial_mixer(&sv, m.graph(), v, beta);
            max_leakage = max_leakage.max(infeasible_mass(m, &out));
            checked += 1;
        }
    }
    Ok(FeasibilityReport {
        trials,
        partial_mixers_checked: checked,
        max_leakage,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MisReport {
    /// Expected size of the measured set, counting infeasible outcomes too.
    pub expectation: f64,
    pub infeasible_mass: f64,
    /// Expected size conditioned on a feasible outcome.
    pub feasible_expectation: f64,
}

/// Runs the MIS ansatz on the statevector simulator.
pub fn mis_expectation(
    m: &MisInstance,
    params: &QaoaParams,
    order: &[usize],
    init: &MisInit,
) -> Result<MisReport> {
    check_size(m)?;
    let circuit = gatesim::build_mis_qaoa(m.graph(), params, order, init)?;
    let sv = gatesim::run(&circuit, m.n())?;
    let probs = sv.probabilities();
    let mut expectation = 0.0;
    let mut feasible = 0.0;
    let mut feasible_weight = 0.0;
    for (k, p) in probs.iter().enumerate() {
        let size = k.count_ones() as f64;
        expectation += p * size;
        if m.is_independent_index(k) {
            feasible += p * size;
            feasible_weight += p;
        }
    }
    Ok(MisReport {
        expectation,
        infeasible_mass: 1.0 - feasible_weight,
        feasible_expectation: if feasible_weight > 0.0 {
            feasible / feasible_weight
        } else {
            0.0
        },
    })
}

/// The identity mixer order `0, 1, …, n−1`.
pub fn default_order(m: &MisInstance) -> Vec<usize> {
    (0..m.n()).collect()
}
