//! Chains of rewrites.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::linalg::scalar_deviation;

use super::diagram::{NodeId, ZxDiagram};
use super::rules::{apply_rule, Rule};
use super::tensor::to_matrix;

/// Applies `steps` in order and returns every intermediate diagram,
/// starting with `initial`. A failing step aborts with its index.
pub fn replay_derivation(initial: &ZxDiagram, steps: &[Rule]) -> Result<Vec<ZxDiagram>> {
    let mut out = vec![initial.clone()];
    for (index, rule) in steps.iter().enumerate() {
        let next = apply_rule(out.last().unwrap(), rule).map_err(|e| Error::DerivationStep {
            index,
            source: Box::new(e),
        })?;
        out.push(next);
    }
    Ok(out)
}

/// Checks that consecutive diagrams are equal up to a nonzero scalar.
/// Returns the largest deviation seen.
pub fn check_chain(diagrams: &[ZxDiagram], tol: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    let mut prev = match diagrams.first() {
        Some(d) => to_matrix(d)?.normalized(),
        None => return Ok(0.0),
    };
    for (k, d) in diagrams.iter().enumerate().skip(1) {
        let cur = to_matrix(d)?.normalized();
        let dev = scalar_deviation(&cur, &prev).unwrap_or(f64::INFINITY);
        if dev.is_nan() || dev > tol {
            return Err(Error::UnsoundStep {
                index: k - 1,
                deviation: dev,
            });
        }
        worst = worst.max(dev);
        prev = cur;
    }
    Ok(worst)
}

/// Incremental builder used to write derivations whose later steps refer
/// to nodes created by earlier ones.
#[derive(Clone, Debug)]
pub struct Derivation {
    diagrams: Vec<ZxDiagram>,
    steps: Vec<Rule>,
}

impl Derivation {
    pub fn new(initial: ZxDiagram) -> Self {
        Derivation {
            diagrams: vec![initial],
            steps: Vec::new(),
        }
    }

    pub fn current(&self) -> &ZxDiagram {
        self.diagrams.last().unwrap()
    }

    /// Applies `rule` and returns the ids of the nodes it created.
    pub fn step(&mut self, rule: Rule) -> Result<Range<NodeId>> {
        let before = self.current().next_id();
        let next = apply_rule(self.current(), &rule).map_err(|e| Error::DerivationStep {
            index: self.steps.len(),
            source: Box::new(e),
        })?;
        let after = next.next_id();
        self.diagrams.push(next);
        self.steps.push(rule);
        Ok(before..after)
    }

    /// Like [`Derivation::step`] for rules that create exactly one node.
    pub fn step_new(&mut self, rule: Rule) -> Result<NodeId> {
        let r = self.step(rule)?;
        debug_assert_eq!(r.len(), 1);
        Ok(r.start)
    }

    pub fn steps(&self) -> &[Rule] {
        &self.steps
    }

    pub fn diagrams(&self) -> &[ZxDiagram] {
        &self.diagrams
    }

    pub fn into_parts(self) -> (Vec<ZxDiagram>, Vec<Rule>) {
        (self.diagrams, self.steps)
    }
}
