//! Browser bindings: each export takes a problem as JSON text and returns
//! a JSON report, so the page only needs `JSON.parse`.

use mbqaoa::compiler::{compile_qaoa, export_resource_graph, recount, resource_estimate};
use mbqaoa::gatesim::{self, QaoaParams, Statevector};
use mbqaoa::pattern::explore;
use mbqaoa::problem::{bits_of, bitstring, problem_from_json, QuboProblem};
use mbqaoa::{Error, Result};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest problem the page will simulate.
pub const MAX_VERTICES: usize = 8;
/// Largest landscape resolution.
pub const MAX_GRID: usize = 64;

fn load(problem: &str) -> Result<QuboProblem> {
    let q = problem_from_json(problem)?;
    if q.n() > MAX_VERTICES {
        return Err(Error::ResourceLimit {
            what: "demo vertices",
            limit: MAX_VERTICES,
            requested: q.n(),
        });
    }
    Ok(q)
}

#[derive(Serialize)]
struct Bar {
    bits: String,
    gate: f64,
    mbqc: f64,
}

/// Runs the compiled pattern exactly and the gate circuit side by side.
pub fn compare_json(problem: &str, gammas: &[f64], betas: &[f64]) -> Result<String> {
    let q = load(problem)?;
    let params = QaoaParams::new(gammas.to_vec(), betas.to_vec())?;
    let p = compile_qaoa(&q, &params)?;
    let e = explore(&p, &Statevector::zero(0))?;
    let mbqc = e.output_distribution();
    let gate = gatesim::qaoa_distribution(&q, &params)?;
    let bars: Vec<Bar> = gate
        .iter()
        .zip(&mbqc)
        .enumerate()
        .map(|(k, (&g, &m))| Bar {
            bits: bitstring(&bits_of(k, q.n())),
            gate: g,
            mbqc: m,
        })
        .collect();
    let expectation: f64 = gate.iter().enumerate().map(|(k, p)| p * q.cost_index(k)).sum();
    let counts = recount(&p);
    Ok(json!({
        "n": q.n(),
        "bars": bars,
        "tvd": gatesim::tvd(&gate, &mbqc),
        "max_state_deviation": e.max_branch_deviation(),
        "merged_branches": e.branches.len(),
        "peak_window": e.peak_window,
        "expectation": expectation,
        "optimum": q.brute_force_optimum()?.value,
        "ancillas": counts.ancillas,
        "entangling_edges": counts.entangling_edges,
    })
    .to_string())
}

/// Depth-one expectation on a `points × points` grid, `γ ∈ [0, π)` by
/// rows and `β ∈ [0, π/2)` by columns.
pub fn landscape_json(problem: &str, points: usize) -> Result<String> {
    let q = load(problem)?;
    if points == 0 || points > MAX_GRID {
        return Err(Error::InvalidInput(format!(
            "grid must have 1 to {MAX_GRID} points"
        )));
    }
    let grid = gatesim::GridSpec {
        points,
        ..Default::default()
    };
    let step = |(lo, hi): (f64, f64), i: usize| lo + (hi - lo) * i as f64 / points as f64;
    let mut values = Vec::with_capacity(points);
    for i in 0..points {
        let gamma = step(grid.gamma_range, i);
        let mut row = Vec::with_capacity(points);
        for j in 0..points {
            let params = QaoaParams::new(vec![gamma], vec![step(grid.beta_range, j)])?;
            row.push(gatesim::qaoa_expectation(&q, &params)?);
        }
        values.push(row);
    }
    Ok(json!({
        "points": points,
        "gamma_range": grid.gamma_range,
        "beta_range": grid.beta_range,
        "values": values,
        "best": gatesim::grid_sweep(&q, 1, &grid)?,
        "optimum": q.brute_force_optimum()?.value,
    })
    .to_string())
}

/// Closed-form counts plus the recount and planarity of the built pattern.
pub fn resources_json(problem: &str, depth: usize) -> Result<String> {
    let q = problem_from_json(problem)?;
    if depth == 0 || depth > 8 {
        return Err(Error::InvalidInput("depth must be 1 to 8".into()));
    }
    let estimate = resource_estimate(&q, depth);
    let params = QaoaParams::new(vec![0.1; depth], vec![0.1; depth])?;
    let p = compile_qaoa(&q, &params)?;
    let counts = recount(&p);
    let graph = export_resource_graph(&p);
    Ok(json!({
        "estimate": estimate,
        "built": { "ancillas": counts.ancillas, "entangling_edges": counts.entangling_edges },
        "within_bounds": estimate.within_bounds(),
        "planar": graph.planar,
    })
    .to_string())
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn compare(problem: &str, gammas: &[f64], betas: &[f64]) -> std::result::Result<String, JsError> {
    js(compare_json(problem, gammas, betas))
}

#[wasm_bindgen]
pub fn landscape(problem: &str, points: usize) -> std::result::Result<String, JsError> {
    js(landscape_json(problem, points))
}

#[wasm_bindgen]
pub fn resources(problem: &str, depth: usize) -> std::result::Result<String, JsError> {
    js(resources_json(problem, depth))
}
