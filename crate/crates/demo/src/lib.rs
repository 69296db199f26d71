//! Browser bindings. Each export returns JSON or a plain array; the pure
//! functions below them also run natively so they can be tested.

use lambda2::diagrams::diagram_space;
use lambda2::faces::verify_ledger;
use lambda2::geometry::{chain_intersection_feasible, DirectionAssignment, FeasibilityStatus, UnitVec3, Vec3};
use lambda2::graphs::{canonical_graph, GraphName, Labeling, NE};
use lambda2::integrate::{density, PropagatorForm};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
pub struct FeasibilitySweep {
    pub graph: GraphName,
    pub direction: [f64; 3],
    pub feasible: usize,
    pub infeasible: usize,
    /// First feasible labeling and its witness, if any.
    pub example: Option<serde_json::Value>,
}

/// Runs the chain-intersection test with one direction on every edge, over
/// all 720 labelings.
pub fn feasibility_sweep(graph: &str, x: f64, y: f64, z: f64) -> lambda2::Result<FeasibilitySweep> {
    let name: GraphName = graph.parse()?;
    let g = canonical_graph(name);
    let u = UnitVec3::normalize(Vec3::new(x, y, z))?;
    let mut out = FeasibilitySweep { graph: name, direction: u.vec().0, feasible: 0, infeasible: 0, example: None };
    for j in Labeling::all() {
        let r = chain_intersection_feasible(&g, &DirectionAssignment::float_from_labels(&j, &[u; NE]))?;
        if r.status == FeasibilityStatus::Infeasible {
            out.infeasible += 1;
            continue;
        }
        out.feasible += 1;
        if out.example.is_none() {
            out.example = Some(serde_json::json!({ "labeling": j.labels(), "result": r }));
        }
    }
    Ok(out)
}

/// Density of a bump form on an equirectangular `rows × cols` grid, row-major
/// from the north pole.
pub fn density_grid(center: [f64; 3], concentration: f64, antisymmetric: bool, rows: usize, cols: usize) -> lambda2::Result<Vec<f64>> {
    let mut form = PropagatorForm::bump(UnitVec3::normalize(Vec3(center))?, concentration)?;
    if antisymmetric {
        form = form.antisymmetrized();
    }
    let mut out = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let theta = std::f64::consts::PI * (r as f64 + 0.5) / rows as f64;
        for c in 0..cols {
            let phi = std::f64::consts::TAU * (c as f64 + 0.5) / cols as f64;
            let p = Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
            out.push(density(&form, p)?);
        }
    }
    Ok(out)
}

/// Weight system summary plus the face-ledger verdict.
pub fn weights_and_ledger() -> serde_json::Value {
    let w = diagram_space().summary();
    let mut ledger = serde_json::to_value(verify_ledger()).expect("serialisable");
    if let Some(m) = ledger.as_object_mut() {
        m.remove("blocks");
    }
    serde_json::json!({ "weights": w, "ledger": ledger })
}

fn js_err(e: lambda2::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = feasibility)]
pub fn feasibility_js(graph: &str, x: f64, y: f64, z: f64) -> Result<String, JsError> {
    let r = feasibility_sweep(graph, x, y, z).map_err(js_err)?;
    Ok(serde_json::to_string(&r).expect("serialisable"))
}

#[wasm_bindgen(js_name = densityGrid)]
pub fn density_grid_js(x: f64, y: f64, z: f64, concentration: f64, antisymmetric: bool, rows: usize, cols: usize) -> Result<Vec<f64>, JsError> {
    density_grid([x, y, z], concentration, antisymmetric, rows, cols).map_err(js_err)
}

#[wasm_bindgen(js_name = weightsAndLedger)]
pub fn weights_and_ledger_js() -> String {
    weights_and_ledger().to_string()
}
