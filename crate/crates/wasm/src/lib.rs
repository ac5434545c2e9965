//! Browser bindings. Each export takes a domain spec in the JSON format the
//! CLI reads and returns a JSON document for the page to draw.
//!
//! The `*_json` functions hold the logic and run on any target; the
//! exported wrappers only convert errors to JS values.

use serde::Serialize;
use vbmo_core::field::RandomSmooth;
use vbmo_core::io::{whitney_svg, witness_svg, Report, WitnessJson};
use vbmo_core::seminorms::{bmo_seminorm, Lattice};
use vbmo_core::whitney::{planar_squares, whitney_decompose, MaskRegion};
use vbmo_core::{build_domain, DomainSpec, GridDomain};
use wasm_bindgen::prelude::*;

/// Largest grid the page will build; keeps the tab responsive.
const MAX_CELLS: usize = 1 << 16;

fn planar_domain(spec: &str) -> Result<GridDomain, String> {
    let spec = DomainSpec::from_json(spec).map_err(|e| e.to_string())?;
    let dom = build_domain(&spec).map_err(|e| e.to_string())?;
    if dom.dim() != 2 {
        return Err("the demo draws planar domains only".into());
    }
    if dom.grid.len() > MAX_CELLS {
        return Err(format!("grid has {} cells; the demo allows {MAX_CELLS}", dom.grid.len()));
    }
    Ok(dom)
}

fn json<T: Serialize>(x: &T) -> Result<String, String> {
    serde_json::to_string(x).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct DistanceView {
    width: usize,
    height: usize,
    h: f64,
    cells: usize,
    faces: usize,
    components: usize,
    reach: f64,
    /// Signed distance, positive in Ω, image rows top to bottom.
    signed: Vec<f64>,
}

pub fn distance_json(spec: &str) -> Result<String, String> {
    let dom = planar_domain(spec)?;
    let (w, hgt) = (dom.grid.shape[1], dom.grid.shape[2]);
    let mut signed = Vec::with_capacity(w * hgt);
    for r in 0..hgt {
        for c in 0..w {
            let k = dom.grid.flat([0, c, hgt - 1 - r]);
            let d = dom.dist.values[k];
            signed.push(if dom.mask[k] { d } else { -d });
        }
    }
    json(&DistanceView {
        width: w,
        height: hgt,
        h: dom.h(),
        cells: dom.count(),
        faces: dom.faces.len(),
        components: dom.n_components,
        reach: dom.reach(),
        signed,
    })
}

#[derive(Serialize)]
struct WhitneyView {
    svg: String,
    cubes: usize,
    certified: bool,
    levels: Vec<(i32, usize)>,
}

pub fn whitney_json(spec: &str) -> Result<String, String> {
    let dom = planar_domain(spec)?;
    let region = MaskRegion::domain(&dom).map_err(|e| e.to_string())?;
    let dec = whitney_decompose(&region).map_err(|e| e.to_string())?;
    let squares = planar_squares(&dec);
    json(&WhitneyView {
        svg: whitney_svg(Some(&dom), &squares, ([0.0; 2], [1.0; 2])),
        cubes: dec.cubes.len(),
        certified: dec.certificate.all(),
        levels: dec.level_counts(),
    })
}

#[derive(Serialize)]
struct BmoView {
    svg: String,
    report: Report,
}

/// `[f]_{BMO^mu}` of a random smooth field (`mu <= 0` means unbounded).
pub fn bmo_json(spec: &str, seed: u64, mu: f64) -> Result<String, String> {
    let dom = planar_domain(spec)?;
    let mu = if mu > 0.0 { mu } else { f64::INFINITY };
    let f = RandomSmooth::new(seed, 2, 8, 4.0).sample(&dom.grid);
    let r = bmo_seminorm(&f, &dom, mu, Lattice::default());
    let params = serde_json::json!({ "mu": if mu.is_finite() { serde_json::json!(mu) } else { serde_json::json!("inf") }, "seed": seed });
    let report = Report::from_seminorm(&r, params);
    let balls: Vec<WitnessJson> = report.witness.iter().cloned().collect();
    let svg = witness_svg(&dom, &balls).map_err(|e| e.to_string())?;
    json(&BmoView { svg, report })
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = distanceView)]
pub fn distance_view(spec: &str) -> Result<String, JsValue> {
    js(distance_json(spec))
}

#[wasm_bindgen(js_name = whitneyView)]
pub fn whitney_view(spec: &str) -> Result<String, JsValue> {
    js(whitney_json(spec))
}

#[wasm_bindgen(js_name = bmoView)]
pub fn bmo_view(spec: &str, seed: u32, mu: f64) -> Result<String, JsValue> {
    js(bmo_json(spec, seed as u64, mu))
}
