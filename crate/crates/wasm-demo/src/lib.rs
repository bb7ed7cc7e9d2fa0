//! Browser bindings for the demo page in `www/`. Every export returns JSON
//! text so the page needs no generated type glue beyond strings.

use farey_lab::farey::{farey_stream, nu_k_values, FareyFraction};
use farey_lab::geometry::{bcz_apply, enumerate_cells, in_triangle, kappa1, Point, Rat};
use num_traits::ToPrimitive;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_CELLS_DEPTH: u32 = 4;
const MAX_STRIP: usize = 20_000;

fn f(r: &Rat) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CellView {
    itinerary: Vec<u64>,
    area: String,
    polygon: Vec<[f64; 2]>,
}

/// Cylinder cells of the given depth as polygons in the unit square.
#[wasm_bindgen]
pub fn cells(depth: u32, kappa_max: u32) -> Result<String, String> {
    if depth == 0 || depth > MAX_CELLS_DEPTH {
        return Err(format!("depth must be between 1 and {MAX_CELLS_DEPTH}"));
    }
    let cells = enumerate_cells(depth as usize, kappa_max as u64).map_err(|e| e.to_string())?;
    let view: Vec<CellView> = cells
        .iter()
        .map(|c| CellView {
            itinerary: c.itinerary.clone(),
            area: c.area().to_string(),
            polygon: c.region.vertices().iter().map(|p| [f(&p.x), f(&p.y)]).collect(),
        })
        .collect();
    json(&view)
}

#[derive(Serialize)]
struct OrbitStep {
    x: String,
    y: String,
    at: [f64; 2],
    kappa: u64,
}

/// Orbit of the rational point `(xn/xd, yn/yd)` under the BCZ map.
#[wasm_bindgen]
pub fn orbit(xn: u32, xd: u32, yn: u32, yd: u32, steps: u32) -> Result<String, String> {
    if xd == 0 || yd == 0 {
        return Err("zero denominator".into());
    }
    let mut p = Point::from_ints((xn as i64, xd as i64), (yn as i64, yd as i64));
    if !in_triangle(&p) {
        return Err(format!("({p}) is outside the Farey triangle"));
    }
    let mut out = Vec::with_capacity(steps as usize + 1);
    for i in 0..=steps {
        out.push(OrbitStep {
            x: p.x.to_string(),
            y: p.y.to_string(),
            at: [f(&p.x), f(&p.y)],
            kappa: kappa1(&p),
        });
        if i < steps {
            p = bcz_apply(&p).map_err(|e| e.to_string())?;
        }
    }
    json(&out)
}

#[derive(Serialize)]
struct Strip {
    fractions: Vec<String>,
    values: Vec<u64>,
}

/// `ν_k(γ_i)` for `i = 1..=N(Q)`, with the fraction `γ_i`.
#[wasm_bindgen]
pub fn nu_strip(order: u32, k: u32) -> Result<String, String> {
    if order == 0 || k == 0 {
        return Err("order and k must be positive".into());
    }
    let fractions: Vec<FareyFraction> = farey_stream(order as u64, None)
        .map_err(|e| e.to_string())?
        .take(MAX_STRIP + 1)
        .collect();
    if fractions.len() > MAX_STRIP {
        return Err(format!("F_Q has more than {MAX_STRIP} terms; pick a smaller order"));
    }
    let values = nu_k_values(order as u64, k as u64).map_err(|e| e.to_string())?;
    json(&Strip {
        fractions: fractions.iter().map(|f| f.to_string()).collect(),
        values: values
            .into_iter()
            .map(|v| u64::try_from(v).unwrap_or(u64::MAX))
            .collect(),
    })
}
