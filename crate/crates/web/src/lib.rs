use num_traits::ToPrimitive;
use serde_json::json;
use wasm_bindgen::prelude::*;

use cww_core::arith::{parse_rational, DyadicRational, Precision, RatInterval};
use cww_core::bridge::bridge_value;
use cww_core::certify::prove_level5;
use cww_core::extremal::{build_extremal, square_function_sup, tail_measure, Threshold};

const BITS: u32 = 96;

fn dyadic(s: &str) -> Result<DyadicRational, String> {
    let q = parse_rational(s.trim()).map_err(|e| e.to_string())?;
    DyadicRational::from_rational(&q).ok_or_else(|| format!("{s} is not a dyadic rational"))
}

fn approx(v: &RatInterval) -> f64 {
    v.midpoint().to_f64().unwrap_or(f64::NAN)
}

pub fn bridge_json(t: &str) -> Result<String, String> {
    let d = dyadic(t)?;
    let v = bridge_value(&d, Precision::new(BITS)).map_err(|e| e.to_string())?;
    let doc = json!({
        "t": d.to_string(),
        "lo": v.lo().to_string(),
        "hi": v.hi().to_string(),
        "approx": approx(&v),
    });
    Ok(doc.to_string())
}

pub fn extremal_json(t: &str) -> Result<String, String> {
    let d = dyadic(t)?;
    let tree = build_extremal(&d, Precision::new(BITS)).map_err(|e| e.to_string())?;
    let tail = tail_measure(&tree, &Threshold::Bridge(d.clone())).map_err(|e| e.to_string())?;
    let square = square_function_sup(&tree);
    let leaves: Vec<_> = tree
        .leaves()
        .map_err(|e| e.to_string())?
        .iter()
        .map(|l| json!({ "interval": l.interval.to_string(), "value": approx(&l.value), "square": approx(&l.square) }))
        .collect();
    let doc = json!({
        "t": d.to_string(),
        "depth": tree.depth(),
        "tail_measure": tail.measure.to_string(),
        "sq_sup_le_1": square.bounded,
        "leaves": leaves,
    });
    Ok(doc.to_string())
}

pub fn level5_json() -> String {
    prove_level5().to_json()
}

/// Enclosure of A(t) as JSON.
#[wasm_bindgen]
pub fn bridge_eval(t: &str) -> Result<String, JsValue> {
    bridge_json(t).map_err(|e| JsValue::from_str(&e))
}

/// Extremal function for A(t) with its tail measure and leaf values.
#[wasm_bindgen]
pub fn extremal_build(t: &str) -> Result<String, JsValue> {
    extremal_json(t).map_err(|e| JsValue::from_str(&e))
}

/// Level-five certificate as JSON.
#[wasm_bindgen]
pub fn certify_level5() -> String {
    level5_json()
}
