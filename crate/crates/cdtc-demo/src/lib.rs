use cdtc::blo::blo_basis;
use cdtc::bposd::{code_decoder, correction_pauli, is_failure, DecoderConfig};
use cdtc::channel::{hashing_bound, Bias, BiasedChannel};
use cdtc::deform::Variant;
use cdtc::rng::stream;
use cdtc::tilecode::{build_open, build_periodic, Orientation, TileCode};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn tile(l: usize, periodic: bool) -> Result<TileCode, String> {
    if periodic { build_periodic(l, l) } else { build_open(l) }.map_err(|e| e.to_string())
}

fn code_info(l: usize, variant: &str, periodic: bool) -> Result<serde_json::Value, String> {
    let t = tile(l, periodic)?;
    let v = Variant::parse(variant).map_err(|e| e.to_string())?;
    let (map, code) = v.build(&t).map_err(|e| e.to_string())?;
    let mut horizontal = Vec::new();
    let mut vertical = Vec::new();
    for (q, tag) in map.tags.iter().enumerate() {
        match t.layout.site(q).0 {
            Orientation::Horizontal => horizontal.push(tag.name()),
            Orientation::Vertical => vertical.push(tag.name()),
        }
    }
    Ok(json!({
        "n": code.n(),
        "k": code.k(),
        "checks": code.m(),
        "blo_size": blo_basis(&code).map_err(|e| e.to_string())?.len(),
        "L": l,
        "horizontal": horizontal,
        "vertical": vertical,
    }))
}

fn decode_info(l: usize, variant: &str, p: f64, eta: f64, seed: u64) -> Result<serde_json::Value, String> {
    let t = tile(l, false)?;
    let v = Variant::parse(variant).map_err(|e| e.to_string())?;
    let (_, code) = v.build(&t).map_err(|e| e.to_string())?;
    let bias = if eta.is_finite() { Bias::Finite(eta) } else { Bias::Infinite };
    let ch = BiasedChannel::new(p, bias).map_err(|e| e.to_string())?;
    let e = ch.sample_error(code.n(), &mut stream(seed, 0));
    let s = code.syndrome(&e);
    let d = code_decoder(&code, &ch, DecoderConfig::default()).decode(&s).map_err(|e| e.to_string())?;
    let c = correction_pauli(&d.correction);
    let failed = is_failure(&code, &code.logical_operators(), &e, &c).map_err(|e| e.to_string())?;
    Ok(json!({
        "error_weight": e.weight(),
        "syndrome_weight": s.weight(),
        "correction_weight": c.weight(),
        "bp_converged": d.bp_converged,
        "logical_failure": failed,
    }))
}

/// Parameters and deformation tags of a code, as JSON.
#[wasm_bindgen]
pub fn code_summary(l: usize, variant: &str, periodic: bool) -> Result<String, JsValue> {
    code_info(l, variant, periodic).map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

/// Hashing bound at bias η; non-finite or non-positive η means infinite bias.
#[wasm_bindgen]
pub fn hashing(eta: f64) -> f64 {
    if eta.is_finite() && eta > 0.0 {
        hashing_bound(Bias::Finite(eta))
    } else {
        hashing_bound(Bias::Infinite)
    }
}

/// Sample one error on an open code, decode it, and report what happened.
#[wasm_bindgen]
pub fn decode_once(l: usize, variant: &str, p: f64, eta: f64, seed: u64) -> Result<String, JsValue> {
    decode_info(l, variant, p, eta, seed).map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}
