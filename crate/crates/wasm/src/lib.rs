//! Browser bindings for the demo page in `www/`.
//!
//! Every exported function returns a JSON string. The `*_json` functions hold the logic and
//! are plain Rust so they can be tested natively.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use wasm_bindgen::prelude::*;

use mrgrid::bounds::below_t4_threshold;
use mrgrid::codes::{random_mds_parity, vandermonde};
use mrgrid::mr::attack_t4;
use mrgrid::patterns::{canonical_type, enumerate_types, is_irreducible, is_regular, RegularityMode};
use mrgrid::{ErasurePattern, Field, TensorCode, Topology};

#[wasm_bindgen]
pub fn enumerate(m: usize, b: usize) -> Result<String, JsError> {
    enumerate_json(m, b).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn inspect_pattern(mask: &str, b: usize, q: u32) -> Result<String, JsError> {
    inspect_json(mask, b, q).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn attack_demo(n: usize, q: u32, seed: u64) -> Result<String, JsError> {
    attack_json(n, q, seed).map_err(|e| JsError::new(&e))
}

pub fn enumerate_json(m: usize, b: usize) -> Result<String, String> {
    let types = enumerate_types(m, b).map_err(|e| e.to_string())?;
    Ok(json!({ "m": m, "b": b, "types": types }).to_string())
}

/// Mask rows separated by newlines or spaces, `1`/`*` erased. The code used for the
/// correctability check has the all-ones column parity and Vandermonde rows at `1..=n`.
pub fn inspect_json(mask: &str, b: usize, q: u32) -> Result<String, String> {
    let rows: Vec<&str> = mask.split_whitespace().collect();
    let m = rows.len();
    let n = rows.iter().map(|r| r.chars().count()).max().unwrap_or(0);
    if m < 2 || n <= b {
        return Err(format!("need at least 2 rows and more than b = {b} columns"));
    }
    if rows.iter().flat_map(|r| r.chars()).any(|c| !matches!(c, '0' | '1' | '.' | '*')) {
        return Err("use 1 or * for erased cells, 0 or . otherwise".into());
    }
    let e = ErasurePattern::from_strings(&rows);
    let t = Topology::grid(m, n, 1, b).map_err(|e| e.to_string())?;
    let field = Field::of_order(q).map_err(|e| e.to_string())?;
    if (q as usize) <= n {
        return Err(format!("GF({q}) has too few nonzero points for {n} columns"));
    }
    let points: Vec<u32> = (1..=n as u32).collect();
    let code = vandermonde(&field, b, &points)
        .and_then(|h| TensorCode::with_simple_parity(m, h))
        .map_err(|e| e.to_string())?;
    let rank = code.restricted_rank(&e).map_err(|e| e.to_string())?;
    let ty = if e.is_empty() { None } else { canonical_type(&e).ok() };
    Ok(json!({
        "m": m,
        "n": n,
        "erased": e.len(),
        "regular": is_regular(&t, &e, RegularityMode::Fast),
        "irreducible": is_irreducible(&t, &e),
        "rank": rank,
        "correctable": rank == e.len(),
        "type": ty,
    })
    .to_string())
}

/// Draws a random `2×n` MDS row parity over GF(q) and runs the sum-collision attack.
pub fn attack_json(n: usize, q: u32, seed: u64) -> Result<String, String> {
    let field = Field::of_order(q).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h_row = random_mds_parity(&field, 2, n, &mut rng, 10_000)
        .ok_or_else(|| format!("no 2x{n} MDS matrix over GF({q})"))?;
    let attack = attack_t4(&h_row).map_err(|e| e.to_string())?;
    Ok(json!({
        "n": n,
        "q": q,
        "below_threshold": below_t4_threshold(n as u64, q as u64),
        "h_row": h_row.to_rows(),
        "attack": attack,
    })
    .to_string())
}
