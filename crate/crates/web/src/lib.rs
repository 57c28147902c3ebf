//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Every export takes and returns JSON text. The `*_json` functions hold the logic and
//! run natively too; the exported wrappers only turn their errors into JS exceptions.

use fisher_roof::experiments::{random_density_of_rank, random_hermitian, trial_rng};
use fisher_roof::hermitian::{matrix_from_json, MatrixFile};
use fisher_roof::metrology::{generalized_qfi, qfi_bc, skew_information, variance};
use fisher_roof::roofs::{concave_roof_decomposition, verify_decomposition};
use fisher_roof::sdp::{bound_se, bound_sppt, DEFAULT_TOLERANCE};
use fisher_roof::{DensityMatrix, HermitianOperator, MeanCatalog};
use serde_json::json;
use wasm_bindgen::prelude::*;

type Output = Result<String, String>;

fn parse(rho: &str, obs: &str) -> Result<(DensityMatrix, HermitianOperator), String> {
    let rho = matrix_from_json(rho)
        .and_then(|m| DensityMatrix::new(m.as_matrix().clone()))
        .map_err(|e| format!("state: {e}"))?;
    let a = matrix_from_json(obs)
        .and_then(|m| HermitianOperator::new(m.as_matrix().clone()))
        .map_err(|e| format!("observable: {e}"))?;
    if rho.dim() != a.dim() {
        return Err(format!("state is {0}x{0} but observable is {1}x{1}", rho.dim(), a.dim()));
    }
    Ok((rho, a))
}

fn text(value: serde_json::Value) -> String {
    serde_json::to_string_pretty(&value).expect("serializable")
}

/// A seeded random state of the given rank and a random observable.
pub fn random_example_json(d: usize, rank: usize, seed: u64) -> Output {
    if !(1..=6).contains(&d) || !(1..=d).contains(&rank) {
        return Err(format!("need 1 <= rank <= d <= 6 (got d={d}, rank={rank})"));
    }
    let mut rng = trial_rng(seed, 0);
    let rho = random_density_of_rank(d, rank, &mut rng);
    let a = random_hermitian(d, &mut rng);
    Ok(text(json!({
        "rho": MatrixFile::from_matrix(&rho),
        "obs": MatrixFile::from_matrix(&a),
    })))
}

/// Variance, Fisher information, skew information and the normalized generalized
/// Fisher information of every catalog mean.
pub fn quantities_json(rho: &str, obs: &str) -> Output {
    let (rho, a) = parse(rho, obs)?;
    let e = |r: fisher_roof::Result<f64>| r.map_err(|e| e.to_string());
    let mut generalized = serde_json::Map::new();
    for mean in MeanCatalog::standard().iter() {
        generalized.insert(mean.name().to_string(), json!(e(generalized_qfi(&rho, &a, mean, true))?));
    }
    Ok(text(json!({
        "variance": e(variance(&rho, &a))?,
        "qfi": e(qfi_bc(&rho, &a))?,
        "skew": e(skew_information(&rho, &a))?,
        "generalized_qfi": generalized,
    })))
}

/// A decomposition whose states all share the mean of `A`, with its verification.
pub fn concave_roof_json(rho: &str, obs: &str) -> Output {
    let (rho, a) = parse(rho, obs)?;
    let decomp = concave_roof_decomposition(&rho, &a).map_err(|e| e.to_string())?;
    let report = verify_decomposition(&decomp, &rho, &a).map_err(|e| e.to_string())?;
    Ok(text(json!({
        "decomposition": decomp.to_file(),
        "report": report,
    })))
}

/// SDP lower bound; `parties = 2` is the PPT relaxation, larger values the symmetric
/// extension.
pub fn bound_json(rho: &str, obs: &str, parties: usize) -> Output {
    let (rho, a) = parse(rho, obs)?;
    let result = match parties {
        2 => bound_sppt(&rho, &a, DEFAULT_TOLERANCE),
        n => bound_se(&rho, &a, n, DEFAULT_TOLERANCE),
    }
    .map_err(|e| e.to_string())?;
    let qfi = qfi_bc(&rho, &a).map_err(|e| e.to_string())?;
    let w = &result.witness;
    Ok(text(json!({
        "bound": result.value,
        "qfi": qfi,
        "status": w.status,
        "gap": w.gap,
        "iterations": w.iterations,
    })))
}

fn js(r: Output) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = randomExample)]
pub fn random_example(d: usize, rank: usize, seed: u32) -> Result<String, JsError> {
    js(random_example_json(d, rank, u64::from(seed)))
}

#[wasm_bindgen]
pub fn quantities(rho: &str, obs: &str) -> Result<String, JsError> {
    js(quantities_json(rho, obs))
}

#[wasm_bindgen(js_name = concaveRoof)]
pub fn concave_roof(rho: &str, obs: &str) -> Result<String, JsError> {
    js(concave_roof_json(rho, obs))
}

#[wasm_bindgen]
pub fn bound(rho: &str, obs: &str, parties: usize) -> Result<String, JsError> {
    js(bound_json(rho, obs, parties))
}
