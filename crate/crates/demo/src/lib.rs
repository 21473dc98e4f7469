//! Browser bindings for three interactive views of the collective
//! entangling dynamics: the maximal GHZ probability landscape over the
//! Bloch sphere, the optimal in-plane projection of one qubit, and the
//! GHZ-basis weight spectrum of a separable register.
//!
//! The `*_impl` functions carry the logic and are tested natively; the
//! `#[wasm_bindgen]` exports are thin adapters. Build the browser package
//! with `wasm-pack build crates/demo --target web` (needs the
//! wasm32-unknown-unknown target installed) and serve `www/`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use ghz_core::analysis::{
    bloch_sweep, npt_witness, optimal_etas, optimal_projection, projection_probability,
    top_k_coefficients, NptWitness,
};
use ghz_core::{Error, QubitAngles};

/// Flat row-major P values (theta-major) of the closed-form landscape
/// `P(theta, phi) = ((1 + sqrt(1 - sin^2 theta sin^2 phi))/2)^n`;
/// theta spans [0, pi] inclusive, phi spans [0, 2pi).
pub fn landscape_impl(n: usize, grid_theta: usize, grid_phi: usize) -> Result<Vec<f64>, Error> {
    let sweep = bloch_sweep(n, grid_theta, grid_phi)?;
    Ok(sweep.grid.into_iter().map(|(_, _, p)| p).collect())
}

#[derive(Serialize)]
struct ProjectionView {
    eta: f64,
    p_max: f64,
    degenerate: bool,
    curve: Vec<(f64, f64)>,
}

/// The overlap profile p(eta) of one qubit against the in-plane pair,
/// together with the optimum, as JSON.
pub fn projection_impl(theta: f64, phi: f64, samples: usize) -> Result<String, Error> {
    let best = optimal_projection(theta, phi)?;
    let samples = samples.clamp(2, 4096);
    let curve = (0..samples)
        .map(|k| {
            let eta = -std::f64::consts::PI
                + std::f64::consts::TAU * (k as f64 + 0.5) / samples as f64;
            (eta, projection_probability(theta, phi, eta))
        })
        .collect();
    let view = ProjectionView {
        eta: best.eta,
        p_max: best.p_max,
        degenerate: best.degenerate,
        curve,
    };
    Ok(serde_json::to_string(&view).expect("view serializes"))
}

#[derive(Serialize)]
struct SpectrumView {
    n: usize,
    etas: Vec<f64>,
    top: Vec<(String, f64)>,
    npt: NptWitness,
}

/// Top-k GHZ-basis weights of the separable register at the per-qubit
/// optimal projections, as JSON.
pub fn spectrum_impl(thetas: &[f64], phis: &[f64], k: usize) -> Result<String, Error> {
    if thetas.len() != phis.len() {
        return Err(Error::DimensionMismatch {
            left: thetas.len(),
            right: phis.len(),
        });
    }
    let angles = QubitAngles::new(
        thetas.iter().copied().zip(phis.iter().copied()).collect(),
    )?;
    let etas = optimal_etas(&angles)?;
    let top = top_k_coefficients(&angles, &etas, k.max(1))?;
    let npt = npt_witness(&angles)?;
    let view = SpectrumView {
        n: angles.len(),
        etas,
        top,
        npt,
    };
    Ok(serde_json::to_string(&view).expect("view serializes"))
}

fn to_js<T>(r: Result<T, Error>) -> Result<T, JsValue> {
    r.map_err(|e| JsValue::from_str(&e.to_string()))
}

/// Landscape P values for a canvas heatmap, theta-major.
#[wasm_bindgen]
pub fn probability_landscape(n: u32, grid_theta: u32, grid_phi: u32) -> Result<Vec<f64>, JsValue> {
    to_js(landscape_impl(n as usize, grid_theta as usize, grid_phi as usize))
}

/// JSON projection profile: {"eta", "p_max", "degenerate", "curve"}.
#[wasm_bindgen]
pub fn projection_explorer(theta: f64, phi: f64, samples: u32) -> Result<String, JsValue> {
    to_js(projection_impl(theta, phi, samples as usize))
}

/// JSON GHZ-basis spectrum: {"n", "etas", "top", "npt"}.
#[wasm_bindgen]
pub fn expansion_spectrum(
    thetas: Vec<f64>,
    phis: Vec<f64>,
    k: u32,
) -> Result<String, JsValue> {
    to_js(spectrum_impl(&thetas, &phis, k as usize))
}
