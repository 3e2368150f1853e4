//! WebAssembly bindings for the browser demo in `www/`.

pub mod demo;

use wasm_bindgen::prelude::*;

fn js_err(e: String) -> JsError {
    JsError::new(&e)
}

/// `n` points in the unit square, flattened `[x0, y0, x1, y1, ...]`.
#[wasm_bindgen(js_name = randomPoints)]
pub fn random_points(n: usize, seed: u64, clustered: bool) -> Vec<f64> {
    demo::random_points(n, seed, clustered)
}

/// `[evals, index_0, dist_0, ...]` for the k nearest points to `(x, y)`.
#[wasm_bindgen]
pub fn neighbors(
    points: &[f64],
    x: f64,
    y: f64,
    k: usize,
    metric: &str,
    kdtree: bool,
) -> Result<Vec<f64>, JsError> {
    demo::neighbors(points, [x, y], k, metric, kdtree).map_err(js_err)
}

/// `[depth, x0, y0, x1, y1, ...]` for every kd-tree split.
#[wasm_bindgen(js_name = kdtreeSplits)]
pub fn kdtree_splits(points: &[f64], leaf_size: usize) -> Result<Vec<f64>, JsError> {
    demo::kdtree_splits(points, leaf_size).map_err(js_err)
}

/// `[truth, estimate per size...]`.
#[wasm_bindgen(js_name = entropyCurve)]
pub fn entropy_curve(
    distribution: &str,
    d: usize,
    k: usize,
    variant: &str,
    sizes: &[u32],
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    let sizes: Vec<usize> = sizes.iter().map(|&s| s as usize).collect();
    demo::entropy_curve(distribution, d, k, variant, &sizes, seed).map_err(js_err)
}
