//! Browser bindings for the `www/` demo page.
//!
//! Every export is a thin wrapper over a plain function in this crate so the
//! numeric code can be tested natively.

use dtmf::dtm::dtm_on;
use dtmf::persistence::flag_persistence;
use dtmf::prelude::*;
use dtmf::svg::render_diagram;
use wasm_bindgen::prelude::*;

/// Keeps the page responsive: refuse complexes larger than this.
const SIMPLEX_LIMIT: usize = 3_000_000;

fn exponent(p: f64) -> Result<PExponent> {
    PExponent::finite(p)
}

fn cloud(coords: &[f64]) -> Result<PointCloud> {
    PointCloud::new(2, coords.to_vec())
}

/// Flat `x0, y0, x1, y1, ...` coordinates of a synthetic cloud.
pub fn sample_cloud(kind: &str, n: usize, outliers: usize, seed: u64) -> Result<Vec<f64>> {
    Ok(synth(kind.parse()?, n, outliers, seed)?.coords().to_vec())
}

/// DTM values at the points themselves, in input order.
pub fn point_weights(coords: &[f64], m: f64) -> Result<Vec<f64>> {
    Ok(dtm_weights(&cloud(coords)?, DtmParams::new(m)?)?.values().to_vec())
}

/// SVG of the dim-0 and dim-1 diagram of the DTM-Rips filtration.
pub fn diagram_svg(coords: &[f64], m: f64, p: f64) -> Result<String> {
    let x = cloud(coords)?;
    let f = dtm_weights(&x, DtmParams::new(m)?)?;
    let g = WeightedGraph::weighted_rips(&x, &f, exponent(p)?, x.diameter())?;
    Ok(render_diagram(&flag_persistence(&g, 2, &[0, 1], SIMPLEX_LIMIT)?))
}

/// DTM sampled on a `res × res` grid over `[-extent, extent]²`, row-major
/// from the top-left corner.
pub fn dtm_grid(coords: &[f64], m: f64, res: usize, extent: f64) -> Result<Vec<f64>> {
    if res < 2 || !(extent > 0.0) {
        return Err(Error::Parameter("grid needs res >= 2 and extent > 0".into()));
    }
    let mu = DiscreteMeasure::uniform(cloud(coords)?)?;
    let step = 2.0 * extent / (res - 1) as f64;
    let mut queries = Vec::with_capacity(2 * res * res);
    for row in 0..res {
        for col in 0..res {
            queries.push(-extent + col as f64 * step);
            queries.push(extent - row as f64 * step);
        }
    }
    Ok(dtm_on(&mu, &PointCloud::new(2, queries)?, DtmParams::new(m)?)?.values().to_vec())
}

/// `r_x(t)` for `t` in `[0, t_max]` at `samples` evenly spaced levels;
/// `NaN` below the point's weight.
pub fn radius_curve(f: f64, p: f64, t_max: f64, samples: usize) -> Result<Vec<f64>> {
    let p = exponent(p)?;
    if samples < 2 {
        return Err(Error::Parameter("need at least two samples".into()));
    }
    Ok((0..samples)
        .map(|i| {
            let t = t_max * i as f64 / (samples - 1) as f64;
            radius(f, t, p).unwrap_or(f64::NAN)
        })
        .collect())
}

fn js<T>(r: Result<T>) -> std::result::Result<T, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = sampleCloud)]
pub fn sample_cloud_js(kind: &str, n: usize, outliers: usize, seed: u32) -> std::result::Result<Vec<f64>, JsError> {
    js(sample_cloud(kind, n, outliers, u64::from(seed)))
}

#[wasm_bindgen(js_name = pointWeights)]
pub fn point_weights_js(coords: &[f64], m: f64) -> std::result::Result<Vec<f64>, JsError> {
    js(point_weights(coords, m))
}

#[wasm_bindgen(js_name = diagramSvg)]
pub fn diagram_svg_js(coords: &[f64], m: f64, p: f64) -> std::result::Result<String, JsError> {
    js(diagram_svg(coords, m, p))
}

#[wasm_bindgen(js_name = dtmGrid)]
pub fn dtm_grid_js(coords: &[f64], m: f64, res: usize, extent: f64) -> std::result::Result<Vec<f64>, JsError> {
    js(dtm_grid(coords, m, res, extent))
}

#[wasm_bindgen(js_name = radiusCurve)]
pub fn radius_curve_js(f: f64, p: f64, t_max: f64, samples: usize) -> std::result::Result<Vec<f64>, JsError> {
    js(radius_curve(f, p, t_max, samples))
}
