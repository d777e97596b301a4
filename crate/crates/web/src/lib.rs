//! Browser bindings. Each export returns a JSON string for the page in `www/`.

use pseudofermion::algebra::hamiltonian_spectrum;
use pseudofermion::figure::{
    generate_figure, BetaSweep, CurveMode, FigureConfig, MuOverride, SweepRange,
};
use pseudofermion::thermo::{em_expectations, exact_expectations, DEFAULT_TAIL_TOL};
use pseudofermion::{make_params, Result};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn to_js(r: Result<Value>) -> std::result::Result<String, JsValue> {
    r.map(|v| v.to_string())
        .map_err(|e| JsValue::from_str(&e.to_string()))
}

fn levels_over_gamma(
    gamma_max: f64,
    steps: usize,
    truncation: usize,
    count: usize,
) -> Result<Value> {
    let steps = steps.max(2);
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let gamma = gamma_max * i as f64 / (steps - 1) as f64;
        let p = make_params(gamma)?;
        // complex pairs reach down into the requested levels at large γ: stop there
        let Ok(levels) = hamiltonian_spectrum(&p, truncation, count) else {
            break;
        };
        let ladder: Vec<f64> = (1..=count)
            .map(|n| p.lambda_scale * (4 * n - 3) as f64 / 4.0)
            .collect();
        rows.push(json!({ "gamma": gamma, "levels": levels, "ladder": ladder }));
    }
    Ok(json!({ "truncation": truncation, "rows": rows }))
}

/// Lowest `count` levels of the `truncation`-dimensional Hamiltonian for
/// `γ` from 0 to `gamma_max`, next to the ladder `Λ(4n−3)/4`.
#[wasm_bindgen]
pub fn spectrum_sweep(
    gamma_max: f64,
    steps: usize,
    truncation: usize,
    count: usize,
) -> std::result::Result<String, JsValue> {
    to_js(levels_over_gamma(gamma_max, steps, truncation, count))
}

fn demo_config(gamma: f64, points: usize) -> Result<FigureConfig> {
    let l = make_params(gamma)?.lambda_scale;
    let defaults = FigureConfig::default();
    let points = points.max(2);
    Ok(FigureConfig {
        gamma,
        mu_list: [-14.75, -9.75, -4.75, 0.25, 5.25, 10.25, 15.25]
            .iter()
            .map(|x| x * l)
            .collect(),
        mu_sweep: SweepRange {
            min: -15.0 * l,
            max: 15.0 * l,
            count: points,
        },
        beta_sweep: BetaSweep {
            count: points,
            ..defaults.beta_sweep
        },
        mu_sweep_overrides: vec![MuOverride {
            beta: 0.001,
            min: -6000.0,
            max: -4500.0,
            count: points,
        }],
        n_max: 4,
        ..defaults
    })
}

fn curves(gamma: f64, points: usize) -> Result<Value> {
    let data = generate_figure(&demo_config(gamma, points)?)?;
    let curves: Vec<Value> = data
        .curves
        .iter()
        .map(|c| {
            json!({
                "dashed": c.mode == CurveMode::FixedBeta,
                "fixed": c.fixed_value,
                "number": c.points.iter().map(|p| p.number).collect::<Vec<_>>(),
                "energy": c.points.iter().map(|p| p.energy).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(json!({
        "curves": curves,
        "boundary": data.boundary.vertices,
        "min_margin": data.containment.min_margin,
        "violations": data.containment.violations.len(),
    }))
}

/// Fixed-`β` (dashed) and fixed-`μ` (full) curves in the `(N, E)` plane with
/// the lower hull, `points` samples per curve.
#[wasm_bindgen]
pub fn figure_curves(gamma: f64, points: usize) -> std::result::Result<String, JsValue> {
    to_js(curves(gamma, points))
}

fn em_table(gamma: f64, mu: f64, beta_min: f64, beta_max: f64, count: usize) -> Result<Value> {
    let p = make_params(gamma)?;
    let count = count.max(2);
    let (a, b) = (beta_min.ln(), beta_max.ln());
    let mut rows = Vec::with_capacity(count);
    for i in 0..count {
        let beta = (a + (b - a) * i as f64 / (count - 1) as f64).exp();
        let exact = exact_expectations(&p, beta, mu, DEFAULT_TAIL_TOL)?;
        let em = em_expectations(&p, beta, mu)?;
        rows.push(json!({
            "beta": beta,
            "exact_number": exact.number,
            "em_number": em.number,
            "exact_energy": exact.energy,
            "em_energy": em.energy,
            "rel_number": (em.number - exact.number).abs() / exact.number,
            "rel_energy": (em.energy - exact.energy).abs() / exact.energy,
        }));
    }
    Ok(json!({ "rows": rows }))
}

/// Euler–Maclaurin against the exact sums on a log-spaced `β` grid.
#[wasm_bindgen]
pub fn em_vs_exact(
    gamma: f64,
    mu: f64,
    beta_min: f64,
    beta_max: f64,
    count: usize,
) -> std::result::Result<String, JsValue> {
    to_js(em_table(gamma, mu, beta_min, beta_max, count))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_starts_on_the_ladder() {
        let v = levels_over_gamma(1.0, 5, 40, 3).unwrap();
        let rows = v["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[0]["levels"], json!([0.25, 1.25, 2.25]));
        let last = &rows[4];
        let (a, b) = (
            last["levels"][2].as_f64().unwrap(),
            last["ladder"][2].as_f64().unwrap(),
        );
        assert!((a - b).abs() < 1e-10 * b);
    }

    #[test]
    fn curves_have_both_families() {
        let v = curves(0.6, 9).unwrap();
        let c = v["curves"].as_array().unwrap();
        assert_eq!(c.iter().filter(|x| x["dashed"] == json!(true)).count(), 7);
        assert_eq!(c.len(), 14);
        assert_eq!(v["violations"], json!(0));
    }

    #[test]
    fn em_gap_shrinks_with_beta() {
        let v = em_table(0.6, 0.0, 0.001, 0.2, 4).unwrap();
        let rows = v["rows"].as_array().unwrap();
        assert!(rows[0]["rel_number"].as_f64().unwrap() < rows[3]["rel_number"].as_f64().unwrap());
    }
}
