//! Browser demo bindings: interactive fringe scans, bound-vs-time curves,
//! and the canonical channel bound explorer.
//!
//! Every export takes a JSON parameter string and returns a JSON string, so
//! the same functions are exercised by native tests and by the static page
//! in `www/`.

use serde::Deserialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use qsl_core::bounds::combined_bound;
use qsl_core::cptp::{canonical_bound, canonical_system, cptp_bound};
use qsl_core::eig::propagator;
use qsl_core::interferometer::{
    default_settings, detector_probability, fit_fringe, fit_fringe_exact, sample_scan,
};
use qsl_core::matrix::{dot_pauli, ComplexMatrix};
use qsl_core::orbit::{quantum_speed, visibility_phase};
use qsl_core::states::DensityMatrix;

fn err_json(message: impl std::fmt::Display) -> String {
    json!({ "error": message.to_string() }).to_string()
}

fn normalized_axis(n: [f64; 3]) -> Result<[f64; 3], String> {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if norm < 1e-12 {
        return Err("axis must be nonzero".into());
    }
    Ok([n[0] / norm, n[1] / norm, n[2] / norm])
}

#[derive(Deserialize)]
struct QubitParams {
    r: [f64; 3],
    n: [f64; 3],
    #[serde(default = "one")]
    alpha: f64,
    #[serde(default = "one")]
    omega: f64,
}

fn one() -> f64 {
    1.0
}

impl QubitParams {
    fn build(&self) -> Result<(DensityMatrix, ComplexMatrix), String> {
        let n = normalized_axis(self.n)?;
        let rho = DensityMatrix::from_bloch(self.r).map_err(|e| e.to_string())?;
        let h = dot_pauli(n)
            .add(&ComplexMatrix::identity(2).scale(qsl_core::matrix::C64::new(self.alpha, 0.0)))
            .scale(qsl_core::matrix::C64::new(self.omega, 0.0));
        Ok((rho, h))
    }
}

#[derive(Deserialize)]
struct FringeParams {
    #[serde(flatten)]
    qubit: QubitParams,
    t: f64,
    /// 0 means exact probabilities.
    #[serde(default)]
    shots: u64,
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default = "twelve")]
    settings: usize,
}

fn default_seed() -> u64 {
    42
}

fn twelve() -> usize {
    12
}

/// Fringe explorer: exact detector curve, sampled (or exact) points at the
/// scan settings, the fitted visibility/phase, and the true values.
#[wasm_bindgen]
pub fn fringe_demo(params: &str) -> String {
    let params: FringeParams = match serde_json::from_str(params) {
        Ok(p) => p,
        Err(e) => return err_json(e),
    };
    let (rho, h) = match params.qubit.build() {
        Ok(x) => x,
        Err(e) => return err_json(e),
    };
    let run = || -> Result<Value, qsl_core::Error> {
        let u = propagator(&h, params.t, 1.0)?;
        let identity = ComplexMatrix::identity(2);
        let curve: Vec<[f64; 2]> = (0..=120)
            .map(|k| {
                let chi = k as f64 * std::f64::consts::TAU / 120.0;
                Ok([chi, detector_probability(&rho, &u, &identity, chi)?])
            })
            .collect::<Result<_, qsl_core::Error>>()?;
        let settings = default_settings(params.settings.max(4));
        let (points, fit) = if params.shots == 0 {
            let points: Vec<[f64; 2]> = settings
                .iter()
                .map(|&chi| Ok([chi, detector_probability(&rho, &u, &identity, chi)?]))
                .collect::<Result<_, qsl_core::Error>>()?;
            let fit = fit_fringe_exact(&rho, &u, &identity, &settings)?;
            (points, fit)
        } else {
            let scan = sample_scan(&rho, &u, &identity, &settings, params.shots, params.seed)?;
            let points: Vec<[f64; 2]> = scan
                .settings
                .iter()
                .zip(&scan.counts_d)
                .map(|(&chi, &c)| [chi, c as f64 / scan.shots_per_setting as f64])
                .collect();
            let fit = fit_fringe(&scan)?;
            (points, fit)
        };
        let pv = visibility_phase(&rho, &u)?;
        Ok(json!({
            "curve": curve,
            "points": points,
            "fit": {
                "visibility": fit.visibility,
                "phase": fit.phase,
                "visibility_stderr": fit.visibility_stderr,
                "bargmann_angle": 2.0 * fit.visibility.clamp(0.0, 1.0).acos(),
                "phase_identifiable": fit.phase_identifiable,
            },
            "truth": {
                "visibility": pv.visibility,
                "phase": pv.phase,
                "bargmann_angle": 2.0 * pv.visibility.acos(),
                "speed": quantum_speed(&rho, &h, 1.0)?,
            },
        }))
    };
    match run() {
        Ok(v) => v.to_string(),
        Err(e) => err_json(e),
    }
}

#[derive(Deserialize)]
struct BoundCurveParams {
    #[serde(flatten)]
    qubit: QubitParams,
    #[serde(default = "default_t_max")]
    t_max: f64,
    #[serde(default = "default_steps")]
    steps: usize,
}

fn default_t_max() -> f64 {
    std::f64::consts::PI
}

fn default_steps() -> usize {
    160
}

/// Every evolution-time bound along a grid of elapsed times, for drawing
/// bound-vs-T tightness curves.
#[wasm_bindgen]
pub fn bound_curves(params: &str) -> String {
    let params: BoundCurveParams = match serde_json::from_str(params) {
        Ok(p) => p,
        Err(e) => return err_json(e),
    };
    let (rho, h) = match params.qubit.build() {
        Ok(x) => x,
        Err(e) => return err_json(e),
    };
    let steps = params.steps.clamp(8, 2000);
    if !(params.t_max.is_finite() && params.t_max > 0.0) {
        return err_json("t_max must be positive");
    }
    let mut t_grid = Vec::with_capacity(steps);
    let mut mt = Vec::with_capacity(steps);
    let mut ml = Vec::with_capacity(steps);
    let mut chau = Vec::with_capacity(steps);
    let mut improved = Vec::with_capacity(steps);
    let mut baseline = Vec::with_capacity(steps);
    let mut psd = true;
    for k in 1..=steps {
        let t = k as f64 * params.t_max / steps as f64;
        match combined_bound(&rho, &h, t, 1.0) {
            Ok(report) => {
                psd = report.h_psd;
                t_grid.push(t);
                mt.push(report.mt_bound.value());
                ml.push(report.ml_bound.value());
                chau.push(report.chau_bound.value());
                improved.push(report.improved_chau_bound.value());
                baseline.push(report.bures_baseline_bound.value());
            }
            Err(e) => return err_json(e),
        }
    }
    json!({
        "t": t_grid,
        "mt": mt,
        "ml": ml,
        "chau": chau,
        "improved_chau": improved,
        "bures_baseline": baseline,
        "psd": psd,
    })
    .to_string()
}

#[derive(Deserialize)]
struct ChannelCurveParams {
    mu: [f64; 3],
    r3: f64,
    #[serde(default = "default_t_max")]
    t_max: f64,
    #[serde(default = "default_steps")]
    steps: usize,
}

/// Closed-form channel bound along a grid of elapsed times, with a handful
/// of numerically dilated cross-check points.
#[wasm_bindgen]
pub fn channel_bound_curve(params: &str) -> String {
    let params: ChannelCurveParams = match serde_json::from_str(params) {
        Ok(p) => p,
        Err(e) => return err_json(e),
    };
    if params.r3.abs() > 1.0 {
        return err_json("r3 must lie in [-1, 1]");
    }
    if !(params.t_max.is_finite() && params.t_max > 0.0) {
        return err_json("t_max must be positive");
    }
    let steps = params.steps.clamp(8, 2000);
    let run = || -> Result<Value, qsl_core::Error> {
        let mut t_grid = Vec::with_capacity(steps);
        let mut bound = Vec::with_capacity(steps);
        for k in 1..=steps {
            let t = k as f64 * params.t_max / steps as f64;
            t_grid.push(t);
            bound.push(canonical_bound(params.mu, params.r3, t, 1.0)?);
        }
        let sys = canonical_system(params.mu, 1.0)?;
        let rho = DensityMatrix::from_bloch([0.0, 0.0, params.r3])?;
        let mut check_t = Vec::new();
        let mut check = Vec::new();
        let mut max_dev: f64 = 0.0;
        for k in 1..=8 {
            let t = k as f64 * params.t_max / 8.0;
            let numeric = cptp_bound(&rho, &sys, t)?;
            let closed = canonical_bound(params.mu, params.r3, t, 1.0)?;
            max_dev = max_dev.max((numeric - closed).abs());
            check_t.push(t);
            check.push(numeric);
        }
        Ok(json!({
            "t": t_grid,
            "bound": bound,
            "check_t": check_t,
            "check": check,
            "max_check_dev": max_dev,
        }))
    };
    match run() {
        Ok(v) => v.to_string(),
        Err(e) => err_json(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fringe_demo_exact_matches_truth() {
        let out = fringe_demo(
            r#"{"r": [0.0, 0.0, 0.5], "n": [0.70710678, 0.57735027, -0.40824829],
                "t": 1.5707963267948966, "shots": 0}"#,
        );
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "unexpected error: {out}");
        let fitted = v["fit"]["visibility"].as_f64().unwrap();
        let truth = v["truth"]["visibility"].as_f64().unwrap();
        assert!((fitted - truth).abs() < 1e-9);
        assert!((truth - 0.204124145231932).abs() < 1e-6);
        assert_eq!(v["curve"].as_array().unwrap().len(), 121);
    }

    #[test]
    fn fringe_demo_sampled_is_deterministic() {
        let params = r#"{"r": [0.0, 0.0, 0.5], "n": [1.0, 0.0, 0.0],
                         "t": 0.8, "shots": 20000, "seed": 7}"#;
        let a = fringe_demo(params);
        let b = fringe_demo(params);
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a).unwrap();
        let fitted = v["fit"]["visibility"].as_f64().unwrap();
        let truth = v["truth"]["visibility"].as_f64().unwrap();
        assert!((fitted - truth).abs() < 0.02);
    }

    #[test]
    fn bound_curves_stay_below_the_diagonal() {
        let out = bound_curves(
            r#"{"r": [0.2, 0.1, 0.4], "n": [0.6, -0.3, 0.74], "alpha": 1.0,
                "t_max": 3.14159, "steps": 40}"#,
        );
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "unexpected error: {out}");
        assert!(v["psd"].as_bool().unwrap());
        let t = v["t"].as_array().unwrap();
        for name in ["mt", "ml", "chau", "improved_chau", "bures_baseline"] {
            for (tk, bk) in t.iter().zip(v[name].as_array().unwrap()) {
                if let Some(b) = bk.as_f64() {
                    assert!(b <= tk.as_f64().unwrap() + 1e-9, "{name} exceeds T");
                }
            }
        }
    }

    #[test]
    fn indefinite_generator_drops_the_ml_curve() {
        let out = bound_curves(
            r#"{"r": [0.0, 0.0, 0.5], "n": [0.0, 0.0, 1.0], "alpha": 0.0,
                "t_max": 2.0, "steps": 10}"#,
        );
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(!v["psd"].as_bool().unwrap());
        assert!(v["ml"].as_array().unwrap().iter().all(Value::is_null));
    }

    #[test]
    fn channel_curve_cross_checks_dilation() {
        let out = channel_bound_curve(
            r#"{"mu": [0.9, 0.4, -0.7], "r3": 0.5, "t_max": 4.0, "steps": 32}"#,
        );
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "unexpected error: {out}");
        assert!(v["max_check_dev"].as_f64().unwrap() < 1e-9);
        let bounds = v["bound"].as_array().unwrap();
        let t = v["t"].as_array().unwrap();
        for (tk, bk) in t.iter().zip(bounds) {
            assert!(bk.as_f64().unwrap() <= tk.as_f64().unwrap() + 1e-9);
        }
    }

    #[test]
    fn malformed_params_return_error_json() {
        let out = fringe_demo("{nope");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_some());
        let out = channel_bound_curve(r#"{"mu": [0.0, 0.0, 0.0], "r3": 7.0}"#);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_some());
    }
}
