//! Browser bindings: three interactive views over the curvature library,
//! each returning a JSON payload for the static demo page to render.
//!
//! Every function is a pure computation over primitives, so the crate also
//! compiles and tests on the host target.

use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

use defect::bench::{derive_seed, run_table1, ExperimentConfig};
use defect::hull::{average_edge_length, convex_hull, sample_uniform_sphere};
use defect::schemes::{self, estimate_mesh, SchemeId};
use defect::synthesis::{regular_fan, QuadraticForm};
use defect::{Error, Point3};

fn json_error(e: impl std::fmt::Display) -> String {
    #[derive(Serialize)]
    struct Failure {
        ok: bool,
        error: String,
    }
    serde_json::to_string(&Failure {
        ok: false,
        error: e.to_string(),
    })
    .expect("failure serializes")
}

fn parse_schemes(csv: &str) -> Result<Vec<SchemeId>, Error> {
    csv.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse())
        .collect()
}

fn points(ps: &[Point3]) -> Vec<[f64; 3]> {
    ps.iter().map(|p| [p.x, p.y, p.z]).collect()
}

#[derive(Serialize)]
struct SchemeEntry {
    id: String,
    value: Option<f64>,
    flag: String,
}

#[derive(Serialize)]
struct FanReport {
    ok: bool,
    center: [f64; 3],
    neighbors: Vec<[f64; 3]>,
    eta: f64,
    defect: f64,
    true_g: f64,
    true_h: f64,
    schemes: Vec<SchemeEntry>,
}

/// Builds the regular fan of the given valence on the quadratic graph
/// `a20 x^2 + a11 xy + a02 y^2` and evaluates every scheme on it.
#[wasm_bindgen]
pub fn fan_report(a20: f64, a11: f64, a02: f64, valence: usize, l1: f64) -> String {
    let a = QuadraticForm::new(a20, a11, a02);
    let fan = match regular_fan(&a, valence, l1) {
        Ok(fan) => fan,
        Err(e) => return json_error(e),
    };
    let q = match fan.star_quantities() {
        Ok(q) => q,
        Err(e) => return json_error(e),
    };
    let (true_g, true_h) = a.curvatures_at_origin();
    let schemes = SchemeId::ALL
        .iter()
        .map(|&id| match schemes::evaluate(id, &fan) {
            Ok(v) => SchemeEntry {
                id: id.name().into(),
                value: Some(v),
                flag: "ok".into(),
            },
            Err(e) => SchemeEntry {
                id: id.name().into(),
                value: None,
                flag: e.to_string(),
            },
        })
        .collect();
    let report = FanReport {
        ok: true,
        center: [fan.center().x, fan.center().y, fan.center().z],
        neighbors: points(fan.neighbors()),
        eta: q.eta()[0],
        defect: q.angular_defect(),
        true_g,
        true_h: true_h.abs(),
        schemes,
    };
    serde_json::to_string(&report).unwrap_or_else(json_error)
}

#[derive(Serialize)]
struct ConvergenceSeries {
    id: String,
    etas: Vec<f64>,
    errors: Vec<f64>,
    slope: Option<f64>,
}

#[derive(Serialize)]
struct ConvergenceReport {
    ok: bool,
    valence: usize,
    samples: usize,
    series: Vec<ConvergenceSeries>,
}

/// Runs the regular-fan refinement study at one valence over seeded random
/// quadratic forms; `schemes_csv` like `"g1,g2,g5"`.
#[wasm_bindgen]
pub fn convergence_report(valence: usize, samples: usize, seed: u64, schemes_csv: &str) -> String {
    let schemes = match parse_schemes(schemes_csv) {
        Ok(s) => s,
        Err(e) => return json_error(e),
    };
    let mut cfg = ExperimentConfig::table1_defaults();
    cfg.valences = vec![valence];
    cfg.samples = samples;
    cfg.seed = seed;
    cfg.schemes = schemes.clone();
    let table = match run_table1(&cfg) {
        Ok(t) => t,
        Err(e) => return json_error(e),
    };
    let series = schemes
        .iter()
        .map(|&s| {
            let pairs = table.series(s, valence as u64);
            ConvergenceSeries {
                id: s.name().into(),
                etas: pairs.iter().map(|p| p.0).collect(),
                errors: pairs.iter().map(|p| p.1).collect(),
                slope: table.slope(s, valence as u64),
            }
        })
        .collect();
    serde_json::to_string(&ConvergenceReport {
        ok: true,
        valence,
        samples,
        series,
    })
    .unwrap_or_else(json_error)
}

#[derive(Serialize)]
struct SphereReport {
    ok: bool,
    vertices: Vec<[f64; 3]>,
    triangles: Vec<[usize; 3]>,
    values: Vec<Option<f64>>,
    errors: Vec<Option<f64>>,
    mean_abs_error: Option<f64>,
    eta: f64,
}

/// Samples `n` uniform points on the unit sphere, triangulates their hull
/// and evaluates one scheme per vertex (true curvature is 1 everywhere).
#[wasm_bindgen]
pub fn sphere_report(n: usize, seed: u64, scheme: &str) -> String {
    if n > 5000 {
        return json_error("demo caps the sphere at 5000 vertices");
    }
    let scheme: SchemeId = match scheme.parse() {
        Ok(s) => s,
        Err(e) => return json_error(e),
    };
    let set = match sample_uniform_sphere(n, derive_seed(seed, n as u64)) {
        Ok(s) => s,
        Err(e) => return json_error(e),
    };
    let mesh = match convex_hull(&set) {
        Ok(m) => m,
        Err(e) => return json_error(e),
    };
    let report = estimate_mesh(&mesh, &[scheme]);
    let values: Vec<Option<f64>> = (0..mesh.vertex_count())
        .map(|v| report.value(v, scheme))
        .collect();
    let errors = values.iter().map(|v| v.map(|x| (x - 1.0).abs())).collect();
    serde_json::to_string(&SphereReport {
        ok: true,
        vertices: points(mesh.vertices()),
        triangles: mesh.triangles().to_vec(),
        values,
        errors,
        mean_abs_error: report.mean_abs_error(scheme, 1.0),
        eta: average_edge_length(&mesh),
    })
    .unwrap_or_else(json_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fan_report_payload() {
        let v: serde_json::Value =
            serde_json::from_str(&fan_report(1.0, 0.0, 1.0, 6, 0.125)).unwrap();
        assert_eq!(v["ok"], true);
        assert_eq!(v["neighbors"].as_array().unwrap().len(), 6);
        assert_eq!(v["true_g"].as_f64().unwrap(), 4.0);
        assert_eq!(v["true_h"].as_f64().unwrap(), 2.0);
        let schemes = v["schemes"].as_array().unwrap();
        assert_eq!(schemes.len(), 6);
        let g5 = schemes.iter().find(|s| s["id"] == "g5").unwrap();
        assert!((g5["value"].as_f64().unwrap() - 4.0).abs() < 0.3);
    }

    #[test]
    fn fan_report_rejects_bad_input() {
        let v: serde_json::Value =
            serde_json::from_str(&fan_report(1.0, 0.0, 1.0, 2, 0.125)).unwrap();
        assert_eq!(v["ok"], false);
        assert!(v["error"].as_str().unwrap().contains("3"));
    }

    #[test]
    fn convergence_report_payload() {
        let v: serde_json::Value =
            serde_json::from_str(&convergence_report(6, 10, 7, "g1,g5")).unwrap();
        assert_eq!(v["ok"], true);
        let series = v["series"].as_array().unwrap();
        assert_eq!(series.len(), 2);
        assert_eq!(series[0]["etas"].as_array().unwrap().len(), 5);
        assert!(series[0]["slope"].as_f64().unwrap() > 1.5);
    }

    #[test]
    fn sphere_report_payload() {
        let v: serde_json::Value = serde_json::from_str(&sphere_report(50, 3, "g2")).unwrap();
        assert_eq!(v["ok"], true);
        assert_eq!(v["vertices"].as_array().unwrap().len(), 50);
        assert_eq!(v["triangles"].as_array().unwrap().len(), 96);
        assert!(v["mean_abs_error"].as_f64().unwrap() < 0.5);
        assert!(v["eta"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn sphere_report_rejects_unknown_scheme() {
        let v: serde_json::Value = serde_json::from_str(&sphere_report(50, 3, "g7")).unwrap();
        assert_eq!(v["ok"], false);
    }
}
