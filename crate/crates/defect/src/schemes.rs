//! The discrete curvature estimators.
//!
//! Five Gaussian-curvature schemes share the angular defect as numerator and
//! differ in the area-like denominator:
//!
//! * `G1` — one third of the star area
//! * `G2` — the module `S_p`
//! * `G3` — the cotangent-corrected area (algebraically equal to `G2`)
//! * `G4` — the mixed Voronoi cell area
//! * `G5` — combines `S_p`, the anisotropy area `A` and the squared discrete
//!   mean curvature; converges at regular vertices of valence >= 5 and at
//!   umbilic points
//!
//! `H1` is the cotangent mean-curvature operator the `G5` correction uses.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{OneRingFan, StarQuantities, Vec3};
use crate::mesh::TriangleMesh;

/// Relative floor for every scheme denominator. The denominators are all
/// O(eta^2) quantities, so the floor scales with the squared fan radius.
pub const CONDITIONING_FLOOR: f64 = 1e-14;

/// Identifies one of the implemented curvature schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeId {
    G1,
    G2,
    G3,
    G4,
    G5,
    H1,
}

impl SchemeId {
    /// All schemes, in report order.
    pub const ALL: [SchemeId; 6] = [
        SchemeId::G1,
        SchemeId::G2,
        SchemeId::G3,
        SchemeId::G4,
        SchemeId::G5,
        SchemeId::H1,
    ];

    /// The Gaussian-curvature schemes (everything but `H1`).
    pub const GAUSSIAN: [SchemeId; 5] = [
        SchemeId::G1,
        SchemeId::G2,
        SchemeId::G3,
        SchemeId::G4,
        SchemeId::G5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::G1 => "g1",
            SchemeId::G2 => "g2",
            SchemeId::G3 => "g3",
            SchemeId::G4 => "g4",
            SchemeId::G5 => "g5",
            SchemeId::H1 => "h1",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "g1" => Ok(SchemeId::G1),
            "g2" => Ok(SchemeId::G2),
            "g3" => Ok(SchemeId::G3),
            "g4" => Ok(SchemeId::G4),
            "g5" => Ok(SchemeId::G5),
            "h1" => Ok(SchemeId::H1),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Why a per-vertex value is present or missing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validity {
    Ok,
    BoundarySkipped,
    Degenerate,
    IllConditioned,
}

impl Validity {
    pub fn name(self) -> &'static str {
        match self {
            Validity::Ok => "ok",
            Validity::BoundarySkipped => "boundary_skipped",
            Validity::Degenerate => "degenerate",
            Validity::IllConditioned => "ill_conditioned",
        }
    }
}

fn floor_for(q: &StarQuantities) -> f64 {
    CONDITIONING_FLOOR * q.max_eta() * q.max_eta()
}

/// `G1 = 3 (2 pi - sum gamma_i) / A(p)`.
pub fn g1(q: &StarQuantities) -> f64 {
    3.0 * q.angular_defect() / q.fan_area()
}

/// `G2 = (2 pi - sum gamma_i) / S_p`.
pub fn g2(q: &StarQuantities) -> Result<f64> {
    let sp = q.module_sp();
    if sp.abs() < floor_for(q) {
        return Err(Error::IllConditioned("module S_p"));
    }
    Ok(q.angular_defect() / sp)
}

/// `G3`: the angular defect over the cotangent-corrected area. Equal to
/// [`g2`] for every fan.
pub fn g3(q: &StarQuantities) -> Result<f64> {
    let den = q.modified_denominator();
    if den.abs() < floor_for(q) {
        return Err(Error::IllConditioned("modified denominator"));
    }
    Ok(q.angular_defect() / den)
}

/// `G4`: the angular defect over the circumcentric Voronoi cell area.
pub fn g4(q: &StarQuantities) -> Result<f64> {
    let am = q.voronoi_area();
    if am.abs() < floor_for(q) {
        return Err(Error::IllConditioned("Voronoi area"));
    }
    Ok(q.angular_defect() / am)
}

fn h1_from(fan: &OneRingFan, q: &StarQuantities) -> Result<f64> {
    let n = q.valence();
    let mut num = Vec3::new(0.0, 0.0, 0.0);
    let mut den = 0.0;
    for i in 0..n {
        let w = q.cot_alpha()[i] + q.cot_delta()[i];
        num = num + fan.spoke(i) * w;
        den += w * q.eta()[i] * q.eta()[i];
    }
    if den.abs() < floor_for(q) {
        return Err(Error::IllConditioned("cotangent weight sum"));
    }
    Ok(2.0 * num.norm() / den.abs())
}

/// `H1`: the unsigned cotangent mean-curvature operator,
/// `2 || sum_i (cot alpha_i + cot delta_i)(p_i - p) || / |sum_i (cot alpha_i + cot delta_i) eta_i^2|`.
pub fn h1(fan: &OneRingFan) -> Result<f64> {
    let q = fan.star_quantities()?;
    h1_from(fan, &q)
}

fn g5_from(fan: &OneRingFan, q: &StarQuantities) -> Result<f64> {
    let a = q.aniso_area();
    let sp = q.module_sp();
    let den = 2.0 * a - sp;
    if den.abs() < floor_for(q) {
        // Happens by construction at valence 3, where the regular-vertex
        // closed forms satisfy A' = 2B'.
        return Err(Error::IllConditioned("2A - S_p"));
    }
    let h = h1_from(fan, q)?;
    Ok((q.angular_defect() - 2.0 * (sp - a) * h * h) / den)
}

/// `G5 = (2 pi - sum gamma_i - 2 (S_p - A) (H1)^2) / (2A - S_p)`.
pub fn g5(fan: &OneRingFan) -> Result<f64> {
    let q = fan.star_quantities()?;
    g5_from(fan, &q)
}

/// Evaluates one scheme on a fan.
pub fn evaluate(scheme: SchemeId, fan: &OneRingFan) -> Result<f64> {
    let q = fan.star_quantities()?;
    match scheme {
        SchemeId::G1 => Ok(g1(&q)),
        SchemeId::G2 => g2(&q),
        SchemeId::G3 => g3(&q),
        SchemeId::G4 => g4(&q),
        SchemeId::G5 => g5_from(fan, &q),
        SchemeId::H1 => h1_from(fan, &q),
    }
}

/// Principal curvatures recovered from mean and Gaussian estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrincipalCurvatures {
    pub k_min: f64,
    pub k_max: f64,
    /// True when `h^2 < g` and the radicand was clamped to zero.
    pub clamped: bool,
}

/// `k_min = h - sqrt(h^2 - g)`, `k_max = h + sqrt(h^2 - g)`, with the
/// radicand clamped at zero (and flagged) when estimates are inconsistent.
pub fn principal_curvatures(h: f64, g: f64) -> PrincipalCurvatures {
    let radicand = h * h - g;
    let clamped = radicand < 0.0;
    let root = radicand.max(0.0).sqrt();
    PrincipalCurvatures {
        k_min: h - root,
        k_max: h + root,
        clamped,
    }
}

/// Closed forms of the regular-vertex expansions at valence `n`, edge
/// length `eta`, with `theta = 2 pi / n`. They satisfy `S'_p = A' + 2B'`,
/// and `A' - 2B' = 0` exactly at `n = 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedForms {
    pub a_prime: f64,
    pub sp_prime: f64,
    pub b_prime: f64,
}

pub fn regular_closed_forms(n: usize, eta: f64) -> ClosedForms {
    let nf = n as f64;
    let theta = 2.0 * std::f64::consts::PI / nf;
    let (sin_t, cos_t, cos_2t) = (theta.sin(), theta.cos(), (2.0 * theta).cos());
    let e2 = eta * eta;
    ClosedForms {
        a_prime: (2.0 * nf - nf * cos_2t - nf * cos_t) / (16.0 * sin_t) * e2,
        sp_prime: nf * (1.0 - cos_t) / (4.0 * sin_t) * e2,
        b_prime: (nf + 0.5 * nf * cos_2t - 1.5 * nf * cos_t) / (16.0 * sin_t) * e2,
    }
}

/// One scheme value at one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeValue {
    pub value: Option<f64>,
    pub validity: Validity,
}

/// Per-vertex scheme values over a whole mesh. Vertices that cannot be
/// evaluated are flagged, never dropped.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvatureReport {
    schemes: Vec<SchemeId>,
    /// `entries[v]` is aligned with `schemes`.
    entries: Vec<Vec<SchemeValue>>,
}

impl CurvatureReport {
    pub fn schemes(&self) -> &[SchemeId] {
        &self.schemes
    }

    pub fn vertex_count(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, vertex: usize, scheme: SchemeId) -> Option<SchemeValue> {
        let k = self.schemes.iter().position(|&s| s == scheme)?;
        self.entries.get(vertex).map(|row| row[k])
    }

    pub fn value(&self, vertex: usize, scheme: SchemeId) -> Option<f64> {
        self.entry(vertex, scheme).and_then(|e| e.value)
    }

    pub fn validity(&self, vertex: usize, scheme: SchemeId) -> Option<Validity> {
        self.entry(vertex, scheme).map(|e| e.validity)
    }

    /// Mean absolute deviation of one scheme from a reference value, over
    /// vertices where the scheme evaluated. Returns `None` when nothing
    /// evaluated.
    pub fn mean_abs_error(&self, scheme: SchemeId, reference: f64) -> Option<f64> {
        let k = self.schemes.iter().position(|&s| s == scheme)?;
        let mut sum = 0.0;
        let mut count = 0usize;
        for row in &self.entries {
            if let Some(v) = row[k].value {
                sum += (v - reference).abs();
                count += 1;
            }
        }
        (count > 0).then(|| sum / count as f64)
    }

    /// Number of vertices with the given validity for the scheme.
    pub fn count_with_validity(&self, scheme: SchemeId, validity: Validity) -> usize {
        let Some(k) = self.schemes.iter().position(|&s| s == scheme) else {
            return 0;
        };
        self.entries
            .iter()
            .filter(|row| row[k].validity == validity)
            .count()
    }
}

/// Evaluates the requested schemes at every vertex of the mesh. Vertices are
/// independent; the report is ordered by vertex index regardless of any
/// evaluation strategy.
pub fn estimate_mesh(mesh: &TriangleMesh, schemes: &[SchemeId]) -> CurvatureReport {
    let mut entries = Vec::with_capacity(mesh.vertex_count());
    for v in 0..mesh.vertex_count() {
        let row = match mesh.one_ring(v) {
            Err(Error::BoundaryVertex(_)) | Err(Error::NonManifoldVertex(_)) => {
                vec![
                    SchemeValue {
                        value: None,
                        validity: Validity::BoundarySkipped
                    };
                    schemes.len()
                ]
            }
            Err(_) => vec![
                SchemeValue {
                    value: None,
                    validity: Validity::Degenerate
                };
                schemes.len()
            ],
            Ok(fan) => schemes
                .iter()
                .map(|&scheme| match evaluate(scheme, &fan) {
                    Ok(value) => SchemeValue {
                        value: Some(value),
                        validity: Validity::Ok,
                    },
                    Err(Error::IllConditioned(_)) => SchemeValue {
                        value: None,
                        validity: Validity::IllConditioned,
                    },
                    Err(_) => SchemeValue {
                        value: None,
                        validity: Validity::Degenerate,
                    },
                })
                .collect(),
        };
        entries.push(row);
    }
    CurvatureReport {
        schemes: schemes.to_vec(),
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{OneRingFan, Point3};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn hexagon_fan() -> OneRingFan {
        let neighbors = (0..6)
            .map(|k| {
                let t = k as f64 * PI / 3.0;
                Point3::new(t.cos(), t.sin(), 0.0)
            })
            .collect();
        OneRingFan::new(Point3::new(0.0, 0.0, 0.0), neighbors).unwrap()
    }

    fn octahedron_vertex_fan() -> OneRingFan {
        let s = 1.0 / 2f64.sqrt();
        OneRingFan::new(
            Point3::new(0.0, 0.0, s),
            vec![
                Point3::new(s, 0.0, 0.0),
                Point3::new(0.0, s, 0.0),
                Point3::new(-s, 0.0, 0.0),
                Point3::new(0.0, -s, 0.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn flat_fan_annihilates_all_schemes() {
        let fan = hexagon_fan();
        for scheme in SchemeId::ALL {
            let v = evaluate(scheme, &fan).unwrap();
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn octahedron_vertex_values() {
        let fan = octahedron_vertex_fan();
        let expected = 2.0 * PI / 3f64.sqrt();
        for scheme in [SchemeId::G1, SchemeId::G2, SchemeId::G3, SchemeId::G4] {
            assert_abs_diff_eq!(evaluate(scheme, &fan).unwrap(), expected, epsilon = 1e-12);
        }
        // The octahedron vertices sit on a sphere of radius 1/sqrt(2), whose
        // mean curvature is sqrt(2); H1 reproduces it exactly here.
        assert_abs_diff_eq!(h1(&fan).unwrap(), 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn regular_sphere_fan_recovers_unit_curvatures() {
        // Six points at equal geodesic radius around the north pole of the
        // unit sphere: G = H = 1 in the limit.
        let rho = 0.05f64;
        let neighbors = (0..6)
            .map(|k| {
                let t = k as f64 * PI / 3.0;
                Point3::new(rho.sin() * t.cos(), rho.sin() * t.sin(), rho.cos())
            })
            .collect();
        let fan = OneRingFan::new(Point3::new(0.0, 0.0, 1.0), neighbors).unwrap();
        for scheme in SchemeId::ALL {
            let v = evaluate(scheme, &fan).unwrap();
            assert!((v - 1.0).abs() < 0.01, "{scheme} = {v} far from 1");
        }
    }

    #[test]
    fn g2_equals_g3_on_irregular_fan() {
        let fan = OneRingFan::new(
            Point3::new(0.02, -0.01, 0.015),
            vec![
                Point3::new(1.1, 0.2, 0.3),
                Point3::new(-0.1, 0.9, -0.25),
                Point3::new(-1.2, 0.1, 0.18),
                Point3::new(-0.4, -1.3, -0.05),
                Point3::new(0.8, -0.9, 0.22),
            ],
        )
        .unwrap();
        let q = fan.star_quantities().unwrap();
        let a = g2(&q).unwrap();
        let b = g3(&q).unwrap();
        assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn schemes_scale_inversely_with_squared_size() {
        let fan = octahedron_vertex_fan();
        let s = 0.37;
        let scaled = fan.scaled(s).unwrap();
        for scheme in [SchemeId::G1, SchemeId::G2, SchemeId::G4] {
            let v = evaluate(scheme, &fan).unwrap();
            let vs = evaluate(scheme, &scaled).unwrap();
            assert!((vs - v / (s * s)).abs() <= 1e-9 * vs.abs());
        }
        let h = h1(&fan).unwrap();
        let hs = h1(&scaled).unwrap();
        assert!((hs - h / s).abs() <= 1e-9 * hs.abs());
    }

    #[test]
    fn principal_curvature_recovery() {
        let p = principal_curvatures(1.0, 1.0);
        assert_eq!((p.k_min, p.k_max, p.clamped), (1.0, 1.0, false));
        let p = principal_curvatures(0.0, -1.0);
        assert_abs_diff_eq!(p.k_min, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.k_max, 1.0, epsilon = 1e-15);
        assert!(!p.clamped);
        let p = principal_curvatures(1.0, 1.0 + 1e-12);
        assert_eq!((p.k_min, p.k_max), (1.0, 1.0));
        assert!(p.clamped);
    }

    #[test]
    fn closed_form_identities() {
        let c = regular_closed_forms(6, 1.0);
        assert_abs_diff_eq!(c.a_prime, 3f64.sqrt() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.sp_prime, 3f64.sqrt() / 2.0, epsilon = 1e-12);
        for n in 3..=12 {
            let c = regular_closed_forms(n, 0.7);
            let rel = c.sp_prime.abs().max(1.0);
            assert!((c.sp_prime - c.a_prime - 2.0 * c.b_prime).abs() <= 1e-12 * rel);
        }
        let c3 = regular_closed_forms(3, 1.0);
        assert_abs_diff_eq!(c3.a_prime - 2.0 * c3.b_prime, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn estimate_mesh_octahedron() {
        let mesh = TriangleMesh::octahedron();
        let report = estimate_mesh(&mesh, &[SchemeId::G1]);
        let expected = 2.0 * PI / 3f64.sqrt();
        for v in 0..6 {
            assert_eq!(report.validity(v, SchemeId::G1), Some(Validity::Ok));
            assert_abs_diff_eq!(
                report.value(v, SchemeId::G1).unwrap(),
                expected,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn estimate_mesh_flags_boundary() {
        let mesh = TriangleMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let report = estimate_mesh(&mesh, &[SchemeId::G2, SchemeId::H1]);
        for v in 0..3 {
            for s in [SchemeId::G2, SchemeId::H1] {
                assert_eq!(report.validity(v, s), Some(Validity::BoundarySkipped));
                assert_eq!(report.value(v, s), None);
            }
        }
    }

    #[test]
    fn scheme_id_round_trips_names() {
        for s in SchemeId::ALL {
            assert_eq!(s.name().parse::<SchemeId>().unwrap(), s);
        }
        assert!("g9".parse::<SchemeId>().is_err());
    }
}
