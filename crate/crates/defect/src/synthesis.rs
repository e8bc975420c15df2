//! Generators for the synthetic configurations the convergence experiments
//! evaluate: quadratic graph surfaces, regular fans built from the
//! equal-edge-length recurrence, parallelogram-criterion fans on parametric
//! surfaces, and the valence-4 counterexample family.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{OneRingFan, Point3, Vec3};

/// Coefficients of the quadratic graph surface
/// `f_a(x, y) = a20 x^2 + a11 xy + a02 y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub a20: f64,
    pub a11: f64,
    pub a02: f64,
}

impl QuadraticForm {
    pub fn new(a20: f64, a11: f64, a02: f64) -> Self {
        QuadraticForm { a20, a11, a02 }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.a20 * x * x + self.a11 * x * y + self.a02 * y * y
    }

    /// Point on the graph surface above `(x, y)`.
    pub fn graph_point(&self, x: f64, y: f64) -> Point3 {
        Point3::new(x, y, self.eval(x, y))
    }

    /// True `(G, H)` of the graph at the origin, where the gradient
    /// vanishes: `G = 4 a20 a02 - a11^2`, `H = a20 + a02`.
    pub fn curvatures_at_origin(&self) -> (f64, f64) {
        (
            4.0 * self.a20 * self.a02 - self.a11 * self.a11,
            self.a20 + self.a02,
        )
    }

    /// Coefficients drawn i.i.d. uniform on `[-1, 1]^3`.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        QuadraticForm {
            a20: rng.random_range(-1.0..=1.0),
            a11: rng.random_range(-1.0..=1.0),
            a02: rng.random_range(-1.0..=1.0),
        }
    }

    /// Normal-section curvature of the graph at the origin along the unit
    /// direction `(cos theta, sin theta)`: `2 f_a(cos theta, sin theta)`.
    pub fn section_curvature(&self, theta: f64) -> f64 {
        2.0 * self.eval(theta.cos(), theta.sin())
    }
}

/// Builds the regular fan of valence `n` on the graph of `a`, anchored at the
/// origin, with first in-plane radius `l1`.
///
/// Neighbor `k` sits above `l_k (cos theta_k, sin theta_k)` with
/// `theta_k = 2 k pi / n`, and `l_k` follows the recurrence that keeps every
/// center-to-neighbor distance equal:
/// `l_k^2 = (sqrt(1 + 4 e_k^2 t) - 1) / (2 e_k^2)` with
/// `e_k = f_a(cos theta_k, sin theta_k)` and `t = l_{k-1}^2 + l_{k-1}^4 e_{k-1}^2`.
/// The implementation evaluates the algebraically identical form
/// `2t / (1 + sqrt(1 + 4 e_k^2 t))`, whose `e_k -> 0` limit `l_k^2 = t` is
/// the analytic continuation of the printed quotient.
pub fn regular_fan(a: &QuadraticForm, n: usize, l1: f64) -> Result<OneRingFan> {
    if n < 3 {
        return Err(Error::TooFewNeighbors(n));
    }
    if !l1.is_finite() || l1 <= 0.0 {
        return Err(Error::Config(format!(
            "l1 must be positive and finite, got {l1}"
        )));
    }
    let mut neighbors = Vec::with_capacity(n);
    let mut l = l1;
    let mut t = 0.0; // squared spoke length l_k^2 + l_k^4 e_k^2, conserved
    for k in 0..n {
        let theta = 2.0 * k as f64 * std::f64::consts::PI / n as f64;
        let e_k = a.eval(theta.cos(), theta.sin());
        if k > 0 {
            let radicand = 1.0 + 4.0 * e_k * e_k * t;
            if !radicand.is_finite() || radicand <= 0.0 {
                return Err(Error::InvalidRecurrence);
            }
            let l_sq = 2.0 * t / (1.0 + radicand.sqrt());
            if !l_sq.is_finite() || l_sq <= 0.0 {
                return Err(Error::InvalidRecurrence);
            }
            l = l_sq.sqrt();
        }
        t = l * l + l.powi(4) * e_k * e_k;
        neighbors.push(Point3::new(l * theta.cos(), l * theta.sin(), l * l * e_k));
    }
    OneRingFan::new(Point3::new(0.0, 0.0, 0.0), neighbors)
}

/// A parametric surface patch with position, first partials and curvatures
/// at a parameter point. Quadratic graphs carry analytic derivatives; any
/// other map falls back to central finite differences.
#[derive(Clone)]
pub struct SurfaceMap {
    kind: SurfaceKind,
}

#[derive(Clone)]
enum SurfaceKind {
    QuadraticGraph(QuadraticForm),
    Custom {
        f: Arc<dyn Fn(f64, f64) -> Point3 + Send + Sync>,
        step: f64,
    },
}

impl std::fmt::Debug for SurfaceMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            SurfaceKind::QuadraticGraph(a) => write!(f, "SurfaceMap::QuadraticGraph({a:?})"),
            SurfaceKind::Custom { step, .. } => write!(f, "SurfaceMap::Custom {{ step: {step} }}"),
        }
    }
}

impl SurfaceMap {
    pub fn quadratic_graph(a: QuadraticForm) -> Self {
        SurfaceMap {
            kind: SurfaceKind::QuadraticGraph(a),
        }
    }

    /// Arbitrary parametric map; derivatives by central differences with the
    /// given step (use something near `1e-4` times the parameter scale).
    pub fn from_fn<F>(f: F, step: f64) -> Self
    where
        F: Fn(f64, f64) -> Point3 + Send + Sync + 'static,
    {
        SurfaceMap {
            kind: SurfaceKind::Custom {
                f: Arc::new(f),
                step,
            },
        }
    }

    /// Longitude/latitude chart of a sphere of the given radius. Regular away
    /// from the poles (`|v| < pi/2`).
    pub fn sphere(radius: f64) -> Self {
        Self::from_fn(
            move |u, v| {
                Point3::new(
                    radius * v.cos() * u.cos(),
                    radius * v.cos() * u.sin(),
                    radius * v.sin(),
                )
            },
            1e-4,
        )
    }

    pub fn position(&self, u: [f64; 2]) -> Point3 {
        match &self.kind {
            SurfaceKind::QuadraticGraph(a) => a.graph_point(u[0], u[1]),
            SurfaceKind::Custom { f, .. } => f(u[0], u[1]),
        }
    }

    /// First partial derivatives at `u`.
    pub fn partials(&self, u: [f64; 2]) -> (Vec3, Vec3) {
        match &self.kind {
            SurfaceKind::QuadraticGraph(a) => (
                Vec3::new(1.0, 0.0, 2.0 * a.a20 * u[0] + a.a11 * u[1]),
                Vec3::new(0.0, 1.0, a.a11 * u[0] + 2.0 * a.a02 * u[1]),
            ),
            SurfaceKind::Custom { f, step } => {
                let h = *step * u[0].abs().max(u[1].abs()).max(1.0);
                let d1 = (f(u[0] + h, u[1]) - f(u[0] - h, u[1])) * (0.5 / h);
                let d2 = (f(u[0], u[1] + h) - f(u[0], u[1] - h)) * (0.5 / h);
                (d1, d2)
            }
        }
    }

    /// Gaussian and mean curvature at `u` from the fundamental forms. The
    /// mean curvature sign follows the `t1 x t2` normal.
    pub fn curvatures(&self, u: [f64; 2]) -> Result<(f64, f64)> {
        let (t1, t2, t11, t12, t22) = match &self.kind {
            SurfaceKind::QuadraticGraph(a) => {
                let (t1, t2) = self.partials(u);
                (
                    t1,
                    t2,
                    Vec3::new(0.0, 0.0, 2.0 * a.a20),
                    Vec3::new(0.0, 0.0, a.a11),
                    Vec3::new(0.0, 0.0, 2.0 * a.a02),
                )
            }
            SurfaceKind::Custom { f, step } => {
                let h = *step * u[0].abs().max(u[1].abs()).max(1.0);
                let (x, y) = (u[0], u[1]);
                let t1 = (f(x + h, y) - f(x - h, y)) * (0.5 / h);
                let t2 = (f(x, y + h) - f(x, y - h)) * (0.5 / h);
                let center = f(x, y);
                let hh = h * h;
                let t11 = ((f(x + h, y) - center) + (f(x - h, y) - center)) * (1.0 / hh);
                let t22 = ((f(x, y + h) - center) + (f(x, y - h) - center)) * (1.0 / hh);
                let t12 = ((f(x + h, y + h) - f(x + h, y - h))
                    - (f(x - h, y + h) - f(x - h, y - h)))
                    * (0.25 / hh);
                (t1, t2, t11, t12, t22)
            }
        };
        let normal = t1.cross(t2);
        let nn = normal.norm();
        if nn <= 1e-12 * t1.norm() * t2.norm() {
            return Err(Error::DegenerateInput("surface map singular at base point"));
        }
        let n = normal * (1.0 / nn);
        let (e, f_, g) = (t1.dot(t1), t1.dot(t2), t2.dot(t2));
        let (l, m, nm) = (t11.dot(n), t12.dot(n), t22.dot(n));
        let det = e * g - f_ * f_;
        Ok((
            (l * nm - m * m) / det,
            (e * nm - 2.0 * f_ * m + g * l) / (2.0 * det),
        ))
    }
}

/// Checks the tangent-plane notion of vertex regularity against a known
/// surface normal at the center: all spokes have the same length and their
/// projections onto the tangent plane are separated by equal angles
/// `2 pi / n`. Tolerances are relative for lengths, absolute (radians) for
/// angles.
pub fn is_beta_regular(fan: &OneRingFan, surface_normal: Vec3, tol: f64) -> bool {
    let n = fan.valence();
    let nn = surface_normal.norm();
    if nn == 0.0 {
        return false;
    }
    let normal = surface_normal * (1.0 / nn);
    let spokes: Vec<Vec3> = (0..n).map(|i| fan.spoke(i)).collect();
    let eta0 = spokes[0].norm();
    if spokes.iter().any(|s| (s.norm() - eta0).abs() > tol * eta0) {
        return false;
    }
    let expected = std::f64::consts::TAU / n as f64;
    (0..n).all(|i| {
        let u = project_off(spokes[i], normal);
        let v = project_off(spokes[(i + 1) % n], normal);
        (crate::geometry::angle_between(u, v) - expected).abs() <= tol
    })
}

fn project_off(v: Vec3, unit_normal: Vec3) -> Vec3 {
    v - unit_normal * v.dot(unit_normal)
}

/// Checks the alternative notion of regularity: equal spoke lengths and
/// equal apex angles `gamma_i` (within `tol`, relative for lengths and
/// absolute for angles). At a regular vertex the two notions agree up to
/// `O(eta^2)`.
pub fn is_gamma_regular(fan: &OneRingFan, tol: f64) -> bool {
    let Ok(q) = fan.star_quantities() else {
        return false;
    };
    let eta0 = q.eta()[0];
    if q.eta().iter().any(|e| (e - eta0).abs() > tol * eta0) {
        return false;
    }
    let g0 = q.gamma()[0];
    q.gamma().iter().all(|g| (g - g0).abs() <= tol)
}

/// The six parameter-domain offsets of the parallelogram criterion for a
/// basis `(b1, b2)`: each offset is the sum of its two cyclic neighbors.
pub fn parallelogram_offsets(b1: [f64; 2], b2: [f64; 2]) -> [[f64; 2]; 6] {
    [
        b1,
        b2,
        [b2[0] - b1[0], b2[1] - b1[1]],
        [-b1[0], -b1[1]],
        [-b2[0], -b2[1]],
        [b1[0] - b2[0], b1[1] - b2[1]],
    ]
}

/// Builds the valence-6 fan over the parameter points `u + r w_j`, where the
/// `w_j` are the parallelogram offsets of `basis`.
pub fn parallelogram_fan(
    surface: &SurfaceMap,
    u: [f64; 2],
    basis: ([f64; 2], [f64; 2]),
    r: f64,
) -> Result<OneRingFan> {
    let (b1, b2) = basis;
    let cross = b1[0] * b2[1] - b1[1] * b2[0];
    let scale = (b1[0].hypot(b1[1])) * (b2[0].hypot(b2[1]));
    if cross.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateBasis);
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::Config(format!(
            "refinement r must be positive, got {r}"
        )));
    }
    let center = surface.position(u);
    let neighbors = parallelogram_offsets(b1, b2)
        .iter()
        .map(|w| surface.position([u[0] + r * w[0], u[1] + r * w[1]]))
        .collect();
    OneRingFan::new(center, neighbors)
}

/// The valence-4 family on `f(x, y) = x^2 + c xy + y^2`: the fan coordinates
/// never involve `c`, while the true Gaussian curvature at the center is
/// `4 - c^2`. Returns the fan and that true value.
pub fn counterexample_fan(c: f64, r1: f64) -> Result<(OneRingFan, f64)> {
    if !r1.is_finite() || r1 <= 0.0 {
        return Err(Error::Config(format!("r1 must be positive, got {r1}")));
    }
    let z = r1 * r1;
    let fan = OneRingFan::new(
        Point3::new(0.0, 0.0, 0.0),
        vec![
            Point3::new(r1, 0.0, z),
            Point3::new(0.0, r1, z),
            Point3::new(-r1, 0.0, z),
            Point3::new(0.0, -r1, z),
        ],
    )?;
    Ok((fan, 4.0 - c * c))
}

/// A refinable family of fans with fixed true curvatures at the center.
pub struct FanFamily {
    true_g: f64,
    true_h: f64,
    generator: Box<dyn Fn(f64) -> Result<OneRingFan> + Send + Sync>,
}

impl std::fmt::Debug for FanFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "FanFamily {{ true_g: {}, true_h: {} }}",
            self.true_g, self.true_h
        )
    }
}

impl FanFamily {
    /// A family from an arbitrary generator with known true curvatures.
    pub fn new<F>(true_g: f64, true_h: f64, generator: F) -> Self
    where
        F: Fn(f64) -> Result<OneRingFan> + Send + Sync + 'static,
    {
        FanFamily {
            true_g,
            true_h: true_h.abs(),
            generator: Box::new(generator),
        }
    }

    /// Regular fans of valence `n` on the graph of `a`; the refinement
    /// parameter is `l1`.
    pub fn regular(a: QuadraticForm, n: usize) -> Self {
        let (g, h) = a.curvatures_at_origin();
        FanFamily {
            true_g: g,
            true_h: h.abs(),
            generator: Box::new(move |l1| regular_fan(&a, n, l1)),
        }
    }

    /// Parallelogram-criterion fans on `surface` around `u`.
    pub fn parallelogram(
        surface: SurfaceMap,
        u: [f64; 2],
        basis: ([f64; 2], [f64; 2]),
    ) -> Result<Self> {
        let (g, h) = surface.curvatures(u)?;
        Ok(FanFamily {
            true_g: g,
            true_h: h.abs(),
            generator: Box::new(move |r| parallelogram_fan(&surface, u, basis, r)),
        })
    }

    /// The valence-4 counterexample family for mixed coefficient `c`.
    pub fn counterexample(c: f64) -> Self {
        FanFamily {
            true_g: 4.0 - c * c,
            true_h: 2.0,
            generator: Box::new(move |r1| counterexample_fan(c, r1).map(|(fan, _)| fan)),
        }
    }

    pub fn true_gaussian(&self) -> f64 {
        self.true_g
    }

    /// Unsigned true mean curvature, matching the unsigned `H1` operator.
    pub fn true_mean(&self) -> f64 {
        self.true_h
    }

    pub fn generate(&self, r: f64) -> Result<OneRingFan> {
        (self.generator)(r)
    }
}

/// Generates the family at each refinement level. Levels must be positive
/// and strictly decreasing.
pub fn refine(family: &FanFamily, levels: &[f64]) -> Result<Vec<(f64, OneRingFan)>> {
    if levels.iter().any(|&r| !r.is_finite() || r <= 0.0) {
        return Err(Error::Config("refinement levels must be positive".into()));
    }
    if levels.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config(
            "refinement levels must be strictly decreasing".into(),
        ));
    }
    levels
        .iter()
        .map(|&r| family.generate(r).map(|fan| (r, fan)))
        .collect()
}
