//! One-ring fan geometry: points, fans and the per-fan scalar quantities the
//! curvature formulas consume.
//!
//! A fan is a center vertex `p` with its cyclically ordered one-ring neighbors
//! `p_1 .. p_n` (indices wrap, `p_{n+1} = p_1`). Every estimator in
//! [`crate::schemes`] is a function of the fan alone, via the derived
//! [`StarQuantities`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Triangles with normalized area below this are rejected as degenerate.
/// Normalization is by the squared longest center-to-neighbor distance, so
/// the threshold is scale-free.
pub const MIN_NORMALIZED_AREA: f64 = 1e-14;

/// Apex angles with `sin` below this are rejected: every denominator in the
/// curvature formulas divides by `sin(gamma_i)`.
pub const MIN_SIN_GAMMA: f64 = 1e-12;

/// A point in 3-space. Coordinates must stay finite; constructors of the
/// aggregate types check this.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// A displacement in 3-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Vec3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }
}

impl std::ops::Sub for Point3 {
    type Output = Vec3;
    fn sub(self, o: Point3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Add<Vec3> for Point3 {
    type Output = Point3;
    fn add(self, v: Vec3) -> Point3 {
        Point3::new(self.x + v.x, self.y + v.y, self.z + v.z)
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Angle between two vectors, computed as `atan2(|u x v|, u.v)` for stability
/// near 0 and pi. Result lies in `[0, pi]`.
pub fn angle_between(u: Vec3, v: Vec3) -> f64 {
    u.cross(v).norm().atan2(u.dot(v))
}

/// Cotangent of the angle between two vectors, as dot over cross norm.
/// The caller guarantees the cross norm is bounded away from zero.
fn cot_between(u: Vec3, v: Vec3) -> f64 {
    u.dot(v) / u.cross(v).norm()
}

/// A center point with its cyclically ordered one-ring neighbors.
///
/// Construction checks finiteness, `n >= 3`, and that no neighbor coincides
/// with the center. Triangle non-degeneracy (positive area, usable apex
/// angles) is checked where the star quantities are computed, since the
/// tolerances live there.
#[derive(Debug, Clone, PartialEq)]
pub struct OneRingFan {
    center: Point3,
    neighbors: Vec<Point3>,
}

impl OneRingFan {
    pub fn new(center: Point3, neighbors: Vec<Point3>) -> Result<Self> {
        if !center.is_finite() || neighbors.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFiniteCoordinate("one-ring fan"));
        }
        if neighbors.len() < 3 {
            return Err(Error::TooFewNeighbors(neighbors.len()));
        }
        if neighbors
            .iter()
            .any(|&p| (p - center).norm_squared() == 0.0)
        {
            return Err(Error::DegenerateTriangle("neighbor coincides with center"));
        }
        Ok(OneRingFan { center, neighbors })
    }

    pub fn center(&self) -> Point3 {
        self.center
    }

    pub fn neighbors(&self) -> &[Point3] {
        &self.neighbors
    }

    /// Valence of the center vertex.
    pub fn valence(&self) -> usize {
        self.neighbors.len()
    }

    /// Vector from the center to neighbor `i`.
    pub fn spoke(&self, i: usize) -> Vec3 {
        self.neighbors[i] - self.center
    }

    /// Derives all per-fan scalars. See [`StarQuantities`].
    pub fn star_quantities(&self) -> Result<StarQuantities> {
        StarQuantities::from_fan(self)
    }

    /// The fan scaled by `s` about its center (used by scaling tests and the
    /// refinement drivers).
    pub fn scaled(&self, s: f64) -> Result<OneRingFan> {
        let c = self.center;
        OneRingFan::new(c, self.neighbors.iter().map(|&p| c + (p - c) * s).collect())
    }
}

/// All per-fan scalars the curvature formulas consume, for a fan of valence
/// `n` (0-based index `i` below, cyclic where noted):
///
/// * `gamma[i]` — apex angle at the center in triangle `(p, p_i, p_{i+1})`
/// * `eta[i]` — distance from the center to neighbor `i`
/// * `d[i]` — length of the opposite edge `p_i p_{i+1}`
/// * `alpha[i]` — angle at `p_{i-1}` between `p_i` and `p` (cyclic `i-1`)
/// * `delta[i]` — angle at `p_{i+1}` between `p_i` and `p`
/// * `phi[i]` — cumulative apex angle `gamma[0] + .. + gamma[i]`
/// * `tri_area[i]` — area of triangle `(p, p_i, p_{i+1})`
///
/// `alpha` and `delta` are the two angles opposite the spoke `p p_i` in its
/// two incident triangles; their cotangents are cached for the mean-curvature
/// operator and the Voronoi cell areas.
#[derive(Debug, Clone)]
pub struct StarQuantities {
    n: usize,
    gamma: Vec<f64>,
    eta: Vec<f64>,
    d: Vec<f64>,
    alpha: Vec<f64>,
    delta: Vec<f64>,
    phi: Vec<f64>,
    tri_area: Vec<f64>,
    cot_alpha: Vec<f64>,
    cot_delta: Vec<f64>,
    max_eta: f64,
}

impl StarQuantities {
    fn from_fan(fan: &OneRingFan) -> Result<Self> {
        let n = fan.valence();
        let spokes: Vec<Vec3> = (0..n).map(|i| fan.spoke(i)).collect();
        let eta: Vec<f64> = spokes.iter().map(|s| s.norm()).collect();
        let max_eta = eta.iter().cloned().fold(0.0, f64::max);
        let area_floor = MIN_NORMALIZED_AREA * max_eta * max_eta;

        let mut gamma = Vec::with_capacity(n);
        let mut d = Vec::with_capacity(n);
        let mut tri_area = Vec::with_capacity(n);
        for i in 0..n {
            let j = (i + 1) % n;
            let cross = spokes[i].cross(spokes[j]);
            let area = 0.5 * cross.norm();
            if area < area_floor {
                return Err(Error::DegenerateTriangle("triangle area below tolerance"));
            }
            let g = angle_between(spokes[i], spokes[j]);
            if g.sin() < MIN_SIN_GAMMA {
                return Err(Error::DegenerateTriangle("sin(gamma) below tolerance"));
            }
            gamma.push(g);
            d.push((fan.neighbors[j] - fan.neighbors[i]).norm());
            tri_area.push(area);
        }

        // alpha[i] sits at p_{i-1}, delta[i] at p_{i+1}; both look at the
        // spoke p p_i from the third vertex of their triangle.
        let mut alpha = Vec::with_capacity(n);
        let mut delta = Vec::with_capacity(n);
        let mut cot_alpha = Vec::with_capacity(n);
        let mut cot_delta = Vec::with_capacity(n);
        for i in 0..n {
            let prev = (i + n - 1) % n;
            let next = (i + 1) % n;
            let u = fan.neighbors[i] - fan.neighbors[prev];
            let v = fan.center - fan.neighbors[prev];
            alpha.push(angle_between(u, v));
            cot_alpha.push(cot_between(u, v));
            let u = fan.neighbors[i] - fan.neighbors[next];
            let v = fan.center - fan.neighbors[next];
            delta.push(angle_between(u, v));
            cot_delta.push(cot_between(u, v));
        }

        let mut phi = Vec::with_capacity(n);
        let mut acc = 0.0;
        for &g in &gamma {
            acc += g;
            phi.push(acc);
        }

        Ok(StarQuantities {
            n,
            gamma,
            eta,
            d,
            alpha,
            delta,
            phi,
            tri_area,
            cot_alpha,
            cot_delta,
            max_eta,
        })
    }

    pub fn valence(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn tri_area(&self) -> &[f64] {
        &self.tri_area
    }

    pub fn cot_alpha(&self) -> &[f64] {
        &self.cot_alpha
    }

    pub fn cot_delta(&self) -> &[f64] {
        &self.cot_delta
    }

    pub fn max_eta(&self) -> f64 {
        self.max_eta
    }

    /// `2 pi - sum(gamma_i)`: positive at convex cones, negative at saddles,
    /// zero on planar fans.
    pub fn angular_defect(&self) -> f64 {
        2.0 * std::f64::consts::PI - self.gamma.iter().sum::<f64>()
    }

    /// Total area of the star triangles.
    pub fn fan_area(&self) -> f64 {
        self.tri_area.iter().sum()
    }

    /// The module `S_p`:
    /// `sum_i (1 / 4 sin gamma_i) [eta_i eta_{i+1} - (cos gamma_i / 2)(eta_i^2 + eta_{i+1}^2)]`.
    ///
    /// Algebraically this is the signed circumcentric cell area; see
    /// [`Self::modified_denominator`] for the equivalent form.
    pub fn module_sp(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.n {
            let j = (i + 1) % self.n;
            let (ei, ej) = (self.eta[i], self.eta[j]);
            let g = self.gamma[i];
            sum += (ei * ej - 0.5 * g.cos() * (ei * ei + ej * ej)) / (4.0 * g.sin());
        }
        sum
    }

    /// `(1/2) sum_i area_i - (1/8) sum_i cot(gamma_i) d_i^2`. Equal to
    /// [`Self::module_sp`] by the law of cosines.
    pub fn modified_denominator(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.n {
            let g = self.gamma[i];
            sum += 0.5 * self.tri_area[i] - 0.125 * (g.cos() / g.sin()) * self.d[i] * self.d[i];
        }
        sum
    }

    /// Voronoi cell area at the center: the circumcenter-clipped piece of
    /// each star triangle,
    /// `(1/8)(eta_i^2 cot delta_i + eta_{i+1}^2 cot alpha_{i+1})`.
    ///
    /// The pieces are signed (negative beyond an obtuse angle), so the cells
    /// of a triangle always sum to its full area and the per-vertex cells
    /// tile the mesh. Algebraically this equals [`Self::module_sp`]; it is
    /// computed from the cached cotangents as an independent route.
    pub fn voronoi_area(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.n {
            let j = (i + 1) % self.n;
            sum += 0.125
                * (self.eta[i] * self.eta[i] * self.cot_delta[i]
                    + self.eta[j] * self.eta[j] * self.cot_alpha[j]);
        }
        sum
    }

    /// Mixed-area variant of the Voronoi cell: circumcentric pieces for
    /// non-obtuse triangles, `area/2` when the triangle is obtuse at the
    /// center and `area/4` when obtuse elsewhere. Always positive, at the
    /// cost of no longer being an unbiased area estimate on irregular
    /// meshes.
    pub fn mixed_voronoi_area(&self) -> f64 {
        let right = std::f64::consts::FRAC_PI_2;
        let mut sum = 0.0;
        for i in 0..self.n {
            let j = (i + 1) % self.n;
            let at_center = self.gamma[i];
            let at_next = self.delta[i];
            let at_curr = self.alpha[j];
            sum += if at_center > right {
                0.5 * self.tri_area[i]
            } else if at_next > right || at_curr > right {
                0.25 * self.tri_area[i]
            } else {
                0.125
                    * (self.eta[i] * self.eta[i] * self.cot_delta[i]
                        + self.eta[j] * self.eta[j] * self.cot_alpha[j])
            };
        }
        sum
    }

    /// Cumulative angle `phi_{i+1}` with the wraparound convention
    /// `phi_{n+1} = phi_n + gamma_1` (0-based: one past the last entry).
    fn phi_next(&self, i: usize) -> f64 {
        if i + 1 < self.n {
            self.phi[i + 1]
        } else {
            self.phi[self.n - 1] + self.gamma[0]
        }
    }

    /// The anisotropy area `A`:
    /// `sum_i (1 / 4 sin gamma_i) [ (eta_i eta_{i+1} / 2)(1 - cos 2phi_i cos 2phi_{i+1})
    ///   - (cos gamma_i / 4)(eta_i^2 sin^2 phi_i + eta_{i+1}^2 sin^2 phi_{i+1}) ]`.
    ///
    /// Together with `S_p` it separates the Gaussian and squared-mean
    /// contributions to the angular defect.
    pub fn aniso_area(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.n {
            let j = (i + 1) % self.n;
            let (ei, ej) = (self.eta[i], self.eta[j]);
            let g = self.gamma[i];
            let (pi, pj) = (self.phi[i], self.phi_next(i));
            let term = 0.5 * ei * ej * (1.0 - (2.0 * pi).cos() * (2.0 * pj).cos())
                - 0.25 * g.cos() * (ei * ei * pi.sin().powi(2) + ej * ej * pj.sin().powi(2));
            sum += term / (4.0 * g.sin());
        }
        sum
    }
}
