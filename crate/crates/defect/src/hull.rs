//! Uniform random sphere point sets and their convex-hull triangulation.
//!
//! The hull is built by incremental insertion in sample order with
//! visible-face conflict sets. Orientation tests use a guarded determinant:
//! values within a relative `1e-12` of zero are treated as coplanar. Random
//! spherical point sets stay far from the guard, which only exists to keep
//! near-coplanar quadruples from flipping faces.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::mesh::TriangleMesh;

/// Relative tolerance of the orientation predicate.
const ORIENT_EPS: f64 = 1e-12;

/// A seeded batch of points on the unit sphere.
#[derive(Debug, Clone)]
pub struct SpherePointSet {
    points: Vec<Point3>,
    seed: u64,
}

impl SpherePointSet {
    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Draws `n` i.i.d. uniform points on the unit sphere (normalized triples of
/// standard normals), deterministically for a given seed. Degenerate draws
/// (norm underflow, exact duplicates) are rejected and redrawn from the same
/// stream.
pub fn sample_uniform_sphere(n: usize, seed: u64) -> Result<SpherePointSet> {
    if n < 4 {
        return Err(Error::Config(format!(
            "need at least 4 sphere points, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    let mut seen: HashSet<[u64; 3]> = HashSet::with_capacity(n);
    while points.len() < n {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        let z: f64 = rng.sample(StandardNormal);
        let norm = (x * x + y * y + z * z).sqrt();
        if norm < 1e-8 {
            continue;
        }
        let p = Point3::new(x / norm, y / norm, z / norm);
        if seen.insert([p.x.to_bits(), p.y.to_bits(), p.z.to_bits()]) {
            points.push(p);
        }
    }
    Ok(SpherePointSet { points, seed })
}

/// Triangulates the convex hull of a sphere point set. Every input point is
/// in convex position, so the result is a closed triangulation of the sphere
/// with all inputs as vertices.
pub fn convex_hull(set: &SpherePointSet) -> Result<TriangleMesh> {
    convex_hull_of_points(set.points())
}

/// Mean length over the unique undirected edges of the mesh.
pub fn average_edge_length(mesh: &TriangleMesh) -> f64 {
    let edges = mesh.edges();
    let total: f64 = edges
        .iter()
        .map(|&(u, v)| (mesh.vertices()[v] - mesh.vertices()[u]).norm())
        .sum();
    total / edges.len() as f64
}

/// Signed orientation of `d` against the plane of `(a, b, c)`: positive when
/// `d` lies on the side of the right-handed normal. Returns exactly zero when
/// the determinant is within the relative guard.
fn orient(points: &[Point3], a: usize, b: usize, c: usize, d: usize) -> f64 {
    let u = points[b] - points[a];
    let v = points[c] - points[a];
    let w = points[d] - points[a];
    let n = u.cross(v);
    let det = n.dot(w);
    if det.abs() <= ORIENT_EPS * n.norm() * w.norm() {
        0.0
    } else {
        det
    }
}

struct HullFace {
    v: [usize; 3],
    /// Neighbor face across edge `(v[k], v[k+1])`.
    neighbor: [usize; 3],
    /// Conflict set: pending points that see this face.
    outside: Vec<usize>,
    alive: bool,
}

impl HullFace {
    fn edge(&self, k: usize) -> (usize, usize) {
        (self.v[k], self.v[(k + 1) % 3])
    }
}

struct HullBuilder<'a> {
    points: &'a [Point3],
    faces: Vec<HullFace>,
    /// Face each pending point currently sees (`None` once interior or used).
    conflict: Vec<Option<usize>>,
}

/// Triangulates the convex hull of an arbitrary full-dimensional point set.
/// Points interior to the hull are dropped from the output mesh; the
/// surviving vertices keep their input order.
pub fn convex_hull_of_points(points: &[Point3]) -> Result<TriangleMesh> {
    if points.len() < 4 {
        return Err(Error::DegenerateInput(
            "need at least 4 points for a 3D hull",
        ));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFiniteCoordinate("hull input"));
    }
    let mut builder = HullBuilder {
        points,
        faces: Vec::with_capacity(4 * points.len()),
        conflict: vec![None; points.len()],
    };
    let simplex = builder.initial_simplex()?;
    builder.init_faces(simplex);
    for i in 0..points.len() {
        if simplex.contains(&i) {
            continue;
        }
        if let Some(seed) = builder.conflict[i] {
            builder.insert(i, seed)?;
        }
    }
    builder.finish()
}

impl<'a> HullBuilder<'a> {
    /// Four affinely independent points, scanned in input order.
    fn initial_simplex(&self) -> Result<[usize; 4]> {
        let pts = self.points;
        let i0 = 0;
        let scale = pts
            .iter()
            .map(|p| (*p - pts[i0]).norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let i1 = (1..pts.len())
            .find(|&i| (pts[i] - pts[i0]).norm() > 1e-12 * scale)
            .ok_or(Error::DegenerateInput("all points coincide"))?;
        let i2 = (1..pts.len())
            .find(|&i| {
                i != i1
                    && (pts[i1] - pts[i0]).cross(pts[i] - pts[i0]).norm() > 1e-12 * scale * scale
            })
            .ok_or(Error::DegenerateInput("all points collinear"))?;
        let i3 = (1..pts.len())
            .find(|&i| i != i1 && i != i2 && orient(pts, i0, i1, i2, i) != 0.0)
            .ok_or(Error::DegenerateInput("all points coplanar"))?;
        if orient(pts, i0, i1, i2, i3) > 0.0 {
            Ok([i0, i1, i2, i3])
        } else {
            Ok([i0, i2, i1, i3])
        }
    }

    /// Builds the four outward faces of the positively oriented simplex and
    /// distributes the remaining points into conflict sets.
    fn init_faces(&mut self, [a, b, c, d]: [usize; 4]) {
        // Outward faces of a tetrahedron with orient(a,b,c,d) > 0.
        let tris = [[a, c, b], [a, b, d], [b, c, d], [c, a, d]];
        for v in tris {
            self.faces.push(HullFace {
                v,
                neighbor: [usize::MAX; 3],
                outside: Vec::new(),
                alive: true,
            });
        }
        let mut by_edge: HashMap<(usize, usize), usize> = HashMap::new();
        for (f, face) in self.faces.iter().enumerate() {
            for k in 0..3 {
                by_edge.insert(face.edge(k), f);
            }
        }
        for f in 0..4 {
            for k in 0..3 {
                let (u, v) = self.faces[f].edge(k);
                self.faces[f].neighbor[k] = by_edge[&(v, u)];
            }
        }
        for i in 0..self.points.len() {
            if i == a || i == b || i == c || i == d {
                continue;
            }
            self.assign_point(i, 0..4);
        }
    }

    /// Assigns point `i` to the first face in `candidates` it sees.
    fn assign_point(&mut self, i: usize, candidates: std::ops::Range<usize>) {
        self.conflict[i] = None;
        for f in candidates {
            if !self.faces[f].alive {
                continue;
            }
            let [a, b, c] = self.faces[f].v;
            if orient(self.points, a, b, c, i) > 0.0 {
                self.faces[f].outside.push(i);
                self.conflict[i] = Some(f);
                return;
            }
        }
    }

    fn insert(&mut self, p: usize, seed: usize) -> Result<()> {
        debug_assert!(self.faces[seed].alive);
        // Flood fill over the faces visible from p.
        let mut visible = vec![seed];
        let mut visited: HashSet<usize> = visible.iter().cloned().collect();
        let mut horizon: Vec<((usize, usize), usize)> = Vec::new(); // edge as in visible face, kept neighbor
        let mut stack = vec![seed];
        while let Some(f) = stack.pop() {
            for k in 0..3 {
                let g = self.faces[f].neighbor[k];
                if visited.contains(&g) {
                    continue;
                }
                let [a, b, c] = self.faces[g].v;
                if orient(self.points, a, b, c, p) > 0.0 {
                    visited.insert(g);
                    visible.push(g);
                    stack.push(g);
                } else {
                    horizon.push((self.faces[f].edge(k), g));
                }
            }
        }

        // Retire the visible faces, collecting their pending points.
        let mut orphans: Vec<usize> = Vec::new();
        for &f in &visible {
            self.faces[f].alive = false;
            orphans.append(&mut self.faces[f].outside);
        }

        // One cone face per horizon edge, keeping the edge direction of the
        // retired face so the kept neighbor still sees its reverse.
        let first_new = self.faces.len();
        let mut tail_map: HashMap<usize, usize> = HashMap::with_capacity(horizon.len());
        let mut head_map: HashMap<usize, usize> = HashMap::with_capacity(horizon.len());
        for &((u, v), kept) in &horizon {
            let f = self.faces.len();
            self.faces.push(HullFace {
                v: [u, v, p],
                neighbor: [kept, usize::MAX, usize::MAX],
                outside: Vec::new(),
                alive: true,
            });
            let kept_face = &mut self.faces[kept];
            let k = (0..3)
                .find(|&k| kept_face.edge(k) == (v, u))
                .ok_or(Error::DegenerateInput("hull horizon is inconsistent"))?;
            kept_face.neighbor[k] = f;
            if tail_map.insert(u, f).is_some() || head_map.insert(v, f).is_some() {
                return Err(Error::DegenerateInput("hull horizon is pinched"));
            }
        }
        let last_new = self.faces.len();
        for f in first_new..last_new {
            let (u, v) = (self.faces[f].v[0], self.faces[f].v[1]);
            // Edge (v, p) borders the cone face whose horizon edge starts at
            // v; edge (p, u) borders the one whose horizon edge ends at u.
            self.faces[f].neighbor[1] = *tail_map
                .get(&v)
                .ok_or(Error::DegenerateInput("hull horizon is not a loop"))?;
            self.faces[f].neighbor[2] = *head_map
                .get(&u)
                .ok_or(Error::DegenerateInput("hull horizon is not a loop"))?;
        }

        // Re-home the orphans: usually one of the cone faces sees them; fall
        // back to a full scan (rare near-coplanar situations) before calling
        // a point interior.
        for o in orphans {
            if o == p {
                self.conflict[o] = None;
                continue;
            }
            self.assign_point(o, first_new..last_new);
            if self.conflict[o].is_none() {
                self.assign_point(o, 0..first_new);
            }
        }
        self.conflict[p] = None;
        Ok(())
    }

    fn finish(self) -> Result<TriangleMesh> {
        let mut used = vec![false; self.points.len()];
        let mut triangles = Vec::new();
        for face in &self.faces {
            if face.alive {
                for v in face.v {
                    used[v] = true;
                }
                triangles.push(face.v);
            }
        }
        // Compact vertices, preserving input order.
        let mut remap = vec![usize::MAX; self.points.len()];
        let mut vertices = Vec::new();
        for (i, &u) in used.iter().enumerate() {
            if u {
                remap[i] = vertices.len();
                vertices.push(self.points[i]);
            }
        }
        for tri in &mut triangles {
            for v in tri.iter_mut() {
                *v = remap[*v];
            }
        }
        TriangleMesh::new(vertices, triangles)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn tetrahedron_hull() {
        let pts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ];
        let mesh = convex_hull_of_points(&pts).unwrap();
        assert_eq!(mesh.vertex_count(), 4);
        assert_eq!(mesh.triangle_count(), 4);
        assert!(mesh.is_closed());
    }

    #[test]
    fn octahedron_hull_combinatorics() {
        let mesh = convex_hull_of_points(TriangleMesh::octahedron().vertices()).unwrap();
        assert_eq!(mesh.vertex_count(), 6);
        assert_eq!(mesh.triangle_count(), 8);
        assert_eq!(mesh.edge_count(), 12);
        assert!(mesh.is_closed());
        assert_eq!(mesh.euler_characteristic(), 2);
    }

    #[test]
    fn interior_points_are_dropped() {
        let mut pts = TriangleMesh::octahedron().vertices().to_vec();
        pts.push(Point3::new(0.01, 0.02, -0.005));
        let mesh = convex_hull_of_points(&pts).unwrap();
        assert_eq!(mesh.vertex_count(), 6);
        assert_eq!(mesh.triangle_count(), 8);
    }

    #[test]
    fn coplanar_input_rejected() {
        let pts: Vec<Point3> = (0..8)
            .map(|i| Point3::new(i as f64, (i * i) as f64, 0.0))
            .collect();
        assert!(matches!(
            convex_hull_of_points(&pts),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn sampling_is_deterministic_and_unit_norm() {
        let a = sample_uniform_sphere(30, 42).unwrap();
        let b = sample_uniform_sphere(30, 42).unwrap();
        assert_eq!(a.points(), b.points());
        for p in a.points() {
            let r = (p.x * p.x + p.y * p.y + p.z * p.z).sqrt();
            assert!((r - 1.0).abs() <= 1e-12);
        }
        let c = sample_uniform_sphere(30, 43).unwrap();
        assert_ne!(a.points(), c.points());
    }

    #[test]
    fn sample_mean_is_near_origin() {
        let set = sample_uniform_sphere(5000, 7).unwrap();
        let (mut mx, mut my, mut mz) = (0.0, 0.0, 0.0);
        for p in set.points() {
            mx += p.x;
            my += p.y;
            mz += p.z;
        }
        let n = set.len() as f64;
        for m in [mx / n, my / n, mz / n] {
            assert!(m.abs() < 0.05, "coordinate mean {m}");
        }
    }

    #[test]
    fn random_sphere_hull_properties() {
        for (n, seed) in [(30usize, 1u64), (100, 2), (400, 3)] {
            let set = sample_uniform_sphere(n, seed).unwrap();
            let mesh = convex_hull(&set).unwrap();
            assert_eq!(
                mesh.vertex_count(),
                n,
                "all sphere points are hull vertices"
            );
            assert_eq!(mesh.triangle_count(), 2 * n - 4);
            assert_eq!(mesh.edge_count(), 3 * n - 6);
            assert!(mesh.is_closed());
            let defect_sum: f64 = (0..n)
                .map(|v| {
                    mesh.one_ring(v)
                        .unwrap()
                        .star_quantities()
                        .unwrap()
                        .angular_defect()
                })
                .sum();
            assert_abs_diff_eq!(defect_sum, 4.0 * PI, epsilon = 1e-9);
        }
    }

    #[test]
    fn average_edge_length_of_octahedron_is_one() {
        let mesh = TriangleMesh::octahedron();
        assert_abs_diff_eq!(average_edge_length(&mesh), 1.0, epsilon = 1e-12);
    }
}
