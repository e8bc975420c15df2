//! Indexed triangle meshes with manifold adjacency and one-ring extraction.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{OneRingFan, Point3};

/// An oriented triangle mesh: vertices plus index triples with consistent
/// winding. Construction validates indices, finiteness and that every
/// directed edge is used at most once, which bounds undirected edges to two
/// incident faces with opposite orientations.
#[derive(Debug, Clone)]
pub struct TriangleMesh {
    vertices: Vec<Point3>,
    triangles: Vec<[usize; 3]>,
    /// Directed edge -> index of the triangle that uses it.
    edge_face: HashMap<(usize, usize), usize>,
    /// Per-vertex incident triangles, in triangle order.
    vertex_triangles: Vec<Vec<usize>>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Point3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFiniteCoordinate("mesh vertex"));
        }
        let nv = vertices.len();
        let mut edge_face = HashMap::with_capacity(triangles.len() * 3);
        let mut vertex_triangles = vec![Vec::new(); nv];
        for (t, tri) in triangles.iter().enumerate() {
            let [a, b, c] = *tri;
            if a >= nv || b >= nv || c >= nv {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} references a vertex out of range"
                )));
            }
            if a == b || b == c || a == c {
                return Err(Error::InvalidMesh(format!("triangle {t} repeats a vertex")));
            }
            for (u, v) in [(a, b), (b, c), (c, a)] {
                if edge_face.insert((u, v), t).is_some() {
                    return Err(Error::InvalidMesh(format!(
                        "directed edge ({u},{v}) used twice: inconsistent orientation or non-manifold edge"
                    )));
                }
            }
            for v in [a, b, c] {
                vertex_triangles[v].push(t);
            }
        }
        Ok(TriangleMesh {
            vertices,
            triangles,
            edge_face,
            vertex_triangles,
        })
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Unique undirected edges, sorted. Deterministic order so downstream
    /// aggregates are reproducible bit for bit.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .edge_face
            .keys()
            .map(|&(u, v)| if u < v { (u, v) } else { (v, u) })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.triangle_count() as i64
    }

    /// True when every directed edge is matched by its reverse, i.e. the
    /// surface is watertight and consistently oriented.
    pub fn is_closed(&self) -> bool {
        self.edge_face
            .keys()
            .all(|&(u, v)| self.edge_face.contains_key(&(v, u)))
    }

    /// Extracts the one-ring fan around vertex `v`, with neighbors in the
    /// cyclic order induced by the triangle winding.
    pub fn one_ring(&self, v: usize) -> Result<OneRingFan> {
        let incident = self
            .vertex_triangles
            .get(v)
            .ok_or_else(|| Error::InvalidMesh(format!("vertex {v} out of range")))?;
        if incident.is_empty() {
            return Err(Error::BoundaryVertex(v));
        }
        // In triangle (v, a, b) the fan continues from a to b; walking the
        // successor map in winding order traverses the ring.
        let mut succ = HashMap::with_capacity(incident.len());
        let mut first = None;
        for &t in incident {
            let tri = self.triangles[t];
            let k = tri.iter().position(|&w| w == v).expect("incident triangle");
            let a = tri[(k + 1) % 3];
            let b = tri[(k + 2) % 3];
            if succ.insert(a, b).is_some() {
                return Err(Error::NonManifoldVertex(v));
            }
            first.get_or_insert(a);
        }
        // The ring closes iff every successor tail also appears as a head;
        // otherwise the star is an open strip and the vertex is on the
        // boundary.
        let heads: std::collections::HashSet<usize> = succ.values().copied().collect();
        if succ.keys().any(|a| !heads.contains(a)) {
            return Err(Error::BoundaryVertex(v));
        }
        let start = first.expect("nonempty incident set");
        let mut ring = vec![start];
        let mut cur = start;
        loop {
            let next = *succ.get(&cur).ok_or(Error::BoundaryVertex(v))?;
            if next == start {
                break;
            }
            ring.push(next);
            if ring.len() > incident.len() {
                return Err(Error::NonManifoldVertex(v));
            }
            cur = next;
        }
        if ring.len() != incident.len() {
            // Closed loop that misses part of the star: multiple fans.
            return Err(Error::NonManifoldVertex(v));
        }
        OneRingFan::new(
            self.vertices[v],
            ring.into_iter().map(|i| self.vertices[i]).collect(),
        )
    }

    /// Octahedron with unit edge length, outward orientation.
    pub fn octahedron() -> TriangleMesh {
        let s = 1.0 / 2f64.sqrt();
        let vertices = vec![
            Point3::new(s, 0.0, 0.0),
            Point3::new(-s, 0.0, 0.0),
            Point3::new(0.0, s, 0.0),
            Point3::new(0.0, -s, 0.0),
            Point3::new(0.0, 0.0, s),
            Point3::new(0.0, 0.0, -s),
        ];
        let triangles = vec![
            [0, 2, 4],
            [2, 1, 4],
            [1, 3, 4],
            [3, 0, 4],
            [2, 0, 5],
            [1, 2, 5],
            [3, 1, 5],
            [0, 3, 5],
        ];
        TriangleMesh::new(vertices, triangles).expect("octahedron fixture is valid")
    }

    /// Icosahedron with unit edge length, outward orientation.
    pub fn icosahedron() -> TriangleMesh {
        // Golden-rectangle construction has edge length 2; halve it.
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let (a, b) = (0.5, phi / 2.0);
        let vertices = vec![
            Point3::new(-a, b, 0.0),
            Point3::new(a, b, 0.0),
            Point3::new(-a, -b, 0.0),
            Point3::new(a, -b, 0.0),
            Point3::new(0.0, -a, b),
            Point3::new(0.0, a, b),
            Point3::new(0.0, -a, -b),
            Point3::new(0.0, a, -b),
            Point3::new(b, 0.0, -a),
            Point3::new(b, 0.0, a),
            Point3::new(-b, 0.0, -a),
            Point3::new(-b, 0.0, a),
        ];
        let triangles = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        TriangleMesh::new(vertices, triangles).expect("icosahedron fixture is valid")
    }
}
