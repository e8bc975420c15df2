//! Discrete Gaussian- and mean-curvature estimation on triangle meshes via
//! the angular-defect family of schemes, plus the synthetic mesh generators
//! and convergence experiments used to benchmark them.
//!
//! The crate is organized around a single local object: the [one-ring fan]
//! of a vertex. Five Gaussian-curvature estimators (`G1`..`G5`) and the
//! cotangent mean-curvature operator (`H1`) are pure functions of a fan;
//! whole-mesh evaluation, synthetic fan families (quadratic graph surfaces,
//! parallelogram configurations, a valence-4 counterexample), random sphere
//! triangulations and the convergence-order experiment runners build on top.
//!
//! ```
//! use defect::schemes::{estimate_mesh, SchemeId};
//! use defect::TriangleMesh;
//!
//! // Every octahedron vertex concentrates 2pi/3 of defect on sqrt(3)/3 of
//! // Voronoi area.
//! let mesh = TriangleMesh::octahedron();
//! let report = estimate_mesh(&mesh, &[SchemeId::G4]);
//! let g4 = report.value(0, SchemeId::G4).unwrap();
//! assert!((g4 - 2.0 * std::f64::consts::PI / 3f64.sqrt()).abs() < 1e-12);
//! ```
//!
//! [one-ring fan]: geometry::OneRingFan

pub mod bench;
pub mod error;
pub mod geometry;
pub mod hull;
pub mod io;
pub mod mesh;
pub mod schemes;
pub mod synthesis;

pub use error::{Error, Result};
pub use geometry::{OneRingFan, Point3, StarQuantities, Vec3};
pub use mesh::TriangleMesh;
pub use schemes::{CurvatureReport, SchemeId, Validity};
pub use synthesis::QuadraticForm;
