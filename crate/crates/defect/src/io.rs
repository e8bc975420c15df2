//! Mesh file formats (OBJ, OFF) and report serialization (CSV, JSON).
//!
//! Writers print floats with Rust's shortest round-trip formatting, so a
//! write/read cycle reproduces coordinates exactly and equal inputs produce
//! byte-identical files.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bench::{CounterexampleReport, ErrorTable};
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::mesh::TriangleMesh;
use crate::schemes::CurvatureReport;

/// Supported mesh file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFormat {
    Obj,
    Off,
}

impl MeshFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Result<MeshFormat> {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("obj") => Ok(MeshFormat::Obj),
            Some(e) if e.eq_ignore_ascii_case("off") => Ok(MeshFormat::Off),
            _ => Err(Error::Config(format!(
                "cannot infer mesh format from '{}'; expected .obj or .off",
                path.display()
            ))),
        }
    }
}

impl FromStr for MeshFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(MeshFormat::Obj),
            "off" => Ok(MeshFormat::Off),
            other => Err(Error::Config(format!("unknown mesh format '{other}'"))),
        }
    }
}

/// Report output formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Config(format!("unknown report format '{other}'"))),
        }
    }
}

fn parse_float(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("expected a number, got '{tok}'"),
    })
}

/// Parses Wavefront OBJ text. Only `v` and `f` records are interpreted;
/// faces must be triangles (1-based indices, `v/vt/vn` slashes accepted).
pub fn parse_obj(text: &str) -> Result<TriangleMesh> {
    let mut vertices: Vec<Point3> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let mut coord = [0.0; 3];
                for c in &mut coord {
                    let t = tok.next().ok_or(Error::Parse {
                        line: line_no,
                        message: "vertex needs 3 coordinates".into(),
                    })?;
                    *c = parse_float(t, line_no)?;
                }
                vertices.push(Point3::new(coord[0], coord[1], coord[2]));
            }
            Some("f") => {
                let refs: Vec<&str> = tok.collect();
                if refs.len() > 3 {
                    return Err(Error::UnsupportedPolygon { line: line_no });
                }
                if refs.len() < 3 {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "face needs 3 vertex references".into(),
                    });
                }
                let mut tri = [0usize; 3];
                for (k, r) in refs.iter().enumerate() {
                    let v = r.split('/').next().unwrap_or("");
                    let i: i64 = v.parse().map_err(|_| Error::Parse {
                        line: line_no,
                        message: format!("bad vertex reference '{r}'"),
                    })?;
                    if i < 1 || i as usize > vertices.len() {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!("vertex index {i} out of range"),
                        });
                    }
                    tri[k] = (i - 1) as usize;
                }
                triangles.push(tri);
            }
            // Normals, texture coordinates, groups, materials: ignored.
            _ => {}
        }
    }
    TriangleMesh::new(vertices, triangles)
}

/// Parses OFF text: `OFF` header, counts line, vertex coordinates, then
/// `3 i j k` face records with 0-based indices.
pub fn parse_off(text: &str) -> Result<TriangleMesh> {
    // Iterator over (1-based line number, content) with comments stripped.
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, raw)| (i + 1, raw.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (line_no, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty OFF file".into(),
    })?;
    if header != "OFF" {
        return Err(Error::Parse {
            line: line_no,
            message: format!("expected OFF header, got '{header}'"),
        });
    }
    let (line_no, counts) = lines.next().ok_or(Error::Parse {
        line: line_no,
        message: "missing counts line".into(),
    })?;
    let counts: Vec<&str> = counts.split_whitespace().collect();
    if counts.len() < 2 {
        return Err(Error::Parse {
            line: line_no,
            message: "counts line needs vertex and face counts".into(),
        });
    }
    let nv: usize = counts[0].parse().map_err(|_| Error::Parse {
        line: line_no,
        message: "bad vertex count".into(),
    })?;
    let nf: usize = counts[1].parse().map_err(|_| Error::Parse {
        line: line_no,
        message: "bad face count".into(),
    })?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line_no, l) = lines.next().ok_or(Error::Parse {
            line: usize::MAX,
            message: "unexpected end of file in vertex block".into(),
        })?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < 3 {
            return Err(Error::Parse {
                line: line_no,
                message: "vertex needs 3 coordinates".into(),
            });
        }
        vertices.push(Point3::new(
            parse_float(toks[0], line_no)?,
            parse_float(toks[1], line_no)?,
            parse_float(toks[2], line_no)?,
        ));
    }

    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (line_no, l) = lines.next().ok_or(Error::Parse {
            line: usize::MAX,
            message: "unexpected end of file in face block".into(),
        })?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        let arity: usize = toks
            .first()
            .and_then(|t| t.parse().ok())
            .ok_or(Error::Parse {
                line: line_no,
                message: "face record needs a vertex count".into(),
            })?;
        if arity != 3 {
            return Err(Error::UnsupportedPolygon { line: line_no });
        }
        if toks.len() < 4 {
            return Err(Error::Parse {
                line: line_no,
                message: "face record needs 3 indices".into(),
            });
        }
        let mut tri = [0usize; 3];
        for k in 0..3 {
            let i: usize = toks[k + 1].parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad vertex index '{}'", toks[k + 1]),
            })?;
            if i >= nv {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("vertex index {i} out of range"),
                });
            }
            tri[k] = i;
        }
        triangles.push(tri);
    }
    TriangleMesh::new(vertices, triangles)
}

/// Reads a mesh file, dispatching on the requested format.
pub fn read_mesh(path: &Path, format: MeshFormat) -> Result<TriangleMesh> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        message: format!("cannot read '{}': {e}", path.display()),
    })?;
    match format {
        MeshFormat::Obj => parse_obj(&text),
        MeshFormat::Off => parse_off(&text),
    }
}

pub fn write_obj(mesh: &TriangleMesh) -> String {
    let mut out = String::new();
    for p in mesh.vertices() {
        let _ = writeln!(out, "v {} {} {}", p.x, p.y, p.z);
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    out
}

pub fn write_off(mesh: &TriangleMesh) -> String {
    let mut out = String::from("OFF\n");
    let _ = writeln!(
        out,
        "{} {} {}",
        mesh.vertex_count(),
        mesh.triangle_count(),
        mesh.edge_count()
    );
    for p in mesh.vertices() {
        let _ = writeln!(out, "{} {} {}", p.x, p.y, p.z);
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    out
}

pub fn write_mesh(mesh: &TriangleMesh, format: MeshFormat) -> String {
    match format {
        MeshFormat::Obj => write_obj(mesh),
        MeshFormat::Off => write_off(mesh),
    }
}

/// Serializes an experiment table. CSV rows mirror the JSON fields:
/// `scheme,n_or_N,level,eta,eps,slope,flag`.
pub fn write_report(table: &ErrorTable, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => table.to_csv(),
        ReportFormat::Json => serde_json::to_string_pretty(table).expect("table serializes") + "\n",
    }
}

/// Serializes a counterexample report.
pub fn write_counterexample_report(report: &CounterexampleReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => report.to_csv(),
        ReportFormat::Json => {
            serde_json::to_string_pretty(report).expect("report serializes") + "\n"
        }
    }
}

/// Serializes a per-vertex curvature report. CSV columns:
/// `vertex,scheme,value,flag`.
pub fn write_curvature_report(report: &CurvatureReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            serde_json::to_string_pretty(report).expect("report serializes") + "\n"
        }
        ReportFormat::Csv => {
            let mut out = String::from("vertex,scheme,value,flag\n");
            for v in 0..report.vertex_count() {
                for &scheme in report.schemes() {
                    let entry = report.entry(v, scheme).expect("aligned report");
                    let _ = writeln!(
                        out,
                        "{v},{scheme},{},{}",
                        entry.value.map(|x| x.to_string()).unwrap_or_default(),
                        entry.validity.name()
                    );
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn obj_round_trip_is_exact() {
        let mesh = TriangleMesh::octahedron();
        let text = write_obj(&mesh);
        let back = parse_obj(&text).unwrap();
        assert_eq!(back.vertices(), mesh.vertices());
        assert_eq!(back.triangles(), mesh.triangles());
    }

    #[test]
    fn off_round_trip_is_exact() {
        let mesh = TriangleMesh::icosahedron();
        let text = write_off(&mesh);
        let back = parse_off(&text).unwrap();
        assert_eq!(back.vertices(), mesh.vertices());
        assert_eq!(back.triangles(), mesh.triangles());
    }

    #[test]
    fn off_fixture_counts() {
        let text = write_off(&TriangleMesh::octahedron());
        let mesh = parse_off(&text).unwrap();
        assert_eq!(mesh.vertex_count(), 6);
        assert_eq!(mesh.triangle_count(), 8);
        assert!(text.starts_with("OFF\n6 8 12\n"));
    }

    #[test]
    fn obj_quad_face_rejected() {
        let text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
        assert!(matches!(
            parse_obj(text),
            Err(Error::UnsupportedPolygon { line: 5 })
        ));
    }

    #[test]
    fn off_polygon_rejected_with_line() {
        let text = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        assert!(matches!(
            parse_off(text),
            Err(Error::UnsupportedPolygon { line: 7 })
        ));
    }

    #[test]
    fn obj_parse_error_carries_line() {
        let text = "v 0 0 0\nv 1 0 zero\n";
        match parse_obj(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn obj_slash_references_accepted() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1 2/2 3/3\n";
        let mesh = parse_obj(text).unwrap();
        assert_eq!(mesh.triangle_count(), 1);
    }

    #[test]
    fn mesh_format_from_path() {
        assert_eq!(
            MeshFormat::from_path(Path::new("x/m.OBJ")).unwrap(),
            MeshFormat::Obj
        );
        assert_eq!(
            MeshFormat::from_path(Path::new("m.off")).unwrap(),
            MeshFormat::Off
        );
        assert!(MeshFormat::from_path(Path::new("m.stl")).is_err());
    }
}
