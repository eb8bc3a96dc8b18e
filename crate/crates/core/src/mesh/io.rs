//! OFF / OBJ reading and writing. Only triangle faces are accepted.
//!
//! Per-vertex normals are carried by the `NOFF` header (six numbers per
//! vertex line), by OBJ `vn` records referenced from faces, or by a paired
//! plain-text file with one `nx ny nz` line per vertex.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Vector3;

use super::{Polyline, TriMesh};
use crate::error::{GeomError, Result};
use crate::geometry::Point;

fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split_whitespace())
}

fn parse_f64(tok: Option<&str>, what: &str) -> Result<f64> {
    let tok = tok.ok_or_else(|| GeomError::parse(format!("unexpected end of input reading {what}")))?;
    tok.parse()
        .map_err(|_| GeomError::parse(format!("invalid number {tok:?} in {what}")))
}

fn parse_usize(tok: Option<&str>, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| GeomError::parse(format!("unexpected end of input reading {what}")))?;
    tok.parse()
        .map_err(|_| GeomError::parse(format!("invalid integer {tok:?} in {what}")))
}

pub fn parse_off(text: &str) -> Result<TriMesh> {
    let mut tok = tokens(text);
    let header = tok.next().ok_or_else(|| GeomError::parse("empty OFF file"))?;
    let with_normals = match header {
        "OFF" => false,
        "NOFF" => true,
        other => return Err(GeomError::parse(format!("expected OFF or NOFF header, got {other:?}"))),
    };
    let nv = parse_usize(tok.next(), "vertex count")?;
    let nf = parse_usize(tok.next(), "face count")?;
    let _ne = parse_usize(tok.next(), "edge count")?;
    let mut vertices = Vec::with_capacity(nv);
    let mut normals = Vec::new();
    for i in 0..nv {
        let what = format!("vertex {i}");
        let p = Vector3::new(
            parse_f64(tok.next(), &what)?,
            parse_f64(tok.next(), &what)?,
            parse_f64(tok.next(), &what)?,
        );
        vertices.push(p);
        if with_normals {
            normals.push(Vector3::new(
                parse_f64(tok.next(), &what)?,
                parse_f64(tok.next(), &what)?,
                parse_f64(tok.next(), &what)?,
            ));
        }
    }
    let mut triangles = Vec::with_capacity(nf);
    for f in 0..nf {
        let what = format!("face {f}");
        let k = parse_usize(tok.next(), &what)?;
        if k != 3 {
            return Err(GeomError::parse(format!(
                "face {f} has {k} vertices; only triangles are accepted"
            )));
        }
        let mut tri = [0usize; 3];
        for slot in &mut tri {
            *slot = parse_usize(tok.next(), &what)?;
            if *slot >= nv {
                return Err(GeomError::parse(format!("face {f} references vertex {slot} of {nv}")));
            }
        }
        triangles.push(tri);
    }
    let mesh = TriMesh::new(vertices, triangles);
    Ok(if with_normals {
        mesh.with_normals(normals)
    } else {
        mesh
    })
}

pub fn parse_obj(text: &str) -> Result<TriMesh> {
    let mut vertices = Vec::new();
    let mut obj_normals: Vec<Point> = Vec::new();
    let mut triangles = Vec::new();
    let mut vertex_normal: Vec<Option<usize>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut parts = line.split_whitespace();
        let what = format!("line {}", lineno + 1);
        match parts.next() {
            Some("v") => {
                vertices.push(Vector3::new(
                    parse_f64(parts.next(), &what)?,
                    parse_f64(parts.next(), &what)?,
                    parse_f64(parts.next(), &what)?,
                ));
                vertex_normal.push(None);
            }
            Some("vn") => obj_normals.push(Vector3::new(
                parse_f64(parts.next(), &what)?,
                parse_f64(parts.next(), &what)?,
                parse_f64(parts.next(), &what)?,
            )),
            Some("f") => {
                let refs: Vec<&str> = parts.collect();
                if refs.len() != 3 {
                    return Err(GeomError::parse(format!(
                        "{what}: face has {} vertices; only triangles are accepted",
                        refs.len()
                    )));
                }
                let mut tri = [0usize; 3];
                for (slot, r) in tri.iter_mut().zip(&refs) {
                    let mut fields = r.split('/');
                    let v = resolve_obj_index(fields.next(), vertices.len(), &what)?;
                    let _texture = fields.next();
                    if let Some(n) = fields.next().filter(|s| !s.is_empty()) {
                        let n = resolve_obj_index(Some(n), obj_normals.len(), &what)?;
                        vertex_normal[v] = Some(n);
                    }
                    *slot = v;
                }
                triangles.push(tri);
            }
            _ => {}
        }
    }
    let mesh = TriMesh::new(vertices, triangles);
    if !vertex_normal.is_empty() && vertex_normal.iter().all(Option::is_some) {
        let normals = vertex_normal.iter().map(|n| obj_normals[n.unwrap()]).collect();
        return Ok(mesh.with_normals(normals));
    }
    Ok(mesh)
}

fn resolve_obj_index(tok: Option<&str>, count: usize, what: &str) -> Result<usize> {
    let raw: i64 = tok
        .ok_or_else(|| GeomError::parse(format!("{what}: missing index")))?
        .parse()
        .map_err(|_| GeomError::parse(format!("{what}: invalid index")))?;
    let idx = if raw < 0 { count as i64 + raw } else { raw - 1 };
    if idx < 0 || idx as usize >= count {
        return Err(GeomError::parse(format!("{what}: index {raw} out of range")));
    }
    Ok(idx as usize)
}

/// Reads a normal file with one `nx ny nz` line per vertex.
pub fn parse_normals(text: &str, expected: usize) -> Result<Vec<Point>> {
    let mut tok = tokens(text);
    let mut out = Vec::with_capacity(expected);
    for i in 0..expected {
        let what = format!("normal {i}");
        out.push(Vector3::new(
            parse_f64(tok.next(), &what)?,
            parse_f64(tok.next(), &what)?,
            parse_f64(tok.next(), &what)?,
        ));
    }
    if tok.next().is_some() {
        return Err(GeomError::parse(format!("more than {expected} normals supplied")));
    }
    Ok(out)
}

/// Loads `.off` or `.obj` by extension, optionally overriding normals.
pub fn load_mesh(path: &Path, normals: Option<&Path>) -> Result<TriMesh> {
    let text = std::fs::read_to_string(path)?;
    let mut mesh = match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase) {
        Some(ext) if ext == "off" => parse_off(&text)?,
        Some(ext) if ext == "obj" => parse_obj(&text)?,
        _ => {
            return Err(GeomError::parse(format!(
                "{}: expected a .off or .obj file",
                path.display()
            )))
        }
    };
    if let Some(np) = normals {
        let text = std::fs::read_to_string(np)?;
        mesh.normals = Some(parse_normals(&text, mesh.vertices.len())?);
    }
    Ok(mesh)
}

/// OFF text; `NOFF` when the mesh carries normals.
pub fn write_off(mesh: &TriMesh) -> String {
    let mut s = String::new();
    let header = if mesh.normals.is_some() { "NOFF" } else { "OFF" };
    let _ = writeln!(s, "{header}");
    let _ = writeln!(s, "{} {} 0", mesh.vertices.len(), mesh.triangles.len());
    for (i, v) in mesh.vertices.iter().enumerate() {
        let _ = write!(s, "{:.17e} {:.17e} {:.17e}", v.x, v.y, v.z);
        if let Some(ns) = &mesh.normals {
            let n = ns[i];
            let _ = write!(s, " {:.17e} {:.17e} {:.17e}", n.x, n.y, n.z);
        }
        s.push('\n');
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    s
}

/// OFF text for a planar polyline: two-vertex faces, z = 0.
pub fn write_off_polyline(line: &Polyline) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "OFF");
    let _ = writeln!(s, "{} {} 0", line.vertices.len(), line.segments.len());
    for v in &line.vertices {
        let _ = writeln!(s, "{:.17e} {:.17e} 0", v.x, v.y);
    }
    for seg in &line.segments {
        let _ = writeln!(s, "2 {} {}", seg[0], seg[1]);
    }
    s
}
