//! Textual body descriptions.
//!
//! Two front ends produce the same [`BodySpec`]:
//!
//! * an inline form `kind:key=value,key=value`, for example `ball:r=1`,
//!   `capbody:eps=0.5,dim=2`, `ellipsoid:a=1,b=1,c=2`, `polytope:@hull.off`,
//!   `cube`, `lshape:dim=2` or `union:ball:cx=-2|ball:cx=2`;
//! * a TOML document with a `kind` tag, for example
//!
//! ```toml
//! kind = "ball"
//! dim = 3
//! radius = 1.0
//! center = [0.0, 0.0, 0.0]
//! ```
//!
//! Lengths are in the units of the coordinates; `dim` is the ambient
//! dimension (2 or 3) and defaults to 3.

use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::bodies::{Body, SampledSet};
use crate::error::{GeomError, Result};
use crate::geometry::Dim;
use crate::mesh::io::load_mesh;

fn default_dim() -> usize {
    3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        #[serde(default = "default_dim")]
        dim: usize,
        radius: f64,
        #[serde(default)]
        center: [f64; 3],
    },
    /// One semi-axis per ambient coordinate.
    Ellipsoid { semi_axes: Vec<f64> },
    #[serde(rename = "capbody")]
    CapBody {
        #[serde(default = "default_dim")]
        dim: usize,
        epsilon: f64,
    },
    /// Convex hull of explicit vertices or of the vertices of a mesh file.
    Polytope {
        #[serde(default = "default_dim")]
        dim: usize,
        #[serde(default)]
        vertices: Vec<[f64; 3]>,
        file: Option<PathBuf>,
    },
    Cube,
    Square,
    Tetrahedron,
    #[serde(rename = "lshape")]
    LShape {
        #[serde(default = "default_dim")]
        dim: usize,
    },
    /// Solid bounded by a closed OFF/OBJ mesh.
    Mesh {
        file: PathBuf,
        normals: Option<PathBuf>,
    },
    Points {
        #[serde(default = "default_dim")]
        dim: usize,
        points: Vec<[f64; 3]>,
    },
    Union { members: Vec<BodySpec> },
}

impl BodySpec {
    /// Parses the inline form.
    pub fn parse_inline(text: &str) -> Result<Self> {
        let text = text.trim();
        let (kind, rest) = match text.split_once(':') {
            Some((k, r)) => (k.trim(), r.trim()),
            None => (text, ""),
        };
        if kind == "union" {
            let members = rest
                .split('|')
                .map(BodySpec::parse_inline)
                .collect::<Result<Vec<_>>>()?;
            if members.is_empty() {
                return Err(GeomError::parse("union needs at least one member"));
            }
            return Ok(BodySpec::Union { members });
        }
        let mut args = InlineArgs::parse(kind, rest)?;
        let spec = match kind {
            "ball" => {
                let dim = args.dim()?;
                BodySpec::Ball {
                    dim,
                    radius: args.number(&["r", "radius"], Some(1.0))?,
                    center: [
                        args.number(&["cx"], Some(0.0))?,
                        args.number(&["cy"], Some(0.0))?,
                        args.number(&["cz"], Some(0.0))?,
                    ],
                }
            }
            "ellipsoid" | "ellipse" => {
                let a = args.number(&["a"], None)?;
                let b = args.number(&["b"], None)?;
                let mut semi_axes = vec![a, b];
                if let Some(c) = args.optional_number(&["c"])? {
                    semi_axes.push(c);
                }
                BodySpec::Ellipsoid { semi_axes }
            }
            "capbody" => BodySpec::CapBody {
                dim: args.dim()?,
                epsilon: args.number(&["eps", "epsilon"], None)?,
            },
            "polytope" => BodySpec::Polytope {
                dim: args.dim()?,
                vertices: Vec::new(),
                file: Some(args.file()?),
            },
            "mesh" => BodySpec::Mesh {
                file: args.file()?,
                normals: args.take("normals").map(|s| PathBuf::from(s.trim_start_matches('@'))),
            },
            "cube" => BodySpec::Cube,
            "square" => BodySpec::Square,
            "tetrahedron" => BodySpec::Tetrahedron,
            "lshape" => BodySpec::LShape { dim: args.dim()? },
            other => {
                return Err(GeomError::parse(format!(
                    "unknown body kind '{other}' (expected ball, ellipsoid, capbody, polytope, mesh, cube, square, tetrahedron, lshape or union)"
                )))
            }
        };
        args.finish()?;
        Ok(spec)
    }

    pub fn parse_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| GeomError::Config(e.to_string()))
    }

    /// Inline text, or `@path` to a TOML document.
    pub fn parse_argument(arg: &str) -> Result<(Self, PathBuf)> {
        if let Some(path) = arg.strip_prefix('@') {
            let text = std::fs::read_to_string(path)
                .map_err(|e| GeomError::Config(format!("cannot read body file {path}: {e}")))?;
            let base = Path::new(path).parent().map(Path::to_path_buf).unwrap_or_default();
            Ok((Self::parse_toml(&text)?, base))
        } else {
            Ok((Self::parse_inline(arg)?, PathBuf::new()))
        }
    }

    /// Builds the body; relative file paths are resolved against `base`.
    pub fn build(&self, base: &Path) -> Result<Body> {
        let dim = |d: usize| Dim::from_ambient(d);
        let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
        match self {
            BodySpec::Ball { dim: d, radius, center } => Body::ball(dim(*d)?, Vector3::from(*center), *radius),
            BodySpec::Ellipsoid { semi_axes } => Body::ellipsoid(semi_axes),
            BodySpec::CapBody { dim: d, epsilon } => Body::cap_body(dim(*d)?, *epsilon),
            BodySpec::Polytope { dim: d, vertices, file } => {
                let mut points: Vec<_> = vertices.iter().map(|v| Vector3::from(*v)).collect();
                if let Some(f) = file {
                    points.extend(load_mesh(&resolve(f), None)?.vertices);
                }
                Body::polytope(dim(*d)?, points)
            }
            BodySpec::Cube => Ok(Body::unit_cube()),
            BodySpec::Square => Ok(Body::unit_square()),
            BodySpec::Tetrahedron => Ok(Body::regular_tetrahedron()),
            BodySpec::LShape { dim: d } => Ok(Body::l_tromino(dim(*d)?)),
            BodySpec::Mesh { file, normals } => {
                let normals = normals.as_ref().map(|p| resolve(p));
                let mesh = load_mesh(&resolve(file), normals.as_deref())?;
                Body::sampled(Dim::Three, SampledSet::Mesh(mesh))
            }
            BodySpec::Points { dim: d, points } => Body::sampled(
                dim(*d)?,
                SampledSet::Points(points.iter().map(|p| Vector3::from(*p)).collect()),
            ),
            BodySpec::Union { members } => {
                let bodies = members.iter().map(|m| m.build(base)).collect::<Result<Vec<_>>>()?;
                let d = bodies.first().map(Body::dim).ok_or_else(|| GeomError::parse("empty union"))?;
                Body::sampled(d, SampledSet::Union(bodies))
            }
        }
    }
}

/// Parses a body argument and builds it in one step.
pub fn parse_body(arg: &str) -> Result<Body> {
    let (spec, base) = BodySpec::parse_argument(arg)?;
    spec.build(&base)
}

struct InlineArgs {
    kind: String,
    pairs: Vec<(String, String)>,
}

impl InlineArgs {
    fn parse(kind: &str, rest: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.split_once('=') {
                Some((k, v)) => pairs.push((k.trim().to_string(), v.trim().to_string())),
                None if item.starts_with('@') => pairs.push(("file".into(), item.to_string())),
                None => return Err(GeomError::parse(format!("expected key=value in '{item}' for {kind}"))),
            }
        }
        Ok(InlineArgs {
            kind: kind.to_string(),
            pairs,
        })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        let i = self.pairs.iter().position(|(k, _)| k == key)?;
        Some(self.pairs.remove(i).1)
    }

    fn optional_number(&mut self, keys: &[&str]) -> Result<Option<f64>> {
        for key in keys {
            if let Some(v) = self.take(key) {
                return v
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| GeomError::parse(format!("{}: '{key}' must be a number, got '{v}'", self.kind)));
            }
        }
        Ok(None)
    }

    fn number(&mut self, keys: &[&str], default: Option<f64>) -> Result<f64> {
        match (self.optional_number(keys)?, default) {
            (Some(v), _) | (None, Some(v)) => Ok(v),
            (None, None) => Err(GeomError::parse(format!("{}: missing '{}'", self.kind, keys[0]))),
        }
    }

    fn dim(&mut self) -> Result<usize> {
        Ok(self.number(&["dim"], Some(3.0))? as usize)
    }

    fn file(&mut self) -> Result<PathBuf> {
        let v = self
            .take("file")
            .ok_or_else(|| GeomError::parse(format!("{}: expected @path", self.kind)))?;
        Ok(PathBuf::from(v.trim_start_matches('@')))
    }

    fn finish(self) -> Result<()> {
        match self.pairs.first() {
            None => Ok(()),
            Some((k, _)) => Err(GeomError::parse(format!("{}: unknown parameter '{k}'", self.kind))),
        }
    }
}
