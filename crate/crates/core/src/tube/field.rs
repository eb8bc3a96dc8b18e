//! Sampled distance fields on axis-aligned grids and the volumes of their
//! sublevel sets.
//!
//! Each grid cell is split into Kuhn simplices (six tetrahedra in space, two
//! triangles in the plane) that tile the grid conformingly. On each simplex
//! the field is replaced by its linear interpolant, whose sublevel set has an
//! exact volume; the same split drives level-set extraction.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use super::oracle::{BBox, DistanceOracle};
use crate::bodies::Body;
use crate::error::{GeomError, Result};
use crate::geometry::{Dim, Point};

const MAGIC: &[u8; 8] = b"CXLBDF\0\0";
const FORMAT_VERSION: u32 = 1;
/// Grids larger than this are refused.
pub const MAX_NODES: usize = 200_000_000;

#[derive(Clone, Debug)]
pub struct DistanceField {
    pub dim: Dim,
    pub origin: Point,
    pub step: f64,
    /// Node counts along x, y, z (`z = 1` in the plane).
    pub dims: [usize; 3],
    /// Row-major, x fastest.
    pub values: Vec<f64>,
    source: Option<DistanceOracle>,
}

pub fn build_distance_field(body: &Body, bbox: BBox, h: f64) -> Result<DistanceField> {
    let oracle = DistanceOracle::from_body(body)?;
    DistanceField::from_oracle(oracle, bbox, h)
}

impl DistanceField {
    pub fn from_oracle(oracle: DistanceOracle, bbox: BBox, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(GeomError::domain(format!("grid step must be positive, got {h}")));
        }
        let dim = oracle.dim();
        let bbox = BBox::new(dim.project(bbox.lo), dim.project(bbox.hi));
        if !bbox.contains(&oracle.bbox()) {
            return Err(GeomError::BBoxTooSmall(format!(
                "box {:?}..{:?} does not contain the body {:?}..{:?}",
                bbox.lo.as_slice(),
                bbox.hi.as_slice(),
                oracle.bbox().lo.as_slice(),
                oracle.bbox().hi.as_slice()
            )));
        }
        let mut dims = [1usize; 3];
        for (axis, slot) in dims.iter_mut().enumerate().take(dim.ambient()) {
            *slot = ((bbox.hi[axis] - bbox.lo[axis]) / h).ceil() as usize + 1;
        }
        let total = dims.iter().product::<usize>();
        if total > MAX_NODES {
            return Err(GeomError::domain(format!("grid of {total} nodes is too large")));
        }
        let origin = bbox.lo;
        let plane = dims[0] * dims[1];
        let values: Vec<f64> = (0..dims[2])
            .into_par_iter()
            .flat_map_iter(|k| {
                let oracle = &oracle;
                (0..plane).map(move |ij| {
                    let (i, j) = (ij % dims[0], ij / dims[0]);
                    let x = origin + Vector3::new(i as f64, j as f64, k as f64) * h;
                    oracle.distance(&x)
                })
            })
            .collect();
        let field = DistanceField {
            dim,
            origin,
            step: h,
            dims,
            values,
            source: Some(oracle),
        };
        if field.margin() <= 0.0 {
            return Err(GeomError::BBoxTooSmall("the body touches the edge of the grid".into()));
        }
        Ok(field)
    }

    pub fn source(&self) -> Option<&DistanceOracle> {
        self.source.as_ref()
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    pub fn node(&self, i: usize, j: usize, k: usize) -> Point {
        self.origin + Vector3::new(i as f64, j as f64, k as f64) * self.step
    }

    pub fn node_of_index(&self, idx: usize) -> Point {
        let i = idx % self.dims[0];
        let j = (idx / self.dims[0]) % self.dims[1];
        let k = idx / (self.dims[0] * self.dims[1]);
        self.node(i, j, k)
    }

    /// Smallest field value on the outer layer of nodes: offsets up to this
    /// radius stay inside the grid.
    pub fn margin(&self) -> f64 {
        let [nx, ny, nz] = self.dims;
        let mut m = f64::INFINITY;
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let outer = i == 0
                        || i == nx - 1
                        || j == 0
                        || j == ny - 1
                        || (self.dim == Dim::Three && (k == 0 || k == nz - 1));
                    if outer {
                        m = m.min(self.values[self.index(i, j, k)]);
                    }
                }
            }
        }
        m
    }

    /// Largest ratio `|Δδ| / h` over axis-adjacent nodes; at most 1 for an
    /// exact distance function.
    pub fn lipschitz_ratio(&self) -> f64 {
        let [nx, ny, nz] = self.dims;
        let mut worst = 0.0f64;
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let v = self.values[self.index(i, j, k)];
                    if i + 1 < nx {
                        worst = worst.max((self.values[self.index(i + 1, j, k)] - v).abs());
                    }
                    if j + 1 < ny {
                        worst = worst.max((self.values[self.index(i, j + 1, k)] - v).abs());
                    }
                    if k + 1 < nz {
                        worst = worst.max((self.values[self.index(i, j, k + 1)] - v).abs());
                    }
                }
            }
        }
        worst / self.step
    }

    fn cell_count(&self) -> [usize; 3] {
        let [nx, ny, nz] = self.dims;
        [nx - 1, ny - 1, if self.dim == Dim::Three { nz - 1 } else { 1 }]
    }

    /// Global node indices of the simplices of cell `(i, j, k)`.
    pub(crate) fn cell_simplices(&self, i: usize, j: usize, k: usize) -> Vec<Vec<usize>> {
        let corner = |c: [usize; 3]| self.index(i + c[0], j + c[1], k + c[2]);
        match self.dim {
            Dim::Two => vec![
                vec![corner([0, 0, 0]), corner([1, 0, 0]), corner([1, 1, 0])],
                vec![corner([0, 0, 0]), corner([0, 1, 0]), corner([1, 1, 0])],
            ],
            Dim::Three => KUHN_PERMUTATIONS
                .iter()
                .map(|p| {
                    let mut c = [0usize; 3];
                    let mut out = vec![corner(c)];
                    for &axis in p {
                        c[axis] = 1;
                        out.push(corner(c));
                    }
                    out
                })
                .collect(),
        }
    }

    /// Volume of `{δ ≤ ρ}` under the piecewise-linear model.
    pub fn offset_volume(&self, rho: f64) -> Result<f64> {
        if !(rho >= 0.0) {
            return Err(GeomError::domain(format!("offset radius must be nonnegative, got {rho}")));
        }
        if rho + self.step > self.margin() {
            return Err(GeomError::BBoxTooSmall(format!(
                "offset {rho} plus one grid step exceeds the grid margin {}",
                self.margin()
            )));
        }
        let [cx, cy, cz] = self.cell_count();
        let d = self.dim.ambient();
        let cell_volume = self.step.powi(d as i32);
        let simplex_volume = cell_volume / if d == 3 { 6.0 } else { 2.0 };
        let layers: Vec<f64> = (0..cz)
            .into_par_iter()
            .map(|k| {
                let mut acc = 0.0;
                let corners = 1usize << d;
                for j in 0..cy {
                    for i in 0..cx {
                        let (mut below, mut above) = (0, 0);
                        for c in 0..corners {
                            let v = self.values[self.index(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1))];
                            if v <= rho {
                                below += 1;
                            } else {
                                above += 1;
                            }
                        }
                        if above == 0 {
                            acc += cell_volume;
                            continue;
                        }
                        if below == 0 {
                            continue;
                        }
                        for s in self.cell_simplices(i, j, k) {
                            let g: Vec<f64> = s.iter().map(|&n| self.values[n] - rho).collect();
                            acc += simplex_volume * sublevel_fraction(&g);
                        }
                    }
                }
                acc
            })
            .collect();
        Ok(layers.iter().sum())
    }

    /// Writes the flat binary dump: 8-byte magic, `u32` version, `u32` ambient
    /// dimension, three `u64` node counts, three `f64` origin coordinates, the
    /// `f64` step, then the node values. Every number is little-endian.
    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(self.dim.ambient() as u32).to_le_bytes())?;
        for n in self.dims {
            w.write_all(&(n as u64).to_le_bytes())?;
        }
        for c in self.origin.iter() {
            w.write_all(&c.to_le_bytes())?;
        }
        w.write_all(&self.step.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write_binary(&mut w)?;
        w.flush()?;
        Ok(())
    }

    /// Reads a dump; the result has no source oracle.
    pub fn read_binary(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(GeomError::parse("not a distance-field dump"));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4)?;
        let version = u32::from_le_bytes(b4);
        if version != FORMAT_VERSION {
            return Err(GeomError::parse(format!("unsupported dump version {version}")));
        }
        r.read_exact(&mut b4)?;
        let dim = Dim::from_ambient(u32::from_le_bytes(b4) as usize)?;
        let mut dims = [0usize; 3];
        for slot in &mut dims {
            r.read_exact(&mut b8)?;
            *slot = u64::from_le_bytes(b8) as usize;
        }
        let mut origin = Vector3::zeros();
        for i in 0..3 {
            r.read_exact(&mut b8)?;
            origin[i] = f64::from_le_bytes(b8);
        }
        r.read_exact(&mut b8)?;
        let step = f64::from_le_bytes(b8);
        let total = dims.iter().product::<usize>();
        if total > MAX_NODES {
            return Err(GeomError::parse("dump declares too many nodes"));
        }
        let mut values = Vec::with_capacity(total);
        for _ in 0..total {
            r.read_exact(&mut b8)?;
            values.push(f64::from_le_bytes(b8));
        }
        Ok(DistanceField {
            dim,
            origin,
            step,
            dims,
            values,
            source: None,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_binary(std::io::BufReader::new(std::fs::File::open(path)?))
    }

    /// Trilinear interpolation of the node values.
    pub fn interpolate(&self, x: &Point) -> f64 {
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for a in 0..self.dim.ambient() {
            let t = ((x[a] - self.origin[a]) / self.step).clamp(0.0, (self.dims[a] - 1) as f64);
            let i = (t.floor() as usize).min(self.dims[a].saturating_sub(2));
            base[a] = i;
            frac[a] = t - i as f64;
        }
        let corners = 1usize << self.dim.ambient();
        let mut acc = 0.0;
        for c in 0..corners {
            let mut w = 1.0;
            let mut idx = [0usize; 3];
            for a in 0..self.dim.ambient() {
                let bit = (c >> a) & 1;
                idx[a] = base[a] + bit;
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
            }
            acc += w * self.values[self.index(idx[0], idx[1], idx[2])];
        }
        acc
    }

    /// Unit normal of the level sets at `x`: exact from the source oracle
    /// when there is one, else from the interpolated field.
    pub fn normal_at(&self, x: &Point) -> Point {
        if let Some(o) = &self.source {
            let (d, xi) = o.nearest(x);
            if d > 0.0 {
                return (x - xi) / d;
            }
        }
        let mut g = Vector3::zeros();
        let s = 0.5 * self.step;
        for a in 0..self.dim.ambient() {
            let mut e = Vector3::zeros();
            e[a] = s;
            g[a] = (self.interpolate(&(x + e)) - self.interpolate(&(x - e))) / (2.0 * s);
        }
        g.normalize()
    }
}

const KUHN_PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Fraction of a simplex where the linear function with vertex values `g` is
/// nonpositive. Works for triangles and tetrahedra.
pub(crate) fn sublevel_fraction(g: &[f64]) -> f64 {
    let neg: Vec<usize> = (0..g.len()).filter(|&i| g[i] <= 0.0).collect();
    let pos: Vec<usize> = (0..g.len()).filter(|&i| g[i] > 0.0).collect();
    // Edge parameter from a nonpositive vertex towards a positive one.
    let t = |a: usize, b: usize| g[a] / (g[a] - g[b]);
    match (neg.len(), pos.len()) {
        (_, 0) => 1.0,
        (0, _) => 0.0,
        (1, _) => pos.iter().map(|&p| t(neg[0], p)).product(),
        (_, 1) => 1.0 - neg.iter().map(|&q| 1.0 - t(q, pos[0])).product::<f64>(),
        (2, 2) => {
            // Prism between the two nonpositive vertices and the four edge
            // crossings, in reference coordinates of the unit tetrahedron.
            let r = |i: usize| {
                let mut v = Vector3::zeros();
                if i > 0 {
                    v[i - 1] = 1.0;
                }
                v
            };
            let cut = |a: usize, b: usize| r(a) + (r(b) - r(a)) * t(a, b);
            let (a, b) = (neg[0], neg[1]);
            let (c, d) = (pos[0], pos[1]);
            let prism = [r(a), cut(a, c), cut(a, d), r(b), cut(b, c), cut(b, d)];
            let tet = |p: [usize; 4]| {
                let m = Matrix3::from_columns(&[
                    prism[p[1]] - prism[p[0]],
                    prism[p[2]] - prism[p[0]],
                    prism[p[3]] - prism[p[0]],
                ]);
                m.determinant().abs()
            };
            tet([0, 1, 2, 5]) + tet([0, 1, 4, 5]) + tet([0, 3, 4, 5])
        }
        _ => unreachable!("simplices have at most four vertices"),
    }
}
