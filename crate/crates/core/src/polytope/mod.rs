//! Convex polytopes in R² and R³: hulls, containment, volume, and the
//! iterative convex-hull projection of `{Pτ : Aτ ≤ b}`.

mod hull;
mod ichm;
mod link;
pub mod lp;
mod mesh;

use nalgebra::{DMatrix, DVector, Vector3};

use crate::error::{Error, Result};
use hull::{convex_hull_geometry, scale_of, HullGeometry};

pub use ichm::{ichm, ichm_with_options, max_face_gap, IchmOptions, IchmStats};
pub use link::{link_reachable, link_reachable_in, LinkEnvelope, LinkPoint, LinkReachable};
pub use lp::{solve_lp, LinearProgram, LpOutcome, LpStatus, RowGeneration};
pub use mesh::{export_mesh, parse_polytope_json, MeshFormat, PolytopeDocument};

/// A face of a full-dimensional polytope: a triangle in R³ or an edge in R².
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    /// Indices into [`Polytope::vertices`], counter-clockwise seen from outside.
    pub vertices: Vec<usize>,
    /// Outward unit normal.
    pub normal: Vector3<f64>,
    pub offset: f64,
}

/// Convex polytope with both a vertex and a half-space description.
///
/// Vertices are stored as 3-vectors; for planar polytopes (`dim == 2`) the
/// third coordinate is zero.
#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vector3<f64>>,
    faces: Vec<Face>,
    normals: Vec<Vector3<f64>>,
    offsets: Vec<f64>,
    affine_dim: usize,
    delta: f64,
    witnesses: Option<Vec<DVector<f64>>>,
}

fn check_dim(dim: usize) {
    assert!(dim == 2 || dim == 3, "polytopes live in R² or R³, got dimension {dim}");
}

impl Polytope {
    /// The empty set. Nothing is contained in it.
    pub fn empty(dim: usize, delta: f64) -> Self {
        check_dim(dim);
        Polytope {
            dim,
            vertices: Vec::new(),
            faces: Vec::new(),
            normals: vec![Vector3::zeros()],
            offsets: vec![-1.0],
            affine_dim: 0,
            delta,
            witnesses: None,
        }
    }

    /// Convex hull of 3-vectors, using the first `dim` coordinates.
    ///
    /// Points within `flat_tol` of a lower-dimensional affine subspace give a
    /// degenerate polytope with `affine_dim < dim`.
    pub fn from_points(dim: usize, points: &[Vector3<f64>], flat_tol: f64) -> Self {
        Self::build(dim, points, None, flat_tol, 0.0)
    }

    pub(crate) fn build(
        dim: usize,
        points: &[Vector3<f64>],
        witnesses: Option<&[DVector<f64>]>,
        flat_tol: f64,
        delta: f64,
    ) -> Self {
        check_dim(dim);
        if points.is_empty() {
            return Self::empty(dim, delta);
        }
        let pts: Vec<Vector3<f64>> = points
            .iter()
            .map(|p| if dim == 2 { Vector3::new(p.x, p.y, 0.0) } else { *p })
            .collect();
        let geom = convex_hull_geometry(&pts, dim, flat_tol);
        Self::assemble(dim, &pts, witnesses, geom, delta)
    }

    fn assemble(
        dim: usize,
        pts: &[Vector3<f64>],
        witnesses: Option<&[DVector<f64>]>,
        geom: HullGeometry,
        delta: f64,
    ) -> Self {
        let vertices: Vec<Vector3<f64>> = geom.vertices.iter().map(|&i| pts[i]).collect();
        let witnesses = witnesses.map(|w| geom.vertices.iter().map(|&i| w[i].clone()).collect());
        let faces: Vec<Face> = geom
            .faces
            .into_iter()
            .map(|(vertices, normal, offset)| Face {
                vertices,
                normal,
                offset,
            })
            .collect();

        let scale = scale_of(&vertices);
        let mut normals: Vec<Vector3<f64>> = Vec::new();
        let mut offsets: Vec<f64> = Vec::new();
        let planes = faces.iter().map(|f| (f.normal, f.offset)).chain(geom.slabs);
        for (n, d) in planes {
            let dup = normals
                .iter()
                .zip(&offsets)
                .any(|(m, e)| (m - n).norm() < 1e-9 && (e - d).abs() < 1e-9 * scale);
            if !dup {
                normals.push(n);
                offsets.push(d);
            }
        }
        Polytope {
            dim,
            vertices,
            faces,
            normals,
            offsets,
            affine_dim: geom.affine_dim,
            delta,
            witnesses,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Dimension of the affine hull of the vertices (0 for empty sets).
    pub fn affine_dim(&self) -> usize {
        self.affine_dim
    }

    pub fn is_degenerate(&self) -> bool {
        !self.is_empty() && self.affine_dim < self.dim
    }

    pub fn vertices(&self) -> &[Vector3<f64>] {
        &self.vertices
    }

    /// Vertex `i` truncated to `dim` coordinates.
    pub fn vertex(&self, i: usize) -> DVector<f64> {
        DVector::from_iterator(self.dim, self.vertices[i].iter().take(self.dim).copied())
    }

    /// Faces of a full-dimensional polytope; empty when degenerate.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Construction tolerance (δ for projected polytopes, 0 for plain hulls).
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Joint torque that produced each vertex, when the polytope came from a projection.
    pub fn witnesses(&self) -> Option<&[DVector<f64>]> {
        self.witnesses.as_deref()
    }

    /// Half-space description `Hx ≤ d` with `H` of size rows × dim.
    pub fn halfspaces(&self) -> (DMatrix<f64>, DVector<f64>) {
        let rows = self.normals.len();
        let h = DMatrix::from_fn(rows, self.dim, |r, c| self.normals[r][c]);
        (h, DVector::from_column_slice(&self.offsets))
    }

    pub(crate) fn planes(&self) -> impl Iterator<Item = (&Vector3<f64>, f64)> {
        self.normals.iter().zip(self.offsets.iter().copied())
    }

    /// Largest violation `max(Hx − d)`; negative inside.
    pub fn violation(&self, point: &Vector3<f64>) -> f64 {
        if self.is_empty() {
            return f64::INFINITY;
        }
        let p = self.lift(point);
        self.planes().map(|(n, d)| n.dot(&p) - d).fold(f64::NEG_INFINITY, f64::max)
    }

    fn lift(&self, point: &Vector3<f64>) -> Vector3<f64> {
        if self.dim == 2 {
            Vector3::new(point.x, point.y, 0.0)
        } else {
            *point
        }
    }

    /// `Hx ≤ d + eps` for every row. Boundary points are inside.
    pub fn contains(&self, point: &Vector3<f64>, eps: f64) -> bool {
        self.violation(point) <= eps
    }

    /// Same as [`Polytope::contains`] for a point given as a slice of length `dim`.
    pub fn contains_slice(&self, point: &[f64], eps: f64) -> Result<bool> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                what: "point",
                expected: self.dim,
                got: point.len(),
            });
        }
        let mut p = Vector3::zeros();
        p.as_mut_slice()[..self.dim].copy_from_slice(point);
        Ok(self.contains(&p, eps))
    }

    /// Nearest point of a full-dimensional polytope; `None` when empty or degenerate.
    pub fn closest_point(&self, point: &Vector3<f64>) -> Option<Vector3<f64>> {
        if self.is_empty() || self.affine_dim < self.dim {
            return None;
        }
        let p = self.lift(point);
        if self.contains(&p, 0.0) {
            return Some(p);
        }
        let v = &self.vertices;
        self.faces
            .iter()
            .map(|f| match f.vertices.as_slice() {
                [a, b] => closest_on_segment(&p, &v[*a], &v[*b]),
                [a, b, c] => closest_on_triangle(&p, &v[*a], &v[*b], &v[*c]),
                _ => unreachable!("faces are edges or triangles"),
            })
            .min_by(|a, b| (a - p).norm_squared().total_cmp(&(b - p).norm_squared()))
    }

    /// Euclidean distance to a full-dimensional polytope (0 inside).
    pub fn distance(&self, point: &Vector3<f64>) -> Option<f64> {
        self.closest_point(point).map(|c| (c - self.lift(point)).norm())
    }

    /// Volume (area for `dim == 2`); zero when degenerate or empty.
    pub fn volume(&self) -> f64 {
        if self.is_empty() || self.affine_dim < self.dim {
            return 0.0;
        }
        let c = self.centroid();
        match self.dim {
            2 => self
                .faces
                .iter()
                .map(|f| {
                    let a = self.vertices[f.vertices[0]] - c;
                    let b = self.vertices[f.vertices[1]] - c;
                    0.5 * (a.x * b.y - a.y * b.x)
                })
                .sum(),
            _ => self
                .faces
                .iter()
                .map(|f| {
                    let a = self.vertices[f.vertices[0]] - c;
                    let b = self.vertices[f.vertices[1]] - c;
                    let d = self.vertices[f.vertices[2]] - c;
                    a.dot(&b.cross(&d)) / 6.0
                })
                .sum(),
        }
    }

    /// Boundary measure: surface area in R³, perimeter in R².
    pub fn surface_area(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let v: Vec<_> = f.vertices.iter().map(|&i| self.vertices[i]).collect();
                if v.len() == 2 {
                    (v[1] - v[0]).norm()
                } else {
                    0.5 * (v[1] - v[0]).cross(&(v[2] - v[0])).norm()
                }
            })
            .sum()
    }

    /// Mean of the vertices.
    pub fn centroid(&self) -> Vector3<f64> {
        if self.vertices.is_empty() {
            return Vector3::zeros();
        }
        self.vertices.iter().sum::<Vector3<f64>>() / self.vertices.len() as f64
    }

    /// Copy moved by `offset`.
    pub fn translated(&self, offset: &Vector3<f64>) -> Self {
        let offset = self.lift(offset);
        let mut out = self.clone();
        if self.is_empty() {
            return out;
        }
        for v in &mut out.vertices {
            *v += offset;
        }
        for f in &mut out.faces {
            f.offset += f.normal.dot(&offset);
        }
        for (n, d) in out.normals.iter().zip(out.offsets.iter_mut()) {
            *d += n.dot(&offset);
        }
        out
    }
}

fn closest_on_segment(p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> Vector3<f64> {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return *a;
    }
    a + ab * ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
}

/// Closest point on a triangle by region classification.
fn closest_on_triangle(p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> Vector3<f64> {
    let (ab, ac, ap) = (b - a, c - a, p - a);
    let (d1, d2) = (ab.dot(&ap), ac.dot(&ap));
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let (d3, d4) = (ab.dot(&bp), ac.dot(&bp));
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let (d5, d6) = (ab.dot(&cp), ac.dot(&cp));
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

/// Convex hull of points given as vectors of length 2 or 3.
pub fn convex_hull(points: &[DVector<f64>]) -> Result<Polytope> {
    let dim = points.first().map(|p| p.len()).unwrap_or(3);
    if !(dim == 2 || dim == 3) {
        return Err(Error::DimensionMismatch {
            what: "hull point",
            expected: 3,
            got: dim,
        });
    }
    let mut pts = Vec::with_capacity(points.len());
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                what: "hull point",
                expected: dim,
                got: p.len(),
            });
        }
        let mut v = Vector3::zeros();
        v.as_mut_slice()[..dim].copy_from_slice(p.as_slice());
        pts.push(v);
    }
    Ok(Polytope::from_points(dim, &pts, 0.0))
}

/// Convex hull of the vertices of all inputs. Empty inputs contribute nothing.
pub fn hull_union(polys: &[Polytope]) -> Result<Polytope> {
    let first = polys.first().ok_or_else(|| Error::Validation("hull_union needs at least one polytope".into()))?;
    let dim = first.dim;
    let mut pts = Vec::new();
    let mut wit = Vec::new();
    let mut all_witnessed = true;
    let mut delta: f64 = 0.0;
    for p in polys {
        if p.dim != dim {
            return Err(Error::DimensionMismatch {
                what: "polytope",
                expected: dim,
                got: p.dim,
            });
        }
        delta = delta.max(p.delta);
        pts.extend_from_slice(&p.vertices);
        match &p.witnesses {
            Some(w) => wit.extend(w.iter().cloned()),
            None => all_witnessed = false,
        }
    }
    let witnesses = (all_witnessed && !pts.is_empty()).then_some(wit.as_slice());
    Ok(Polytope::build(dim, &pts, witnesses, 0.0, delta))
}
