//! Convex hulls in two and three dimensions.
//!
//! [`Hull3`] is an incremental beneath-beyond hull: a point is inserted by
//! walking the faces that see it, cutting them out along their horizon and
//! coning the horizon to the new point. Batch construction adds per-face
//! conflict lists so each step inserts the farthest outside point
//! (quickhull order). Planar hulls use the monotone chain.
//!
//! Inputs whose affine hull is lower-dimensional (within a flatness tolerance)
//! are reported as such, with a bounding slab in the missing directions so that
//! containment queries remain meaningful.

use std::collections::HashMap;

use nalgebra::{Vector2, Vector3};

/// Relative epsilon for orientation predicates.
pub(crate) const HULL_EPS_REL: f64 = 1e-10;

/// Incident-normal rank test threshold for pruning vertices that lie on an edge or facet.
const FLAT_VERTEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub(crate) struct Face3 {
    pub v: [usize; 3],
    pub normal: Vector3<f64>,
    pub offset: f64,
    pub alive: bool,
    outside: Vec<usize>,
}

impl Face3 {
    fn dist(&self, p: &Vector3<f64>) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Incrementally built convex hull of points in R³.
#[derive(Debug, Clone)]
pub(crate) struct Hull3 {
    pub pts: Vec<Vector3<f64>>,
    pub faces: Vec<Face3>,
    edges: HashMap<(usize, usize), usize>,
    eps: f64,
}

fn plane(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> (Vector3<f64>, f64) {
    let n = (b - a).cross(&(c - a));
    let len = n.norm();
    let n = if len > 0.0 { n / len } else { n };
    let centroid = (a + b + c) / 3.0;
    (n, n.dot(&centroid))
}

impl Hull3 {
    /// Starts from the tetrahedron `simplex`, which must not be flat.
    pub fn from_simplex(pts: Vec<Vector3<f64>>, simplex: [usize; 4], eps: f64) -> Self {
        let mut hull = Hull3 {
            pts,
            faces: Vec::new(),
            edges: HashMap::new(),
            eps,
        };
        let [a, b, c, d] = simplex;
        for (tri, opposite) in [([a, b, c], d), ([a, d, b], c), ([b, d, c], a), ([c, d, a], b)] {
            let (n, off) = plane(&hull.pts[tri[0]], &hull.pts[tri[1]], &hull.pts[tri[2]]);
            let tri = if n.dot(&hull.pts[opposite]) - off > 0.0 {
                [tri[0], tri[2], tri[1]]
            } else {
                tri
            };
            hull.add_face(tri);
        }
        hull
    }

    fn add_face(&mut self, v: [usize; 3]) -> usize {
        let (normal, offset) = plane(&self.pts[v[0]], &self.pts[v[1]], &self.pts[v[2]]);
        let id = self.faces.len();
        self.faces.push(Face3 {
            v,
            normal,
            offset,
            alive: true,
            outside: Vec::new(),
        });
        for k in 0..3 {
            self.edges.insert((v[k], v[(k + 1) % 3]), id);
        }
        id
    }

    pub fn alive_faces(&self) -> impl Iterator<Item = (usize, &Face3)> {
        self.faces.iter().enumerate().filter(|(_, f)| f.alive)
    }

    pub fn push_point(&mut self, p: Vector3<f64>) -> usize {
        self.pts.push(p);
        self.pts.len() - 1
    }

    /// Signed distance of the point from the hull's most violated face plane.
    pub fn max_violation(&self, p: &Vector3<f64>) -> (f64, Option<usize>) {
        let mut best = (f64::NEG_INFINITY, None);
        for (id, f) in self.alive_faces() {
            let d = f.dist(p);
            if d > best.0 {
                best = (d, Some(id));
            }
        }
        best
    }

    /// Inserts point `idx`. Returns the ids of created faces, empty if the point was inside.
    pub fn insert(&mut self, idx: usize, start: Option<usize>) -> Vec<usize> {
        let p = self.pts[idx];
        let start = match start {
            Some(s) if self.faces[s].alive && self.faces[s].dist(&p) > self.eps => s,
            _ => match self.max_violation(&p) {
                (d, Some(s)) if d > self.eps => s,
                _ => return Vec::new(),
            },
        };

        let mut visible = vec![false; self.faces.len()];
        let mut stack = vec![start];
        let mut seen = Vec::new();
        visible[start] = true;
        while let Some(f) = stack.pop() {
            seen.push(f);
            let v = self.faces[f].v;
            for k in 0..3 {
                let twin = self.edges[&(v[(k + 1) % 3], v[k])];
                if !visible[twin] && self.faces[twin].dist(&p) > self.eps {
                    visible[twin] = true;
                    stack.push(twin);
                }
            }
        }

        let mut horizon = Vec::new();
        let mut orphans = Vec::new();
        for &f in &seen {
            let v = self.faces[f].v;
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                if !visible[self.edges[&(b, a)]] {
                    horizon.push((a, b));
                }
            }
            orphans.append(&mut self.faces[f].outside);
        }
        for &f in &seen {
            self.faces[f].alive = false;
            let v = self.faces[f].v;
            for k in 0..3 {
                self.edges.remove(&(v[k], v[(k + 1) % 3]));
            }
        }

        let created: Vec<usize> = horizon.iter().map(|&(a, b)| self.add_face([a, b, idx])).collect();

        for o in orphans {
            if o == idx {
                continue;
            }
            let q = self.pts[o];
            let mut best = (self.eps, None);
            for &f in &created {
                let d = self.faces[f].dist(&q);
                if d > best.0 {
                    best = (d, Some(f));
                }
            }
            if let Some(f) = best.1 {
                self.faces[f].outside.push(o);
            }
        }
        created
    }

    /// Quickhull over the points not yet on the hull.
    fn absorb(&mut self, candidates: impl Iterator<Item = usize>) {
        let alive: Vec<usize> = self.alive_faces().map(|(i, _)| i).collect();
        for c in candidates {
            let q = self.pts[c];
            let mut best = (self.eps, None);
            for &f in &alive {
                let d = self.faces[f].dist(&q);
                if d > best.0 {
                    best = (d, Some(f));
                }
            }
            if let Some(f) = best.1 {
                self.faces[f].outside.push(c);
            }
        }
        let mut work: Vec<usize> = alive.into_iter().rev().collect();
        while let Some(f) = work.pop() {
            if !self.faces[f].alive || self.faces[f].outside.is_empty() {
                continue;
            }
            let face = &self.faces[f];
            let far = *face
                .outside
                .iter()
                .max_by(|&&a, &&b| face.dist(&self.pts[a]).total_cmp(&face.dist(&self.pts[b])))
                .expect("non-empty");
            let created = self.insert(far, Some(f));
            for nf in created.into_iter().rev() {
                if !self.faces[nf].outside.is_empty() {
                    work.push(nf);
                }
            }
        }
    }

    /// Vertex ids referenced by live faces, ascending.
    pub fn hull_vertices(&self) -> Vec<usize> {
        let mut used = vec![false; self.pts.len()];
        for (_, f) in self.alive_faces() {
            for &v in &f.v {
                used[v] = true;
            }
        }
        (0..self.pts.len()).filter(|&i| used[i]).collect()
    }

    /// Hull vertices whose incident face normals do not span R³ (they sit on an edge or facet).
    fn flat_vertices(&self) -> Vec<usize> {
        let mut incident: Vec<Vec<Vector3<f64>>> = vec![Vec::new(); self.pts.len()];
        for (_, f) in self.alive_faces() {
            for &v in &f.v {
                incident[v].push(f.normal);
            }
        }
        incident
            .iter()
            .enumerate()
            .filter(|(_, ns)| !ns.is_empty() && normal_rank(ns) < 3)
            .map(|(i, _)| i)
            .collect()
    }
}

fn normal_rank(ns: &[Vector3<f64>]) -> usize {
    let n1 = ns[0];
    let (cross, mag) = ns
        .iter()
        .map(|n| {
            let c = n1.cross(n);
            let m = c.norm();
            (c, m)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty");
    if mag < FLAT_VERTEX_TOL {
        return 1;
    }
    let axis = cross / mag;
    if ns.iter().all(|n| axis.dot(n).abs() < FLAT_VERTEX_TOL) {
        2
    } else {
        3
    }
}

/// Result of a hull computation, indexed into the caller's point list.
#[derive(Debug, Clone)]
pub(crate) struct HullGeometry {
    /// Input indices of the hull vertices.
    pub vertices: Vec<usize>,
    /// Faces as positions into `vertices`, with outward unit normal and offset.
    pub faces: Vec<(Vec<usize>, Vector3<f64>, f64)>,
    /// Extra half-spaces bounding flat inputs in their missing directions.
    pub slabs: Vec<(Vector3<f64>, f64)>,
    pub affine_dim: usize,
}

pub(crate) fn scale_of(points: &[Vector3<f64>]) -> f64 {
    if points.is_empty() {
        return 1.0;
    }
    let c = points.iter().sum::<Vector3<f64>>() / points.len() as f64;
    let r = points.iter().map(|p| (p - c).norm()).fold(0.0, f64::max);
    let a = points.iter().map(|p| p.amax()).fold(0.0, f64::max);
    r.max(a * 1e-3).max(f64::MIN_POSITIVE)
}

fn unit(i: usize) -> Vector3<f64> {
    let mut e = Vector3::zeros();
    e[i] = 1.0;
    e
}

fn slab(points: &[Vector3<f64>], ids: &[usize], dir: Vector3<f64>) -> [(Vector3<f64>, f64); 2] {
    let (lo, hi) = ids.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
        let v = dir.dot(&points[i]);
        (lo.min(v), hi.max(v))
    });
    [(dir, hi), (-dir, -lo)]
}

fn orthonormal_complement(u: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let pick = if u.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let w1 = u.cross(&pick).normalize();
    let w2 = u.cross(&w1);
    (w1, w2)
}

/// Computes the hull of `points` restricted to the first `dim` coordinates (2 or 3).
///
/// `flat_tol` is the distance under which points are treated as lying in a
/// lower-dimensional affine subspace.
pub(crate) fn convex_hull_geometry(points: &[Vector3<f64>], dim: usize, flat_tol: f64) -> HullGeometry {
    assert!(dim == 2 || dim == 3, "hulls are supported in R² and R³");
    assert!(!points.is_empty(), "hull of an empty set");
    let ids: Vec<usize> = (0..points.len()).collect();
    let eps = HULL_EPS_REL * scale_of(points);
    let flat_tol = flat_tol.max(eps);

    // Affine basis search: farthest pair among axis extremes, then farthest from line, then plane.
    let mut extremes = Vec::new();
    for ax in 0..dim {
        let lo = ids.iter().copied().min_by(|&a, &b| points[a][ax].total_cmp(&points[b][ax])).unwrap();
        let hi = ids.iter().copied().max_by(|&a, &b| points[a][ax].total_cmp(&points[b][ax])).unwrap();
        extremes.push(lo);
        extremes.push(hi);
    }
    let mut pair = (extremes[0], extremes[0], 0.0);
    for &a in &extremes {
        for &b in &extremes {
            let d = (points[a] - points[b]).norm();
            if d > pair.2 {
                pair = (a, b, d);
            }
        }
    }
    let (i0, i1, span) = pair;
    if span <= flat_tol {
        let mut slabs = Vec::new();
        for ax in 0..dim {
            slabs.extend(slab(points, &ids, unit(ax)));
        }
        return HullGeometry {
            vertices: vec![i0],
            faces: Vec::new(),
            slabs,
            affine_dim: 0,
        };
    }
    let u = (points[i1] - points[i0]) / span;
    let line_dist = |p: &Vector3<f64>| {
        let r = p - points[i0];
        (r - u * u.dot(&r)).norm()
    };
    let (i2, d2) = ids
        .iter()
        .map(|&i| (i, line_dist(&points[i])))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    if d2 <= flat_tol {
        let proj = |i: usize| u.dot(&points[i]);
        let lo = ids.iter().copied().min_by(|&a, &b| proj(a).total_cmp(&proj(b))).unwrap();
        let hi = ids.iter().copied().max_by(|&a, &b| proj(a).total_cmp(&proj(b))).unwrap();
        let mut slabs = vec![];
        let (w1, w2) = if dim == 3 {
            orthonormal_complement(&u)
        } else {
            (Vector3::new(-u.y, u.x, 0.0), Vector3::zeros())
        };
        slabs.extend(slab(points, &ids, w1));
        if dim == 3 {
            slabs.extend(slab(points, &ids, w2));
        }
        return HullGeometry {
            vertices: vec![lo, hi],
            faces: vec![],
            slabs: [slab(points, &ids, u).to_vec(), slabs].concat(),
            affine_dim: 1,
        };
    }

    if dim == 2 {
        return planar_hull(points, &ids, Vector3::x(), Vector3::y(), None, eps);
    }

    let w = (points[i1] - points[i0]).cross(&(points[i2] - points[i0])).normalize();
    let (i3, d3) = ids
        .iter()
        .map(|&i| (i, w.dot(&(points[i] - points[i0])).abs()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    if d3 <= flat_tol {
        let u2 = w.cross(&u);
        return planar_hull(points, &ids, u, u2, Some(w), eps);
    }

    let mut current: Vec<usize> = ids;
    let mut simplex = [i0, i1, i2, i3];
    for _ in 0..4 {
        let sub: Vec<Vector3<f64>> = current.iter().map(|&i| points[i]).collect();
        let local = simplex.map(|g| current.iter().position(|&c| c == g).expect("simplex in set"));
        let mut hull = Hull3::from_simplex(sub, local, eps);
        let rest: Vec<usize> = (0..current.len()).filter(|i| !local.contains(i)).collect();
        hull.absorb(rest.into_iter());
        let flat = hull.flat_vertices();
        if flat.is_empty() {
            return geometry_from_hull3(&hull, &current);
        }
        let mut is_flat = vec![false; current.len()];
        for &f in &flat {
            is_flat[f] = true;
        }
        let keep: Vec<usize> = hull
            .hull_vertices()
            .into_iter()
            .filter(|&v| !is_flat[v])
            .map(|v| current[v])
            .collect();
        // The pruned set spans the same solid; re-seed the simplex from it.
        current = keep;
        simplex = reseed(points, &current);
    }
    unreachable!("flat-vertex pruning did not converge")
}

fn reseed(points: &[Vector3<f64>], ids: &[usize]) -> [usize; 4] {
    let i0 = ids[0];
    let i1 = *ids.iter().max_by(|&&a, &&b| (points[a] - points[i0]).norm().total_cmp(&(points[b] - points[i0]).norm())).unwrap();
    let u = (points[i1] - points[i0]).normalize();
    let i2 = *ids
        .iter()
        .max_by(|&&a, &&b| {
            let da = (points[a] - points[i0]).cross(&u).norm();
            let db = (points[b] - points[i0]).cross(&u).norm();
            da.total_cmp(&db)
        })
        .unwrap();
    let w = (points[i1] - points[i0]).cross(&(points[i2] - points[i0])).normalize();
    let i3 = *ids
        .iter()
        .max_by(|&&a, &&b| w.dot(&(points[a] - points[i0])).abs().total_cmp(&w.dot(&(points[b] - points[i0])).abs()))
        .unwrap();
    [i0, i1, i2, i3]
}

pub(crate) fn geometry_from_hull3(hull: &Hull3, global: &[usize]) -> HullGeometry {
    let verts = hull.hull_vertices();
    let mut pos = vec![usize::MAX; hull.pts.len()];
    for (k, &v) in verts.iter().enumerate() {
        pos[v] = k;
    }
    let faces = hull
        .alive_faces()
        .map(|(_, f)| (f.v.iter().map(|&v| pos[v]).collect(), f.normal, f.offset))
        .collect();
    HullGeometry {
        vertices: verts.iter().map(|&v| global[v]).collect(),
        faces,
        slabs: Vec::new(),
        affine_dim: 3,
    }
}

/// Hull of points lying in the plane spanned by `e1`, `e2` (through the origin or offset
/// along `normal` when embedded in R³).
fn planar_hull(
    points: &[Vector3<f64>],
    ids: &[usize],
    e1: Vector3<f64>,
    e2: Vector3<f64>,
    normal: Option<Vector3<f64>>,
    eps: f64,
) -> HullGeometry {
    let coords: Vec<Vector2<f64>> = ids.iter().map(|&i| Vector2::new(e1.dot(&points[i]), e2.dot(&points[i]))).collect();
    let order = monotone_chain(&coords, eps);
    let k = order.len();
    let mut faces = Vec::with_capacity(k);
    for e in 0..k {
        let (a, b) = (order[e], order[(e + 1) % k]);
        let d = coords[b] - coords[a];
        let n2 = Vector2::new(d.y, -d.x).normalize();
        let n = e1 * n2.x + e2 * n2.y;
        faces.push((vec![e, (e + 1) % k], n, n.dot(&points[ids[a]])));
    }
    let vertices = order.iter().map(|&o| ids[o]).collect();
    match normal {
        None => HullGeometry {
            vertices,
            faces,
            slabs: Vec::new(),
            affine_dim: 2,
        },
        Some(w) => HullGeometry {
            vertices,
            slabs: faces
                .into_iter()
                .map(|(_, n, d)| (n, d))
                .chain(slab(points, ids, w))
                .collect(),
            faces: Vec::new(),
            affine_dim: 2,
        },
    }
}

/// Counter-clockwise hull of planar points with collinear points removed.
pub(crate) fn monotone_chain(pts: &[Vector2<f64>], eps: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| pts[a].x.total_cmp(&pts[b].x).then(pts[a].y.total_cmp(&pts[b].y)));
    idx.dedup_by(|a, b| (pts[*a] - pts[*b]).norm() <= eps);
    if idx.len() < 3 {
        return idx;
    }
    let cross = |o: usize, a: usize, b: usize| {
        let (oa, ob) = (pts[a] - pts[o], pts[b] - pts[o]);
        let len = oa.norm().max(ob.norm());
        (oa.x * ob.y - oa.y * ob.x) / len.max(f64::MIN_POSITIVE)
    };
    let mut lower: Vec<usize> = Vec::new();
    for &p in &idx {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= eps {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &p in idx.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= eps {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> Vec<Vector3<f64>> {
        let mut v = vec![];
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    v.push(Vector3::new(x, y, z));
                }
            }
        }
        v
    }

    #[test]
    fn cube_has_eight_vertices_twelve_triangles() {
        let g = convex_hull_geometry(&cube(), 3, 0.0);
        assert_eq!(g.affine_dim, 3);
        assert_eq!(g.vertices.len(), 8);
        assert_eq!(g.faces.len(), 12);
    }

    #[test]
    fn face_points_pruned() {
        let mut pts = cube();
        pts.insert(0, Vector3::new(0.5, 0.5, 1.0)); // top-face centre, inserted first
        pts.push(Vector3::new(0.5, 0.0, 0.0)); // edge midpoint
        let g = convex_hull_geometry(&pts, 3, 0.0);
        assert_eq!(g.vertices.len(), 8);
        assert!(!g.vertices.contains(&0));
    }

    #[test]
    fn flat_input_reports_planar_affine_dim() {
        let pts = vec![
            Vector3::new(0.0, 0.0, 1.0),
            Vector3::new(1.0, 0.0, 1.0),
            Vector3::new(0.0, 1.0, 1.0),
            Vector3::new(1.0, 1.0, 1.0),
            Vector3::new(0.5, 0.5, 1.0),
        ];
        let g = convex_hull_geometry(&pts, 3, 0.0);
        assert_eq!(g.affine_dim, 2);
        assert_eq!(g.vertices.len(), 4);
        assert!(g.faces.is_empty());
    }

    #[test]
    fn collinear_and_single_points() {
        let pts: Vec<_> = (0..5).map(|i| Vector3::new(i as f64, 2.0 * i as f64, 0.0)).collect();
        let g = convex_hull_geometry(&pts, 3, 0.0);
        assert_eq!(g.affine_dim, 1);
        assert_eq!(g.vertices.len(), 2);
        let g = convex_hull_geometry(&[Vector3::new(1.0, 2.0, 3.0); 3], 3, 0.0);
        assert_eq!(g.affine_dim, 0);
        assert_eq!(g.vertices.len(), 1);
    }

    #[test]
    fn monotone_chain_square_with_collinear_points() {
        let pts = vec![
            Vector2::new(0.0, 0.0),
            Vector2::new(0.5, 0.0),
            Vector2::new(1.0, 0.0),
            Vector2::new(1.0, 1.0),
            Vector2::new(0.0, 1.0),
            Vector2::new(0.5, 0.5),
        ];
        let h = monotone_chain(&pts, 1e-12);
        assert_eq!(h, vec![0, 2, 3, 4]);
    }
}
