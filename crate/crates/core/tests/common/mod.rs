//! Independent brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use reachspan_core::horizon::ProjectionProblem;
use reachspan_core::polytope::Polytope;

/// All k-subsets of 0..n in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Maximum of `c·x` over `Ax ≤ b` by enumerating every basic solution.
/// `None` when no basic solution is feasible. Assumes the feasible set is bounded.
pub fn brute_force_lp(c: &DVector<f64>, a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> Option<f64> {
    let n = a.ncols();
    let mut best: Option<f64> = None;
    for rows in combinations(a.nrows(), n) {
        let sub = DMatrix::from_fn(n, n, |r, col| a[(rows[r], col)]);
        let rhs = DVector::from_iterator(n, rows.iter().map(|&r| b[r]));
        let lu = sub.lu();
        if lu.determinant().abs() < 1e-12 {
            continue;
        }
        let Some(x) = lu.solve(&rhs) else { continue };
        if (a * &x - b).max() <= tol {
            let v = c.dot(&x);
            best = Some(best.map_or(v, |bv: f64| bv.max(v)));
        }
    }
    best
}

/// Every vertex of the box `[lo, hi]` mapped through `p`, plus the offset.
pub fn projected_box_vertices(p: &DMatrix<f64>, lo: &DVector<f64>, hi: &DVector<f64>, offset: &Vector3<f64>) -> Vec<Vector3<f64>> {
    let n = p.ncols();
    (0..1usize << n)
        .map(|mask| {
            let tau = DVector::from_fn(n, |i, _| if mask >> i & 1 == 1 { hi[i] } else { lo[i] });
            let y = p * tau;
            Vector3::new(y[0], y[1], if y.len() > 2 { y[2] } else { 0.0 }) + offset
        })
        .collect()
}

/// Rows of the box `lo ≤ τ ≤ hi` as `Aτ ≤ b`.
pub fn box_rows(lo: &DVector<f64>, hi: &DVector<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let n = lo.len();
    let mut a = DMatrix::zeros(2 * n, n);
    let mut b = DVector::zeros(2 * n);
    for i in 0..n {
        a[(2 * i, i)] = 1.0;
        b[2 * i] = hi[i];
        a[(2 * i + 1, i)] = -1.0;
        b[2 * i + 1] = -lo[i];
    }
    (a, b)
}

/// A torque-box-only problem resembling a manipulator at a short horizon:
/// symmetric limits of 10–90 N·m and P scaled so the polytope spans tens of centimetres.
pub struct BoxProblem {
    pub problem: ProjectionProblem,
    pub lo: DVector<f64>,
    pub hi: DVector<f64>,
    pub offset: Vector3<f64>,
}

pub fn random_box_problem(rng: &mut ChaCha8Rng, n: usize, m: usize) -> BoxProblem {
    let hi = DVector::from_fn(n, |_, _| rng.random_range(10.0..90.0));
    let lo = -&hi;
    let p = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0) * 2e-3);
    let offset = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), if m == 3 { rng.random_range(0.0..1.0) } else { 0.0 });
    let (a, b) = box_rows(&lo, &hi);
    let x_star = DVector::from_iterator(m, offset.iter().take(m).copied());
    BoxProblem {
        problem: ProjectionProblem::from_parts(p, x_star, a, b).unwrap(),
        lo,
        hi,
        offset,
    }
}

fn point_segment_distance(p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared().max(f64::MIN_POSITIVE)).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn point_triangle_distance(p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
    let n = (b - a).cross(&(c - a));
    let area2 = n.norm();
    if area2 > 0.0 {
        let n = n / area2;
        let q = p - n * n.dot(&(p - a));
        // barycentric inside test on the projected point
        let inside = [(a, b), (b, c), (c, a)]
            .iter()
            .all(|(u, v)| (*v - *u).cross(&(q - *u)).dot(&n) >= 0.0);
        if inside {
            return n.dot(&(p - a)).abs();
        }
    }
    point_segment_distance(p, a, b)
        .min(point_segment_distance(p, b, c))
        .min(point_segment_distance(p, c, a))
}

/// Euclidean distance from a point to a full-dimensional polytope (0 inside).
pub fn distance_to_polytope(poly: &Polytope, p: &Vector3<f64>) -> f64 {
    if poly.contains(p, 0.0) {
        return 0.0;
    }
    let v = poly.vertices();
    poly.faces()
        .iter()
        .map(|f| match f.vertices.as_slice() {
            [i, j] => point_segment_distance(p, &v[*i], &v[*j]),
            [i, j, k] => point_triangle_distance(p, &v[*i], &v[*j], &v[*k]),
            _ => unreachable!(),
        })
        .fold(f64::INFINITY, f64::min)
}

/// Hausdorff distance between two full-dimensional polytopes, from their vertex sets.
pub fn hausdorff(a: &Polytope, b: &Polytope) -> f64 {
    let ab = a.vertices().iter().map(|v| distance_to_polytope(b, v)).fold(0.0, f64::max);
    let ba = b.vertices().iter().map(|v| distance_to_polytope(a, v)).fold(0.0, f64::max);
    ab.max(ba)
}

pub fn uniform_in_ball(rng: &mut ChaCha8Rng, radius: f64) -> Vector3<f64> {
    loop {
        let v = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if v.norm() <= 1.0 {
            return v * radius;
        }
    }
}
