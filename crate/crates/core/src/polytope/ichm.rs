//! Iterative convex-hull projection of `{Pτ : Aτ ≤ b}` onto task space.
//!
//! Support points are found by LPs in the directions of the current hull's
//! outward face normals. The face with the largest gap between its plane and
//! the support value is split by the new point until no face gains more than
//! δ. Every vertex is an attained point, so the result lies inside the true
//! projection.
//!
//! Face gaps alone bound the error only along face normals; near sharp
//! corners the true set can stick out further. Every LP also yields a
//! supporting half-space of the true set, and together they form an outer
//! polytope. When certification is on, vertices of that outer polytope lying
//! more than δ from the inner hull are probed with further LPs until none
//! remain, which bounds the Hausdorff distance to the true projection by δ.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use nalgebra::{DMatrix, DVector, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::hull::{geometry_from_hull3, monotone_chain, scale_of, Hull3, HULL_EPS_REL};
use super::lp::{LpOutcome, RowGeneration};
use super::Polytope;
use crate::error::{Error, Result};
use crate::horizon::ProjectionProblem;

const MAX_CERTIFY_ROUNDS: usize = 200;

/// Tuning knobs for [`ichm_with_options`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IchmOptions {
    /// Face-improvement threshold in task-space units.
    pub delta: f64,
    /// Seed for the random seeding directions.
    pub seed: u64,
    /// Safety cap on the number of hull vertices.
    pub max_vertices: usize,
    /// Refine until the outer bound is within δ of the hull, not only the face gaps.
    pub certify_hausdorff: bool,
}

impl IchmOptions {
    pub fn new(delta: f64) -> Self {
        IchmOptions {
            delta,
            seed: 0,
            max_vertices: 20_000,
            certify_hausdorff: true,
        }
    }
}

/// Work counters from one projection.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IchmStats {
    pub lp_solves: usize,
    pub insertions: usize,
    /// Certification rounds run after the face gaps converged.
    pub certify_rounds: usize,
    /// Largest distance from the outer bound to the hull at the last check
    /// (NaN when certification was off or the result is degenerate).
    pub hausdorff_bound: f64,
    /// Set when a safety cap stopped the refinement early.
    pub truncated: bool,
}

/// Projects the problem's constraint polytope with tolerance `delta`.
///
/// Returns an empty polytope when the constraints are infeasible.
pub fn ichm(problem: &ProjectionProblem, delta: f64) -> Result<Polytope> {
    ichm_with_options(problem, &IchmOptions::new(delta)).map(|(p, _)| p)
}

struct Support {
    y: Vector3<f64>,
    tau: DVector<f64>,
}

struct Oracle<'a> {
    lp: RowGeneration,
    p: &'a DMatrix<f64>,
    m: usize,
    solves: usize,
    /// Supporting half-spaces `n·y ≤ s` of the true projection found so far.
    planes: Vec<(Vector3<f64>, f64)>,
}

impl<'a> Oracle<'a> {
    fn new(problem: &'a ProjectionProblem) -> Self {
        Oracle {
            lp: RowGeneration::new(problem.a(), problem.b(), problem.n_limit_rows()),
            p: problem.p(),
            m: problem.task_dim(),
            solves: 0,
            planes: Vec::new(),
        }
    }

    fn lift(&self, v: DVector<f64>) -> Vector3<f64> {
        let mut y = Vector3::zeros();
        y.as_mut_slice()[..self.m].copy_from_slice(v.as_slice());
        y
    }

    /// Support point in unit direction `dir`; `None` when infeasible.
    fn support(&mut self, dir: &Vector3<f64>) -> Result<Option<Support>> {
        let d = DVector::from_column_slice(&dir.as_slice()[..self.m]);
        let c = self.p.tr_mul(&d);
        self.solves += 1;
        match self.lp.maximize(&c) {
            LpOutcome::Optimal { x, .. } => {
                let y = self.lift(self.p * &x);
                self.planes.push((*dir, dir.dot(&y)));
                Ok(Some(Support { y, tau: x }))
            }
            LpOutcome::Infeasible => Ok(None),
            LpOutcome::Unbounded => Err(Error::UnboundedLp),
        }
    }

    fn support_feasible(&mut self, dir: &Vector3<f64>) -> Result<Support> {
        self.support(dir)?
            .ok_or_else(|| Error::Validation("constraint set became infeasible during refinement".into()))
    }
}

#[derive(PartialEq)]
struct Candidate {
    gap: f64,
    face: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gap.total_cmp(&other.gap).then(other.face.cmp(&self.face))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Incremental affine-rank tracking with a separation threshold.
struct AffineBasis {
    origin: Option<Vector3<f64>>,
    basis: Vec<Vector3<f64>>,
    /// Point indices that raised the rank, starting with the origin.
    witnesses: Vec<usize>,
    tol: f64,
}

impl AffineBasis {
    fn offer(&mut self, idx: usize, p: &Vector3<f64>) {
        let Some(origin) = self.origin else {
            self.origin = Some(*p);
            self.witnesses.push(idx);
            return;
        };
        let mut r = p - origin;
        for b in &self.basis {
            r -= b * b.dot(&r);
        }
        let n = r.norm();
        if n > self.tol {
            self.basis.push(r / n);
            self.witnesses.push(idx);
        }
    }

    fn rank(&self) -> usize {
        self.basis.len()
    }
}

/// Full control over the projection. Also returns work counters.
pub fn ichm_with_options(problem: &ProjectionProblem, opts: &IchmOptions) -> Result<(Polytope, IchmStats)> {
    if !(opts.delta > 0.0 && opts.delta.is_finite()) {
        return Err(Error::Validation(format!("delta must be positive, got {}", opts.delta)));
    }
    let m = problem.task_dim();
    let x_star = problem.x_star3();
    let mut oracle = Oracle::new(problem);
    let mut stats = IchmStats {
        hausdorff_bound: f64::NAN,
        ..IchmStats::default()
    };

    let mut points: Vec<Vector3<f64>> = Vec::new();
    let mut taus: Vec<DVector<f64>> = Vec::new();
    let mut basis = AffineBasis {
        origin: None,
        basis: Vec::new(),
        witnesses: Vec::new(),
        tol: 10.0 * opts.delta,
    };

    for axis in 0..m {
        for sign in [1.0, -1.0] {
            let mut dir = Vector3::zeros();
            dir[axis] = sign;
            let Some(s) = oracle.support(&dir)? else {
                stats.lp_solves = oracle.solves;
                return Ok((Polytope::empty(m, opts.delta), stats));
            };
            basis.offer(points.len(), &s.y);
            points.push(s.y);
            taus.push(s.tau);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut extra = 0;
    while basis.rank() < m && extra < 3 * m {
        let mut dir = Vector3::zeros();
        for k in 0..m {
            dir[k] = rng.sample::<f64, _>(StandardNormal);
        }
        for b in &basis.basis {
            dir -= b * b.dot(&dir);
        }
        if dir.norm() < 1e-12 {
            extra += 1;
            continue;
        }
        let dir = dir.normalize();
        for d in [dir, -dir] {
            if extra >= 3 * m || basis.rank() >= m {
                break;
            }
            extra += 1;
            if let Some(s) = oracle.support(&d)? {
                basis.offer(points.len(), &s.y);
                points.push(s.y);
                taus.push(s.tau);
            }
        }
    }

    if basis.rank() < m {
        log::debug!("projection is flat: affine rank {} < {}", basis.rank(), m);
        stats.lp_solves = oracle.solves;
        let shifted: Vec<_> = points.iter().map(|p| p + x_star).collect();
        let poly = Polytope::build(m, &shifted, Some(&taus), 10.0 * opts.delta, opts.delta);
        return Ok((poly, stats));
    }

    let mut refiner = Refiner {
        oracle,
        taus,
        opts,
        stats,
    };
    let points = if m == 3 {
        refiner.refine3(points, &basis.witnesses)?
    } else {
        refiner.refine2(points)?
    };
    let Refiner {
        oracle,
        taus,
        mut stats,
        ..
    } = refiner;
    stats.lp_solves = oracle.solves;

    let shifted: Vec<_> = points.iter().map(|p| p + x_star).collect();
    Ok((Polytope::build(m, &shifted, Some(&taus), 0.0, opts.delta), stats))
}

fn face_gap(support: &Vector3<f64>, normal: &Vector3<f64>, verts: impl Iterator<Item = Vector3<f64>>) -> f64 {
    let plane = verts.map(|v| normal.dot(&v)).fold(f64::NEG_INFINITY, f64::max);
    normal.dot(support) - plane
}

/// Vertices of `{y : n·y ≤ s}` over the given planes, via the polar dual about interior point `c`.
fn outer_vertices(dim: usize, planes: &[(Vector3<f64>, f64)], c: &Vector3<f64>) -> Vec<Vector3<f64>> {
    let dual: Vec<Vector3<f64>> = planes
        .iter()
        .filter_map(|(n, s)| {
            let h = s - n.dot(c);
            (h > 0.0).then(|| n / h)
        })
        .collect();
    let polar = Polytope::from_points(dim, &dual, 0.0);
    if polar.affine_dim() < dim {
        return Vec::new();
    }
    polar
        .faces()
        .iter()
        .filter(|f| f.offset > 0.0)
        .map(|f| c + f.normal / f.offset)
        .collect()
}

struct Refiner<'a, 'o> {
    oracle: Oracle<'a>,
    taus: Vec<DVector<f64>>,
    opts: &'o IchmOptions,
    stats: IchmStats,
}

impl Refiner<'_, '_> {
    /// Outer-bound vertices farther than δ from `inner`, with the probe direction for each.
    fn far_outer_vertices(&mut self, inner: &Polytope) -> Vec<Vector3<f64>> {
        let c = inner.centroid();
        let mut worst: f64 = 0.0;
        let mut probes = Vec::new();
        for o in outer_vertices(inner.dim(), &self.oracle.planes, &c) {
            let Some(q) = inner.closest_point(&o) else { continue };
            let gap = (o - q).norm();
            worst = worst.max(gap);
            if gap > self.opts.delta {
                probes.push((o - q) / gap);
            }
        }
        self.stats.hausdorff_bound = worst;
        probes
    }

    fn certify_round(&mut self) -> bool {
        if !self.opts.certify_hausdorff || self.stats.truncated {
            return false;
        }
        if self.stats.certify_rounds >= MAX_CERTIFY_ROUNDS {
            log::warn!("projection certification stopped after {MAX_CERTIFY_ROUNDS} rounds");
            self.stats.truncated = true;
            return false;
        }
        self.stats.certify_rounds += 1;
        true
    }

    fn refine3(&mut self, points: Vec<Vector3<f64>>, simplex: &[usize]) -> Result<Vec<Vector3<f64>>> {
        let eps = HULL_EPS_REL * scale_of(&points);
        let seeds = points.len();
        let mut hull = Hull3::from_simplex(points, [simplex[0], simplex[1], simplex[2], simplex[3]], eps);
        for i in 0..seeds {
            if !simplex.contains(&i) {
                hull.insert(i, None);
            }
        }

        let mut fresh: Vec<usize> = hull.alive_faces().map(|(i, _)| i).collect();
        loop {
            self.refine_faces3(&mut hull, fresh)?;
            fresh = Vec::new();
            if !self.certify_round() {
                break;
            }
            let ids: Vec<usize> = (0..hull.pts.len()).collect();
            let inner = Polytope::assemble(3, &hull.pts, None, geometry_from_hull3(&hull, &ids), 0.0);
            let probes = self.far_outer_vertices(&inner);
            if probes.is_empty() {
                break;
            }
            for d in probes {
                let s = self.oracle.support_feasible(&d)?;
                if hull.max_violation(&s.y).0 > eps {
                    let idx = hull.push_point(s.y);
                    self.taus.push(s.tau);
                    fresh.extend(hull.insert(idx, None));
                    self.stats.insertions += 1;
                }
            }
        }

        let keep = hull.hull_vertices();
        let taus = std::mem::take(&mut self.taus);
        self.taus = keep.iter().map(|&i| taus[i].clone()).collect();
        Ok(keep.iter().map(|&i| hull.pts[i]).collect())
    }

    fn refine_faces3(&mut self, hull: &mut Hull3, mut fresh: Vec<usize>) -> Result<()> {
        let mut heap = BinaryHeap::new();
        let mut found: HashMap<usize, Support> = HashMap::new();
        loop {
            for f in fresh.drain(..) {
                let face = &hull.faces[f];
                if !face.alive {
                    continue;
                }
                let normal = face.normal;
                let verts: Vec<Vector3<f64>> = face.v.iter().map(|&v| hull.pts[v]).collect();
                let s = self.oracle.support_feasible(&normal)?;
                let gap = face_gap(&s.y, &normal, verts.into_iter());
                if gap > self.opts.delta {
                    heap.push(Candidate { gap, face: f });
                    found.insert(f, s);
                }
            }
            let Some(Candidate { gap, face }) = heap.pop() else {
                return Ok(());
            };
            if !hull.faces[face].alive {
                found.remove(&face);
                continue;
            }
            if hull.pts.len() >= self.opts.max_vertices {
                log::warn!("projection stopped at {} vertices with gap {gap:.3e}", hull.pts.len());
                self.stats.truncated = true;
                return Ok(());
            }
            let s = found.remove(&face).expect("candidate has a support point");
            let idx = hull.push_point(s.y);
            self.taus.push(s.tau);
            fresh = hull.insert(idx, Some(face));
            self.stats.insertions += 1;
        }
    }

    fn refine2(&mut self, mut points: Vec<Vector3<f64>>) -> Result<Vec<Vector3<f64>>> {
        let eps = HULL_EPS_REL * scale_of(&points);
        let mut cache: HashMap<(usize, usize), f64> = HashMap::new();
        loop {
            let planar: Vec<Vector2<f64>> = points.iter().map(|p| p.xy()).collect();
            let ring = monotone_chain(&planar, eps);
            let mut best: Option<(f64, Support)> = None;
            for e in 0..ring.len() {
                let key = (ring[e], ring[(e + 1) % ring.len()]);
                if cache.contains_key(&key) {
                    continue;
                }
                let d = points[key.1] - points[key.0];
                let normal = Vector3::new(d.y, -d.x, 0.0).normalize();
                let s = self.oracle.support_feasible(&normal)?;
                let gap = face_gap(&s.y, &normal, [points[key.0], points[key.1]].into_iter());
                cache.insert(key, gap);
                if gap > self.opts.delta && best.as_ref().is_none_or(|(g, _)| gap > *g) {
                    best = Some((gap, s));
                }
            }
            // Edges are evaluated once; an edge that survives an insertion keeps its gap ≤ δ.
            if let Some((gap, s)) = best {
                if points.len() >= self.opts.max_vertices {
                    log::warn!("projection stopped at {} vertices with gap {gap:.3e}", points.len());
                    self.stats.truncated = true;
                } else {
                    points.push(s.y);
                    self.taus.push(s.tau);
                    self.stats.insertions += 1;
                    continue;
                }
            }
            let ring_pts: Vec<Vector3<f64>> = ring.iter().map(|&i| points[i]).collect();
            let mut inserted = false;
            if self.certify_round() {
                let inner = Polytope::from_points(2, &ring_pts, 0.0);
                for d in self.far_outer_vertices(&inner) {
                    let s = self.oracle.support_feasible(&d)?;
                    if inner.violation(&s.y) > eps {
                        points.push(s.y);
                        self.taus.push(s.tau);
                        self.stats.insertions += 1;
                        inserted = true;
                    }
                }
                if !inserted && self.stats.hausdorff_bound > self.opts.delta {
                    // only cutting planes were added; re-check against the tighter bound
                    continue;
                }
            }
            if !inserted {
                let taus = std::mem::take(&mut self.taus);
                self.taus = ring.iter().map(|&i| taus[i].clone()).collect();
                return Ok(ring_pts);
            }
        }
    }
}

/// Largest LP improvement over any face of `poly` for `problem`.
///
/// A value at most `poly.delta()` certifies that no face can move out by more than δ.
pub fn max_face_gap(problem: &ProjectionProblem, poly: &Polytope) -> Result<f64> {
    let mut oracle = Oracle::new(problem);
    let x_star = problem.x_star3();
    let mut worst: f64 = 0.0;
    for f in poly.faces() {
        let s = oracle.support_feasible(&f.normal)?;
        let verts = f.vertices.iter().map(|&i| poly.vertices()[i]);
        worst = worst.max(face_gap(&(s.y + x_star), &f.normal, verts));
    }
    Ok(worst)
}
