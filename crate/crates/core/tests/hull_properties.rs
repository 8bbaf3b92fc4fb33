mod common;

use nalgebra::{DVector, Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reachspan_core::polytope::{convex_hull, export_mesh, hull_union, parse_polytope_json, MeshFormat, Polytope};

fn random_ball(seed: u64, count: usize) -> Vec<Vector3<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| common::uniform_in_ball(&mut rng, 1.0)).collect()
}

fn assert_well_formed(poly: &Polytope) {
    let c = poly.centroid();
    for f in poly.faces() {
        assert!((f.normal.norm() - 1.0).abs() < 1e-9);
        assert!(f.normal.dot(&c) < f.offset, "centroid must be strictly inside every face");
        let v = poly.vertices();
        let [a, b, d] = [v[f.vertices[0]], v[f.vertices[1]], v[f.vertices[2]]];
        assert!((b - a).cross(&(d - a)).dot(&f.normal) > 0.0, "winding must agree with the normal");
    }
    // no vertex lies in the hull of the others
    for i in 0..poly.vertices().len() {
        let others: Vec<_> = poly.vertices().iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
        let rest = Polytope::from_points(3, &others, 0.0);
        assert!(!rest.contains(&poly.vertices()[i], 1e-9));
    }
}

#[test]
fn ball_points_are_contained() {
    let pts = random_ball(3, 200);
    let hull = Polytope::from_points(3, &pts, 0.0);
    for p in &pts {
        assert!(hull.contains(p, 1e-9));
    }
    assert_well_formed(&hull);
    // Euler characteristic of a triangulated sphere
    assert_eq!(hull.vertices().len() as i64 - (3 * hull.faces().len() / 2) as i64 + hull.faces().len() as i64, 2);
}

#[test]
fn cube_with_centre_discarded() {
    let mut pts: Vec<DVector<f64>> = Vec::new();
    for m in 0..8 {
        pts.push(DVector::from_fn(3, |i, _| (m >> i & 1) as f64));
    }
    pts.push(DVector::from_vec(vec![0.5, 0.5, 0.5]));
    let hull = convex_hull(&pts).unwrap();
    assert_eq!(hull.vertices().len(), 8);
    assert_eq!(hull.faces().len(), 12);
    assert!((hull.volume() - 1.0).abs() < 1e-12);
    assert_well_formed(&hull);
}

#[test]
fn volume_invariant_under_rotation() {
    let pts = random_ball(11, 60);
    let rot = Rotation3::from_euler_angles(0.3, -1.1, 2.0);
    let moved: Vec<_> = pts.iter().map(|p| rot * p + Vector3::new(5.0, -2.0, 1.0)).collect();
    let v0 = Polytope::from_points(3, &pts, 0.0).volume();
    let v1 = Polytope::from_points(3, &moved, 0.0).volume();
    assert!((v0 - v1).abs() <= 1e-9 * v0);
}

#[test]
fn union_is_monotone() {
    let a = Polytope::from_points(3, &random_ball(1, 30), 0.0);
    let shifted: Vec<_> = random_ball(2, 30).iter().map(|p| p + Vector3::new(0.8, 0.0, 0.0)).collect();
    let b = Polytope::from_points(3, &shifted, 0.0);
    let u = hull_union(&[a.clone(), b.clone()]).unwrap();
    assert!(u.volume() >= a.volume().max(b.volume()));
    for v in a.vertices().iter().chain(b.vertices()) {
        assert!(u.contains(v, 1e-9));
    }
}

#[test]
fn near_duplicate_points_do_not_break_hull() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let base = random_ball(4, 40);
    let mut pts = base.clone();
    for p in &base {
        pts.push(p + Vector3::new(rng.random_range(-1e-13..1e-13), 0.0, 0.0));
    }
    let hull = Polytope::from_points(3, &pts, 0.0);
    for p in &pts {
        assert!(hull.contains(p, 1e-9));
    }
    assert!((hull.volume() - Polytope::from_points(3, &base, 0.0).volume()).abs() < 1e-9);
}

#[test]
fn obj_export_lists_vertices_and_triangles() {
    let mut pts = Vec::new();
    for m in 0..8 {
        pts.push(Vector3::new((m & 1) as f64, (m >> 1 & 1) as f64, (m >> 2 & 1) as f64));
    }
    let cube = Polytope::from_points(3, &pts, 0.0);
    let obj = String::from_utf8(export_mesh(&cube, MeshFormat::Obj).unwrap()).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 8);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 12);

    // each directed edge appears once and its reverse once: consistent winding
    let mut edges = std::collections::HashSet::new();
    for line in obj.lines().filter(|l| l.starts_with("f ")) {
        let ids: Vec<usize> = line[2..].split_whitespace().map(|t| t.parse().unwrap()).collect();
        for k in 0..3 {
            assert!(edges.insert((ids[k], ids[(k + 1) % 3])));
        }
    }
    for &(a, b) in &edges {
        assert!(edges.contains(&(b, a)));
    }
}

#[test]
fn json_round_trip_is_bitwise() {
    let pts: Vec<_> = random_ball(9, 50).iter().map(|p| p * std::f64::consts::PI).collect();
    let hull = Polytope::from_points(3, &pts, 0.0);
    let text = String::from_utf8(export_mesh(&hull, MeshFormat::Json).unwrap()).unwrap();
    let doc = parse_polytope_json(&text).unwrap();
    assert_eq!(doc.vertices.len(), hull.vertices().len());
    for (v, w) in doc.vertices.iter().zip(hull.vertices()) {
        assert_eq!(v.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), w.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
    }
    assert_eq!(doc.faces.len(), hull.faces().len());
}

#[test]
fn degenerate_obj_export_is_an_error() {
    let flat = [Vector3::zeros(), Vector3::x(), Vector3::y()];
    let p = Polytope::from_points(3, &flat, 0.0);
    assert!(export_mesh(&p, MeshFormat::Obj).is_err());
    assert!(export_mesh(&p, MeshFormat::Json).is_ok());
}

#[test]
fn planar_obj_is_one_counter_clockwise_polygon() {
    let pts = [Vector3::new(1.0, 0.0, 0.0), Vector3::new(0.0, 0.0, 0.0), Vector3::new(1.0, 1.0, 0.0), Vector3::new(0.0, 1.0, 0.0)];
    let p = Polytope::from_points(2, &pts, 0.0);
    let obj = String::from_utf8(export_mesh(&p, MeshFormat::Obj).unwrap()).unwrap();
    let verts: Vec<(f64, f64)> = obj
        .lines()
        .filter_map(|l| l.strip_prefix("v "))
        .map(|l| {
            let f: Vec<f64> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
            assert_eq!(f[2], 0.0);
            (f[0], f[1])
        })
        .collect();
    assert_eq!(verts.len(), 4);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).collect::<Vec<_>>(), vec!["f 1 2 3 4"]);
    // shoelace area is positive for counter-clockwise order
    let area: f64 = (0..4).map(|i| {
        let (a, b) = (verts[i], verts[(i + 1) % 4]);
        a.0 * b.1 - b.0 * a.1
    }).sum::<f64>() / 2.0;
    assert!((area - 1.0).abs() < 1e-12);
}
