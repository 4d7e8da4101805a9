use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geometry::{Point3, TetGeometry};
use crate::mesh::{box_mesh, build_patches, radius_ratio, TetMesh};
use crate::quadrature::{integrate_tet, segment_rule, tet_rule, triangle_rule};

fn random_tet(rng: &mut impl Rng) -> TetGeometry {
    loop {
        let mut x: [Point3; 4] = std::array::from_fn(|_| Point3::new(rng.gen(), rng.gen(), rng.gen()));
        if crate::geometry::signed_volume(&x[0], &x[1], &x[2], &x[3]) < 0.0 {
            x.swap(2, 3);
        }
        if let Some(g) = TetGeometry::new(x) {
            if radius_ratio(&g) > 0.1 {
                return g;
            }
        }
    }
}

fn edge_moment(g: &TetGeometry, le_basis: usize, le_test: usize) -> f64 {
    let [a, b] = EDGE_VERTICES[le_test];
    let t = (g.vertices[b] - g.vertices[a]).normalize();
    segment_rule(4)
        .unwrap()
        .iter()
        .map(|(p, w)| {
            let mut l = [0.0; 4];
            l[a] = p[0];
            l[b] = p[1];
            w * nd0_basis(g, le_basis, &l).dot(&t)
        })
        .sum()
}

#[test]
fn nd0_duality_on_random_tets() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let g = random_tet(&mut rng);
        for a in 0..6 {
            for b in 0..6 {
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((edge_moment(&g, a, b) - expected).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn nd0_value_at_reference_barycentre() {
    let g = TetGeometry::new([Point3::zeros(), Point3::x(), Point3::y(), Point3::z()]).unwrap();
    // |e| = 1, (∇λ1 − ∇λ0)/4 = ((1,0,0) − (−1,−1,−1))/4
    let v = nd0_basis(&g, 0, &[0.25; 4]);
    assert!((v - Vec3::new(0.5, 0.25, 0.25)).norm() < 1e-15);
}

#[test]
fn nd0_curl_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = random_tet(&mut rng);
    let c = g.centroid();
    let field = |le: usize, x: &Point3| nd0_basis(&g, le, &g.barycentric(x));
    for le in 0..6 {
        let exact = nd0_basis_curl(&g, le);
        for h in [1e-2, 5e-3, 2.5e-3] {
            let d = |i: usize, j: usize| {
                let mut e = Vec3::zeros();
                e[j] = h;
                (field(le, &(c + e))[i] - field(le, &(c - e))[i]) / (2.0 * h)
            };
            let fd = Vec3::new(d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1));
            // The field is affine, so central differences are exact up to rounding.
            assert!((fd - exact).norm() < 1e-9 * (1.0 + exact.norm()));
        }
    }
}

fn face_lambda(f: usize, p: &[f64; 3]) -> [f64; 4] {
    let mut l = [0.0; 4];
    for (s, &v) in FACE_VERTICES[f].iter().enumerate() {
        l[v] = p[s];
    }
    l
}

#[test]
fn bdm1_duality_and_normal_traces() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rule = triangle_rule(4).unwrap();
    for _ in 0..100 {
        let g = random_tet(&mut rng);
        for i in 0..4 {
            for &j in &FACE_VERTICES[i] {
                for f in 0..4 {
                    let n = g.outward_normal(f);
                    for &m in &FACE_VERTICES[f] {
                        let moment: f64 = rule
                            .iter()
                            .map(|(p, w)| {
                                let l = face_lambda(f, p);
                                w * bdm1_basis(&g, i, j, &l).dot(&n) * l[m]
                            })
                            .sum();
                        let expected = if f == i && m == j { 1.0 } else { 0.0 };
                        assert!((moment - expected).abs() < 1e-12, "face {i} vertex {j} / face {f} vertex {m}: {moment}");
                    }
                    if f != i {
                        for (p, _) in rule.iter() {
                            assert!(bdm1_basis(&g, i, j, &face_lambda(f, p)).dot(&n).abs() < 1e-11);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn bdm1_divergence_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = random_tet(&mut rng);
    let c = g.centroid();
    let h = 1e-3;
    for i in 0..4 {
        for &j in &FACE_VERTICES[i] {
            let fd: f64 = (0..3)
                .map(|d| {
                    let mut e = Vec3::zeros();
                    e[d] = h;
                    let plus = bdm1_basis(&g, i, j, &g.barycentric(&(c + e)))[d];
                    let minus = bdm1_basis(&g, i, j, &g.barycentric(&(c - e)))[d];
                    (plus - minus) / (2.0 * h)
                })
                .sum();
            assert!((fd - bdm1_basis_div(&g, i)).abs() < 1e-8 * bdm1_basis_div(&g, i));
        }
    }
}

#[test]
fn partition_of_unity_at_quadrature_nodes() {
    for order in 0..=6 {
        for (l, _) in tet_rule(order).unwrap().iter() {
            assert!((l.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        }
    }
}

#[test]
fn triangle_barycentric_moment() {
    for i in 0..3 {
        let m: f64 = triangle_rule(2).unwrap().iter().map(|(l, w)| w * l[i]).sum();
        assert!((m - 1.0 / 3.0).abs() < 1e-14);
    }
}

fn shuffled_mesh(seed: u64) -> TetMesh {
    // Random vertex numbering exercises both orientation signs.
    let m = box_mesh(Point3::zeros(), Point3::new(1.0, 1.0, 1.0), [2, 2, 2], |x| (x.x > 0.5) as usize).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = m.num_vertices();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut vertices = vec![Point3::zeros(); n];
    for (old, &new) in perm.iter().enumerate() {
        vertices[new] = *m.vertex(old);
    }
    let tets = m.tets().iter().map(|t| t.map(|v| perm[v])).collect();
    TetMesh::new(vertices, tets, m.tags().to_vec()).unwrap()
}

#[test]
fn local_expansion_matches_signed_basis_sum() {
    let m = shuffled_mesh(5);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let u: Vec<f64> = (0..m.num_edges()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let w: Vec<f64> = (0..3 * m.num_faces()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let fu = FeFunction::new(Space::Nd0, &m, u.clone()).unwrap();
    let fw = FeFunction::new(Space::Bdm1, &m, w.clone()).unwrap();
    let l = [0.1, 0.2, 0.3, 0.4];
    for k in 0..m.num_tets() {
        let g = m.geometry(k);
        let direct: Vec3 = (0..6)
            .map(|le| nd0_basis(g, le, &l) * (m.tet_edge_signs(k)[le] * u[m.tet_edges(k)[le]]))
            .sum();
        assert!((fu.eval(&m, k, &l) - direct).norm() < 1e-12);
        let curl: Vec3 = (0..6)
            .map(|le| nd0_basis_curl(g, le) * (m.tet_edge_signs(k)[le] * u[m.tet_edges(k)[le]]))
            .sum();
        assert!((fu.curl(&m, k) - curl).norm() < 1e-11);
        let mut direct = Vec3::zeros();
        let mut div = 0.0;
        for i in 0..4 {
            let f = m.tet_faces(k)[i];
            for &j in &FACE_VERTICES[i] {
                let slot = face_vertex_slot(&m, f, m.tet(k)[j]).unwrap();
                let c = m.tet_face_signs(k)[i] * w[3 * f + slot];
                direct += bdm1_basis(g, i, j, &l) * c;
                div += bdm1_basis_div(g, i) * c;
            }
        }
        assert!((fw.eval(&m, k, &l) - direct).norm() < 1e-11);
        assert!((fw.div(&m, k) - div).abs() < 1e-10);
    }
}

#[test]
fn global_functions_are_conforming() {
    let m = shuffled_mesh(8);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let u = FeFunction::new(Space::Nd0, &m, (0..m.num_edges()).map(|_| rng.gen()).collect()).unwrap();
    let w = FeFunction::new(Space::Bdm1, &m, (0..3 * m.num_faces()).map(|_| rng.gen()).collect()).unwrap();
    for f in 0..m.num_faces() {
        let adj = m.face_adjacency(f);
        let (Some(km), Some(kp)) = (adj.minus, adj.plus) else { continue };
        let n = m.face_normal(f);
        for z in m.face(f) {
            let lm = m.local_vertex(km, z).unwrap();
            let lp = m.local_vertex(kp, z).unwrap();
            let (um, up) = (u.local(&m, km)[lm], u.local(&m, kp)[lp]);
            assert!((um - up).cross(n).norm() < 1e-12);
            let (wm, wp) = (w.local(&m, km)[lm], w.local(&m, kp)[lp]);
            assert!((wm - wp).dot(n).abs() < 1e-11);
        }
    }
}

#[test]
fn nedelec_interpolation_properties() {
    let m = shuffled_mesh(10);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u = FeFunction::new(Space::Nd0, &m, (0..m.num_edges()).map(|_| rng.gen()).collect()).unwrap();
    // Projection property. Tangential traces agree between elements, so any
    // element containing the edge point may evaluate it.
    let locate = |x: &Point3| {
        (0..m.num_tets())
            .find(|&k| m.geometry(k).barycentric(x).iter().all(|l| *l > -1e-12))
            .unwrap()
    };
    let pu = nedelec_interpolate(&m, |x| {
        let k = locate(x);
        u.eval(&m, k, &m.geometry(k).barycentric(x))
    });
    for (a, b) in pu.values().iter().zip(u.values()) {
        assert!((a - b).abs() < 1e-12);
    }
    let c = Vec3::new(0.3, -1.0, 2.0);
    let pc = nedelec_interpolate(&m, |_| c);
    for e in 0..m.num_edges() {
        assert!((pc.values()[e] - c.dot(m.edge_tangent(e))).abs() < 1e-14);
    }
    // (y, z, x) is affine, so its edge mean is its value at the midpoint.
    let pl = nedelec_interpolate(&m, |x| Vec3::new(x.y, x.z, x.x));
    for e in 0..m.num_edges() {
        let [a, b] = m.edge(e);
        let mid = (m.vertex(a) + m.vertex(b)) * 0.5;
        let exact = Vec3::new(mid.y, mid.z, mid.x).dot(m.edge_tangent(e));
        assert!((pl.values()[e] - exact).abs() < 1e-14);
    }
}

#[test]
fn potential_interpolation_is_exact_for_gradients() {
    let m = shuffled_mesh(12);
    let psi = |x: &Point3| x.x * x.x - 2.0 * x.y * x.z + x.z;
    let grad = |x: &Point3| Vec3::new(2.0 * x.x, -2.0 * x.z, 1.0 - 2.0 * x.y);
    let a = nedelec_interpolate_potential(&m, psi);
    let b = nedelec_interpolate(&m, grad);
    for (x, y) in a.values().iter().zip(b.values()) {
        assert!((x - y).abs() < 1e-13);
    }
}

#[test]
fn clement_interpolation_properties() {
    let m = box_mesh(Point3::zeros(), Point3::new(1.0, 1.0, 1.0), [3, 3, 3], |x| (x.x > 0.5) as usize).unwrap();
    let c = CoefficientField::from_mu_inv(vec![1.0, 100.0], vec![1.0, 1.0]).unwrap();
    let p = build_patches(&m, &c);

    let v = Vec3::new(1.0, 2.0, -0.5);
    let cv = clement_interpolate(&m, &p, 1, |_, _| v).unwrap();
    for e in 0..m.num_edges() {
        if m.is_boundary_edge(e) {
            assert_eq!(cv.values()[e], 0.0);
        } else {
            assert!((cv.values()[e] - v.dot(m.edge_tangent(e))).abs() < 1e-13);
        }
    }
    for k in 0..m.num_tets() {
        if m.tet_edges(k).iter().all(|&e| !m.is_boundary_edge(e)) {
            assert!((cv.eval(&m, k, &[0.25; 4]) - v).norm() < 1e-12);
        }
    }

    // Piecewise-linear field, discontinuous across the interface, compared
    // with a brute-force patch integration.
    let field = |k: usize, x: &Point3| {
        if m.tag(k) == 1 {
            Vec3::new(x.y, 1.0 + x.x, x.z * 2.0)
        } else {
            Vec3::new(-x.z, x.x, 3.0)
        }
    };
    let cf = clement_interpolate(&m, &p, 2, field).unwrap();
    for e in 0..m.num_edges() {
        if m.is_boundary_edge(e) {
            assert_eq!(cf.values()[e], 0.0);
            continue;
        }
        let set = p.edge_max_mu_inv(e);
        let mut acc = 0.0;
        let mut vol = 0.0;
        for &k in set {
            acc += integrate_tet(m.geometry(k), 8, |x, _| field(k, x).dot(m.edge_tangent(e))).unwrap();
            vol += m.volume(k);
        }
        assert!((cf.values()[e] - acc / vol).abs() < 1e-12);
    }
}

#[test]
fn function_space_checks() {
    let m = box_mesh(Point3::zeros(), Point3::new(1.0, 1.0, 1.0), [1, 1, 1], |_| 0).unwrap();
    assert!(FeFunction::new(Space::Nd0, &m, vec![0.0; 3]).is_err());
    let f = FeFunction::zeros(Space::Bdm1, &m);
    assert_eq!(f.values().len(), 54);
    assert!(f.check(Space::Nd0, &m).is_err());
}

#[test]
fn coefficient_validation_and_face_values() {
    assert!(CoefficientField::new(vec![1.0, -1.0], vec![1.0, 1.0]).is_err());
    assert!(CoefficientField::new(vec![1.0], vec![1.0, 1.0]).is_err());
    let m = box_mesh(Point3::zeros(), Point3::new(2.0, 1.0, 1.0), [2, 1, 1], |x| (x.x > 1.0) as usize).unwrap();
    let c = CoefficientField::new(vec![2.0, 0.5], vec![1.0, 4.0]).unwrap();
    assert!(CoefficientField::uniform(1.0, 1.0).unwrap().validate(&m).is_err());
    let mut seen = 0;
    for f in 0..m.num_faces() {
        let adj = m.face_adjacency(f);
        if let (Some(a), Some(b)) = (adj.minus, adj.plus) {
            if m.tag(a) != m.tag(b) {
                assert!((c.face_mu_inv(&m, f) - 0.5 * (0.5 + 2.0)).abs() < 1e-15);
                assert!((c.face_beta(&m, f) - 2.5).abs() < 1e-15);
                seen += 1;
            }
        }
    }
    assert_eq!(seen, 2);
}
