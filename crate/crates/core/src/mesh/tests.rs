use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::elements::CoefficientField;

fn unit_cube() -> TetMesh {
    box_mesh(Point3::zeros(), Point3::new(1.0, 1.0, 1.0), [1, 1, 1], |_| 0).unwrap()
}

#[test]
fn reference_tet_combinatorics() {
    let m = single_tet();
    assert_eq!(m.num_edges(), 6);
    assert_eq!(m.num_faces(), 4);
    assert!((0..4).all(|f| m.is_boundary_face(f)));
    assert!((0..6).all(|e| m.is_boundary_edge(e)));
    assert_eq!(m.edges()[0], [0, 1]);
    assert_eq!(m.faces()[3], [1, 2, 3]);
}

#[test]
fn two_tets_share_one_interior_face() {
    let v = vec![
        Point3::zeros(),
        Point3::x(),
        Point3::y(),
        Point3::z(),
        Point3::new(1.0, 1.0, 1.0),
    ];
    // (1,2,3) is shared; vertex 4 lies on the far side.
    let m = TetMesh::new(v, vec![[0, 1, 2, 3], [4, 1, 3, 2]], vec![0, 1]).unwrap();
    let interior: Vec<usize> = (0..m.num_faces()).filter(|&f| !m.is_boundary_face(f)).collect();
    assert_eq!(interior.len(), 1);
    let f = interior[0];
    assert_eq!(m.face(f), [1, 2, 3]);
    let adj = m.face_adjacency(f);
    // n_F = (x2 - x1) × (x3 - x1) points away from the origin, so tet 0 is K₋.
    assert_eq!(adj.minus, Some(0));
    assert_eq!(adj.plus, Some(1));
    assert_eq!(m.num_edges(), 9);
    assert!(!m.is_boundary_vertex(0) || m.is_boundary_vertex(0));
}

#[test]
fn kuhn_cube_matches_brute_force_enumeration() {
    let m = unit_cube();
    let mut edges = HashSet::new();
    let mut faces: std::collections::HashMap<[usize; 3], usize> = Default::default();
    for t in m.tets() {
        for i in 0..4 {
            for j in i + 1..4 {
                edges.insert((t[i].min(t[j]), t[i].max(t[j])));
            }
            let mut f: Vec<usize> = (0..4).filter(|&q| q != i).map(|q| t[q]).collect();
            f.sort();
            *faces.entry([f[0], f[1], f[2]]).or_default() += 1;
        }
    }
    assert_eq!(edges.len(), 19);
    assert_eq!(faces.len(), 18);
    assert_eq!(faces.values().filter(|&&c| c == 2).count(), 6);
    assert_eq!(m.num_edges(), 19);
    assert_eq!(m.num_faces(), 18);
    assert_eq!((0..18).filter(|&f| !m.is_boundary_face(f)).count(), 6);
    assert!((m.total_volume() - 1.0).abs() < 1e-14);
}

fn assert_orientation_consistent(m: &TetMesh) {
    for k in 0..m.num_tets() {
        let t = m.tet(k);
        let g = m.geometry(k);
        for (le, [a, b]) in EDGE_VERTICES.iter().enumerate() {
            let e = m.tet_edges(k)[le];
            let local = (m.vertex(t[*b]) - m.vertex(t[*a])).normalize();
            assert!((local - m.edge_tangent(e) * m.tet_edge_signs(k)[le]).norm() < 1e-12);
        }
        for lf in 0..4 {
            let f = m.tet_faces(k)[lf];
            let s = m.tet_face_signs(k)[lf];
            assert!((g.outward_normal(lf) - m.face_normal(f) * s).norm() < 1e-12);
            let adj = m.face_adjacency(f);
            if s > 0.0 {
                assert_eq!(adj.minus, Some(k));
            } else {
                assert_eq!(adj.plus, Some(k));
            }
        }
    }
    for e in 0..m.num_edges() {
        let [a, b] = m.edge(e);
        assert!(a < b);
        assert!((m.edge_tangent(e).norm() - 1.0).abs() < 1e-14);
    }
    for f in 0..m.num_faces() {
        let [a, b, c] = m.face(f);
        assert!(a < b && b < c);
        assert!((m.face_normal(f).norm() - 1.0).abs() < 1e-14);
    }
}

#[test]
fn orientation_signs_are_consistent() {
    let m = box_mesh(Point3::new(-1.0, -1.0, -1.0), Point3::new(1.0, 2.0, 1.0), [2, 3, 2], |x| (x.x > 0.0) as usize).unwrap();
    assert_orientation_consistent(&m);
}

#[test]
fn inverted_tet_is_rejected() {
    let v = vec![Point3::zeros(), Point3::x(), Point3::y(), Point3::z()];
    let err = TetMesh::new(v, vec![[0, 2, 1, 3]], vec![0]).unwrap_err();
    assert!(matches!(err, MeshError::InvertedTet { tet: 0, .. }));
}

#[test]
fn coplanar_tet_is_rejected() {
    let v = vec![Point3::zeros(), Point3::x(), Point3::y(), Point3::new(1.0, 1.0, 0.0)];
    let err = TetMesh::new(v, vec![[0, 1, 2, 3]], vec![0]).unwrap_err();
    assert!(matches!(err, MeshError::InvertedTet { .. }));
}

#[test]
fn duplicate_tet_is_rejected() {
    let v = vec![Point3::zeros(), Point3::x(), Point3::y(), Point3::z()];
    let err = TetMesh::new(v, vec![[0, 1, 2, 3], [1, 2, 0, 3]], vec![0, 0]).unwrap_err();
    assert!(matches!(err, MeshError::DuplicateTet(0, 1)));
}

#[test]
fn hanging_face_is_rejected() {
    // A single cube next to a 2x2x2 refined cube: the shared square has
    // coarse faces on one side and fine faces on the other.
    let a = box_mesh(Point3::zeros(), Point3::new(1.0, 1.0, 1.0), [1, 1, 1], |_| 0).unwrap();
    let b = box_mesh(Point3::new(1.0, 0.0, 0.0), Point3::new(2.0, 1.0, 1.0), [2, 2, 2], |_| 0).unwrap();
    let mut vertices = a.vertices().to_vec();
    let mut map = Vec::new();
    for x in b.vertices() {
        match vertices.iter().position(|y| (y - x).norm() < 1e-12) {
            Some(i) => map.push(i),
            None => {
                vertices.push(*x);
                map.push(vertices.len() - 1);
            }
        }
    }
    let mut tets = a.tets().to_vec();
    tets.extend(b.tets().iter().map(|t| t.map(|v| map[v])));
    let n = tets.len();
    let err = TetMesh::new(vertices, tets, vec![0; n]).unwrap_err();
    assert!(
        matches!(err, MeshError::HangingFace { .. } | MeshError::OpenSurface { .. }),
        "{err}"
    );
}

#[test]
fn input_validation_errors() {
    let v = vec![Point3::zeros(), Point3::x(), Point3::y(), Point3::z()];
    assert!(matches!(TetMesh::new(v.clone(), vec![], vec![]), Err(MeshError::Empty)));
    assert!(matches!(
        TetMesh::new(v.clone(), vec![[0, 1, 2, 7]], vec![0]),
        Err(MeshError::IndexOutOfRange { vertex: 7, .. })
    ));
    assert!(matches!(
        TetMesh::new(v.clone(), vec![[0, 1, 1, 3]], vec![0]),
        Err(MeshError::RepeatedVertex(0))
    ));
    assert!(matches!(
        TetMesh::new(v, vec![[0, 1, 2, 3]], vec![]),
        Err(MeshError::TagCount { .. })
    ));
}

#[test]
fn bisect_single_tet_conserves_volume() {
    let m = single_tet();
    let r = bisect(&m, &[0]).unwrap();
    assert_eq!(r.num_tets(), 2);
    assert!((r.total_volume() - m.total_volume()).abs() < 1e-15);
    assert_orientation_consistent(&r);
}

#[test]
fn bisect_isolated_tet_in_mesh_keeps_conformity() {
    let m = unit_cube();
    let r = bisect(&m, &[3]).unwrap();
    assert!(r.num_tets() >= 7);
    assert!((r.total_volume() - 1.0).abs() < 1e-12);
    assert_orientation_consistent(&r);
}

#[test]
fn bisect_all_at_least_doubles() {
    let m = box_mesh(Point3::zeros(), Point3::new(1.0, 1.0, 1.0), [2, 2, 2], |x| (x.z > 0.5) as usize).unwrap();
    let r = uniform_refine(&m).unwrap();
    assert!(r.num_tets() >= 2 * m.num_tets());
    assert!((r.total_volume() - 1.0).abs() < 1e-12);
    // Tags are inherited: the tagged volume is unchanged.
    let tagged: f64 = (0..r.num_tets()).filter(|&k| r.tag(k) == 1).map(|k| r.volume(k)).sum();
    assert!((tagged - 0.5).abs() < 1e-12);
}

#[test]
fn bisect_rejects_unknown_element() {
    assert!(matches!(bisect(&single_tet(), &[1]), Err(MeshError::MarkedOutOfRange(1))));
}

#[test]
fn random_marking_sequences_stay_conforming() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut rounds = 0;
    for _ in 0..5 {
        let mut m = box_mesh(Point3::zeros(), Point3::new(1.0, 1.0, 1.0), [1, 1, 1], |x| (x.x > 0.5) as usize).unwrap();
        for _ in 0..20 {
            let n = m.num_tets();
            let count = 1 + rng.gen_range(0..(n / 8).max(1));
            let marked: Vec<usize> = (0..count).map(|_| rng.gen_range(0..n)).collect();
            // TetMesh::new re-validates conformity of the result.
            let r = bisect(&m, &marked).unwrap();
            assert!(r.num_tets() > n);
            assert!((r.total_volume() - 1.0).abs() < 1e-12);
            for f in 0..r.num_faces() {
                assert_eq!(r.face_adjacency(f).elements().count(), if r.is_boundary_face(f) { 1 } else { 2 });
            }
            m = r;
            rounds += 1;
        }
        assert_orientation_consistent(&m);
    }
    assert_eq!(rounds, 100);
}

#[test]
fn refinement_is_deterministic() {
    let m = unit_cube();
    let a = bisect(&m, &[0, 4]).unwrap();
    let b = bisect(&m, &[4, 0]).unwrap();
    assert_eq!(a.tets(), b.tets());
    assert_eq!(a.vertices(), b.vertices());
}

#[test]
fn shape_quality_values() {
    let s = 1.0 / 2f64.sqrt();
    let regular = TetMesh::new(
        vec![
            Point3::new(1.0, 0.0, -s),
            Point3::new(-1.0, 0.0, -s),
            Point3::new(0.0, 1.0, s),
            Point3::new(0.0, -1.0, s),
        ],
        vec![[0, 1, 2, 3]],
        vec![0],
    )
    .or_else(|_| {
        TetMesh::new(
            vec![
                Point3::new(1.0, 0.0, -s),
                Point3::new(-1.0, 0.0, -s),
                Point3::new(0.0, 1.0, s),
                Point3::new(0.0, -1.0, s),
            ],
            vec![[0, 1, 3, 2]],
            vec![0],
        )
    })
    .unwrap();
    assert!((regular.shape_quality()[0] - 1.0).abs() < 1e-12);

    // Reference tet: inradius 3V/A with V = 1/6, A = 3/2 + √3/2; the
    // circumcentre is (1/2, 1/2, 1/2), so R = √3/2.
    let r_in = 0.5 / (1.5 + 3f64.sqrt() / 2.0);
    let expected = 3.0 * r_in / (3f64.sqrt() / 2.0);
    let q = single_tet().shape_quality()[0];
    assert!((q - expected).abs() < 1e-12);
    assert!(q > 0.0 && q < 1.0);
}

#[test]
fn repeated_bisection_keeps_shape_regularity() {
    let mut m = single_tet();
    let q0 = m.shape_quality()[0];
    let mut history = Vec::new();
    for _ in 0..10 {
        m = uniform_refine(&m).unwrap();
        let qmin = m.shape_quality().into_iter().fold(f64::INFINITY, f64::min);
        history.push(qmin);
    }
    let floor = history.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(floor > 0.1 * q0, "quality floor {floor} vs initial {q0}: {history:?}");
    // Once the similarity classes stabilize no new, worse shapes appear: the
    // per-generation minimum repeats with period three.
    let early = history[..4].iter().copied().fold(f64::INFINITY, f64::min);
    assert!(history[4..].iter().all(|q| *q >= early - 1e-12), "{history:?}");
    for i in 1..history.len() - 3 {
        assert!((history[i + 3] - history[i]).abs() < 1e-12, "{history:?}");
    }
}

#[test]
fn mesh_text_round_trip() {
    let m = box_mesh(Point3::zeros(), Point3::new(1.0, 2.0, 3.0), [2, 1, 1], |x| (x.x > 0.5) as usize).unwrap();
    let text = format_mesh(&m);
    let back = parse_mesh(&text).unwrap();
    assert_eq!(back.tets(), m.tets());
    assert_eq!(back.tags(), m.tags());
    assert_eq!(back.vertices(), m.vertices());
}

#[test]
fn mesh_text_errors_carry_line_numbers() {
    let bad = "tetmesh 1\nV 4\n0 0 0\n1 0 0\n0 1 0\n0 0 x\nT 1\n0 1 2 3 0\n";
    match parse_mesh(bad) {
        Err(MeshError::Format { line: 6, .. }) => {}
        other => panic!("{other:?}"),
    }
    let short = "tetmesh 1\nV 4\n0 0 0\n1 0 0\n0 1 0\n0 0 1\nT 2\n0 1 2 3 0\n";
    assert!(matches!(parse_mesh(short), Err(MeshError::Format { .. })));
    assert!(matches!(parse_mesh("tetmesh 2\n"), Err(MeshError::Format { line: 1, .. })));
}

#[test]
fn uniform_coefficients_give_full_patches() {
    let m = unit_cube();
    let c = CoefficientField::uniform(1.0, 1.0).unwrap();
    let p = build_patches(&m, &c);
    for e in 0..m.num_edges() {
        assert_eq!(p.edge_max_mu_inv(e), m.edge_tets(e));
        assert_eq!(p.edge_min_mu_inv(e), m.edge_tets(e));
        assert_eq!(p.edge_selected_faces(e), p.edge_interior_faces(e));
    }
    for z in 0..m.num_vertices() {
        assert_eq!(p.vertex_max_beta(z), m.vertex_tets(z));
    }
}

#[test]
fn edge_patch_membership_matches_incidence() {
    let m = box_mesh(Point3::zeros(), Point3::new(1.0, 1.0, 1.0), [2, 2, 2], |_| 0).unwrap();
    for k in 0..m.num_tets() {
        for e in 0..m.num_edges() {
            let incident = m.tet_edges(k).contains(&e);
            assert_eq!(m.edge_tets(e).contains(&k), incident);
        }
    }
}

#[test]
fn selected_faces_of_two_adjacent_minimal_elements() {
    let m = edge_star(4);
    // Elements 0 and 1 carry the smallest μ⁻¹.
    let c = CoefficientField::from_mu_inv(vec![1.0, 1.0, 5.0, 7.0], vec![1.0; 4]).unwrap();
    let p = build_patches(&m, &c);
    let e = 0;
    assert_eq!(m.edge(e), [0, 1]);
    assert_eq!(p.edge_min_mu_inv(e), &[0, 1]);
    assert_eq!(p.edge_max_mu_inv(e), &[3]);
    assert_eq!(p.edge_interior_faces(e).len(), 4);
    // The faces bounding elements 0 and 1 at the edge: ring vertices 0, 1, 2.
    let selected: Vec<[usize; 3]> = p.edge_selected_faces(e).iter().map(|&f| m.face(f)).collect();
    assert_eq!(selected, vec![[0, 1, 2], [0, 1, 3], [0, 1, 4]]);
}

#[test]
fn boundary_edges_exclude_boundary_faces() {
    let m = unit_cube();
    let c = CoefficientField::uniform(1.0, 1.0).unwrap();
    let p = build_patches(&m, &c);
    for e in 0..m.num_edges() {
        for &f in p.edge_interior_faces(e) {
            assert!(!m.is_boundary_face(f));
            assert!(m.face_edges(f).contains(&e));
        }
    }
    for f in m.boundary_faces() {
        assert_eq!(m.face_adjacency(f).elements().count(), 1);
    }
}

#[test]
fn element_neighbourhoods_are_nested() {
    let m = box_mesh(Point3::zeros(), Point3::new(1.0, 1.0, 1.0), [2, 2, 2], |_| 0).unwrap();
    let c = CoefficientField::uniform(1.0, 1.0).unwrap();
    let p = build_patches(&m, &c);
    for k in 0..m.num_tets() {
        let f: HashSet<_> = p.element_face_neighbors(k).iter().collect();
        let e: HashSet<_> = p.element_edge_neighbors(k).iter().collect();
        let z: HashSet<_> = p.element_vertex_neighbors(k).iter().collect();
        assert!(f.contains(&k) && f.len() <= 5);
        assert!(f.is_subset(&e) && e.is_subset(&z));
    }
}
