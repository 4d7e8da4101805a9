//! Shared fixtures for unit tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elements::{FeFunction, Space};
use crate::geometry::Point3;
use crate::mesh::{box_mesh, TetMesh};

/// Kuhn mesh of the unit cube with a random vertex numbering, so that both
/// orientation signs occur.
pub fn shuffled_box(seed: u64, n: usize, tag: impl Fn(&Point3) -> usize) -> TetMesh {
    let m = box_mesh(Point3::zeros(), Point3::new(1.0, 1.0, 1.0), [n, n, n], tag).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = m.num_vertices();
    let mut perm: Vec<usize> = (0..nv).collect();
    for i in (1..nv).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut vertices = vec![Point3::zeros(); nv];
    for (old, &new) in perm.iter().enumerate() {
        vertices[new] = *m.vertex(old);
    }
    let tets = m.tets().iter().map(|t| t.map(|v| perm[v])).collect();
    TetMesh::new(vertices, tets, m.tags().to_vec()).unwrap()
}

/// Checkerboard subdomain tag over cells of width `1/n`.
pub fn checkerboard(n: usize) -> impl Fn(&Point3) -> usize {
    move |x: &Point3| {
        let c = |t: f64| (t * n as f64).floor() as usize;
        (c(x.x) + c(x.y) + c(x.z)) % 2
    }
}

/// Two tetrahedra sharing the face `(1, 2, 3)`, tagged 0 and 1.
pub fn two_tets() -> TetMesh {
    let v = vec![
        Point3::zeros(),
        Point3::x(),
        Point3::y(),
        Point3::z(),
        Point3::new(1.0, 1.0, 1.0),
    ];
    TetMesh::new(v, vec![[0, 1, 2, 3], [4, 1, 3, 2]], vec![0, 1]).unwrap()
}

pub fn random_nd0(mesh: &TetMesh, seed: u64) -> FeFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..mesh.num_edges()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    FeFunction::new(Space::Nd0, mesh, values).unwrap()
}
