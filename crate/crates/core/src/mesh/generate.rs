//! Structured mesh generators.

use super::{MeshError, TetMesh};
use crate::geometry::{signed_volume, Point3};

/// Kuhn subdivision of the box `[lo, hi]` into `n[0] × n[1] × n[2]` cubes with
/// six tetrahedra each. `tag` is evaluated at every element centroid.
pub fn box_mesh<F>(lo: Point3, hi: Point3, n: [usize; 3], tag: F) -> Result<TetMesh, MeshError>
where
    F: Fn(&Point3) -> usize,
{
    if n.contains(&0) {
        return Err(MeshError::Empty);
    }
    let [nx, ny, nz] = n;
    let id = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + (ny + 1) * k);
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                let s = [i as f64 / nx as f64, j as f64 / ny as f64, k as f64 / nz as f64];
                vertices.push(Point3::new(
                    lo.x + s[0] * (hi.x - lo.x),
                    lo.y + s[1] * (hi.y - lo.y),
                    lo.z + s[2] * (hi.z - lo.z),
                ));
            }
        }
    }
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut tets = Vec::with_capacity(6 * nx * ny * nz);
    let mut tags = Vec::with_capacity(6 * nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                for perm in PERMS {
                    let mut c = [i, j, k];
                    let mut t = [id(c[0], c[1], c[2]), 0, 0, 0];
                    for (step, &axis) in perm.iter().enumerate() {
                        c[axis] += 1;
                        t[step + 1] = id(c[0], c[1], c[2]);
                    }
                    let x = t.map(|v| vertices[v]);
                    if signed_volume(&x[0], &x[1], &x[2], &x[3]) < 0.0 {
                        t.swap(2, 3);
                    }
                    let centroid = t.iter().map(|&v| vertices[v]).sum::<Point3>() / 4.0;
                    tets.push(t);
                    tags.push(tag(&centroid));
                }
            }
        }
    }
    TetMesh::new(vertices, tets, tags)
}

/// The reference tetrahedron with a single subdomain.
pub fn single_tet() -> TetMesh {
    TetMesh::new(
        vec![Point3::zeros(), Point3::x(), Point3::y(), Point3::z()],
        vec![[0, 1, 2, 3]],
        vec![0],
    )
    .expect("reference tetrahedron is valid")
}

/// `n ≥ 3` elements around the edge from `(0,0,-1)` to `(0,0,1)`, which is
/// edge 0. Element `i` lies between the ring vertices `i` and `i + 1` and has
/// tag `i`.
pub fn edge_star(n: usize) -> TetMesh {
    assert!(n >= 3, "an edge star needs at least three elements");
    let mut vertices = vec![Point3::new(0.0, 0.0, -1.0), Point3::new(0.0, 0.0, 1.0)];
    for i in 0..n {
        let t = std::f64::consts::TAU * i as f64 / n as f64;
        vertices.push(Point3::new(t.cos(), t.sin(), 0.0));
    }
    let tets = (0..n)
        .map(|i| {
            let mut t = [0, 1, 2 + i, 2 + (i + 1) % n];
            let x = t.map(|v| vertices[v]);
            if signed_volume(&x[0], &x[1], &x[2], &x[3]) < 0.0 {
                t.swap(2, 3);
            }
            t
        })
        .collect();
    TetMesh::new(vertices, tets, (0..n).collect()).expect("edge star is valid")
}

/// The octahedron `|x| + |y| + |z| ≤ 1` split into its eight octants around
/// the origin (vertex 0). The tag of an octant has bit `c` set when the
/// octant lies on the negative side of axis `c`.
pub fn octant_star() -> TetMesh {
    let mut vertices = vec![Point3::zeros()];
    for c in 0..3 {
        for s in [1.0, -1.0] {
            let mut x = Point3::zeros();
            x[c] = s;
            vertices.push(x);
        }
    }
    let mut tets = Vec::new();
    let mut tags = Vec::new();
    for tag in 0..8usize {
        let axis = |c: usize| 1 + 2 * c + ((tag >> c) & 1);
        let mut t = [0, axis(0), axis(1), axis(2)];
        let x = t.map(|v| vertices[v]);
        if signed_volume(&x[0], &x[1], &x[2], &x[3]) < 0.0 {
            t.swap(2, 3);
        }
        tets.push(t);
        tags.push(tag);
    }
    TetMesh::new(vertices, tets, tags).expect("octahedron is valid")
}
