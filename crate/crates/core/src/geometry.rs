//! Small geometric helpers shared by the mesh and element code.

use nalgebra::{Matrix3, Vector3};

pub type Vec3 = Vector3<f64>;
pub type Point3 = Vector3<f64>;

/// Signed volume of the tetrahedron `(a, b, c, d)`; positive for a
/// right-handed vertex ordering.
pub fn signed_volume(a: &Point3, b: &Point3, c: &Point3, d: &Point3) -> f64 {
    (b - a).cross(&(c - a)).dot(&(d - a)) / 6.0
}

pub fn triangle_area(a: &Point3, b: &Point3, c: &Point3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

/// Precomputed affine data of a tetrahedron.
#[derive(Debug, Clone)]
pub struct TetGeometry {
    pub vertices: [Point3; 4],
    pub volume: f64,
    /// Gradients of the four barycentric coordinates.
    pub grad_lambda: [Vec3; 4],
    /// Longest edge length.
    pub diameter: f64,
}

impl TetGeometry {
    /// Returns `None` for a degenerate or inverted element.
    pub fn new(vertices: [Point3; 4]) -> Option<Self> {
        let [x0, x1, x2, x3] = vertices;
        let jac = Matrix3::from_columns(&[x1 - x0, x2 - x0, x3 - x0]);
        let det = jac.determinant();
        let scale = (x1 - x0)
            .norm()
            .max((x2 - x0).norm())
            .max((x3 - x0).norm());
        if !(det > 1e-14 * scale.powi(3)) {
            return None;
        }
        let inv = jac.try_inverse()?;
        let g1: Vec3 = inv.row(0).transpose();
        let g2: Vec3 = inv.row(1).transpose();
        let g3: Vec3 = inv.row(2).transpose();
        let g0 = -(g1 + g2 + g3);
        let mut diameter: f64 = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                diameter = diameter.max((vertices[j] - vertices[i]).norm());
            }
        }
        Some(Self {
            vertices,
            volume: det / 6.0,
            grad_lambda: [g0, g1, g2, g3],
            diameter,
        })
    }

    pub fn barycentric(&self, x: &Point3) -> [f64; 4] {
        let d = x - self.vertices[0];
        let l1 = self.grad_lambda[1].dot(&d);
        let l2 = self.grad_lambda[2].dot(&d);
        let l3 = self.grad_lambda[3].dot(&d);
        [1.0 - l1 - l2 - l3, l1, l2, l3]
    }

    pub fn point_from_barycentric(&self, l: &[f64; 4]) -> Point3 {
        self.vertices[0] * l[0]
            + self.vertices[1] * l[1]
            + self.vertices[2] * l[2]
            + self.vertices[3] * l[3]
    }

    pub fn centroid(&self) -> Point3 {
        (self.vertices[0] + self.vertices[1] + self.vertices[2] + self.vertices[3]) * 0.25
    }

    /// Outward unit normal of the face opposite local vertex `i`.
    pub fn outward_normal(&self, i: usize) -> Vec3 {
        -self.grad_lambda[i].normalize()
    }

    /// Distance from local vertex `i` to the opposite face.
    pub fn height(&self, i: usize) -> f64 {
        1.0 / self.grad_lambda[i].norm()
    }
}

/// Local vertex triple of the face opposite local vertex `i`, in increasing order.
pub const FACE_VERTICES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

/// Local vertex pairs of the six edges.
pub const EDGE_VERTICES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

/// Local edges lying on the face opposite local vertex `i`.
pub const FACE_EDGES: [[usize; 3]; 4] = [[3, 4, 5], [1, 2, 5], [0, 2, 4], [0, 1, 3]];
