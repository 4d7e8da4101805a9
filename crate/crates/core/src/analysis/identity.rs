//! The weighted norm identity for piecewise smooth fields,
//!
//! ```text
//! Σ_j ∫_{Ω_j} α|∇v|² = ∫_Ω α|curl v|² + α⁻¹|div(αv)|²,
//! ```
//!
//! valid for `v` with zero tangential trace on `∂Ω`, continuous tangential
//! components and continuous `αv·n` across subdomain interfaces, on polyhedral
//! subdomains.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use super::dual::{jacobian, Dual3};
use crate::error::{Error, Result};
use crate::geometry::{Point3, Vec3};
use crate::mesh::{box_mesh, TetMesh};
use crate::quadrature::{tet_rule, triangle_rule};

/// Absolute tolerance (relative to the field's magnitude) for the trace and
/// interface conditions.
pub const TRACE_TOL: f64 = 1e-10;

/// A vector field given per subdomain tag in dual arithmetic.
pub type DualField = Arc<dyn Fn(usize, &[Dual3; 3]) -> [Dual3; 3] + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    /// `Σ_j ∫_{Ω_j} α|∇v|²`.
    pub lhs: f64,
    /// `∫ α|curl v|² + α⁻¹|div(αv)|²`.
    pub rhs: f64,
    /// `|lhs − rhs| / max(lhs, rhs)`, zero when both vanish.
    pub defect: f64,
}

fn value(v: &[Dual3; 3]) -> Vec3 {
    Vec3::new(v[0].v, v[1].v, v[2].v)
}

/// Check the trace and interface conditions by quadrature on every boundary
/// face and every face between different subdomains.
fn check_traces(mesh: &TetMesh, alpha: &[f64], v: &DualField, order: usize, scale: f64) -> Result<()> {
    let rule = triangle_rule(order)?;
    let tol = TRACE_TOL * scale.max(1.0);
    (0..mesh.num_faces()).into_par_iter().try_for_each(|f| {
        let adj = mesh.face_adjacency(f);
        let n = mesh.face_normal(f);
        let x = mesh.face(f).map(|i| *mesh.vertex(i));
        let at = |l: &[f64; 3]| x[0] * l[0] + x[1] * l[1] + x[2] * l[2];
        let fail = |what: &str, size: f64| {
            Err(Error::Precondition(format!(
                "face {f} (vertices {:?}): {what} of size {size:.3e}",
                mesh.face(f)
            )))
        };
        if let Some(k) = adj.boundary_element() {
            let tag = mesh.tag(k);
            for (l, _) in rule.iter() {
                let t = value(&v(tag, &Dual3::point(&at(l)))).cross(n).norm();
                if t > tol {
                    return fail("nonzero tangential boundary trace", t);
                }
            }
            return Ok(());
        }
        let ks: Vec<usize> = adj.elements().collect();
        let (a, b) = (mesh.tag(ks[0]), mesh.tag(ks[1]));
        if a == b {
            return Ok(());
        }
        for (l, _) in rule.iter() {
            let p = Dual3::point(&at(l));
            let (va, vb) = (value(&v(a, &p)), value(&v(b, &p)));
            let t = (va - vb).cross(n).norm();
            if t > tol {
                return fail("tangential jump", t);
            }
            let nj = (alpha[a] * va - alpha[b] * vb).dot(n).abs();
            if nj > tol * alpha[a].max(alpha[b]) {
                return fail("jump of the weighted normal component", nj);
            }
        }
        Ok(())
    })
}

/// Relative defect of the identity for `v` on `mesh`, with `α` indexed by
/// subdomain tag. Element integrals use a rule of the given order. The trace
/// and interface conditions are verified first; a violation is reported as a
/// precondition error naming the face.
pub fn helmholtz_identity_residual(mesh: &TetMesh, alpha: &[f64], v: &DualField, order: usize) -> Result<IdentityReport> {
    if alpha.len() < mesh.num_subdomains() {
        return Err(Error::Coefficient(format!(
            "{} weights for {} subdomains",
            alpha.len(),
            mesh.num_subdomains()
        )));
    }
    if alpha.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(Error::Coefficient("weights must be positive".into()));
    }
    let rule = tet_rule(order)?;
    let sums: Vec<(f64, f64, f64)> = (0..mesh.num_tets())
        .into_par_iter()
        .map(|k| {
            let g = mesh.geometry(k);
            let tag = mesh.tag(k);
            let a = alpha[tag];
            let (mut lhs, mut rhs, mut scale) = (0.0, 0.0, 0.0f64);
            for (l, w) in rule.iter() {
                let x = g.point_from_barycentric(l);
                let (val, j) = jacobian(|p| v(tag, p), &x);
                let curl = Vec3::new(j[(2, 1)] - j[(1, 2)], j[(0, 2)] - j[(2, 0)], j[(1, 0)] - j[(0, 1)]);
                let div = j.trace();
                lhs += w * a * j.norm_squared();
                rhs += w * (a * curl.norm_squared() + a * div * div);
                scale = scale.max(val.norm());
            }
            (lhs * g.volume, rhs * g.volume, scale)
        })
        .collect();
    let lhs: f64 = sums.iter().map(|s| s.0).sum();
    let rhs: f64 = sums.iter().map(|s| s.1).sum();
    let scale = sums.iter().map(|s| s.2).fold(0.0, f64::max);
    check_traces(mesh, alpha, v, order, scale)?;
    let m = lhs.max(rhs);
    let defect = if m == 0.0 { 0.0 } else { (lhs - rhs).abs() / m };
    Ok(IdentityReport { lhs, rhs, defect })
}

/// One member of the test-field suite, posed on the unit cube.
#[derive(Clone)]
pub struct IdentityCase {
    pub name: &'static str,
    /// Weight per subdomain tag.
    pub alpha: Vec<f64>,
    /// Subdomain tag of a point (evaluated at element centroids).
    pub region: fn(&Point3) -> usize,
    pub field: DualField,
    /// Known value of both sides, when available in closed form.
    pub expected: Option<f64>,
}

impl std::fmt::Debug for IdentityCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IdentityCase")
            .field("name", &self.name)
            .field("alpha", &self.alpha)
            .field("expected", &self.expected)
            .finish()
    }
}

impl IdentityCase {
    /// Kuhn mesh of the unit cube with `cells³` cubes; interfaces of the suite
    /// lie on multiples of `1/6`, so `cells` should be a multiple of 6.
    pub fn mesh(&self, cells: usize) -> Result<TetMesh> {
        Ok(box_mesh(Point3::zeros(), Point3::new(1.0, 1.0, 1.0), [cells; 3], self.region)?)
    }

    pub fn run(&self, cells: usize, order: usize) -> Result<IdentityReport> {
        helmholtz_identity_residual(&self.mesh(cells)?, &self.alpha, &self.field, order)
    }
}

/// `t(1 − t)`, vanishing on both faces normal to its axis.
fn bub(t: Dual3) -> Dual3 {
    t * (1.0 - t)
}

fn bub_d(t: Dual3) -> Dual3 {
    1.0 - t * 2.0
}

fn field(f: impl Fn(usize, &[Dual3; 3]) -> [Dual3; 3] + Send + Sync + 'static) -> DualField {
    Arc::new(f)
}

fn single(_: &Point3) -> usize {
    0
}

fn half_x(x: &Point3) -> usize {
    usize::from(x.x > 0.5)
}

fn half_z(x: &Point3) -> usize {
    usize::from(x.z > 0.5)
}

fn thirds_x(x: &Point3) -> usize {
    (x.x * 3.0).floor().clamp(0.0, 2.0) as usize
}

/// Ten fields with zero tangential trace on the unit cube: smooth ones with
/// `α ≡ 1` and piecewise ones whose weighted normal component is continuous
/// across planar interfaces.
pub fn identity_suite() -> Vec<IdentityCase> {
    let mut cases = vec![
        IdentityCase {
            name: "zero",
            alpha: vec![1.0],
            region: single,
            field: field(|_, _| [Dual3::constant(0.0); 3]),
            expected: Some(0.0),
        },
        IdentityCase {
            name: "sine",
            alpha: vec![1.0],
            region: single,
            field: field(|_, p| {
                let s = p.map(|t| (t * PI).sin());
                [s[1] * s[2], s[0] * s[2], s[0] * s[1]]
            }),
            expected: Some(1.5 * PI * PI),
        },
        IdentityCase {
            name: "bubble-polynomial",
            alpha: vec![1.0],
            region: single,
            field: field(|_, p| {
                let [x, y, z] = *p;
                let (bx, by, bz) = (bub(x), bub(y), bub(z));
                [by * bz * (1.0 + x), bx * bz * (y - x), bx * by * (1.0 + z * z)]
            }),
            expected: None,
        },
        IdentityCase {
            name: "gradient",
            alpha: vec![1.0],
            region: single,
            field: field(|_, p| {
                // ∇(B g) with B = x(1−x)y(1−y)z(1−z), g = 1 + xy.
                let [x, y, z] = *p;
                let b = bub(x) * bub(y) * bub(z);
                let g = 1.0 + x * y;
                [
                    g * bub_d(x) * bub(y) * bub(z) + b * y,
                    g * bub(x) * bub_d(y) * bub(z) + b * x,
                    g * bub(x) * bub(y) * bub_d(z),
                ]
            }),
            expected: None,
        },
        IdentityCase {
            name: "curl-of-bubble-cubed",
            alpha: vec![1.0],
            region: single,
            field: field(|_, p| {
                // ∇×(B³c) = 3B²∇B × c.
                let [x, y, z] = *p;
                let b = bub(x) * bub(y) * bub(z);
                let s = b.powi(2) * 3.0;
                let g = [
                    s * bub_d(x) * bub(y) * bub(z),
                    s * bub(x) * bub_d(y) * bub(z),
                    s * bub(x) * bub(y) * bub_d(z),
                ];
                let c = [1.0, 2.0, 3.0];
                [g[1] * c[2] - g[2] * c[1], g[2] * c[0] - g[0] * c[2], g[0] * c[1] - g[1] * c[0]]
            }),
            expected: None,
        },
        IdentityCase {
            name: "mixed-trigonometric",
            alpha: vec![1.0],
            region: single,
            field: field(|_, p| {
                let [x, y, z] = *p;
                let s = p.map(|t| (t * PI).sin());
                [s[1] * s[2] * x.exp(), s[0] * s[2] * y, s[0] * s[1] * z.cos()]
            }),
            expected: None,
        },
    ];
    let layered = |name, alpha: Vec<f64>, region: fn(&Point3) -> usize, f: DualField| IdentityCase {
        name,
        alpha,
        region,
        field: f,
        expected: None,
    };
    let a = [1.0, 10.0];
    cases.push(layered(
        "interface-x-ratio-10",
        a.to_vec(),
        half_x,
        field(move |t, p| {
            let [x, y, z] = *p;
            let (bx, by, bz) = (bub(x), bub(y), bub(z));
            [by * bz * (1.0 + x) / a[t], bx * bz * (1.0 + y), bx * by * z]
        }),
    ));
    let a = [1.0, 1000.0];
    cases.push(layered(
        "interface-x-ratio-1000",
        a.to_vec(),
        half_x,
        field(move |t, p| {
            let [x, y, z] = *p;
            let (bx, by, bz) = (bub(x), bub(y), bub(z));
            [by * bz * x.exp() / a[t], bx * bz * (y + z), bx * by * (x + y).cos()]
        }),
    ));
    let a = [100.0, 1.0];
    cases.push(layered(
        "interface-z-ratio-100",
        a.to_vec(),
        half_z,
        field(move |t, p| {
            let [x, y, z] = *p;
            let (bx, by, bz) = (bub(x), bub(y), bub(z));
            [by * bz * (x + y), bx * bz * x.cos(), bx * by * (1.0 + z) / a[t]]
        }),
    ));
    let a = [1.0, 100.0, 10.0];
    cases.push(layered(
        "three-layers",
        a.to_vec(),
        thirds_x,
        field(move |t, p| {
            let [x, y, z] = *p;
            let (bx, by, bz) = (bub(x), bub(y), bub(z));
            [by * bz * (2.0 + x * y) / a[t], bx * bz * y, bx * by * (x - z)]
        }),
    ));
    cases
}
