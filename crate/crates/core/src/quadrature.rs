//! Quadrature on the simplices of a tetrahedral mesh.
//!
//! Rules are collapsed (Duffy) tensor products of Gauss-Jacobi rules, so every
//! weight is positive and any order up to [`MAX_ORDER`] is available. Points
//! are stored in barycentric coordinates and weights are normalized to sum to
//! one; multiply by the measure of the simplex when integrating.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

use crate::geometry::{Point3, TetGeometry};

pub const MAX_ORDER: usize = 12;

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("unsupported quadrature order {order} (maximum is {max})")]
    UnsupportedOrder { order: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Tetrahedron,
    Triangle,
    Segment,
}

/// A rule over an `N - 1` dimensional simplex with barycentric points.
#[derive(Debug, Clone)]
pub struct Rule<const N: usize> {
    pub points: Vec<[f64; N]>,
    pub weights: Vec<f64>,
}

pub type TetRule = Rule<4>;
pub type TriangleRule = Rule<3>;
pub type SegmentRule = Rule<2>;

impl<const N: usize> Rule<N> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; N], f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

/// Borrowed view of a rule for any of the three domains.
#[derive(Debug, Clone, Copy)]
pub enum AnyRule {
    Tetrahedron(&'static TetRule),
    Triangle(&'static TriangleRule),
    Segment(&'static SegmentRule),
}

/// Rule exact for polynomials of total degree `order` on `domain`.
pub fn quadrature(domain: Domain, order: usize) -> Result<AnyRule, QuadratureError> {
    Ok(match domain {
        Domain::Tetrahedron => AnyRule::Tetrahedron(tet_rule(order)?),
        Domain::Triangle => AnyRule::Triangle(triangle_rule(order)?),
        Domain::Segment => AnyRule::Segment(segment_rule(order)?),
    })
}

fn check_order(order: usize) -> Result<(), QuadratureError> {
    if order > MAX_ORDER {
        Err(QuadratureError::UnsupportedOrder {
            order,
            max: MAX_ORDER,
        })
    } else {
        Ok(())
    }
}

fn points_for_order(order: usize) -> usize {
    (order + 2) / 2
}

pub fn tet_rule(order: usize) -> Result<&'static TetRule, QuadratureError> {
    check_order(order)?;
    static CACHE: OnceLock<Vec<TetRule>> = OnceLock::new();
    let rules = CACHE.get_or_init(|| (0..=MAX_ORDER).map(build_tet_rule).collect());
    Ok(&rules[order])
}

pub fn triangle_rule(order: usize) -> Result<&'static TriangleRule, QuadratureError> {
    check_order(order)?;
    static CACHE: OnceLock<Vec<TriangleRule>> = OnceLock::new();
    let rules = CACHE.get_or_init(|| (0..=MAX_ORDER).map(build_triangle_rule).collect());
    Ok(&rules[order])
}

pub fn segment_rule(order: usize) -> Result<&'static SegmentRule, QuadratureError> {
    check_order(order)?;
    static CACHE: OnceLock<Vec<SegmentRule>> = OnceLock::new();
    let rules = CACHE.get_or_init(|| (0..=MAX_ORDER).map(build_segment_rule).collect());
    Ok(&rules[order])
}

fn build_tet_rule(order: usize) -> TetRule {
    let n = points_for_order(order);
    let (su, wu) = gauss_jacobi_unit(n, 2);
    let (sv, wv) = gauss_jacobi_unit(n, 1);
    let (sw, ww) = gauss_jacobi_unit(n, 0);
    let mut points = Vec::with_capacity(n * n * n);
    let mut weights = Vec::with_capacity(n * n * n);
    for (u, a) in su.iter().zip(&wu) {
        for (v, b) in sv.iter().zip(&wv) {
            for (w, c) in sw.iter().zip(&ww) {
                let x = *u;
                let y = (1.0 - u) * v;
                let z = (1.0 - u) * (1.0 - v) * w;
                points.push([1.0 - x - y - z, x, y, z]);
                weights.push(a * b * c);
            }
        }
    }
    normalize(TetRule { points, weights })
}

fn build_triangle_rule(order: usize) -> TriangleRule {
    let n = points_for_order(order);
    let (su, wu) = gauss_jacobi_unit(n, 1);
    let (sv, wv) = gauss_jacobi_unit(n, 0);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (u, a) in su.iter().zip(&wu) {
        for (v, b) in sv.iter().zip(&wv) {
            let x = *u;
            let y = (1.0 - u) * v;
            points.push([1.0 - x - y, x, y]);
            weights.push(a * b);
        }
    }
    normalize(TriangleRule { points, weights })
}

fn build_segment_rule(order: usize) -> SegmentRule {
    let n = points_for_order(order);
    let (s, w) = gauss_jacobi_unit(n, 0);
    let points = s.iter().map(|t| [1.0 - t, *t]).collect();
    normalize(SegmentRule { points, weights: w })
}

fn normalize<const N: usize>(mut rule: Rule<N>) -> Rule<N> {
    let total: f64 = rule.weights.iter().sum();
    rule.weights.iter_mut().for_each(|w| *w /= total);
    rule
}

/// Gauss-Jacobi rule for the weight `(1 - t)^a` on `[0, 1]` (Golub-Welsch).
fn gauss_jacobi_unit(n: usize, a: u32) -> (Vec<f64>, Vec<f64>) {
    let a = a as f64;
    let b = 0.0;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        jac[(k, k)] = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        if k + 1 < n {
            let m = kf + 1.0;
            let s = 2.0 * m + a + b;
            let beta = 4.0 * m * (m + a) * (m + b) * (m + a + b) / (s * s * (s + 1.0) * (s - 1.0));
            jac[(k, k + 1)] = beta.sqrt();
            jac[(k + 1, k)] = beta.sqrt();
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    // Weights only need to be proportional; the caller normalizes.
    pairs.into_iter().map(|(s, w)| ((1.0 + s) / 2.0, w)).unzip()
}

/// `∫_K g dx` with a rule of the requested order.
pub fn integrate_tet<F>(geom: &TetGeometry, order: usize, mut g: F) -> Result<f64, QuadratureError>
where
    F: FnMut(&Point3, &[f64; 4]) -> f64,
{
    let rule = tet_rule(order)?;
    let mut acc = 0.0;
    for (l, w) in rule.iter() {
        let x = geom.point_from_barycentric(l);
        acc += w * g(&x, l);
    }
    Ok(acc * geom.volume)
}
