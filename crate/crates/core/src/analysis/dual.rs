//! Forward-mode dual numbers carrying a value and its gradient in `R³`.

use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::Matrix3;

use crate::geometry::{Point3, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual3 {
    pub v: f64,
    pub d: Vec3,
}

impl Dual3 {
    pub fn constant(v: f64) -> Self {
        Self { v, d: Vec3::zeros() }
    }

    /// The coordinate function `x_i` evaluated at `value`.
    pub fn variable(value: f64, i: usize) -> Self {
        let mut d = Vec3::zeros();
        d[i] = 1.0;
        Self { v: value, d }
    }

    /// The three coordinate functions at `x`.
    pub fn point(x: &Point3) -> [Self; 3] {
        [0, 1, 2].map(|i| Self::variable(x[i], i))
    }

    fn chain(self, v: f64, dv: f64) -> Self {
        Self { v, d: self.d * dv }
    }

    pub fn sin(self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }

    pub fn cos(self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }

    pub fn powi(self, n: i32) -> Self {
        self.chain(self.v.powi(n), n as f64 * self.v.powi(n - 1))
    }
}

impl From<f64> for Dual3 {
    fn from(v: f64) -> Self {
        Self::constant(v)
    }
}

impl Add for Dual3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { v: self.v + o.v, d: self.d + o.d }
    }
}

impl Sub for Dual3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { v: self.v - o.v, d: self.d - o.d }
    }
}

impl Mul for Dual3 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            v: self.v * o.v,
            d: self.d * o.v + o.d * self.v,
        }
    }
}

impl Div for Dual3 {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        Self {
            v: self.v / o.v,
            d: (self.d * o.v - o.d * self.v) / (o.v * o.v),
        }
    }
}

impl Neg for Dual3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self { v: -self.v, d: -self.d }
    }
}

impl Add<f64> for Dual3 {
    type Output = Self;
    fn add(self, c: f64) -> Self {
        Self { v: self.v + c, d: self.d }
    }
}

impl Sub<f64> for Dual3 {
    type Output = Self;
    fn sub(self, c: f64) -> Self {
        Self { v: self.v - c, d: self.d }
    }
}

impl Mul<f64> for Dual3 {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        Self { v: self.v * c, d: self.d * c }
    }
}

impl Div<f64> for Dual3 {
    type Output = Self;
    fn div(self, c: f64) -> Self {
        Self { v: self.v / c, d: self.d / c }
    }
}

impl Add<Dual3> for f64 {
    type Output = Dual3;
    fn add(self, x: Dual3) -> Dual3 {
        x + self
    }
}

impl Sub<Dual3> for f64 {
    type Output = Dual3;
    fn sub(self, x: Dual3) -> Dual3 {
        -x + self
    }
}

impl Mul<Dual3> for f64 {
    type Output = Dual3;
    fn mul(self, x: Dual3) -> Dual3 {
        x * self
    }
}

/// Value and Jacobian `J_ij = ∂v_i/∂x_j` of a vector field written in dual
/// arithmetic.
pub fn jacobian(v: impl Fn(&[Dual3; 3]) -> [Dual3; 3], x: &Point3) -> (Vec3, Matrix3<f64>) {
    let out = v(&Dual3::point(x));
    let value = Vec3::new(out[0].v, out[1].v, out[2].v);
    let jac = Matrix3::from_rows(&[out[0].d.transpose(), out[1].d.transpose(), out[2].d.transpose()]);
    (value, jac)
}
