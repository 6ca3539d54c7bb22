//! Numerical building blocks: quadrature, interpolation, special functions,
//! series acceleration, extrapolation and a small FFT.

pub mod cheb;
pub mod fft;
pub mod quad;
pub mod richardson;
pub mod series;
pub mod special;

use core::ops::{Add, Mul, Sub};
use num_complex::Complex64;

pub use libm::{
    acos, asin, atan2, cos, cosh, exp, expm1, fabs, floor, log, log1p, pow, sin, sinh, sqrt, tanh,
};

pub const PI: f64 = core::f64::consts::PI;

/// Scalar types the integrators and accumulators can work with.
pub trait Value: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl Value for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        fabs(self)
    }
}

impl Value for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Kahan–Babuška compensated accumulator.
#[derive(Debug, Clone, Copy)]
pub struct Compensated<V: Value> {
    sum: V,
    carry: V,
}

impl<V: Value> Default for Compensated<V> {
    fn default() -> Self {
        Self {
            sum: V::zero(),
            carry: V::zero(),
        }
    }
}

impl<V: Value> Compensated<V> {
    pub fn add(&mut self, x: V) {
        let t = self.sum + x;
        if self.sum.magnitude() >= x.magnitude() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn total(&self) -> V {
        self.sum + self.carry
    }
}

/// Integer powers of f64 without std.
pub trait Ipow {
    fn ipow(self, n: i32) -> f64;
}

impl Ipow for f64 {
    fn ipow(self, n: i32) -> f64 {
        let mut base = if n < 0 { 1.0 / self } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = 1.0;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }
}

/// sinh(x)/x, accurate near 0.
pub fn sinhc(x: Complex64) -> Complex64 {
    if x.norm() < 1e-3 {
        let x2 = x * x;
        Complex64::new(1.0, 0.0) + x2 / 6.0 + x2 * x2 / 120.0 + x2 * x2 * x2 / 5040.0
    } else {
        x.sinh() / x
    }
}

/// Solve a small dense linear system by Gaussian elimination with partial pivoting.
pub fn solve_dense<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Option<[f64; N]> {
    for col in 0..N {
        let mut piv = col;
        for row in col + 1..N {
            if fabs(a[row][col]) > fabs(a[piv][col]) {
                piv = row;
            }
        }
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..N {
            let m = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] -= m * a[col][k];
            }
            b[row] -= m * b[col];
        }
    }
    let mut x = [0.0; N];
    for i in (0..N).rev() {
        let mut s = b[i];
        for k in i + 1..N {
            s -= a[i][k] * x[k];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}
