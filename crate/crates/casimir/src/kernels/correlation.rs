//! One-dimensional bump correlations and integrals over spheres cut by a box.

use alloc::vec::Vec;

use crate::fields::Bump1;
use crate::math::cheb::PiecewiseCheb;
use crate::math::quad::{adaptive, GaussLegendre, Tol};
use crate::math::{acos, asin, cos, sin, PI};

/// c(δ) = ∫ p(s) q(s − δ) ds for two one-dimensional bumps.
#[derive(Debug, Clone)]
pub struct Correlation1 {
    pub p: Bump1,
    pub q: Bump1,
    gl: GaussLegendre,
    table: Option<PiecewiseCheb>,
}

impl Correlation1 {
    pub fn new(p: Bump1, q: Bump1) -> Self {
        Self {
            p,
            q,
            gl: GaussLegendre::new(48),
            table: None,
        }
    }

    /// Same correlation, additionally tabulated as a piecewise Chebyshev interpolant.
    pub fn tabulated(p: Bump1, q: Bump1) -> Self {
        let mut c = Self::new(p, q);
        let br = c.breakpoints();
        let table = PiecewiseCheb::build(|x| c.direct(x), &br, 24, 1e-13);
        c.table = Some(table);
        c
    }

    /// Support [lo, hi] of δ ↦ c(δ).
    pub fn support(&self) -> (f64, f64) {
        (self.p.lo() - self.q.hi(), self.p.hi() - self.q.lo())
    }

    /// Support ends plus the two interior points where support edges of p and the shifted q meet.
    pub fn breakpoints(&self) -> Vec<f64> {
        let (lo, hi) = self.support();
        let m1 = self.p.lo() - self.q.lo();
        let m2 = self.p.hi() - self.q.hi();
        let mut v = alloc::vec![lo, m1.min(m2), m1.max(m2), hi];
        v.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (hi - lo));
        v
    }

    pub fn direct(&self, delta: f64) -> f64 {
        let a = self.p.lo().max(self.q.lo() + delta);
        let b = self.p.hi().min(self.q.hi() + delta);
        if b <= a {
            return 0.0;
        }
        let m = 0.5 * (a + b);
        let f = |s: f64| self.p.value(s) * self.q.value(s - delta);
        self.gl.integrate(a, m, f) + self.gl.integrate(m, b, f)
    }

    pub fn eval(&self, delta: f64) -> f64 {
        match &self.table {
            Some(t) => t.eval(delta),
            None => self.direct(delta),
        }
    }

    pub fn max_abs(&self) -> f64 {
        let (lo, hi) = self.support();
        (0..=32)
            .map(|k| self.eval(lo + (hi - lo) * k as f64 / 32.0).abs())
            .fold(0.0, f64::max)
    }
}

fn intersect(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(a0, a1) in a {
        for &(b0, b1) in b {
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if hi > lo {
                out.push((lo, hi));
            }
        }
    }
    out
}

/// Angles φ ∈ [0, 2π) with ρ cos φ ∈ [lo, hi].
fn cos_set(rho: f64, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let cl = (lo / rho).max(-1.0);
    let ch = (hi / rho).min(1.0);
    if cl >= ch {
        return Vec::new();
    }
    let a1 = acos(ch);
    let a2 = acos(cl);
    if a1 <= 0.0 && a2 >= PI {
        return alloc::vec![(0.0, 2.0 * PI)];
    }
    alloc::vec![(a1, a2), (2.0 * PI - a2, 2.0 * PI - a1)]
}

/// Angles φ ∈ [0, 2π) with ρ sin φ ∈ [lo, hi].
fn sin_set(rho: f64, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let sl = (lo / rho).max(-1.0);
    let sh = (hi / rho).min(1.0);
    if sl >= sh {
        return Vec::new();
    }
    if sl <= -1.0 && sh >= 1.0 {
        return alloc::vec![(0.0, 2.0 * PI)];
    }
    let b1 = asin(sl);
    let b2 = asin(sh);
    let mut v = Vec::new();
    // right half: φ ∈ [b1, b2] (mod 2π)
    if b1 >= 0.0 {
        v.push((b1, b2));
    } else if b2 <= 0.0 {
        v.push((b1 + 2.0 * PI, b2 + 2.0 * PI));
    } else {
        v.push((0.0, b2));
        v.push((b1 + 2.0 * PI, 2.0 * PI));
    }
    // left half: φ ∈ [π − b2, π − b1]
    v.push((PI - b2, PI - b1));
    v
}

/// ∫_0^{2π} fx(ρ cos φ) fy(ρ sin φ) dφ, where fx, fy vanish outside `sx`, `sy`.
pub(crate) fn ring_integral(
    rho: f64,
    fx: &dyn Fn(f64) -> f64,
    fy: &dyn Fn(f64) -> f64,
    sx: (f64, f64),
    sy: (f64, f64),
    rel: f64,
    abs: f64,
) -> f64 {
    if rho <= 0.0 {
        return 2.0 * PI * fx(0.0) * fy(0.0);
    }
    let set = intersect(&cos_set(rho, sx.0, sx.1), &sin_set(rho, sy.0, sy.1));
    let mut s = 0.0;
    for (a, b) in set {
        s += adaptive(
            |phi| fx(rho * cos(phi)) * fy(rho * sin(phi)),
            a,
            b,
            &[],
            Tol::new(abs, rel).panels(400),
        )
        .value;
    }
    s
}

/// ∫_{S²} fx(RΩ_x) fy(RΩ_y) fz(RΩ_z) dΩ, where each factor vanishes outside `support[a]`.
pub fn sphere_integral(
    r: f64,
    fx: &dyn Fn(f64) -> f64,
    fy: &dyn Fn(f64) -> f64,
    fz: &dyn Fn(f64) -> f64,
    support: [(f64, f64); 3],
    rel: f64,
    abs: f64,
) -> f64 {
    if r <= 0.0 {
        return 4.0 * PI * fx(0.0) * fy(0.0) * fz(0.0);
    }
    let (zl, zh) = support[2];
    let ch = (zh / r).min(1.0);
    let cl = (zl / r).max(-1.0);
    if cl >= ch {
        return 0.0;
    }
    let th0 = acos(ch);
    let th1 = acos(cl);
    let ring = |rho: f64| ring_integral(rho, fx, fy, support[0], support[1], rel * 0.1, abs * 0.1);
    let q = adaptive(
        |th| sin(th) * fz(r * cos(th)) * ring(r * sin(th)),
        th0,
        th1,
        &[],
        Tol::new(abs, rel).panels(400),
    );
    q.value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::exp;

    #[test]
    fn correlation_matches_fine_quadrature() {
        let p = Bump1 {
            center: 0.3,
            radius: 0.5,
        };
        let q = Bump1 {
            center: -0.1,
            radius: 0.2,
        };
        let c = Correlation1::tabulated(p, q);
        let fine = GaussLegendre::new(400);
        for k in 0..40 {
            let (lo, hi) = c.support();
            let delta = lo + (hi - lo) * (k as f64 + 0.37) / 40.0;
            let a = p.lo().max(q.lo() + delta);
            let b = p.hi().min(q.hi() + delta);
            let exact = if b > a {
                fine.integrate(a, b, |s| p.value(s) * q.value(s - delta))
            } else {
                0.0
            };
            assert!((c.direct(delta) - exact).abs() < 1e-12, "{delta}");
            assert!((c.eval(delta) - exact).abs() < 1e-12, "{delta}");
        }
        assert_eq!(c.eval(c.support().1 + 0.01), 0.0);
    }

    #[test]
    fn correlation_integrates_to_product_of_integrals() {
        let p = Bump1 {
            center: 1.0,
            radius: 0.4,
        };
        let q = Bump1 {
            center: 0.2,
            radius: 0.7,
        };
        let c = Correlation1::new(p, q);
        let (lo, hi) = c.support();
        let gl = GaussLegendre::new(64);
        let br = c.breakpoints();
        let total: f64 = br
            .windows(2)
            .map(|w| gl.integrate(w[0], w[1], |x| c.direct(x)))
            .sum();
        let ip = gl.integrate(p.lo(), p.center, |s| p.value(s)) * 2.0;
        let iq = gl.integrate(q.lo(), q.center, |s| q.value(s)) * 2.0;
        assert!(
            (total - ip * iq).abs() < 1e-11 * ip * iq,
            "{total} {} {lo} {hi}",
            ip * iq
        );
    }

    #[test]
    fn sphere_area_and_gaussian_moment() {
        let one = |_: f64| 1.0;
        let big = (-10.0, 10.0);
        let s = sphere_integral(1.3, &one, &one, &one, [big; 3], 1e-12, 1e-15);
        assert!((s - 4.0 * PI).abs() < 1e-10);
        // cap z > 0.5 R: area 2π(1 − 0.5)
        let s = sphere_integral(2.0, &one, &one, &one, [big, big, (1.0, 10.0)], 1e-12, 1e-15);
        assert!((s - PI).abs() < 1e-10);
        // quadrant x > 0, y > 0
        let s = sphere_integral(
            2.0,
            &one,
            &one,
            &one,
            [(0.0, 9.0), (0.0, 9.0), big],
            1e-12,
            1e-15,
        );
        assert!((s - PI).abs() < 1e-10);
        // x² weight: 4π/3 R²
        let sq = |x: f64| x * x;
        let s = sphere_integral(1.5, &sq, &one, &one, [big; 3], 1e-12, 1e-15);
        assert!((s - 4.0 * PI / 3.0 * 2.25).abs() < 1e-9);
        let g = |x: f64| exp(-x * x);
        let s = sphere_integral(0.7, &g, &g, &g, [big; 3], 1e-12, 1e-15);
        assert!((s - 4.0 * PI * exp(-0.49)).abs() < 1e-10);
    }

    #[test]
    fn sphere_offset_box_matches_brute_force() {
        let f = |x: f64| {
            if (0.2..0.9).contains(&x) {
                1.0 - x
            } else {
                0.0
            }
        };
        let g = |y: f64| {
            if (-0.5..0.4).contains(&y) {
                y + 0.5
            } else {
                0.0
            }
        };
        let h = |z: f64| if (-0.7..0.6).contains(&z) { 1.0 } else { 0.0 };
        let r = 0.8;
        let s = sphere_integral(
            r,
            &f,
            &g,
            &h,
            [(0.2, 0.9), (-0.5, 0.4), (-0.7, 0.6)],
            1e-10,
            1e-14,
        );
        let n = 1500;
        let mut brute = 0.0;
        for i in 0..n {
            let u = -1.0 + 2.0 * (i as f64 + 0.5) / n as f64;
            let st = libm::sqrt(1.0 - u * u);
            for j in 0..n {
                let phi = 2.0 * PI * (j as f64 + 0.5) / n as f64;
                brute += f(r * st * cos(phi)) * g(r * st * sin(phi)) * h(r * u);
            }
        }
        brute *= 4.0 * PI / (n * n) as f64;
        assert!((s - brute).abs() < 2e-3 * s.abs(), "{s} {brute}");
    }
}
