//! Piecewise Chebyshev interpolation with adaptive panel splitting.

use alloc::vec::Vec;

use super::{cos, fabs, PI};

#[derive(Debug, Clone)]
struct Panel {
    a: f64,
    b: f64,
    coef: Vec<f64>,
}

/// A function on [lo, hi] stored as Chebyshev expansions on consecutive panels.
/// Evaluation outside [lo, hi] returns 0.
#[derive(Debug, Clone)]
pub struct PiecewiseCheb {
    panels: Vec<Panel>,
    starts: Vec<f64>,
    lo: f64,
    hi: f64,
    /// Largest trailing-coefficient size among accepted panels.
    pub tail: f64,
}

fn coefficients(a: f64, b: f64, n: usize, f: &mut impl FnMut(f64) -> f64) -> Vec<f64> {
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    let vals: Vec<f64> = (0..n)
        .map(|k| f(c + h * cos(PI * (k as f64 + 0.5) / n as f64)))
        .collect();
    let mut coef = alloc::vec![0.0; n];
    for (j, cj) in coef.iter_mut().enumerate() {
        let mut s = 0.0;
        for (k, v) in vals.iter().enumerate() {
            s += v * cos(PI * j as f64 * (k as f64 + 0.5) / n as f64);
        }
        *cj = 2.0 * s / n as f64;
    }
    coef[0] *= 0.5;
    coef
}

fn tail_size(c: &[f64]) -> f64 {
    let n = c.len();
    fabs(c[n - 1]) + fabs(c[n - 2]) + fabs(c[n - 3])
}

impl PiecewiseCheb {
    /// Build an interpolant of `f` on the panels delimited by `breaks` (sorted, at least two
    /// entries), splitting until trailing coefficients fall below `rel_tol` times the sampled
    /// maximum of |f|.
    pub fn build(f: impl FnMut(f64) -> f64, breaks: &[f64], degree: usize, rel_tol: f64) -> Self {
        Self::build_with_floor(f, breaks, degree, rel_tol, 0.0)
    }

    /// As [`build`](Self::build), but coefficients below `abs_tol` never force a split. Needed
    /// when `f` may be pure rounding noise, which has no relative accuracy to converge to.
    pub fn build_with_floor(
        mut f: impl FnMut(f64) -> f64,
        breaks: &[f64],
        degree: usize,
        rel_tol: f64,
        abs_tol: f64,
    ) -> Self {
        let n = degree.max(8);
        let lo = breaks[0];
        let hi = *breaks.last().unwrap();
        let mut first: Vec<Panel> = Vec::new();
        let mut scale: f64 = 0.0;
        for w in breaks.windows(2) {
            if w[1] > w[0] {
                let coef = coefficients(w[0], w[1], n, &mut f);
                let s: f64 = coef.iter().map(|c| fabs(*c)).sum();
                scale = scale.max(s);
                first.push(Panel {
                    a: w[0],
                    b: w[1],
                    coef,
                });
            }
        }
        let tol = (rel_tol * if scale > 0.0 { scale } else { 1.0 }).max(abs_tol);
        let min_width = (hi - lo) * 1e-6;
        let mut done: Vec<Panel> = Vec::new();
        let mut stack: Vec<Panel> = first;
        let mut tail: f64 = 0.0;
        while let Some(p) = stack.pop() {
            let t = tail_size(&p.coef);
            if t <= tol || (p.b - p.a) < min_width {
                tail = tail.max(t);
                done.push(p);
            } else {
                let m = 0.5 * (p.a + p.b);
                let left = coefficients(p.a, m, n, &mut f);
                let right = coefficients(m, p.b, n, &mut f);
                stack.push(Panel {
                    a: p.a,
                    b: m,
                    coef: left,
                });
                stack.push(Panel {
                    a: m,
                    b: p.b,
                    coef: right,
                });
            }
        }
        done.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap());
        let starts = done.iter().map(|p| p.a).collect();
        Self {
            panels: done,
            starts,
            lo,
            hi,
            tail,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// max over panels of Σ|c_k|, a bound on sup |f|.
    pub fn max_abs(&self) -> f64 {
        self.panels
            .iter()
            .map(|p| p.coef.iter().map(|c| fabs(*c)).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    /// Panel boundaries, useful as quadrature breakpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.starts.clone();
        v.push(self.hi);
        v
    }

    pub fn eval(&self, x: f64) -> f64 {
        if !(x >= self.lo && x <= self.hi) || self.panels.is_empty() {
            return 0.0;
        }
        let i = match self.starts.binary_search_by(|s| s.partial_cmp(&x).unwrap()) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        let p = &self.panels[i.min(self.panels.len() - 1)];
        let u = (2.0 * x - p.a - p.b) / (p.b - p.a);
        clenshaw(&p.coef, u)
    }
}

fn clenshaw(c: &[f64], u: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &cj in c.iter().skip(1).rev() {
        let b0 = 2.0 * u * b1 - b2 + cj;
        b2 = b1;
        b1 = b0;
    }
    u * b1 - b2 + c[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_smooth_function() {
        let f = |x: f64| libm::exp(x) * libm::sin(3.0 * x);
        let p = PiecewiseCheb::build(f, &[-1.0, 0.3, 2.0], 24, 1e-14);
        for i in 0..200 {
            let x = -1.0 + 3.0 * i as f64 / 199.0;
            assert!((p.eval(x) - f(x)).abs() < 1e-12, "x={x}");
        }
        assert_eq!(p.eval(2.5), 0.0);
    }

    #[test]
    fn splits_for_bump_like_functions() {
        let f = |x: f64| {
            if x.abs() < 1.0 {
                libm::exp(1.0 - 1.0 / (1.0 - x * x))
            } else {
                0.0
            }
        };
        let p = PiecewiseCheb::build(f, &[-1.0, 1.0], 24, 1e-13);
        assert!(p.panel_count() > 1);
        for i in 0..500 {
            let x = -1.0 + 2.0 * i as f64 / 499.0;
            assert!((p.eval(x) - f(x)).abs() < 1e-11);
        }
    }
}
