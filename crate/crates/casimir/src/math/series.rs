//! Symmetric (n, −n) paired image series with power-law tail acceleration.
//!
//! Pair terms p_n are assumed to behave like a/n² + b/n³ + c/n⁴ + e/n⁵ for large n. At each
//! checkpoint N (16, 32, 64, …, and n_max) the tail Σ_{n>N} p_n is estimated from a
//! four-term fit through n = N/8, N/4, N/2, N and from a three-term fit through N/4, N/2,
//! N; the accelerated value uses the four-term tail, and the spread between the two fits
//! is the reported truncation error.

use super::Ipow;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::special::hurwitz_zeta;
use super::{solve_dense, sqrt, Compensated};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub n_max: usize,
    pub tail_tol: f64,
    /// Errors below `tail_tol * abs_floor` are accepted even when the sum itself is tiny.
    pub abs_floor: f64,
    /// Summation continues until the error falls below `goal` (relative); reaching only
    /// `tail_tol` by `n_max` is still a success.
    pub goal: f64,
}

impl SeriesControl {
    pub const fn new(n_max: usize, tail_tol: f64) -> Self {
        Self {
            n_max,
            tail_tol,
            abs_floor: 0.0,
            goal: tail_tol,
        }
    }

    pub const fn goal(mut self, goal: f64) -> Self {
        self.goal = goal;
        self
    }

    pub const fn floor(mut self, abs_floor: f64) -> Self {
        self.abs_floor = abs_floor;
        self
    }
}

/// Partial-sum record at one checkpoint.
#[derive(Debug, Clone, Copy)]
pub struct Checkpoint<const K: usize> {
    pub n: usize,
    pub partial: [f64; K],
    pub accelerated: [f64; K],
    pub err: f64,
    /// Crude bound C/n on the un-accelerated tail with C = |p_n|·n².
    pub raw_tail: f64,
}

#[derive(Debug, Clone)]
pub struct SeriesOutcome<const K: usize> {
    pub value: [f64; K],
    pub err: f64,
    pub terms: usize,
    pub raw_tail: f64,
    pub checkpoints: Vec<Checkpoint<K>>,
}

fn norm<const K: usize>(v: &[f64; K]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

fn tail3(n: [f64; 3], p: [f64; 3], start: f64) -> f64 {
    let a = [
        [1.0 / (n[0] * n[0]), 1.0 / n[0].ipow(3), 1.0 / n[0].ipow(4)],
        [1.0 / (n[1] * n[1]), 1.0 / n[1].ipow(3), 1.0 / n[1].ipow(4)],
        [1.0 / (n[2] * n[2]), 1.0 / n[2].ipow(3), 1.0 / n[2].ipow(4)],
    ];
    match solve_dense(a, p) {
        Some(c) => {
            c[0] * hurwitz_zeta(2.0, start)
                + c[1] * hurwitz_zeta(3.0, start)
                + c[2] * hurwitz_zeta(4.0, start)
        }
        None => 0.0,
    }
}

fn tail4(n: [f64; 4], p: [f64; 4], start: f64) -> f64 {
    let row = |x: f64| {
        [
            1.0 / (x * x),
            1.0 / x.ipow(3),
            1.0 / x.ipow(4),
            1.0 / x.ipow(5),
        ]
    };
    let a = [row(n[0]), row(n[1]), row(n[2]), row(n[3])];
    match solve_dense(a, p) {
        Some(c) => (0..4)
            .map(|k| c[k] * hurwitz_zeta(2.0 + k as f64, start))
            .sum(),
        None => 0.0,
    }
}

fn tail2(n: [f64; 2], p: [f64; 2], start: f64) -> f64 {
    let a = [
        [1.0 / (n[0] * n[0]), 1.0 / n[0].ipow(3)],
        [1.0 / (n[1] * n[1]), 1.0 / n[1].ipow(3)],
    ];
    match solve_dense(a, p) {
        Some(c) => c[0] * hurwitz_zeta(2.0, start) + c[1] * hurwitz_zeta(3.0, start),
        None => 0.0,
    }
}

/// Sum `center + Σ_{n≥1} pair(n)` with tail acceleration. Fails with an accuracy error
/// carrying the best estimate when the tolerance is not met by `n_max`.
pub fn sum_paired<const K: usize>(
    center: [f64; K],
    mut pair: impl FnMut(usize) -> Result<[f64; K]>,
    ctl: SeriesControl,
) -> Result<SeriesOutcome<K>> {
    if ctl.n_max == 0 {
        return Err(crate::error::invalid("n_max must be positive"));
    }
    let mut acc: [Compensated<f64>; K] = [Compensated::default(); K];
    for k in 0..K {
        acc[k].add(center[k]);
    }
    let mut terms: Vec<[f64; K]> = alloc::vec![[0.0; K]];
    let mut checkpoints = Vec::new();
    let mut next_check = 16usize.min(ctl.n_max);
    let mut last: Option<Checkpoint<K>> = None;
    for n in 1..=ctl.n_max {
        let p = pair(n)?;
        for k in 0..K {
            acc[k].add(p[k]);
        }
        terms.push(p);
        if n != next_check {
            continue;
        }
        let partial: [f64; K] = core::array::from_fn(|k| acc[k].total());
        let start = n as f64 + 1.0;
        let mut accelerated = partial;
        let mut spread = [0.0; K];
        let raw_tail = norm(&p) * n as f64;
        if n >= 16 {
            let (n0, n1, n2) = (n / 8, n / 4, n / 2);
            for k in 0..K {
                let t4 = tail4(
                    [n0 as f64, n1 as f64, n2 as f64, n as f64],
                    [terms[n0][k], terms[n1][k], terms[n2][k], terms[n][k]],
                    start,
                );
                let t3 = tail3(
                    [n1 as f64, n2 as f64, n as f64],
                    [terms[n1][k], terms[n2][k], terms[n][k]],
                    start,
                );
                accelerated[k] += t4;
                spread[k] = t4 - t3;
            }
        } else if n >= 8 {
            let (n1, n2) = (n / 4, n / 2);
            for k in 0..K {
                let t3 = tail3(
                    [n1 as f64, n2 as f64, n as f64],
                    [terms[n1][k], terms[n2][k], terms[n][k]],
                    start,
                );
                let t2 = tail2([n2 as f64, n as f64], [terms[n2][k], terms[n][k]], start);
                accelerated[k] += t3;
                spread[k] = t3 - t2;
            }
        } else {
            spread = core::array::from_fn(|k| p[k].abs() * n as f64);
        }
        let round: f64 = 1e-15 * norm(&partial);
        let err = norm(&spread) + round;
        let cp = Checkpoint {
            n,
            partial,
            accelerated,
            err,
            raw_tail,
        };
        checkpoints.push(cp);
        last = Some(cp);
        let scale = norm(&accelerated).max(ctl.abs_floor);
        if err <= ctl.goal.min(ctl.tail_tol) * scale
            || (n == ctl.n_max && err <= ctl.tail_tol * scale)
        {
            return Ok(SeriesOutcome {
                value: accelerated,
                err,
                terms: n,
                raw_tail,
                checkpoints,
            });
        }
        next_check = if n * 2 > ctl.n_max && n < ctl.n_max {
            ctl.n_max
        } else {
            n * 2
        };
    }
    let cp = last.expect("at least one checkpoint");
    let best = if K >= 2 {
        Complex64::new(cp.accelerated[0], cp.accelerated[1])
    } else {
        Complex64::new(cp.accelerated[0], 0.0)
    };
    let scale = norm(&cp.accelerated).max(ctl.abs_floor);
    Err(Error::Accuracy {
        best,
        err: cp.err,
        tol: ctl.tail_tol * scale,
    })
}

/// Plain checkpoints of partial sums without acceleration, for convergence studies.
pub fn partial_sums<const K: usize>(
    center: [f64; K],
    mut pair: impl FnMut(usize) -> Result<[f64; K]>,
    n_max: usize,
) -> Result<Vec<(usize, [f64; K])>> {
    let mut acc: [Compensated<f64>; K] = [Compensated::default(); K];
    for k in 0..K {
        acc[k].add(center[k]);
    }
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let p = pair(n)?;
        for k in 0..K {
            acc[k].add(p[k]);
        }
        out.push((n, core::array::from_fn(|k| acc[k].total())));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::PI;

    #[test]
    fn accelerates_inverse_square_pairs() {
        // Σ_{n≥1} 1/n² = π²/6
        let out = sum_paired(
            [0.0],
            |n| Ok([1.0 / (n * n) as f64]),
            SeriesControl::new(500, 1e-12),
        )
        .unwrap();
        assert!(
            (out.value[0] - PI * PI / 6.0).abs() < 1e-11,
            "{:?}",
            out.value
        );
        assert!(out.terms <= 256);
    }

    #[test]
    fn accelerates_mixed_power_pairs() {
        let f = |n: usize| {
            let x = n as f64;
            1.0 / (x * x + 0.3) - 0.5 / (x + 0.2).powi(3)
        };
        let mut exact = 0.0;
        for n in (1..20_000_000).rev() {
            exact += f(n);
        }
        exact += 1.0 / (2.0e7 - 0.5);
        let out = sum_paired([0.0], |n| Ok([f(n)]), SeriesControl::new(1024, 1e-10)).unwrap();
        assert!(
            (out.value[0] - exact).abs() < 1e-9,
            "{} {}",
            out.value[0],
            exact
        );
    }

    #[test]
    fn reports_accuracy_error_with_best_value() {
        let r = sum_paired(
            [0.0],
            |n| Ok([1.0 / libm::sqrt(n as f64)]),
            SeriesControl::new(64, 1e-12),
        );
        match r {
            Err(Error::Accuracy { best, .. }) => assert!(best.re > 0.0),
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }
}
