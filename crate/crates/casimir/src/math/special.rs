//! Hurwitz zeta and polygamma functions on the real line.

use super::{fabs, pow};

const B2J: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Hurwitz zeta ζ(s, a) = Σ_{k≥0} (a + k)^{−s} for real s > 1 and a > 0.
///
/// Direct partial sum up to a shift of at least 12, then an Euler–Maclaurin tail
/// with ten Bernoulli corrections. Relative accuracy is close to machine precision.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0 && a > 0.0, "hurwitz_zeta requires s > 1, a > 0");
    let shift = if a < 12.0 {
        libm::ceil(12.0 - a) as usize
    } else {
        0
    };
    let mut head = 0.0;
    for k in (0..shift).rev() {
        head += pow(a + k as f64, -s);
    }
    let x = a + shift as f64;
    let mut tail = pow(x, 1.0 - s) / (s - 1.0) + 0.5 * pow(x, -s);
    let mut rising = s;
    let mut xp = pow(x, -s - 1.0);
    let mut fact = 2.0;
    for (j, b) in B2J.iter().enumerate() {
        let term = b / fact * rising * xp;
        tail += term;
        if fabs(term) < 1e-17 * fabs(tail) {
            break;
        }
        let k = 2 * j as u32 + 2;
        rising *= (s + k as f64 - 1.0) * (s + k as f64);
        xp /= x * x;
        fact *= (k + 1) as f64 * (k + 2) as f64;
    }
    head + tail
}

/// Polygamma ψ⁽ⁿ⁾(x) for n ≥ 1 and x > 0, via ψ⁽ⁿ⁾(x) = (−1)ⁿ⁺¹ n! ζ(n+1, x).
pub fn polygamma(n: u32, x: f64) -> f64 {
    assert!(n >= 1, "polygamma order must be at least 1");
    let mut fact = 1.0;
    for k in 2..=n {
        fact *= k as f64;
    }
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    sign * fact * hurwitz_zeta(n as f64 + 1.0, x)
}

/// Riemann zeta for real s > 1.
pub fn zeta(s: f64) -> f64 {
    hurwitz_zeta(s, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::PI;

    #[test]
    fn riemann_values() {
        assert!((zeta(2.0) - PI * PI / 6.0).abs() < 1e-15);
        assert!((zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-15);
        assert!((zeta(3.0) - 1.202_056_903_159_594_2).abs() < 1e-15);
    }

    #[test]
    fn hurwitz_half_relation() {
        // ζ(s, 1/2) = (2^s − 1) ζ(s)
        for s in [2.0, 3.0, 4.5, 7.0] {
            let lhs = hurwitz_zeta(s, 0.5);
            let rhs = (libm::pow(2.0, s) - 1.0) * zeta(s);
            assert!(((lhs - rhs) / rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn hurwitz_against_brute_force() {
        for &(s, a) in &[(2.0, 0.1), (4.0, 0.37), (3.0, 5.5), (6.0, 0.9)] {
            let mut direct = 0.0;
            for k in (0..2_000_000).rev() {
                direct += libm::pow(a + k as f64, -s);
            }
            let n = 2_000_000.0 + a;
            direct += libm::pow(n, 1.0 - s) / (s - 1.0) + 0.5 * libm::pow(n, -s);
            let v = hurwitz_zeta(s, a);
            assert!(((v - direct) / v).abs() < 1e-12, "s={s} a={a}");
        }
    }

    #[test]
    fn trigamma_reflection() {
        // ψ'(x) + ψ'(1−x) = π²/sin²(πx)
        for x in [0.1, 0.25, 0.5, 0.8] {
            let lhs = polygamma(1, x) + polygamma(1, 1.0 - x);
            let rhs = PI * PI / libm::sin(PI * x).powi(2);
            assert!(((lhs - rhs) / rhs).abs() < 1e-13);
        }
        // ψ⁽³⁾(1) = 6 ζ(4)
        assert!((polygamma(3, 1.0) - PI.powi(4) / 15.0).abs() < 1e-12);
    }
}
