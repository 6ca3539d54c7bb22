//! Mode-space form of the slab two-point function: transverse coefficients ŵ(ξ), the
//! positivity sum and the thermal hypothesis checks.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::BoundaryState;
use crate::error::{invalid, Result};
use crate::fields::{bump_cosine_transform_with, Bump1, Geometry, TestFunction};
use crate::kernels::{Estimate, StateSpec};
use crate::math::cheb::PiecewiseCheb;
use crate::math::fft::fft_in_place;
use crate::math::quad::{adaptive, GaussLegendre, Tol};
use crate::math::{cos, exp, expm1, log, sin, sqrt, PI};

/// B(q) = ∫ b(u) cos(qu) du tabulated on [0, q_max]; zero beyond.
#[derive(Debug, Clone)]
pub struct BumpTransformTable {
    table: PiecewiseCheb,
    q_max: f64,
}

impl BumpTransformTable {
    pub fn new(q_max: f64) -> Self {
        let n = libm::ceil(q_max / 8.0).max(1.0) as usize;
        let gl = GaussLegendre::new(40);
        let breaks: Vec<f64> = (0..=n).map(|k| q_max * k as f64 / n as f64).collect();
        let table =
            PiecewiseCheb::build(|q| bump_cosine_transform_with(&gl, q), &breaks, 24, 1e-14);
        Self { table, q_max }
    }

    pub fn eval(&self, q: f64) -> f64 {
        let q = q.abs();
        if q > self.q_max {
            0.0
        } else {
            self.table.eval(q)
        }
    }

    /// ∫ b((s − c)/r) e^{iqs} ds.
    fn fourier(&self, b: Bump1, q: f64) -> Complex64 {
        Complex64::from_polar(b.radius * self.eval(q * b.radius), q * b.center)
    }
}

impl Default for BumpTransformTable {
    fn default() -> Self {
        Self::new(1000.0)
    }
}

/// Transverse spectral data of a pair (f_⊥, f′_⊥) over the in-plane wave number κ.
struct Transverse<'a> {
    f: TestFunction,
    g: TestFunction,
    bt: &'a BumpTransformTable,
    re: PiecewiseCheb,
    im: PiecewiseCheb,
    kappa_max: f64,
}

impl<'a> Transverse<'a> {
    fn new(f: &TestFunction, g: &TestFunction, bt: &'a BumpTransformTable) -> Self {
        let r_min = f.radii[1].min(f.radii[2]).min(g.radii[1]).min(g.radii[2]);
        let kappa_max = (200.0 / r_min).min(
            bt.q_max
                / f.radii[1..3]
                    .iter()
                    .chain(&g.radii[1..3])
                    .fold(0.0, |a: f64, b| a.max(*b)),
        );
        let theta0 = (bt.fourier(f.axis(1), 0.0)
            * bt.fourier(g.axis(1), 0.0)
            * bt.fourier(f.axis(2), 0.0)
            * bt.fourier(g.axis(2), 0.0))
        .norm()
            * 2.0
            * PI;
        let theta = |kappa: f64| -> Complex64 {
            let xy = |phi: f64| {
                let (kx, ky) = (kappa * cos(phi), kappa * sin(phi));
                bt.fourier(f.axis(1), kx)
                    * bt.fourier(g.axis(1), kx).conj()
                    * bt.fourier(f.axis(2), ky)
                    * bt.fourier(g.axis(2), ky).conj()
            };
            // smooth and periodic in φ: the trapezoid rule converges geometrically
            let mut m = 32usize;
            let mut acc: Complex64 = (0..m).map(|j| xy(2.0 * PI * j as f64 / m as f64)).sum();
            let mut prev = acc * (2.0 * PI / m as f64);
            loop {
                acc += (0..m)
                    .map(|j| xy(2.0 * PI * (j as f64 + 0.5) / m as f64))
                    .sum::<Complex64>();
                m *= 2;
                let next = acc * (2.0 * PI / m as f64);
                if (next - prev).norm() <= 1e-13 * next.norm() + 1e-17 * theta0 || m >= 1 << 16 {
                    return next;
                }
                prev = next;
            }
        };
        let n = 32usize;
        let breaks: Vec<f64> = (0..=n).map(|k| kappa_max * k as f64 / n as f64).collect();
        let mut cache: BTreeMap<u64, f64> = BTreeMap::new();
        let re = PiecewiseCheb::build(
            |k| {
                let v = theta(k);
                cache.insert(k.to_bits(), v.im);
                v.re
            },
            &breaks,
            20,
            1e-13,
        );
        let lookup = |k: f64| cache.get(&k.to_bits()).copied();
        // for g = f the imaginary part is rounding noise; judge it against the real part's size
        let floor = 1e-13 * theta0.max(re.max_abs());
        let im = PiecewiseCheb::build_with_floor(
            |k| lookup(k).unwrap_or_else(|| theta(k).im),
            &breaks,
            20,
            1e-13,
            floor,
        );
        Self {
            f: *f,
            g: *g,
            bt,
            re,
            im,
            kappa_max,
        }
    }

    fn theta(&self, kappa: f64) -> Complex64 {
        Complex64::new(self.re.eval(kappa), self.im.eval(kappa))
    }

    /// Time factor F_t(ω)·conj G_t(ω) with the amplitudes, for signed frequency ω.
    fn time(&self, omega: f64) -> Complex64 {
        // ∫ f_t e^{−iωt} dt
        let a = self.bt.fourier(self.f.axis(0), -omega);
        let b = self.bt.fourier(self.g.axis(0), -omega);
        a * b.conj() * (self.f.amplitude * self.g.amplitude)
    }

    /// ŵ(ξ) with its quadrature error; `abs` is an absolute tolerance on ŵ.
    fn mode(&self, base: StateSpec, xi: f64, abs: f64) -> (Complex64, f64) {
        let xi = xi.abs();
        if let StateSpec::Kms { .. } = base {
            if xi == 0.0 {
                return (Complex64::new(f64::INFINITY, 0.0), f64::INFINITY);
            }
        }
        let integrand = |kappa: f64| {
            let w = sqrt(kappa * kappa + xi * xi);
            if w == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let (np, nm) = occupation(base, w);
            let mut s = self.time(w) * np;
            if nm != 0.0 {
                s += self.time(-w) * nm;
            }
            self.theta(kappa) * s * (kappa / (2.0 * w))
        };
        let breaks = self.re.breakpoints();
        let c = 1.0 / (8.0 * PI * PI * PI);
        let q = adaptive(
            integrand,
            0.0,
            self.kappa_max,
            &breaks,
            Tol::new((abs / c).max(1e-300), 1e-11).panels(2000),
        );
        (
            q.value * c,
            q.err * c + self.re.tail.max(self.im.tail) * self.kappa_max,
        )
    }
}

/// Bose weights (1 + n(ω), n(ω)); (1, 0) for the vacuum.
fn occupation(base: StateSpec, w: f64) -> (f64, f64) {
    match base {
        StateSpec::Vacuum => (1.0, 0.0),
        StateSpec::Kms { beta } => {
            let n = 1.0 / expm1(beta * w);
            (1.0 + n, n)
        }
    }
}

/// ŵ(ξ_n), ξ_n = nπ/d for n = 0..=N, for a transverse pair. For a KMS base the n = 0 entry
/// is +∞ (the Bose factor makes the κ-integral diverge logarithmically at ξ = 0).
#[derive(Debug, Clone)]
pub struct ModeCoefficients {
    pub xi: Vec<f64>,
    pub values: Vec<Complex64>,
    pub err: Vec<f64>,
    pub perp: (TestFunction, TestFunction),
    pub d: f64,
}

impl ModeCoefficients {
    /// ŵ(ξ_n) for any integer n; ŵ(−ξ) = ŵ(ξ).
    pub fn at(&self, n: i64) -> Option<Complex64> {
        self.values.get(n.unsigned_abs() as usize).copied()
    }
}

pub fn mode_coefficients(
    base: StateSpec,
    f_perp: &TestFunction,
    g_perp: &TestFunction,
    n: usize,
    d: f64,
) -> Result<ModeCoefficients> {
    mode_coefficients_with(&BumpTransformTable::default(), base, f_perp, g_perp, n, d)
}

pub fn mode_coefficients_with(
    bt: &BumpTransformTable,
    base: StateSpec,
    f_perp: &TestFunction,
    g_perp: &TestFunction,
    n: usize,
    d: f64,
) -> Result<ModeCoefficients> {
    Geometry::slab(d)?;
    let tr = Transverse::new(f_perp, g_perp, bt);
    let mut xi = Vec::with_capacity(n + 1);
    let mut values = Vec::with_capacity(n + 1);
    let mut err = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let x = k as f64 * PI / d;
        let (v, e) = tr.mode(base, x, 0.0);
        xi.push(x);
        values.push(v);
        err.push(e);
    }
    Ok(ModeCoefficients {
        xi,
        values,
        err,
        perp: (*f_perp, *g_perp),
        d,
    })
}

/// f_n = ∫ f_z(z) e^{inπz/d} dz for n = 0..n_max by FFT of samples on [−d, d].
fn fourier_coefficients(fz: Bump1, d: f64, n_max: usize) -> Vec<Complex64> {
    let need = (2 * n_max + 2).max((1000.0 * d / (PI * fz.radius)) as usize * 2);
    let m = need.next_power_of_two().clamp(256, 1 << 20);
    let h = 2.0 * d / m as f64;
    // z_j = −d + jh; e^{inπz_j/d} = (−1)^n e^{2πi nj/m}
    let mut buf: Vec<Complex64> = (0..m)
        .map(|j| Complex64::new(fz.value(-d + j as f64 * h), 0.0))
        .collect();
    fft_in_place(&mut buf, 1.0);
    (0..=n_max)
        .map(|n| buf[n % m] * h * if n % 2 == 0 { 1.0 } else { -1.0 })
        .collect()
}

/// Σ_{n≥1} (π/d) Re ŵ(ξ_n)|f_n − f_{−n}|² for a factorized f; equals ω₂(f, f) in the slab.
pub fn positivity_form(state: &BoundaryState, f: &TestFunction) -> Result<Estimate> {
    positivity_form_with(&BumpTransformTable::default(), state, f)
}

pub fn positivity_form_with(
    bt: &BumpTransformTable,
    state: &BoundaryState,
    f: &TestFunction,
) -> Result<Estimate> {
    let Geometry::Slab { d } = state.geometry else {
        return Err(invalid("positivity_form needs a slab geometry"));
    };
    if !f.inside(&state.geometry) {
        return Err(invalid("positivity_form needs supp f inside the open slab"));
    }
    let fz = f.axis(3);
    let n_cap = ((1000.0 * d / (PI * fz.radius)) as usize).max(16);
    let coef = fourier_coefficients(fz, d, n_cap);
    let tr = Transverse::new(f, f, bt);
    // quadrature cross-check of the FFT coefficients
    let mut fft_err: f64 = 0.0;
    for (n, c) in coef.iter().enumerate().take(9) {
        fft_err = fft_err.max((fz.fourier(n as f64 * PI / d) - c).norm());
    }
    let mut sum = 0.0;
    let mut err = 0.0;
    let mut small = 0;
    let mut scale: f64 = 0.0;
    for (n, c) in coef.iter().enumerate().skip(1) {
        let diff = c - c.conj();
        let weight = diff.norm_sqr();
        // each term only needs to be good to a small fraction of the running sum
        let abs = if scale > 0.0 {
            1e-15 * scale / (PI / d * weight).max(1e-300)
        } else {
            0.0
        };
        let (w, e) = tr.mode(state.base, n as f64 * PI / d, abs);
        let term = PI / d * w.re * weight;
        sum += term;
        scale = scale.max(sum.abs());
        err += PI / d * (e * weight + w.norm() * 4.0 * fft_err * diff.norm());
        if term.abs() < 1e-14 * sum.abs() {
            small += 1;
            if small >= 5 {
                break;
            }
        } else {
            small = 0;
        }
    }
    Ok(Estimate {
        value: sum,
        err: err + 1e-14 * sum.abs(),
    })
}

/// Transverse-integrated thermal remainder ŵ^T(ξ) = (1/4π²)∫_ξ^∞ dk n(k) of a point source,
/// by quadrature.
fn thermal_mode_quad(beta: f64, xi: f64) -> f64 {
    let f = |k: f64| 1.0 / expm1(beta * k);
    let hi = xi + 60.0 / beta;
    let q = adaptive(f, xi, hi, &[], Tol::new(1e-300, 1e-13));
    let tail = exp(-beta * hi) / beta;
    (q.value + tail) / (4.0 * PI * PI)
}

/// −log(1 − e^{−βξ})/(4π²β).
pub fn thermal_mode_closed(beta: f64, xi: f64) -> f64 {
    -log(-expm1(-beta * xi)) / (4.0 * PI * PI * beta)
}

/// Least-squares fit of ŵ = a·log ξ + b.
fn log_fit(beta: f64, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..points {
        let x = log(lo) + (log(hi) - log(lo)) * k as f64 / (points - 1) as f64;
        let y = thermal_mode_quad(beta, exp(x));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let n = points as f64;
    let a = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (a, (sy - a * sx) / n)
}

/// Outcome of [`hypothesis_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    /// (ξ, ŵ^T(ξ), ξ·ŵ^T(ξ)) over the small-ξ grid.
    pub small_xi: Vec<(f64, f64, f64)>,
    /// |ξŵ^T| strictly decreasing as ξ → 0⁺ on the grid.
    pub vanishes_at_zero: bool,
    /// Fitted log coefficient a in ŵ^T ≈ a log ξ + b, coarse and refined grids.
    pub log_coefficient: (f64, f64),
    /// The coefficient expected from the closed form, −1/(4π²β).
    pub expected_log_coefficient: f64,
    /// Relative change of a under grid refinement.
    pub fit_stability: f64,
    /// (ξ_n, ŵ^T(ξ_n)) for n = 1..=64.
    pub modes: Vec<(f64, f64)>,
    /// Largest |ŵ^T(ξ_{n+1}) − ŵ^T(ξ_n)| on the mode grid.
    pub max_jump: f64,
    pub bounded: bool,
    /// Largest |quadrature − closed form| over all sampled ξ.
    pub closed_form_err: f64,
}

/// Conditions of the image construction for the thermal remainder W = ω̃₂^T − ω̃₂⁰, checked
/// on its transverse-integrated mode function. A vacuum base gives W = 0 and a report of zeros.
pub fn hypothesis_check(state: &BoundaryState) -> Result<HypothesisReport> {
    let Geometry::Slab { d } = state.geometry else {
        return Err(invalid("hypothesis_check needs a slab geometry"));
    };
    let beta = match state.base {
        StateSpec::Vacuum => {
            let small_xi = (0..16)
                .map(|k| (1e-3 * PI / d * libm::pow(100.0, k as f64 / 15.0), 0.0, 0.0))
                .collect();
            let modes = (1..=64).map(|n| (n as f64 * PI / d, 0.0)).collect();
            return Ok(HypothesisReport {
                small_xi,
                vanishes_at_zero: true,
                log_coefficient: (0.0, 0.0),
                expected_log_coefficient: 0.0,
                fit_stability: 0.0,
                modes,
                max_jump: 0.0,
                bounded: true,
                closed_form_err: 0.0,
            });
        }
        StateSpec::Kms { beta } => beta,
    };
    let (lo, hi) = (1e-3 * PI / d, 1e-1 * PI / d);
    let mut closed_form_err: f64 = 0.0;
    let small_xi: Vec<(f64, f64, f64)> = (0..16)
        .map(|k| {
            let xi = lo * libm::pow(hi / lo, k as f64 / 15.0);
            let w = thermal_mode_quad(beta, xi);
            closed_form_err = closed_form_err.max((w - thermal_mode_closed(beta, xi)).abs());
            (xi, w, xi * w)
        })
        .collect();
    let vanishes_at_zero = small_xi.windows(2).all(|p| p[0].2.abs() < p[1].2.abs());
    let a16 = log_fit(beta, lo, hi, 16).0;
    let a32 = log_fit(beta, lo, hi, 32).0;
    let modes: Vec<(f64, f64)> = (1..=64)
        .map(|n| {
            let xi = n as f64 * PI / d;
            let w = thermal_mode_quad(beta, xi);
            closed_form_err = closed_form_err.max((w - thermal_mode_closed(beta, xi)).abs());
            (xi, w)
        })
        .collect();
    let max_jump = modes
        .windows(2)
        .map(|p| (p[1].1 - p[0].1).abs())
        .fold(0.0, f64::max);
    let bounded = modes
        .iter()
        .all(|m| m.1.is_finite() && m.1.abs() <= modes[0].1.abs());
    Ok(HypothesisReport {
        small_xi,
        vanishes_at_zero,
        log_coefficient: (a16, a32),
        expected_log_coefficient: -1.0 / (4.0 * PI * PI * beta),
        fit_stability: ((a32 - a16) / a16).abs(),
        modes,
        max_jump,
        bounded,
        closed_form_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{bump_cosine_transform, make_bump, Point4};

    #[test]
    fn table_matches_direct_transform() {
        let t = BumpTransformTable::new(300.0);
        for &q in &[0.0, 0.7, 3.3, 17.0, 99.5, 250.0] {
            assert!((t.eval(q) - bump_cosine_transform(q)).abs() < 1e-14, "{q}");
        }
    }

    #[test]
    fn fft_coefficients_match_quadrature() {
        let b = Bump1 {
            center: 0.4,
            radius: 0.2,
        };
        let c = fourier_coefficients(b, 1.0, 40);
        for n in [0usize, 1, 5, 17, 40] {
            assert!((c[n] - b.fourier(n as f64 * PI)).norm() < 1e-13, "{n}");
        }
    }

    #[test]
    fn vacuum_modes_nonnegative_and_decaying() {
        let f = make_bump(Point4::new(0.0, 0.0, 0.0, 0.5), [0.3, 0.4, 0.4, 0.2], 1.0).unwrap();
        let m = mode_coefficients(StateSpec::Vacuum, &f, &f, 12, 1.0).unwrap();
        for v in &m.values {
            assert!(v.re >= 0.0 && v.im.abs() <= 1e-12 * v.re.max(1e-300));
        }
        assert!(m.values[12].re < m.values[1].re);
        assert_eq!(m.at(-3), m.at(3));
    }

    #[test]
    fn thermal_mode_closed_form() {
        for &xi in &[1e-3, 0.1, 2.0, 9.0] {
            let a = thermal_mode_quad(1.3, xi);
            let b = thermal_mode_closed(1.3, xi);
            assert!((a - b).abs() < 1e-10 * b.abs().max(1e-30), "{xi} {a} {b}");
        }
    }
}
