//! ∬ f(x) K(x, x′) g(x′) dx dx′ for translation-invariant kernels and their image sums.
//!
//! For product bumps the eight-dimensional integral collapses onto the kernel's
//! arguments: with c_a the one-dimensional correlations of the factors,
//!
//!   ∬ f K g = A ∫ dΔt c_t(Δt) ∫ dR S(R) k(Δt, R),   S(R) = ∫_{|Δ𝐱|=R} c_x c_y c_z dσ.
//!
//! S is tabulated once per pair. When the (Δt, R) box avoids the light cone the double
//! integral is done at ε = 0 by tensor Gauss rules; otherwise it is done adaptively on an
//! ε ladder and extrapolated to ε = 0.

use crate::math::Ipow;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::correlation::{ring_integral, Correlation1};
use super::{Base, EpsilonKernel, ImageLayout, SmearedValue};
use crate::error::{Error, Result};
use crate::fields::{Bump1, FieldSum, TestFunction};
use crate::math::cheb::PiecewiseCheb;
use crate::math::quad::{adaptive, GaussLegendre, Tol};
use crate::math::richardson::extrapolate_to_zero;
use crate::math::series::{sum_paired, SeriesControl};
use crate::math::{sqrt, PI};

/// Accuracy controls for [`smear2_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmearOptions {
    /// Requested relative accuracy of the returned value.
    pub rel_tol: f64,
    /// ε₀ as a fraction of the smallest support radius.
    pub eps_ratio: f64,
    /// Number of ε values ε₀·2^{−k}.
    pub ladder: usize,
}

impl Default for SmearOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            eps_ratio: 1.0 / 32.0,
            ladder: 5,
        }
    }
}

fn sorted_breaks(mut v: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    v.retain(|x| *x >= lo && *x <= hi);
    v.push(lo);
    v.push(hi);
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tiny = 1e-12 * (hi - lo).max(1e-300);
    v.dedup_by(|a, b| (*a - *b).abs() <= tiny);
    v
}

fn interval_distance(lo: f64, hi: f64) -> f64 {
    if lo > 0.0 {
        lo
    } else if hi < 0.0 {
        -hi
    } else {
        0.0
    }
}

fn interval_reach(lo: f64, hi: f64) -> f64 {
    lo.abs().max(hi.abs())
}

/// Time and transverse part of a pair: c_t and the ring profile Q(ρ) = ∫ c_x c_y dφ.
pub(crate) struct Transverse {
    ct: Correlation1,
    q: PiecewiseCheb,
    rho: (f64, f64),
    r_min: f64,
    amp: f64,
}

impl Transverse {
    pub(crate) fn new(f: &TestFunction, g: &TestFunction) -> Self {
        let ct = Correlation1::tabulated(f.axis(0), g.axis(0));
        let cx = Correlation1::tabulated(f.axis(1), g.axis(1));
        let cy = Correlation1::tabulated(f.axis(2), g.axis(2));
        let (sx, sy) = (cx.support(), cy.support());
        let rho_lo =
            sqrt(interval_distance(sx.0, sx.1).ipow(2) + interval_distance(sy.0, sy.1).ipow(2));
        let rho_hi = sqrt(interval_reach(sx.0, sx.1).ipow(2) + interval_reach(sy.0, sy.1).ipow(2));
        let mut br = Vec::new();
        for bx in cx.breakpoints() {
            br.push(bx.abs());
            for by in cy.breakpoints() {
                br.push(by.abs());
                br.push(sqrt(bx * bx + by * by));
            }
        }
        let br = sorted_breaks(br, rho_lo, rho_hi);
        let abs = 1e-16 * 2.0 * PI * cx.max_abs() * cy.max_abs();
        let fx = |s: f64| cx.eval(s);
        let fy = |s: f64| cy.eval(s);
        let q = PiecewiseCheb::build(
            |rho| ring_integral(rho, &fx, &fy, sx, sy, 1e-13, abs),
            &br,
            20,
            1e-12,
        );
        let r_min = f
            .radii
            .iter()
            .chain(g.radii.iter())
            .cloned()
            .fold(f64::INFINITY, f64::min);
        Self {
            ct,
            q,
            rho: (rho_lo, rho_hi),
            r_min,
            amp: f.amplitude * g.amplitude,
        }
    }

    /// S(R) table for a given z-correlation.
    pub(crate) fn radial(&self, cz: &Correlation1) -> Radial {
        let (zl, zh) = cz.support();
        let (rho_lo, rho_hi) = self.rho;
        let r_lo = sqrt(rho_lo * rho_lo + interval_distance(zl, zh).ipow(2));
        let r_hi = sqrt(rho_hi * rho_hi + interval_reach(zl, zh).ipow(2));
        let qb = self.q.breakpoints();
        let zb = cz.breakpoints();
        let mut br = Vec::new();
        for &rb in &qb {
            br.push(rb);
            for &b in &zb {
                br.push(sqrt(rb * rb + b * b));
                br.push(b.abs());
            }
        }
        let br = sorted_breaks(br, r_lo, r_hi);
        let s = PiecewiseCheb::build(|r| self.shell(cz, &qb, r), &br, 16, 1e-11);
        Radial { s, r: (r_lo, r_hi) }
    }

    /// R ∫ dζ c_z(ζ) Q(√(R² − ζ²)).
    fn shell(&self, cz: &Correlation1, qb: &[f64], r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let (rho_lo, rho_hi) = self.rho;
        if r <= rho_lo {
            return 0.0;
        }
        let u_hi = sqrt(r * r - rho_lo * rho_lo);
        let u_lo = if r > rho_hi {
            sqrt(r * r - rho_hi * rho_hi)
        } else {
            0.0
        };
        let (zl, zh) = cz.support();
        let mut breaks: Vec<f64> = cz.breakpoints();
        for &rb in qb {
            if rb < r {
                let u = sqrt(r * r - rb * rb);
                breaks.push(u);
                breaks.push(-u);
            }
        }
        let f = |zeta: f64| {
            let rho2 = r * r - zeta * zeta;
            cz.eval(zeta) * self.q.eval(sqrt(rho2.max(0.0)))
        };
        let scale = 1e-16 * cz.max_abs() * 2.0 * PI;
        let mut total = 0.0;
        let pieces: [(f64, f64); 2] = if u_lo > 0.0 {
            [(-u_hi, -u_lo), (u_lo, u_hi)]
        } else {
            [(-u_hi, u_hi), (0.0, 0.0)]
        };
        for (a, b) in pieces {
            let (a, b) = (a.max(zl), b.min(zh));
            if b > a {
                total += adaptive(f, a, b, &breaks, Tol::new(scale, 1e-13).panels(800)).value;
            }
        }
        r * total
    }
}

/// Tabulated S(R) on [r.0, r.1].
pub(crate) struct Radial {
    s: PiecewiseCheb,
    r: (f64, f64),
}

fn crossing(t: (f64, f64), r: (f64, f64)) -> bool {
    let a = interval_distance(t.0, t.1);
    let b = interval_reach(t.0, t.1);
    a <= r.1 && b >= r.0
}

fn tensor_sum(base: Base, tr: &Transverse, rad: &Radial, m: usize) -> (Complex64, f64) {
    let gl = GaussLegendre::new(m);
    let (tn, tw) = gl.composite(&tr.ct.breakpoints());
    let (rn, rw) = gl.composite(&rad.s.breakpoints());
    let wt: Vec<f64> = tn
        .iter()
        .zip(&tw)
        .map(|(t, w)| w * tr.ct.eval(*t))
        .collect();
    let ws: Vec<f64> = rn
        .iter()
        .zip(&rw)
        .map(|(r, w)| w * rad.s.eval(*r))
        .collect();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for (r, wr) in rn.iter().zip(&ws) {
        let mut row = Complex64::new(0.0, 0.0);
        for (t, wtt) in tn.iter().zip(&wt) {
            let v = base.eval(*t, 0.0, *r) * *wtt;
            row += v;
            mag += v.norm() * wr.abs();
        }
        sum += row * *wr;
    }
    (sum, mag)
}

fn adaptive_at(base: Base, tr: &Transverse, rad: &Radial, eps: f64, rel: f64) -> (Complex64, f64) {
    let (t_lo, t_hi) = tr.ct.support();
    let tb = tr.ct.breakpoints();
    let ct_max = tr.ct.max_abs();
    let inner = |r: f64| -> Complex64 {
        let mut br = tb.clone();
        br.push(r);
        br.push(-r);
        let span = t_hi - t_lo;
        let kscale = 1.0 / (4.0 * PI * PI * (r * r + eps * eps + span * span));
        let q = adaptive(
            |t| base.eval(t, eps, r) * tr.ct.eval(t),
            t_lo,
            t_hi,
            &br,
            Tol::new(1e-15 * ct_max * span * kscale, rel * 0.1).panels(3000),
        );
        q.value
    };
    let mut rb = rad.s.breakpoints();
    for t in &tb {
        rb.push(t.abs());
    }
    let q = adaptive(
        |r| inner(r) * rad.s.eval(r),
        rad.r.0,
        rad.r.1,
        &rb,
        Tol::new(0.0, rel).panels(3000),
    );
    (q.value, q.err + rel * 0.1 * q.value.norm())
}

fn lagrange_amplification(h: &[f64]) -> f64 {
    (0..h.len())
        .map(|k| {
            h.iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, hj)| hj / (hj - h[k]))
                .product::<f64>()
                .abs()
        })
        .sum()
}

/// Smeared value of the translation-invariant kernel for the pair (tr, rad), without the
/// accuracy check; callers summing several terms check the total with [`finish`].
fn integrate_raw(
    base: Base,
    tr: &Transverse,
    rad: &Radial,
    opts: &SmearOptions,
) -> Result<SmearedValue> {
    let amp = tr.amp;
    if rad.r.1 <= rad.r.0 || tr.ct.support().1 <= tr.ct.support().0 {
        return Ok(SmearedValue::real(0.0, 0.0));
    }
    let quad_rel = opts.rel_tol * 1e-2;
    if !crossing(tr.ct.support(), rad.r) {
        let mut prev: Option<Complex64> = None;
        for m in [8usize, 12, 16, 24] {
            let (s, mag) = tensor_sum(base, tr, rad, m);
            if let Some(p) = prev {
                let err = (s - p).norm() + 1e-12 * mag;
                if err <= quad_rel * s.norm().max(1e-6 * mag) {
                    return Ok(SmearedValue::new(s * amp, err * amp.abs()));
                }
            }
            prev = Some(s);
        }
        let (v, e) = adaptive_at(base, tr, rad, 0.0, quad_rel);
        return Ok(SmearedValue::new(v * amp, e * amp.abs()));
    }
    let eps0 = opts.eps_ratio * tr.r_min;
    let n = opts.ladder.max(2);
    let mut h = Vec::with_capacity(n);
    let mut vals = Vec::with_capacity(n);
    let mut qerr: f64 = 0.0;
    for k in 0..n {
        let eps = eps0 / (1u64 << k) as f64;
        let (v, e) = adaptive_at(base, tr, rad, eps, quad_rel);
        h.push(eps);
        vals.push(v);
        qerr = qerr.max(e);
    }
    let (full, reduced) = extrapolate_to_zero(&h, &vals);
    let err = (full - reduced).norm() + lagrange_amplification(&h) * qerr;
    Ok(SmearedValue::new(full * amp, err * amp.abs()))
}

fn finish(s: SmearedValue, opts: &SmearOptions) -> Result<SmearedValue> {
    let (v, err) = (s.value, s.err);
    let tol = opts.rel_tol * v.norm();
    if err > tol && err > 1e-300 {
        return Err(Error::Accuracy { best: v, err, tol });
    }
    Ok(s)
}

fn z_bump(f: &TestFunction, center: f64) -> Bump1 {
    Bump1 {
        center,
        radius: f.radii[3],
    }
}

fn free_pair(
    base: Base,
    f: &TestFunction,
    g: &TestFunction,
    opts: &SmearOptions,
) -> Result<SmearedValue> {
    let tr = Transverse::new(f, g);
    let rad = tr.radial(&Correlation1::tabulated(f.axis(3), g.axis(3)));
    integrate_raw(base, &tr, &rad, opts)
}

/// G(R) = ∫ c_t(t) k(t, R) dt tabulated for R beyond the time reach of c_t, where k is
/// smooth in t; shared by every image term whose distance range lies there.
struct FarTable {
    g: PiecewiseCheb,
    r_min: f64,
    r_max: f64,
}

impl FarTable {
    fn new(base: Base, tr: &Transverse, r_min: f64, r_max: f64) -> Self {
        let (t_lo, t_hi) = tr.ct.support();
        let reach = interval_reach(t_lo, t_hi);
        let gap = (r_min - reach).max(1e-3 * (t_hi - t_lo));
        let mut br = alloc::vec![r_min];
        let mut w = gap;
        while *br.last().unwrap() < r_max {
            br.push((r_min + w).min(r_max));
            w *= 2.0;
        }
        // the nearest light-cone singularity is at least `gap` away from the t-range, so a
        // fixed Gauss rule per correlation panel is already at machine precision
        let (tn, tw) = GaussLegendre::new(48).composite(&tr.ct.breakpoints());
        let wt: Vec<f64> = tn
            .iter()
            .zip(&tw)
            .map(|(t, w)| w * tr.ct.eval(*t))
            .collect();
        let val = |r: f64| -> f64 {
            tn.iter()
                .zip(&wt)
                .map(|(t, w)| base.eval(*t, 0.0, r).re * w)
                .sum()
        };
        Self {
            g: PiecewiseCheb::build(val, &br, 20, 1e-14),
            r_min,
            r_max,
        }
    }

    /// ∫ dζ c_z(ζ) ∫ ρ dρ Q(ρ) G(√(ρ² + ζ²)) with Gauss rules of order m.
    /// Returns (value, Σ|terms|, Σ|weights|).
    fn image(&self, tr: &Transverse, cz: &Correlation1, m: usize) -> (f64, f64, f64) {
        let gl = GaussLegendre::new(m);
        let (zn, zw) = gl.composite(&cz.breakpoints());
        let (rn, rw) = gl.composite(&tr.q.breakpoints());
        let wz: Vec<f64> = zn.iter().zip(&zw).map(|(z, w)| w * cz.eval(*z)).collect();
        let wr: Vec<f64> = rn
            .iter()
            .zip(&rw)
            .map(|(r, w)| w * r * tr.q.eval(*r))
            .collect();
        let mut sum = 0.0;
        let mut mag = 0.0;
        for (z, a) in zn.iter().zip(&wz) {
            let mut row = 0.0;
            for (r, b) in rn.iter().zip(&wr) {
                let rr = sqrt(r * r + z * z);
                let v = self.g.eval(rr.clamp(self.r_min, self.r_max)) * b;
                row += v;
                mag += v.abs() * a.abs();
            }
            sum += row * a;
        }
        let mass =
            wz.iter().map(|w| w.abs()).sum::<f64>() * wr.iter().map(|w| w.abs()).sum::<f64>();
        (sum, mag, mass)
    }
}

/// Σ over slab images of ∬ f K̃ g, with g's z-factor moved to each image position.
fn slab_sum(
    base: Base,
    f: &TestFunction,
    g: &TestFunction,
    d: f64,
    ctl: SeriesControl,
    opts: &SmearOptions,
) -> Result<SmearedValue> {
    let tr = Transverse::new(f, g);
    let fz = f.axis(3);
    let cz = g.center.z;
    let (t_lo, t_hi) = tr.ct.support();
    // images whose distance range starts this far past the light-cone reach use the G table
    let far_from = interval_reach(t_lo, t_hi) + 0.5 * (t_hi - t_lo);
    let reach_z = f.radii[3] + g.radii[3];
    let r_max =
        sqrt(tr.rho.1 * tr.rho.1 + (2.0 * d * (ctl.n_max as f64 + 1.0) + d + reach_z).ipow(2));
    let mut far: Option<FarTable> = None;
    let mut qerr = 0.0;
    let mut term = |zc: f64| -> Result<Complex64> {
        let czc = Correlation1::tabulated(fz, z_bump(g, zc));
        let (zl, zh) = czc.support();
        let r_lo = sqrt(tr.rho.0 * tr.rho.0 + interval_distance(zl, zh).ipow(2));
        if r_lo >= far_from && r_lo < r_max {
            let table = far.get_or_insert_with(|| FarTable::new(base, &tr, far_from, r_max));
            let (a, _, _) = table.image(&tr, &czc, 24);
            let (b, mag, mass) = table.image(&tr, &czc, 32);
            let err = (b - a).abs() + 1e-13 * mag + table.g.tail * mass;
            qerr += err * tr.amp.abs();
            return Ok(Complex64::new(b * tr.amp, 0.0));
        }
        let rad = tr.radial(&czc);
        let v = integrate_raw(base, &tr, &rad, opts)?;
        qerr += v.err;
        Ok(v.value)
    };
    let c = term(cz)? - term(-cz)?;
    let floor = c.norm();
    let out = sum_paired(
        [c.re, c.im],
        |n| {
            let s = 2.0 * d * n as f64;
            let v = term(cz + s)? + term(cz - s)? - term(s - cz)? - term(-s - cz)?;
            Ok([v.re, v.im])
        },
        ctl.floor(floor),
    )?;
    finish(
        SmearedValue::new(Complex64::new(out.value[0], out.value[1]), out.err + qerr),
        opts,
    )
}

/// ∬ f(x) K(x, x′) g(x′) dx dx′ extrapolated to ε = 0.
pub fn smear2(k: &EpsilonKernel, f: &TestFunction, g: &TestFunction) -> Result<SmearedValue> {
    smear2_with(k, f, g, &SmearOptions::default())
}

pub fn smear2_with(
    k: &EpsilonKernel,
    f: &TestFunction,
    g: &TestFunction,
    opts: &SmearOptions,
) -> Result<SmearedValue> {
    match k.layout {
        ImageLayout::Free => free_pair(k.base, f, g, opts).and_then(|v| finish(v, opts)),
        ImageLayout::HalfSpace => {
            // K̃(ι x, x′) smeared with f equals K̃ smeared with f∘ι
            let fr = crate::fields::isometry_apply(crate::fields::Isometry::ReflectZ, f);
            finish(
                free_pair(k.base, f, g, opts)?.minus(free_pair(k.base, &fr, g, opts)?),
                opts,
            )
        }
        ImageLayout::Slab { d, series } => slab_sum(
            k.base,
            f,
            g,
            d,
            SeriesControl::new(series.n_max, series.tail_tol),
            opts,
        ),
    }
}

/// Bilinear extension of [`smear2`] to finite sums of bumps.
pub fn smear2_sum(
    k: &EpsilonKernel,
    f: &FieldSum,
    g: &FieldSum,
    opts: &SmearOptions,
) -> Result<SmearedValue> {
    let mut acc = SmearedValue::real(0.0, 0.0);
    for (a, fa) in &f.terms {
        for (b, gb) in &g.terms {
            acc = acc.plus(smear2_with(k, fa, gb, opts)?.scale(a * b));
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_bump, Point4};
    use crate::kernels::vacuum_kernel;

    #[test]
    fn crossing_detection() {
        assert!(crossing((-0.5, 0.5), (0.0, 1.0)));
        assert!(!crossing((-0.5, 0.5), (0.6, 1.0)));
        assert!(crossing((2.0, 3.0), (0.5, 2.5)));
        assert!(!crossing((2.0, 3.0), (0.5, 1.9)));
        assert!(crossing((-3.0, -2.0), (2.5, 4.0)));
    }

    #[test]
    fn lagrange_amplification_of_single_point_is_one() {
        assert_eq!(lagrange_amplification(&[0.1]), 1.0);
        assert!(lagrange_amplification(&[0.1, 0.05]) >= 3.0 - 1e-12);
    }

    #[test]
    fn shell_total_equals_product_of_integrals() {
        let f = make_bump(
            Point4::new(0.0, 0.1, -0.2, 0.3),
            [0.3, 0.4, 0.35, 0.25],
            1.0,
        )
        .unwrap();
        let g = make_bump(Point4::new(0.1, -0.3, 0.2, 0.9), [0.2, 0.3, 0.45, 0.3], 1.0).unwrap();
        let tr = Transverse::new(&f, &g);
        let rad = tr.radial(&Correlation1::tabulated(f.axis(3), g.axis(3)));
        let gl = GaussLegendre::new(32);
        let (n, w) = gl.composite(&rad.s.breakpoints());
        let total: f64 = n.iter().zip(&w).map(|(r, w)| w * rad.s.eval(*r)).sum();
        let spatial = |h: &TestFunction| (1..4).map(|a| h.axis(a).radius).product::<f64>();
        let int1 = crate::fields::bump_cosine_transform(0.0);
        let exact = spatial(&f) * spatial(&g) * int1.powi(6);
        assert!((total - exact).abs() < 1e-10 * exact, "{total} {exact}");
    }

    #[test]
    fn spacelike_vacuum_value_is_real() {
        let f = make_bump(Point4::new(0.0, 0.0, 0.0, 0.0), [0.2; 4], 1.0).unwrap();
        let g = make_bump(Point4::new(0.0, 1.5, 0.0, 0.0), [0.2; 4], 1.0).unwrap();
        let v = smear2(&vacuum_kernel(), &f, &g).unwrap();
        assert!(v.value.re > 0.0);
        assert!(v.value.im.abs() <= 1e-8 * v.value.norm());
    }

    #[test]
    fn far_table_matches_radial_route() {
        let f = make_bump(Point4::new(0.0, 0.0, 0.0, 0.4), [0.3, 0.3, 0.35, 0.2], 1.0).unwrap();
        let tr = Transverse::new(&f, &f);
        for base in [Base::Vacuum, Base::Kms { beta: 1.0 }] {
            let table = FarTable::new(base, &tr, 0.9, 50.0);
            for zc in [1.8, -3.6, 8.4] {
                let cz = Correlation1::tabulated(f.axis(3), z_bump(&f, zc));
                let a =
                    integrate_raw(base, &tr, &tr.radial(&cz), &SmearOptions::default()).unwrap();
                let (b, _, _) = table.image(&tr, &cz, 32);
                assert!(
                    (a.value.re - b).abs() < 1e-9 * b.abs(),
                    "{base:?} {zc} {} {b}",
                    a.value.re
                );
            }
        }
    }
}
