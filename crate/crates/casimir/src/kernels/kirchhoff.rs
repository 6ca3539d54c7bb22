//! Retarded and advanced fundamental solutions of the massless wave operator and the
//! causal pairing E(f, g) = ⟨f, (E⁺ − E⁻) g⟩.

use crate::math::Ipow;
use num_complex::Complex64;

use super::correlation::{sphere_integral, Correlation1};
use super::smear::SmearOptions;
use super::{smear2_with, vacuum_kernel, Estimate};
use crate::error::Result;
use crate::fields::{FieldSum, Point4, TestFunction};
use crate::math::quad::{adaptive, Tol};
use crate::math::{sqrt, PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Retarded,
    Advanced,
    /// Advanced minus retarded.
    Causal,
}

fn box_distance(x: &Point4, f: &TestFunction) -> (f64, f64) {
    let mut near = 0.0;
    let mut far = 0.0;
    for (a, xa) in [(1, x.x), (2, x.y), (3, x.z)] {
        let b = f.axis(a);
        let (lo, hi) = (b.lo() - xa, b.hi() - xa);
        let n = if lo > 0.0 {
            lo
        } else if hi < 0.0 {
            -hi
        } else {
            0.0
        };
        near += n * n;
        far += lo.abs().max(hi.abs()).ipow(2);
    }
    (sqrt(near), sqrt(far))
}

fn one_side(retarded: bool, f: &TestFunction, x: &Point4) -> f64 {
    let (r_lo, r_hi) = box_distance(x, f);
    let bt = f.axis(0);
    // retarded: source time t − ρ; advanced: t + ρ
    let (a, b) = if retarded {
        (x.t - bt.hi(), x.t - bt.lo())
    } else {
        (bt.lo() - x.t, bt.hi() - x.t)
    };
    let lo = a.max(r_lo).max(0.0);
    let hi = b.min(r_hi);
    if hi <= lo {
        return 0.0;
    }
    let [_, bx, by, bz] = f.axes();
    let fx = |s: f64| bx.value(x.x + s);
    let fy = |s: f64| by.value(x.y + s);
    let fz = |s: f64| bz.value(x.z + s);
    let support = [
        (bx.lo() - x.x, bx.hi() - x.x),
        (by.lo() - x.y, by.hi() - x.y),
        (bz.lo() - x.z, bz.hi() - x.z),
    ];
    let integrand = |rho: f64| {
        let ts = if retarded { x.t - rho } else { x.t + rho };
        let w = bt.value(ts);
        if w == 0.0 {
            return 0.0;
        }
        rho * w * sphere_integral(rho, &fx, &fy, &fz, support, 1e-12, 1e-17)
    };
    let q = adaptive(integrand, lo, hi, &[], Tol::new(1e-16, 1e-11).panels(400));
    f.amplitude * q.value / (4.0 * PI)
}

/// (E^± f)(x) by direct quadrature over the backward or forward light cone of x.
pub fn kirchhoff_apply(side: Side, f: &TestFunction, x: &Point4) -> f64 {
    match side {
        Side::Retarded => one_side(true, f, x),
        Side::Advanced => one_side(false, f, x),
        Side::Causal => one_side(false, f, x) - one_side(true, f, x),
    }
}

pub fn kirchhoff_apply_sum(side: Side, f: &FieldSum, x: &Point4) -> f64 {
    f.terms
        .iter()
        .map(|(c, h)| c * kirchhoff_apply(side, h, x))
        .sum()
}

/// E(f, g) through Kirchhoff's formula, reorganized over the separation vector:
/// (1/4π) ∫ dR R [c_t(−R) − c_t(R)] ∫_{S²} c_x c_y c_z(RΩ) dΩ.
pub fn causal_pairing_kirchhoff(f: &TestFunction, g: &TestFunction) -> Estimate {
    let ct = Correlation1::tabulated(f.axis(0), g.axis(0));
    let cx = Correlation1::tabulated(f.axis(1), g.axis(1));
    let cy = Correlation1::tabulated(f.axis(2), g.axis(2));
    let cz = Correlation1::tabulated(f.axis(3), g.axis(3));
    let sup = [cx.support(), cy.support(), cz.support()];
    let (mut near, mut far) = (0.0, 0.0);
    for (lo, hi) in sup {
        let n: f64 = if lo > 0.0 {
            lo
        } else if hi < 0.0 {
            -hi
        } else {
            0.0
        };
        near += n * n;
        far += lo.abs().max(hi.abs()).ipow(2);
    }
    let (t_lo, t_hi) = ct.support();
    let t_near = if t_lo > 0.0 {
        t_lo
    } else if t_hi < 0.0 {
        -t_hi
    } else {
        0.0
    };
    let r_lo = sqrt(near).max(t_near);
    let r_hi = sqrt(far).min(t_lo.abs().max(t_hi.abs()));
    if r_hi <= r_lo {
        return Estimate {
            value: 0.0,
            err: 0.0,
        };
    }
    let fx = |s: f64| cx.eval(s);
    let fy = |s: f64| cy.eval(s);
    let fz = |s: f64| cz.eval(s);
    let scale = 4.0 * PI * cx.max_abs() * cy.max_abs() * cz.max_abs();
    let breaks: alloc::vec::Vec<f64> = ct.breakpoints().iter().map(|b| b.abs()).collect();
    let integrand = |r: f64| {
        let w = ct.eval(-r) - ct.eval(r);
        if w == 0.0 {
            return 0.0;
        }
        r * w * sphere_integral(r, &fx, &fy, &fz, sup, 1e-10, 1e-16 * scale)
    };
    let q = adaptive(
        integrand,
        r_lo,
        r_hi,
        &breaks,
        Tol::new(1e-15 * scale * ct.max_abs() * r_hi * r_hi, 1e-9).panels(600),
    );
    let amp = f.amplitude * g.amplitude / (4.0 * PI);
    Estimate {
        value: amp * q.value,
        err: (amp * q.err).abs() + 1e-9 * (amp * q.value).abs(),
    }
}

pub fn kirchhoff_pairing_sum(f: &FieldSum, g: &FieldSum) -> Estimate {
    let mut out = Estimate {
        value: 0.0,
        err: 0.0,
    };
    for (a, fa) in &f.terms {
        for (b, gb) in &g.terms {
            let e = causal_pairing_kirchhoff(fa, gb);
            out.value += a * b * e.value;
            out.err += (a * b).abs() * e.err;
        }
    }
    out
}

/// E(f, g) = −i[ω₂⁰(f, g) − ω₂⁰(g, f)] from the ε-regularized vacuum kernel.
pub fn causal_pairing(f: &TestFunction, g: &TestFunction) -> Result<Estimate> {
    causal_pairing_with(f, g, &SmearOptions::default())
}

pub fn causal_pairing_with(
    f: &TestFunction,
    g: &TestFunction,
    opts: &SmearOptions,
) -> Result<Estimate> {
    let k = vacuum_kernel();
    let a = smear2_with(&k, f, g, opts)?;
    let b = smear2_with(&k, g, f, opts)?;
    let v: Complex64 = (a.value - b.value) * Complex64::new(0.0, -1.0);
    Ok(Estimate {
        value: v.re,
        err: a.err + b.err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_bump;

    #[test]
    fn retarded_vanishes_outside_past_cone() {
        let f = make_bump(Point4::new(0.0, 0.0, 0.0, 0.0), [0.2; 4], 1.0).unwrap();
        assert_eq!(
            kirchhoff_apply(Side::Retarded, &f, &Point4::new(0.5, 2.0, 0.0, 0.0)),
            0.0
        );
        assert_eq!(
            kirchhoff_apply(Side::Advanced, &f, &Point4::new(-0.5, 2.0, 0.0, 0.0)),
            0.0
        );
        assert!(kirchhoff_apply(Side::Retarded, &f, &Point4::new(2.0, 2.0, 0.0, 0.0)) > 0.0);
    }

    #[test]
    fn retarded_of_static_source_approaches_coulomb() {
        // A source long in time: E⁻f(x) ≈ ∫ f(y)/(4π|x−y|) d³y ≈ Q/(4π r) far away.
        let f = make_bump(Point4::new(0.0, 0.0, 0.0, 0.0), [50.0, 0.2, 0.2, 0.2], 1.0).unwrap();
        let x = Point4::new(0.0, 3.0, 0.0, 0.0);
        let v = kirchhoff_apply(Side::Retarded, &f, &x);
        let b = crate::fields::bump_cosine_transform(0.0) * 0.2;
        let charge = b * b * b * f.axis(0).value(-3.0);
        let rel = (v - charge / (4.0 * PI * 3.0)).abs() / v;
        assert!(rel < 2e-3, "{rel}");
    }

    #[test]
    fn kirchhoff_pairing_antisymmetric() {
        let f = make_bump(Point4::new(0.0, 0.0, 0.1, 0.0), [0.3, 0.2, 0.25, 0.2], 1.0).unwrap();
        let g = make_bump(Point4::new(1.0, 0.3, 0.0, 0.2), [0.25, 0.3, 0.2, 0.3], 1.3).unwrap();
        let a = causal_pairing_kirchhoff(&f, &g);
        let b = causal_pairing_kirchhoff(&g, &f);
        assert!(a.value.abs() > 0.0);
        assert!(
            (a.value + b.value).abs() <= 1e-6 * a.value.abs(),
            "{} {}",
            a.value,
            b.value
        );
    }
}
