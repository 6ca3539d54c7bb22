//! Image-method states and propagators for the half-space (one plate at z = 0) and the
//! slab (plates at z = 0 and z = d).

mod modes;

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{domain, invalid, Result};
use crate::fields::{image_n, isometry_apply, Geometry, Isometry, Point4, TestFunction};
use crate::kernels::{
    causal_pairing_kirchhoff, kirchhoff_apply, smear2_with, Base, EpsilonKernel, Estimate,
    ImageLayout, Side, SmearOptions, SmearedValue, StateSpec,
};
use crate::math::{cos, sin, sinh, sinhc, Ipow, PI};

pub use modes::{
    hypothesis_check, mode_coefficients, mode_coefficients_with, positivity_form,
    positivity_form_with, thermal_mode_closed, BumpTransformTable, HypothesisReport,
    ModeCoefficients,
};

/// Truncation controls for image series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageSeriesConfig {
    pub n_max: usize,
    pub tail_tol: f64,
}

impl Default for ImageSeriesConfig {
    fn default() -> Self {
        Self {
            n_max: 200,
            tail_tol: 1e-8,
        }
    }
}

impl ImageSeriesConfig {
    pub fn new(n_max: usize, tail_tol: f64) -> Result<Self> {
        if n_max == 0 {
            return Err(invalid("n_max must be positive"));
        }
        if !(tail_tol > 0.0 && tail_tol.is_finite()) {
            return Err(invalid("tail_tol must be positive"));
        }
        Ok(Self { n_max, tail_tol })
    }
}

/// Geometry, base state and series truncation of an image-method state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryState {
    pub geometry: Geometry,
    pub base: StateSpec,
    pub series: ImageSeriesConfig,
}

impl BoundaryState {
    pub fn new(geometry: Geometry, base: StateSpec, series: ImageSeriesConfig) -> Result<Self> {
        if let Geometry::Slab { d } = geometry {
            Geometry::slab(d)?;
        }
        if let StateSpec::Kms { beta } = base {
            StateSpec::kms(beta)?;
        }
        ImageSeriesConfig::new(series.n_max, series.tail_tol)?;
        Ok(Self {
            geometry,
            base,
            series,
        })
    }

    pub fn half_space(base: StateSpec) -> Result<Self> {
        Self::new(Geometry::HalfSpace, base, ImageSeriesConfig::default())
    }

    pub fn slab(d: f64, base: StateSpec) -> Result<Self> {
        Self::new(Geometry::slab(d)?, base, ImageSeriesConfig::default())
    }

    /// Two-point kernel of the state.
    pub fn kernel(&self) -> EpsilonKernel {
        let base = Base::from_state(self.base);
        match self.geometry {
            Geometry::HalfSpace => EpsilonKernel::with_layout(base, ImageLayout::HalfSpace),
            Geometry::Slab { d } => EpsilonKernel::with_layout(
                base,
                ImageLayout::Slab {
                    d,
                    series: self.series,
                },
            ),
        }
    }

    fn check_inside(&self, f: &TestFunction) -> Result<()> {
        if f.inside(&self.geometry) {
            Ok(())
        } else {
            Err(invalid("test function support must lie in the open region"))
        }
    }

    /// ω₂(f, g).
    pub fn two_point(
        &self,
        f: &TestFunction,
        g: &TestFunction,
        opts: &SmearOptions,
    ) -> Result<SmearedValue> {
        self.check_inside(f)?;
        self.check_inside(g)?;
        smear2_with(&self.kernel(), f, g, opts)
    }

    /// Commutator pairing of the geometry: E_{ℍ⁴}(f, g) or E_Z(f, g).
    pub fn causal_pairing(&self, f: &TestFunction, g: &TestFunction) -> Result<Estimate> {
        match self.geometry {
            Geometry::HalfSpace => cp_pairing(f, g),
            Geometry::Slab { d } => casimir_pairing(f, g, d),
        }
    }
}

/// K(x, x′) = K̃(x, x′) − K̃(ι_z x, x′) on ℍ⁴ × ℍ⁴.
pub fn cp_kernel(base: StateSpec) -> Result<EpsilonKernel> {
    Ok(BoundaryState::half_space(base)?.kernel())
}

fn in_slab(p: &Point4, d: f64) -> bool {
    p.z >= 0.0 && p.z <= d
}

/// Image-series slab kernel at a point pair, with its truncation estimate.
pub fn casimir_kernel_series(
    state: &BoundaryState,
    x: &Point4,
    xp: &Point4,
    eps: f64,
) -> Result<SmearedValue> {
    let Geometry::Slab { d } = state.geometry else {
        return Err(invalid("casimir_kernel_series needs a slab geometry"));
    };
    if !in_slab(x, d) || !in_slab(xp, d) {
        return Err(invalid("points must lie in the closed slab"));
    }
    state.kernel().eval_with_err(x, xp, eps)
}

/// Plain partial sums S_N = Σ_{|n|≤N} [K̃(x, x′ + 2nd e₃) − K̃(x, ι_z x′ + 2nd e₃)] for
/// N = 0..=n_max, without tail acceleration.
pub fn image_partial_sums(
    state: &BoundaryState,
    x: &Point4,
    xp: &Point4,
    eps: f64,
    n_max: usize,
) -> Result<Vec<Complex64>> {
    let Geometry::Slab { d } = state.geometry else {
        return Err(invalid("image_partial_sums needs a slab geometry"));
    };
    if !in_slab(x, d) || !in_slab(xp, d) {
        return Err(invalid("points must lie in the closed slab"));
    }
    let free = EpsilonKernel::free(Base::from_state(state.base));
    let term = |zc: f64| free.eval(x, &xp.with_z(zc), eps);
    let mut acc = term(xp.z)? - term(-xp.z)?;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(acc);
    for n in 1..=n_max {
        let s = 2.0 * d * n as f64;
        acc += term(xp.z + s)? + term(xp.z - s)? - term(s - xp.z)? - term(-s - xp.z)?;
        out.push(acc);
    }
    Ok(out)
}

/// sinh(a)/((cosh a − c₁)(cosh a − c₂)), stable for Re a ≥ 0.
fn slab_ratio(a: Complex64, theta1: f64, theta2: f64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if a.re < 20.0 {
        // cosh a − cos θ = 2 sinh((a + iθ)/2) sinh((a − iθ)/2)
        let den = |th: f64| ((a + i * th) * 0.5).sinh() * ((a - i * th) * 0.5).sinh() * 2.0;
        a.sinh() / (den(theta1) * den(theta2))
    } else {
        let u = (-a).exp();
        let one = Complex64::new(1.0, 0.0);
        let q = |c: f64| one + u * u - u * (2.0 * c);
        (one - u * u) * u * 2.0 / (q(cos(theta1)) * q(cos(theta2)))
    }
}

/// Closed form of the vacuum slab kernel,
/// (1/8πdχ)[sinh(πχ/d)/(cosh(πχ/d) − cos(π(z−z′)/d)) − (z′ → −z′)],
/// χ² = −(Δt − iε)² + Δx² + Δy², principal branch.
pub fn casimir_kernel_closed(x: &Point4, xp: &Point4, eps: f64, d: f64) -> Result<Complex64> {
    Geometry::slab(d)?;
    if !(eps >= 0.0) {
        return Err(invalid("epsilon must be nonnegative"));
    }
    let w = Complex64::new(x.t - xp.t, -eps);
    let chi2 = -(w * w) + (x.x - xp.x) * (x.x - xp.x) + (x.y - xp.y) * (x.y - xp.y);
    let chi = chi2.sqrt();
    Ok(closed_with_branch(chi, x.z, xp.z, d))
}

pub(crate) fn closed_with_branch(chi: Complex64, z: f64, zp: f64, d: f64) -> Complex64 {
    let k = PI / d;
    let mut a = chi * k;
    if a.re < 0.0 {
        a = -a;
    }
    let theta1 = k * (z - zp);
    let theta2 = k * (z + zp);
    // c₁ − c₂ = 2 sin(πz/d) sin(πz′/d), exactly zero on either plate
    let dc = 2.0 * sin(k * z) * sin(k * zp);
    if a.norm() < 1e-3 {
        // sinh(a)/χ = k·sinhc(a) removes the χ = 0 singularity
        let den = |th: f64| a.cosh() - cos(th);
        return sinhc(a) * k * dc / (den(theta1) * den(theta2)) / (8.0 * PI * d);
    }
    slab_ratio(a, theta1, theta2) * dc / (a / k) / (8.0 * PI * d)
}

/// (π/a)·sinh(2πa)/(cosh 2πa − cos 2πb) = Σ_n 1/(a² + (b + n)²).
pub fn lattice_sum_closed(a: f64, b: f64) -> f64 {
    let x = 2.0 * PI * a;
    // cosh x − cos y = 2 sinh((x+iy)/2) sinh((x−iy)/2) = 2(sinh²(x/2) + sin²(y/2))
    let den = 2.0 * (sinh(x / 2.0).ipow(2) + sin(PI * b).ipow(2));
    PI / a * sinh(x) / den
}

/// E_{ℍ⁴}(h)(x): antisymmetrization of the Minkowski causal propagator applied to the odd
/// extension of h.
pub fn cp_propagator(h: &TestFunction, x: &Point4) -> Result<f64> {
    if !h.inside(&Geometry::HalfSpace) {
        return Err(invalid("cp_propagator needs supp h inside z > 0"));
    }
    if x.z < 0.0 {
        return Err(domain("cp_propagator is defined on z >= 0"));
    }
    let odd = crate::fields::odd_extension(h)?.as_sum();
    let e = |p: &Point4| crate::kernels::kirchhoff_apply_sum(Side::Causal, &odd, p);
    Ok((e(x) - e(&x.reflected())) * core::f64::consts::FRAC_1_SQRT_2)
}

/// E_{ℍ⁴}(f, g) = E(f, g) − E(f, ι_z g) via Kirchhoff quadrature.
pub fn cp_pairing(f: &TestFunction, g: &TestFunction) -> Result<Estimate> {
    if !f.inside(&Geometry::HalfSpace) || !g.inside(&Geometry::HalfSpace) {
        return Err(invalid("cp_pairing needs supports inside z > 0"));
    }
    let a = causal_pairing_kirchhoff(f, g);
    let b = causal_pairing_kirchhoff(f, &isometry_apply(Isometry::ReflectZ, g));
    Ok(Estimate {
        value: a.value - b.value,
        err: a.err + b.err,
    })
}

fn time_reach(f: &TestFunction, t: f64) -> f64 {
    let (lo, hi) = (f.axis(0).lo(), f.axis(0).hi());
    (t - lo).abs().max((t - hi).abs())
}

/// Kirchhoff field of N(f) at any point of ℝ⁴; odd and 2d-periodic in z.
pub fn casimir_field(f: &TestFunction, x: &Point4, d: f64) -> Result<f64> {
    let n = image_n(*f, d, None)?;
    let reach = time_reach(f, x.t);
    // only images whose light cone can reach x contribute
    let imgs = n.images_meeting(x.z - reach, x.z + reach);
    Ok(imgs
        .iter()
        .map(|(c, h)| c * kirchhoff_apply(Side::Causal, h, x))
        .sum())
}

/// E_Z(f)(x) for x in the closed slab.
pub fn casimir_propagator(f: &TestFunction, x: &Point4, d: f64) -> Result<f64> {
    let g = Geometry::slab(d)?;
    if !f.inside(&g) {
        return Err(invalid(
            "casimir_propagator needs supp f inside the open slab",
        ));
    }
    if !in_slab(x, d) {
        return Err(domain("casimir_propagator is defined on 0 <= z <= d"));
    }
    casimir_field(f, x, d)
}

/// E_Z(f, g) = ∫ f·E_Z(g), summed over the images of g that are causally connected to supp f.
pub fn casimir_pairing(f: &TestFunction, g: &TestFunction, d: f64) -> Result<Estimate> {
    let geo = Geometry::slab(d)?;
    if !f.inside(&geo) || !g.inside(&geo) {
        return Err(invalid(
            "casimir_pairing needs supports inside the open slab",
        ));
    }
    let reach = time_reach(g, f.axis(0).lo()).max(time_reach(g, f.axis(0).hi()));
    let (zl, zh) = f.z_support();
    let n = image_n(*g, d, None)?;
    let mut out = Estimate::default();
    for (c, h) in n.images_meeting(zl - reach, zh + reach) {
        let e = causal_pairing_kirchhoff(f, &h);
        out.value += c * e.value;
        out.err += e.err;
    }
    Ok(out)
}

/// Outcome of [`kms_condition_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmsCheck {
    /// [ω₂(t_{iβ}f, g) − ω₂(f, g)] + i·E_geom(f, g).
    pub residual: Complex64,
    pub err: f64,
    pub shifted: SmearedValue,
    pub direct: SmearedValue,
    pub commutator: Estimate,
    /// |ω₂(f, g)| + |E_geom(f, g)|, the natural size of the residual.
    pub scale: f64,
}

/// KMS condition in commutator form, with the imaginary-time shift realized by analytic
/// continuation of the kernel and E_geom by Kirchhoff quadrature.
pub fn kms_condition_check(
    state: &BoundaryState,
    f: &TestFunction,
    g: &TestFunction,
    opts: &SmearOptions,
) -> Result<KmsCheck> {
    if !matches!(state.base, StateSpec::Kms { .. }) {
        return Err(invalid("kms_condition_check needs a KMS base state"));
    }
    state.check_inside(f)?;
    state.check_inside(g)?;
    let k = state.kernel();
    let shifted = smear2_with(&k.imaginary_time_shifted()?, f, g, opts)?;
    let direct = smear2_with(&k, f, g, opts)?;
    let commutator = state.causal_pairing(f, g)?;
    let residual = shifted.value - direct.value + Complex64::new(0.0, commutator.value);
    Ok(KmsCheck {
        residual,
        err: shifted.err + direct.err + commutator.err,
        shifted,
        direct,
        commutator,
        scale: direct.value.norm() + commutator.value.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_vanishes_on_plates_and_is_branch_independent() {
        let d = 1.0;
        let x = Point4::new(0.2, 0.1, -0.3, 0.0);
        let xp = Point4::new(0.0, 0.4, 0.2, 0.6);
        assert_eq!(
            casimir_kernel_closed(&x, &xp, 1e-3, d).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        let x = x.with_z(0.35);
        let w = Complex64::new(x.t - xp.t, -1e-3);
        let chi = (-(w * w) + 0.09 + 0.25).sqrt();
        let a = closed_with_branch(chi, x.z, xp.z, d);
        // direct evaluation with the opposite branch
        let k = PI / d;
        let b = -chi;
        let term = |th: f64| (b * k).sinh() / ((b * k).cosh() - cos(th));
        let direct = (term(k * (x.z - xp.z)) - term(k * (x.z + xp.z))) / (b * 8.0 * PI * d);
        assert!((a - direct).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn lattice_identity_on_samples() {
        for &(a, b) in &[(0.3, 0.1), (1.2, 0.45), (0.05, 0.7)] {
            let mut s = 0.0;
            for n in -200_000i64..=200_000 {
                s += 1.0 / (a * a + (b + n as f64).powi(2));
            }
            assert!((s - lattice_sum_closed(a, b)).abs() < 1e-5 * s, "{a} {b}");
        }
    }

    #[test]
    fn series_matches_closed_form() {
        let st = BoundaryState::slab(1.0, StateSpec::Vacuum).unwrap();
        let x = Point4::new(0.3, 0.2, 0.0, 0.3);
        let xp = Point4::new(0.0, -0.1, 0.4, 0.55);
        let s = casimir_kernel_series(&st, &x, &xp, 1e-3).unwrap();
        let c = casimir_kernel_closed(&x, &xp, 1e-3, 1.0).unwrap();
        assert!((s.value - c).norm() < 1e-7 * c.norm(), "{:?} {:?}", s, c);
    }

    #[test]
    fn cp_kernel_vanishes_on_boundary() {
        let k = cp_kernel(StateSpec::Vacuum).unwrap();
        let v = k
            .eval(
                &Point4::new(0.1, 0.2, 0.3, 0.0),
                &Point4::new(0.0, 0.0, 0.0, 0.7),
                1e-2,
            )
            .unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }
}
