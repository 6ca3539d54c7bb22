//! Test functions, z-isometries, the antisymmetrization maps and the image operator N.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::math::quad::GaussLegendre;
use crate::math::{exp, fabs, floor, sqrt};

/// A spacetime event (t, x, y, z).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point4 {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point4 {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self { t, x, y, z }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    /// Minkowski interval s² = −Δt² + Δx² + Δy² + Δz².
    pub fn interval(&self, other: &Point4) -> f64 {
        let d = self.minus(other);
        -d.t * d.t + d.x * d.x + d.y * d.y + d.z * d.z
    }

    pub fn spatial_distance(&self, other: &Point4) -> f64 {
        let d = self.minus(other);
        sqrt(d.x * d.x + d.y * d.y + d.z * d.z)
    }

    pub fn minus(&self, o: &Point4) -> Point4 {
        Point4::new(self.t - o.t, self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn with_z(mut self, z: f64) -> Point4 {
        self.z = z;
        self
    }

    pub fn reflected(self) -> Point4 {
        self.with_z(-self.z)
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Spatial region bounded by Dirichlet plates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    /// ℝ³ × [0, ∞), one plate at z = 0.
    HalfSpace,
    /// ℝ³ × [0, d], plates at z = 0 and z = d.
    Slab { d: f64 },
}

impl Geometry {
    pub fn slab(d: f64) -> Result<Self> {
        if d > 0.0 && d.is_finite() {
            Ok(Geometry::Slab { d })
        } else {
            Err(invalid("slab width d must be positive and finite"))
        }
    }

    /// Whether z lies in the open region.
    pub fn contains_interior(&self, z: f64) -> bool {
        match *self {
            Geometry::HalfSpace => z > 0.0,
            Geometry::Slab { d } => z > 0.0 && z < d,
        }
    }

    /// Distance from z to the nearest plate.
    pub fn wall_distance(&self, z: f64) -> f64 {
        match *self {
            Geometry::HalfSpace => z,
            Geometry::Slab { d } => z.min(d - z),
        }
    }
}

/// The profile b(u) = exp(1 − 1/(1 − u²)) on |u| < 1, zero elsewhere; b(0) = 1.
pub fn bump_profile(u: f64) -> f64 {
    let s = 1.0 - u * u;
    if s <= 0.0 {
        0.0
    } else {
        exp(1.0 - 1.0 / s)
    }
}

/// b′(u).
pub fn bump_profile_derivative(u: f64) -> f64 {
    let s = 1.0 - u * u;
    if s <= 0.0 {
        0.0
    } else {
        exp(1.0 - 1.0 / s) * (-2.0 * u / (s * s))
    }
}

/// B(q) = ∫_{−1}^{1} b(u) cos(qu) du by composite Gauss–Legendre quadrature.
pub fn bump_cosine_transform(q: f64) -> f64 {
    bump_cosine_transform_with(&GaussLegendre::new(40), q)
}

pub(crate) fn bump_cosine_transform_with(gl: &GaussLegendre, q: f64) -> f64 {
    let q = fabs(q);
    let panels = 2 + (q / 6.0) as usize;
    let mut s = 0.0;
    for p in 0..panels {
        let a = p as f64 / panels as f64;
        let b = (p + 1) as f64 / panels as f64;
        s += gl.integrate(a, b, |u| bump_profile(u) * libm::cos(q * u));
    }
    2.0 * s
}

/// One-dimensional scaled bump b((s − center)/radius).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump1 {
    pub center: f64,
    pub radius: f64,
}

impl Bump1 {
    pub fn value(&self, s: f64) -> f64 {
        bump_profile((s - self.center) / self.radius)
    }

    pub fn derivative(&self, s: f64) -> f64 {
        bump_profile_derivative((s - self.center) / self.radius) / self.radius
    }

    pub fn lo(&self) -> f64 {
        self.center - self.radius
    }

    pub fn hi(&self) -> f64 {
        self.center + self.radius
    }

    /// ∫ b((s−c)/r) e^{iκs} ds.
    pub fn fourier(&self, kappa: f64) -> Complex64 {
        Complex64::from_polar(
            self.radius * bump_cosine_transform(kappa * self.radius),
            kappa * self.center,
        )
    }
}

/// Smooth compactly supported product bump A·Π_a b((x_a − c_a)/r_a).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub center: Point4,
    pub radii: [f64; 4],
    pub amplitude: f64,
}

/// Construct a product bump; every radius must be positive and finite.
pub fn make_bump(center: Point4, radii: [f64; 4], amplitude: f64) -> Result<TestFunction> {
    if !center.is_finite() || !amplitude.is_finite() {
        return Err(invalid("bump center and amplitude must be finite"));
    }
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(invalid("bump radii must be positive and finite"));
    }
    Ok(TestFunction {
        center,
        radii,
        amplitude,
    })
}

impl TestFunction {
    pub fn axis(&self, a: usize) -> Bump1 {
        Bump1 {
            center: self.center.to_array()[a],
            radius: self.radii[a],
        }
    }

    pub fn axes(&self) -> [Bump1; 4] {
        core::array::from_fn(|a| self.axis(a))
    }

    pub fn eval(&self, p: &Point4) -> f64 {
        let c = self.center.to_array();
        let x = p.to_array();
        let mut v = self.amplitude;
        for a in 0..4 {
            let b = bump_profile((x[a] - c[a]) / self.radii[a]);
            if b == 0.0 {
                return 0.0;
            }
            v *= b;
        }
        v
    }

    pub fn gradient(&self, p: &Point4) -> [f64; 4] {
        let c = self.center.to_array();
        let x = p.to_array();
        let vals: [f64; 4] = core::array::from_fn(|a| bump_profile((x[a] - c[a]) / self.radii[a]));
        let ders: [f64; 4] = core::array::from_fn(|a| {
            bump_profile_derivative((x[a] - c[a]) / self.radii[a]) / self.radii[a]
        });
        core::array::from_fn(|a| {
            let mut v = self.amplitude * ders[a];
            for b in 0..4 {
                if b != a {
                    v *= vals[b];
                }
            }
            v
        })
    }

    /// F(ω, k) = ∫ f(x) e^{−iωt + ik·x} d⁴x.
    pub fn fourier(&self, omega: f64, k: [f64; 3]) -> Complex64 {
        self.axis(0).fourier(-omega)
            * self.axis(1).fourier(k[0])
            * self.axis(2).fourier(k[1])
            * self.axis(3).fourier(k[2])
            * self.amplitude
    }

    /// ∫ f d⁴x.
    pub fn integral(&self) -> f64 {
        let b0 = bump_cosine_transform(0.0);
        self.amplitude * self.radii.iter().map(|r| r * b0).product::<f64>()
    }

    /// Closed support box [(lo, hi); 4] in (t, x, y, z) order.
    pub fn support(&self) -> [(f64, f64); 4] {
        core::array::from_fn(|a| (self.axis(a).lo(), self.axis(a).hi()))
    }

    pub fn z_support(&self) -> (f64, f64) {
        (self.center.z - self.radii[3], self.center.z + self.radii[3])
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.amplitude *= s;
        self
    }

    pub fn with_center_z(mut self, z: f64) -> Self {
        self.center.z = z;
        self
    }

    /// Support inside the open region of the geometry.
    pub fn inside(&self, g: &Geometry) -> bool {
        let (lo, hi) = self.z_support();
        match *g {
            Geometry::HalfSpace => lo > 0.0,
            Geometry::Slab { d } => lo > 0.0 && hi < d,
        }
    }
}

/// Anything that can be evaluated pointwise on ℝ⁴.
pub trait Field {
    fn eval(&self, p: &Point4) -> f64;
}

impl Field for TestFunction {
    fn eval(&self, p: &Point4) -> f64 {
        TestFunction::eval(self, p)
    }
}

impl<F: Fn(&Point4) -> f64> Field for F {
    fn eval(&self, p: &Point4) -> f64 {
        self(p)
    }
}

/// Finite real linear combination of product bumps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FieldSum {
    pub terms: Vec<(f64, TestFunction)>,
}

impl FieldSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, c: f64, f: TestFunction) -> Self {
        self.terms.push((c, f));
        self
    }

    pub fn push(&mut self, c: f64, f: TestFunction) {
        self.terms.push((c, f));
    }

    pub fn extend(&mut self, other: &FieldSum, scale: f64) {
        for (c, f) in &other.terms {
            self.terms.push((c * scale, *f));
        }
    }

    pub fn map(&self, g: impl Fn(&TestFunction) -> TestFunction) -> FieldSum {
        FieldSum {
            terms: self.terms.iter().map(|(c, f)| (*c, g(f))).collect(),
        }
    }

    pub fn z_support(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (_, f) in &self.terms {
            let (a, b) = f.z_support();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        (lo, hi)
    }
}

impl From<TestFunction> for FieldSum {
    fn from(f: TestFunction) -> Self {
        FieldSum {
            terms: alloc::vec![(1.0, f)],
        }
    }
}

impl Field for FieldSum {
    fn eval(&self, p: &Point4) -> f64 {
        self.terms.iter().map(|(c, f)| c * f.eval(p)).sum()
    }
}

/// The two z-isometries used by the image method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Isometry {
    /// ι_z: (x̄, z) ↦ (x̄, −z).
    ReflectZ,
    /// (x̄, z) ↦ (x̄, z + s).
    TranslateZ(f64),
}

/// Returns f∘ι_z (reflection) or f∘ι_{−s} (translation by s): the new function at (x̄, z)
/// equals f(x̄, −z) resp. f(x̄, z − s).
pub fn isometry_apply(kind: Isometry, f: &TestFunction) -> TestFunction {
    let mut g = *f;
    match kind {
        Isometry::ReflectZ => g.center.z = -f.center.z,
        Isometry::TranslateZ(s) => g.center.z = f.center.z + s,
    }
    g
}

/// u(x̄, z) = (φ(x̄, z) − φ(x̄, −z))/√2 on z ≥ 0; zero for z < 0.
#[derive(Debug, Clone)]
pub struct Antisymmetrized<F>(pub F);

pub fn antisymmetrize<F: Field>(phi: F) -> Antisymmetrized<F> {
    Antisymmetrized(phi)
}

impl<F: Field> Field for Antisymmetrized<F> {
    fn eval(&self, p: &Point4) -> f64 {
        if p.z < 0.0 {
            return 0.0;
        }
        (self.0.eval(p) - self.0.eval(&p.reflected())) * FRAC_1_SQRT_2
    }
}

/// (h(x̄,z)Θ(z) − h(x̄,−z)Θ(−z))/√2 for h supported in z > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OddExtension {
    pub h: TestFunction,
}

pub fn odd_extension(h: &TestFunction) -> Result<OddExtension> {
    if h.z_support().0 <= 0.0 {
        return Err(invalid("odd_extension needs support strictly inside z > 0"));
    }
    Ok(OddExtension { h: *h })
}

impl OddExtension {
    /// The same field as a bump combination (h − h∘ι_z)/√2.
    pub fn as_sum(&self) -> FieldSum {
        FieldSum::new()
            .with(FRAC_1_SQRT_2, self.h)
            .with(-FRAC_1_SQRT_2, isometry_apply(Isometry::ReflectZ, &self.h))
    }
}

impl Field for OddExtension {
    fn eval(&self, p: &Point4) -> f64 {
        if p.z > 0.0 {
            self.h.eval(p) * FRAC_1_SQRT_2
        } else if p.z < 0.0 {
            -self.h.eval(&p.reflected()) * FRAC_1_SQRT_2
        } else {
            0.0
        }
    }
}

/// N(f)(x̄, z) = Σ_n [f(x̄, z + 2nd) − f(x̄, −z + 2nd)] for a compactly supported base.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicizedFunction {
    pub base: FieldSum,
    pub d: f64,
    pub window: usize,
}

/// Default image window ⌈(|z_max| + r)/(2d)⌉ + 1 with the evaluation region taken as [−d, d].
pub fn default_window(base: &FieldSum, d: f64) -> usize {
    let mut reach: f64 = 0.0;
    for (_, f) in &base.terms {
        reach = reach.max(fabs(f.center.z) + f.radii[3]);
    }
    libm::ceil((d + reach) / (2.0 * d)) as usize + 1
}

pub fn image_n(
    f: impl Into<FieldSum>,
    d: f64,
    window: Option<usize>,
) -> Result<PeriodicizedFunction> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(invalid("image operator needs d > 0"));
    }
    let base = f.into();
    let window = window.unwrap_or_else(|| default_window(&base, d));
    Ok(PeriodicizedFunction { base, d, window })
}

impl PeriodicizedFunction {
    /// All image bumps (coefficient, bump) whose z-support meets [z_lo, z_hi].
    pub fn images_meeting(&self, z_lo: f64, z_hi: f64) -> Vec<(f64, TestFunction)> {
        let two_d = 2.0 * self.d;
        let mut out = Vec::new();
        for (c, f) in &self.base.terms {
            let (cz, rz) = (f.center.z, f.radii[3]);
            // f(z + 2nd): centred at cz − 2nd.
            let n_lo = libm::ceil((cz - rz - z_hi) / two_d) as i64;
            let n_hi = floor((cz + rz - z_lo) / two_d) as i64;
            for n in n_lo..=n_hi {
                out.push((*c, f.with_center_z(cz - two_d * n as f64)));
            }
            // −f(−z + 2nd): centred at 2nd − cz.
            let n_lo = libm::ceil((z_lo - rz + cz) / two_d) as i64;
            let n_hi = floor((z_hi + rz + cz) / two_d) as i64;
            for n in n_lo..=n_hi {
                out.push((-*c, f.with_center_z(two_d * n as f64 - cz)));
            }
        }
        out
    }

    /// Images with |n| ≤ window.
    pub fn images(&self) -> FieldSum {
        let two_d = 2.0 * self.d;
        let w = self.window as i64;
        let mut out = FieldSum::new();
        for (c, f) in &self.base.terms {
            for n in -w..=w {
                out.push(*c, f.with_center_z(f.center.z - two_d * n as f64));
                out.push(-*c, f.with_center_z(two_d * n as f64 - f.center.z));
            }
        }
        out
    }
}

impl Field for PeriodicizedFunction {
    fn eval(&self, p: &Point4) -> f64 {
        let two_d = 2.0 * self.d;
        let mut s = 0.0;
        for (c, f) in &self.base.terms {
            let (cz, rz) = (f.center.z, f.radii[3]);
            let n_lo = libm::ceil((cz - rz - p.z) / two_d) as i64;
            let n_hi = floor((cz + rz - p.z) / two_d) as i64;
            for n in n_lo..=n_hi {
                s += c * f.eval(&p.with_z(p.z + two_d * n as f64));
            }
            let n_lo = libm::ceil((cz - rz + p.z) / two_d) as i64;
            let n_hi = floor((cz + rz + p.z) / two_d) as i64;
            for n in n_lo..=n_hi {
                s -= c * f.eval(&p.with_z(-p.z + two_d * n as f64));
            }
        }
        s
    }
}

/// Two distinct bump combinations with identical images under N.
///
/// β(z) is odd about z = d/2 and supported in (0, d); f is its odd extension to (−d, d) and
/// f′ is the odd extension of ½β(z) + ½β(z − d) to (−2d, 2d). Both share the transverse
/// factor of `perp`.
pub fn non_injectivity_pair(perp: &TestFunction, d: f64) -> Result<(FieldSum, FieldSum)> {
    if !(d > 0.0) {
        return Err(invalid("non_injectivity_pair needs d > 0"));
    }
    let r = 0.2 * d;
    let a = perp.with_center_z(0.25 * d);
    let a = TestFunction {
        radii: [a.radii[0], a.radii[1], a.radii[2], r],
        ..a
    };
    let b = a.with_center_z(0.75 * d);
    let beta = FieldSum::new().with(1.0, a).with(-1.0, b);
    let reflect = |g: &FieldSum| g.map(|f| isometry_apply(Isometry::ReflectZ, f));
    let shift = |g: &FieldSum, s: f64| g.map(|f| isometry_apply(Isometry::TranslateZ(s), f));
    let mut f = beta.clone();
    f.extend(&reflect(&beta), -1.0);
    let mut fp = FieldSum::new();
    fp.extend(&beta, 0.5);
    fp.extend(&shift(&beta, d), 0.5);
    fp.extend(&reflect(&beta), -0.5);
    fp.extend(&reflect(&shift(&beta, d)), -0.5);
    Ok((f, fp))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump() -> TestFunction {
        make_bump(Point4::new(0.1, -0.2, 0.3, 0.45), [0.3, 0.4, 0.5, 0.2], 1.7).unwrap()
    }

    #[test]
    fn bump_normalization_and_support() {
        let f = bump();
        assert_eq!(f.eval(&f.center), 1.7);
        let c = f.center;
        let p = Point4::new(c.t + 2.0 * f.radii[0], c.x + 2.0 * f.radii[1], c.y, c.z);
        assert_eq!(f.eval(&p), 0.0);
        assert!(f.integral() > 0.0);
        assert!(make_bump(c, [0.1, 0.0, 0.1, 0.1], 1.0).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let f = bump();
        let p = Point4::new(0.15, -0.1, 0.2, 0.5);
        let g = f.gradient(&p);
        let h = 1e-6;
        for a in 0..4 {
            let mut x = p.to_array();
            x[a] += h;
            let up = f.eval(&Point4::from_array(x));
            x[a] -= 2.0 * h;
            let dn = f.eval(&Point4::from_array(x));
            assert!((g[a] - (up - dn) / (2.0 * h)).abs() < 1e-6 * (1.0 + g[a].abs()));
        }
    }

    #[test]
    fn bump_transform_at_zero_is_integral() {
        let gl = GaussLegendre::new(200);
        let direct: f64 = gl.integrate(-1.0, 1.0, bump_profile);
        assert!((bump_cosine_transform(0.0) - direct).abs() < 1e-12);
    }

    #[test]
    fn isometries() {
        let f = bump();
        let r = isometry_apply(Isometry::ReflectZ, &f);
        assert_eq!(isometry_apply(Isometry::ReflectZ, &r), f);
        assert_eq!(r.center.z, -0.45);
        let t = isometry_apply(Isometry::TranslateZ(0.7), &f);
        let back = isometry_apply(Isometry::TranslateZ(-0.7), &t);
        assert!((back.center.z - f.center.z).abs() < 1e-15);
        let p = Point4::new(0.1, -0.2, 0.3, 1.0);
        assert!((t.eval(&p) - f.eval(&p.with_z(1.0 - 0.7))).abs() < 1e-14);
    }

    #[test]
    fn antisymmetrize_examples() {
        let even = |p: &Point4| libm::cos(p.z) * p.t;
        let u = antisymmetrize(even);
        assert_eq!(u.eval(&Point4::new(1.0, 0.0, 0.0, 0.3)), 0.0);
        let lin = antisymmetrize(|p: &Point4| p.z);
        assert!(
            (lin.eval(&Point4::new(0.0, 0.0, 0.0, 0.8)) - core::f64::consts::SQRT_2 * 0.8).abs()
                < 1e-15
        );
        assert_eq!(lin.eval(&Point4::new(0.0, 1.0, 0.0, 0.0)), 0.0);
    }

    #[test]
    fn odd_extension_examples() {
        let h = bump();
        let o = odd_extension(&h).unwrap();
        let p = Point4::new(0.1, -0.2, 0.3, 0.4);
        assert!((o.eval(&p.reflected()) + h.eval(&p) * FRAC_1_SQRT_2).abs() < 1e-16);
        assert_eq!(o.eval(&p.with_z(0.0)), 0.0);
        assert!(odd_extension(&h.with_center_z(0.1)).is_err());
        let back = antisymmetrize(o);
        assert!((back.eval(&p) - h.eval(&p)).abs() < 1e-15);
    }

    #[test]
    fn image_operator_restriction_and_symmetry() {
        let f = bump();
        let d = 1.0;
        let n = image_n(f, d, None).unwrap();
        for i in 0..41 {
            let z = -1.0 + 0.05 * i as f64;
            let p = Point4::new(0.1, -0.15, 0.25, z);
            assert_eq!(n.eval(&p.reflected()), -n.eval(&p));
            assert!((n.eval(&p.with_z(z + 2.0 * d)) - n.eval(&p)).abs() <= 1e-13);
            if z > 0.0 && z < d {
                assert_eq!(n.eval(&p), f.eval(&p));
            } else if z < 0.0 && z > -d {
                assert_eq!(n.eval(&p), -f.eval(&p.reflected()));
            }
        }
    }

    #[test]
    fn images_meeting_reproduces_evaluation() {
        let f = bump();
        let n = image_n(f, 0.8, None).unwrap();
        let imgs = FieldSum {
            terms: n.images_meeting(-3.0, 3.0),
        };
        for i in 0..61 {
            let p = Point4::new(0.1, -0.2, 0.3, -3.0 + 0.1 * i as f64);
            assert!((imgs.eval(&p) - n.eval(&p)).abs() < 1e-13);
        }
    }

    #[test]
    fn non_injectivity_witness() {
        let perp = make_bump(Point4::new(0.0, 0.0, 0.0, 0.5), [0.3, 0.3, 0.3, 0.1], 1.0).unwrap();
        let (f, fp) = non_injectivity_pair(&perp, 1.0).unwrap();
        let nf = image_n(f.clone(), 1.0, None).unwrap();
        let nfp = image_n(fp.clone(), 1.0, None).unwrap();
        let mut differ: f64 = 0.0;
        for i in 0..200 {
            let p = Point4::new(0.05, 0.1, -0.05, -2.0 + 0.02 * i as f64 + 0.003);
            assert!((nf.eval(&p) - nfp.eval(&p)).abs() < 1e-14);
            differ = differ.max((f.eval(&p) - fp.eval(&p)).abs());
        }
        assert!(differ > 0.1);
    }
}
