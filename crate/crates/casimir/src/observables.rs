//! Point-split observables: the smooth remainder W = ω₂ − H, the Wick square and the
//! improved stress tensor at coincidence, their smearing, and closed-form reference values.
//!
//! Each image term is a function h(u, R) of the time difference u and the spatial distance
//! R. Only h, h_uu, h_R/R and h_RR at u = 0 enter the coincidence limits, so every term is
//! differentiated analytically and the Hadamard subtraction is the omission of the direct
//! (n = 0 periodic) vacuum term.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::boundary::ImageSeriesConfig;
use crate::error::{domain, invalid, Result};
use crate::fields::{Geometry, Point4, TestFunction};
use crate::kernels::{kms_value_at, vacuum_value_at, SmearedValue, StateSpec};
use crate::math::quad::{adaptive, GaussLegendre, Tol};
use crate::math::series::{sum_paired, SeriesControl};
use crate::math::special::polygamma;
use crate::math::{exp, sin, sqrt, Ipow, PI};

/// How half-space values are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// The conventions of the closed forms quoted for the single plate: the Wick square
    /// carries a factor ½ and the stress tensor a factor −½ relative to the point-split
    /// remainder. Slab values are unaffected.
    #[default]
    ClosedForm,
    /// The plain coincidence limit of the remainder kernel.
    PointSplitting,
}

impl Normalization {
    fn factor(self, geometry: Geometry, kind: ObservableKind) -> f64 {
        match (self, geometry, kind) {
            (Normalization::ClosedForm, Geometry::HalfSpace, ObservableKind::WickSquare) => 0.5,
            (Normalization::ClosedForm, Geometry::HalfSpace, ObservableKind::Stress { .. }) => -0.5,
            _ => 1.0,
        }
    }
}

/// What a density profile measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObservableKind {
    WickSquare,
    /// T_μν of the improved tensor with curvature coupling ξ.
    Stress {
        xi: f64,
        mu: usize,
        nu: usize,
    },
}

impl ObservableKind {
    fn validate(self) -> Result<Self> {
        if let ObservableKind::Stress { xi, mu, nu } = self {
            if mu > 3 || nu > 3 {
                return Err(invalid("stress indices must lie in 0..=3"));
            }
            if !xi.is_finite() {
                return Err(invalid("coupling xi must be finite"));
            }
        }
        Ok(self)
    }
}

/// h and its coincidence derivatives for one image term.
#[derive(Debug, Clone, Copy, Default)]
struct Jet {
    h: f64,
    huu: f64,
    /// h_R / R
    p: f64,
    hrr: f64,
}

const C4: f64 = 1.0 / (4.0 * PI * PI);

fn vacuum_jet(r: f64) -> Jet {
    let r2 = r * r;
    let r4 = r2 * r2;
    Jet {
        h: C4 / r2,
        huu: 2.0 * C4 / r4,
        p: -2.0 * C4 / r4,
        hrr: 6.0 * C4 / r4,
    }
}

/// Jet of (1/4πβR) sinh(2πR/β)/(cosh(2πR/β) − cosh(2πu/β)) = (k/8π²R) coth(kR/2) at u = 0.
fn kms_jet(r: f64, beta: f64) -> Jet {
    let k = 2.0 * PI / beta;
    let kk = k / (8.0 * PI * PI);
    let e = exp(-k * r);
    let coth = (1.0 + e) / (1.0 - e);
    let csch2 = 4.0 * e / ((1.0 - e) * (1.0 - e));
    let c1 = -0.5 * k * csch2;
    let c2 = 0.5 * k * k * csch2 * coth;
    let hr = kk * (c1 / r - coth / (r * r));
    Jet {
        h: kk * coth / r,
        huu: kk * k * k * coth * csch2 / (2.0 * r),
        p: hr / r,
        hrr: kk * (c2 / r - 2.0 * c1 / (r * r) + 2.0 * coth / r.ipow(3)),
    }
}

/// Thermal part (KMS − vacuum) of the direct term at the origin.
fn thermal_origin_jet(beta: f64) -> Jet {
    let b2 = beta * beta;
    let hrr = -PI * PI / (90.0 * b2 * b2);
    Jet {
        h: 1.0 / (12.0 * b2),
        huu: 3.0 * hrr,
        p: hrr,
        hrr,
    }
}

fn jet(state: StateSpec, r: f64) -> Jet {
    match state {
        StateSpec::Vacuum => vacuum_jet(r),
        StateSpec::Kms { beta } => kms_jet(r, beta),
    }
}

/// Contribution [w, M₀₀, M₁₁, M₃₃, w″] of one term with sign s and z′-parity q.
fn components(j: Jet, s: f64, q: f64) -> [f64; 5] {
    [
        s * j.h,
        -s * j.huu,
        -s * j.p,
        -s * q * j.hrr,
        s * (1.0 - q) * (1.0 - q) * j.hrr,
    ]
}

fn add(a: [f64; 5], b: [f64; 5]) -> [f64; 5] {
    core::array::from_fn(|k| a[k] + b[k])
}

/// Coincidence data of the remainder at height z: w = W(x, x), M_μμ = ∂_μ∂′_μ W and
/// w″ = d²/dz² W(x, x), with the series error.
#[derive(Debug, Clone, Copy)]
pub struct Coincidence {
    pub w: f64,
    pub m: [f64; 4],
    pub w2: f64,
    pub err: f64,
}

impl Coincidence {
    /// T_μν = M_μν − ½η_μν η^{αβ}M_αβ + ξ(η_μν − δ_μ3 δ_ν3) w″.
    pub fn stress(&self, xi: f64) -> [[f64; 4]; 4] {
        let eta = [-1.0, 1.0, 1.0, 1.0];
        let tr = -self.m[0] + self.m[1] + self.m[2] + self.m[3];
        let mut t = [[0.0; 4]; 4];
        for mu in 0..4 {
            let z = if mu == 3 { 1.0 } else { 0.0 };
            t[mu][mu] = self.m[mu] - 0.5 * eta[mu] * tr + xi * (eta[mu] - z) * self.w2;
        }
        t
    }
}

fn check_interior(geometry: Geometry, z: f64) -> Result<()> {
    let ok = match geometry {
        Geometry::HalfSpace => z > 0.0 && z.is_finite(),
        Geometry::Slab { d } => z > 1e-6 * d && z < d * (1.0 - 1e-6),
    };
    if ok {
        Ok(())
    } else {
        Err(domain("point too close to a plate or outside the region"))
    }
}

/// Image-sum coincidence data with the point-splitting normalization.
pub fn coincidence(
    geometry: Geometry,
    state: StateSpec,
    series: ImageSeriesConfig,
    z: f64,
) -> Result<Coincidence> {
    check_interior(geometry, z)?;
    let direct = match state {
        StateSpec::Vacuum => [0.0; 5],
        StateSpec::Kms { beta } => components(thermal_origin_jet(beta), 1.0, 1.0),
    };
    let center = add(direct, components(jet(state, 2.0 * z), -1.0, -1.0));
    let Geometry::Slab { d } = geometry else {
        let err = 1e-15 * center.iter().fold(0.0, |a: f64, b| a.max(b.abs()));
        return Ok(Coincidence {
            w: center[0],
            m: [center[1], center[2], center[2], center[3]],
            w2: center[4],
            err,
        });
    };
    let out = sum_paired(
        center,
        |n| {
            let s = 2.0 * d * n as f64;
            let per = components(jet(state, s), 2.0, 1.0);
            let r1 = components(jet(state, (s - 2.0 * z).abs()), -1.0, -1.0);
            let r2 = components(jet(state, s + 2.0 * z), -1.0, -1.0);
            Ok(add(per, add(r1, r2)))
        },
        SeriesControl::new(series.n_max, series.tail_tol)
            .floor(1e-300)
            .goal(1e-13),
    )?;
    let v = out.value;
    Ok(Coincidence {
        w: v[0],
        m: [v[1], v[2], v[2], v[3]],
        w2: v[4],
        err: out.err,
    })
}

/// The smooth remainder W(x, x′) = ω₂(x, x′) − H(x, x′) of an image state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderKernel {
    pub geometry: Geometry,
    pub state: StateSpec,
    pub series: ImageSeriesConfig,
}

pub fn remainder_kernel(geometry: Geometry, state: StateSpec) -> Result<RemainderKernel> {
    if let Geometry::Slab { d } = geometry {
        Geometry::slab(d)?;
    }
    if let StateSpec::Kms { beta } = state {
        StateSpec::kms(beta)?;
    }
    Ok(RemainderKernel {
        geometry,
        state,
        series: ImageSeriesConfig::default(),
    })
}

/// KMS minus vacuum at time difference u and distance r, at ε = 0.
fn thermal_difference(u: f64, r: f64, beta: f64) -> f64 {
    if u.abs().max(r) < 1e-3 * beta {
        let b4 = beta.ipow(4);
        return 1.0 / (12.0 * beta * beta) - PI * PI * (r * r + 3.0 * u * u) / (180.0 * b4);
    }
    (kms_value_at(u, r, beta) - vacuum_value_at(u, r)).re
}

impl RemainderKernel {
    fn base(&self, u: f64, r: f64) -> f64 {
        match self.state {
            StateSpec::Vacuum => vacuum_value_at(u, r).re,
            StateSpec::Kms { beta } => kms_value_at(u, r, beta).re,
        }
    }

    /// W(x, x′) at ε = 0 (real part where the arguments are timelike to an image).
    pub fn eval(&self, x: &Point4, xp: &Point4) -> Result<f64> {
        Ok(self.eval_with_err(x, xp)?.0)
    }

    pub fn eval_with_err(&self, x: &Point4, xp: &Point4) -> Result<(f64, f64)> {
        check_interior(self.geometry, x.z)?;
        check_interior(self.geometry, xp.z)?;
        let u = x.t - xp.t;
        let rho2 = (x.x - xp.x).ipow(2) + (x.y - xp.y).ipow(2);
        let term = |dz: f64| self.base(u, sqrt(rho2 + dz * dz));
        let direct = match self.state {
            StateSpec::Vacuum => 0.0,
            StateSpec::Kms { beta } => {
                thermal_difference(u, sqrt(rho2 + (x.z - xp.z).ipow(2)), beta)
            }
        };
        let dzp = x.z - xp.z;
        let dzr = x.z + xp.z;
        let center = direct - term(dzr);
        match self.geometry {
            Geometry::HalfSpace => Ok((center, 1e-15 * center.abs())),
            Geometry::Slab { d } => {
                let out = sum_paired(
                    [center],
                    |n| {
                        let s = 2.0 * d * n as f64;
                        Ok([term(dzp - s) + term(dzp + s) - term(dzr - s) - term(dzr + s)])
                    },
                    SeriesControl::new(self.series.n_max, self.series.tail_tol)
                        .floor(1e-300)
                        .goal(1e-13),
                )?;
                Ok((out.value[0], out.err))
            }
        }
    }
}

/// A density source: geometry, state, observable and normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensitySource {
    pub geometry: Geometry,
    pub state: StateSpec,
    pub series: ImageSeriesConfig,
    pub kind: ObservableKind,
    pub normalization: Normalization,
}

impl DensitySource {
    pub fn new(geometry: Geometry, state: StateSpec, kind: ObservableKind) -> Self {
        Self {
            geometry,
            state,
            series: ImageSeriesConfig::default(),
            kind,
            normalization: Normalization::ClosedForm,
        }
    }

    pub fn with_normalization(mut self, n: Normalization) -> Self {
        self.normalization = n;
        self
    }

    /// Density at height z with its error.
    pub fn density(&self, z: f64) -> Result<(f64, f64)> {
        let kind = self.kind.validate()?;
        let c = coincidence(self.geometry, self.state, self.series, z)?;
        let s = self.normalization.factor(self.geometry, kind);
        match kind {
            ObservableKind::WickSquare => Ok((s * c.w, s.abs() * c.err)),
            ObservableKind::Stress { xi, mu, nu } => {
                let t = c.stress(xi);
                // components are linear in the coincidence data; propagate its error
                let scale =
                    c.m.iter()
                        .fold(c.w2.abs() * (1.0 + xi.abs()), |a, b| a + b.abs());
                Ok((
                    s * t[mu][nu],
                    s.abs() * (c.err * (3.0 + xi.abs()) + 1e-15 * scale),
                ))
            }
        }
    }
}

/// ⟨:φ²:⟩ at height z (closed-form normalization for the half-space).
pub fn wick_square_density(geometry: Geometry, state: StateSpec, z: f64) -> Result<f64> {
    Ok(
        DensitySource::new(geometry, state, ObservableKind::WickSquare)
            .density(z)?
            .0,
    )
}

/// ⟨:T_μν:⟩ at height z (closed-form normalization for the half-space).
pub fn stress_density(
    geometry: Geometry,
    state: StateSpec,
    z: f64,
    xi: f64,
    mu: usize,
    nu: usize,
) -> Result<f64> {
    Ok(
        DensitySource::new(geometry, state, ObservableKind::Stress { xi, mu, nu })
            .density(z)?
            .0,
    )
}

/// Finite-difference oracle for the stress tensor: second-order central differences of the
/// remainder kernel with step h.
pub fn stress_density_fd(
    geometry: Geometry,
    state: StateSpec,
    normalization: Normalization,
    z: f64,
    xi: f64,
    mu: usize,
    nu: usize,
    h: f64,
) -> Result<f64> {
    let kind = ObservableKind::Stress { xi, mu, nu }.validate()?;
    if !(h > 0.0) {
        return Err(invalid("finite-difference step must be positive"));
    }
    check_interior(geometry, z - 2.0 * h)?;
    check_interior(geometry, z + 2.0 * h)?;
    let w = remainder_kernel(geometry, state)?;
    let x0 = Point4::new(0.0, 0.0, 0.0, z);
    let shift = |p: Point4, a: usize, s: f64| {
        let mut v = p.to_array();
        v[a] += s;
        Point4::from_array(v)
    };
    let mixed = |a: usize, b: usize| -> Result<f64> {
        let f = |sa: f64, sb: f64| w.eval(&shift(x0, a, sa * h), &shift(x0, b, sb * h));
        Ok((f(1.0, 1.0)? - f(1.0, -1.0)? - f(-1.0, 1.0)? + f(-1.0, -1.0)?) / (4.0 * h * h))
    };
    let diag = |zz: f64| w.eval(&x0.with_z(zz), &x0.with_z(zz));
    let w2 = (diag(z + h)? - 2.0 * diag(z)? + diag(z - h)?) / (h * h);
    let m = [mixed(0, 0)?, mixed(1, 1)?, mixed(2, 2)?, mixed(3, 3)?];
    let c = Coincidence {
        w: diag(z)?,
        m,
        w2,
        err: 0.0,
    };
    if mu != nu {
        // η_μν = 0 and W(x, x) depends on z only, so T_μν = ∂_μ∂′_ν W
        return Ok(normalization.factor(geometry, kind) * mixed(mu, nu)?);
    }
    Ok(normalization.factor(geometry, kind) * c.stress(xi)[mu][nu])
}

/// Sampled density values along z.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub geometry: Geometry,
    pub kind: ObservableKind,
    /// (z, value, err)
    pub samples: Vec<(f64, f64, f64)>,
}

pub fn density_profile(source: &DensitySource, zs: &[f64]) -> Result<DensityProfile> {
    let samples = zs
        .iter()
        .map(|&z| source.density(z).map(|(v, e)| (z, v, e)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityProfile {
        geometry: source.geometry,
        kind: source.kind,
        samples,
    })
}

fn transverse_integral(f: &TestFunction) -> f64 {
    let gl = GaussLegendre::new(48);
    let mut s = f.amplitude;
    for a in 0..3 {
        let b = f.axis(a);
        s *= gl.integrate(b.lo(), b.center, |x| b.value(x))
            + gl.integrate(b.center, b.hi(), |x| b.value(x));
    }
    s
}

fn smear_z(f: &TestFunction, g: impl Fn(f64) -> Result<(f64, f64)>) -> Result<SmearedValue> {
    let b = f.axis(3);
    let mut failure = None;
    let q = adaptive(
        |z| match g(z) {
            Ok((v, e)) => Complex64::new(b.value(z) * v, b.value(z) * e),
            Err(err) => {
                failure.get_or_insert(err);
                Complex64::new(0.0, 0.0)
            }
        },
        b.lo(),
        b.hi(),
        &[b.center],
        Tol::new(1e-300, 1e-12).panels(200),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    // the imaginary channel carries the integrated pointwise error
    let t = transverse_integral(f);
    let (v, e) = (q.value.re, q.value.im);
    Ok(SmearedValue::new(
        Complex64::new(t * v, 0.0),
        (t * (e + q.err)).abs() + 1e-13 * (t * v).abs(),
    ))
}

/// ∫ density(x) f(x) d⁴x.
pub fn smear_density(source: &DensitySource, f: &TestFunction) -> Result<SmearedValue> {
    if !f.inside(&source.geometry) {
        return Err(invalid(
            "smearing function must be supported away from the plates",
        ));
    }
    smear_z(f, |z| source.density(z))
}

/// ∫ reference(z) f(x) d⁴x with the closed forms of [`reference_formulas`].
pub fn smear_reference(
    geometry: Geometry,
    kind: ObservableKind,
    f: &TestFunction,
) -> Result<SmearedValue> {
    if !f.inside(&geometry) {
        return Err(invalid(
            "smearing function must be supported away from the plates",
        ));
    }
    let d = match geometry {
        Geometry::Slab { d } => d,
        Geometry::HalfSpace => 0.0,
    };
    smear_z(f, |z| Ok((reference_formulas(geometry, kind, z, d)?, 0.0)))
}

/// The quoted closed forms: for the half-space −1/(32π²z²) and A_μν(6ξ−1)/(32π²z⁴) with
/// A = diag(−1,1,1,0); for the slab (1/48d²)(1 − 3/sin²(πz/d)) and
/// A′_μν(−1/1440d⁴)[1 + (6ξ−1)(5π²/2)(ψ⁽³⁾(1 − z/d) − ψ⁽³⁾(z/d))] with A′ = diag(−1,1,1,3).
/// `d` is ignored for the half-space.
pub fn reference_formulas(geometry: Geometry, kind: ObservableKind, z: f64, d: f64) -> Result<f64> {
    let kind = kind.validate()?;
    match geometry {
        Geometry::HalfSpace => {
            if !(z > 0.0) {
                return Err(domain("z must be positive"));
            }
            match kind {
                ObservableKind::WickSquare => Ok(-1.0 / (32.0 * PI * PI * z * z)),
                ObservableKind::Stress { xi, mu, nu } => {
                    let a = [-1.0, 1.0, 1.0, 0.0];
                    let diag = if mu == nu { a[mu] } else { 0.0 };
                    Ok(diag * (6.0 * xi - 1.0) / (32.0 * PI * PI * z.ipow(4)))
                }
            }
        }
        Geometry::Slab { .. } => {
            Geometry::slab(d)?;
            if !(z > 0.0 && z < d) {
                return Err(domain("z must lie inside the slab"));
            }
            match kind {
                ObservableKind::WickSquare => {
                    Ok((1.0 - 3.0 / sin(PI * z / d).ipow(2)) / (48.0 * d * d))
                }
                ObservableKind::Stress { xi, mu, nu } => {
                    let a = [-1.0, 1.0, 1.0, 3.0];
                    let diag = if mu == nu { a[mu] } else { 0.0 };
                    let u = z / d;
                    let bracket = 1.0
                        + (6.0 * xi - 1.0)
                            * 2.5
                            * PI
                            * PI
                            * (polygamma(3, 1.0 - u) - polygamma(3, u));
                    Ok(diag * (-1.0 / (1440.0 * d.ipow(4))) * bracket)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slab() -> Geometry {
        Geometry::Slab { d: 1.0 }
    }

    #[test]
    fn half_space_wick_square_values() {
        let v = wick_square_density(Geometry::HalfSpace, StateSpec::Vacuum, 0.5).unwrap();
        assert!((v + 1.0 / (8.0 * PI * PI)).abs() < 1e-16);
        let src = DensitySource::new(
            Geometry::HalfSpace,
            StateSpec::Vacuum,
            ObservableKind::WickSquare,
        )
        .with_normalization(Normalization::PointSplitting);
        assert!((src.density(0.5).unwrap().0 + 1.0 / (4.0 * PI * PI)).abs() < 1e-16);
    }

    #[test]
    fn slab_wick_square_matches_lattice_form() {
        for k in 1..10 {
            let z = k as f64 / 10.0;
            let v = wick_square_density(slab(), StateSpec::Vacuum, z).unwrap();
            let s = sin(PI * z);
            let oracle = C4 * (PI * PI / 12.0 - PI * PI / (4.0 * s * s));
            assert!(
                (v - oracle).abs() < 1e-10 * oracle.abs(),
                "{z} {v} {oracle}"
            );
        }
    }

    #[test]
    fn slab_conformal_stress_is_uniform_and_traceless() {
        let c = coincidence(slab(), StateSpec::Vacuum, ImageSeriesConfig::default(), 0.3).unwrap();
        let t = c.stress(1.0 / 6.0);
        let e = PI * PI / 1440.0;
        assert!((t[0][0] + e).abs() < 1e-9 * e, "{:?}", t);
        assert!((t[1][1] - e).abs() < 1e-9 * e);
        assert!((t[3][3] + 3.0 * e).abs() < 1e-9 * e);
        let tr = -t[0][0] + t[1][1] + t[2][2] + t[3][3];
        assert!(tr.abs() < 1e-9 * e);
    }

    #[test]
    fn free_thermal_stress_is_radiation() {
        // far from both plates the thermal part dominates: ρ = π²/30β⁴
        let beta = 0.05;
        let c = coincidence(
            Geometry::HalfSpace,
            StateSpec::Kms { beta },
            ImageSeriesConfig::default(),
            50.0,
        )
        .unwrap();
        let t = c.stress(0.0);
        let rho = PI * PI / (30.0 * beta.powi(4));
        assert!((t[0][0] - rho).abs() < 1e-9 * rho);
        assert!((t[1][1] - rho / 3.0).abs() < 1e-9 * rho);
        // the reflected thermal term decays only like 1/R
        let image = 2.0 * PI / beta / (8.0 * PI * PI * 100.0);
        assert!((c.w - 1.0 / (12.0 * beta * beta) + image).abs() < 1e-9 * c.w);
    }

    #[test]
    fn kms_jet_matches_vacuum_for_small_radius() {
        let a = kms_jet(1e-3, 10.0);
        let b = vacuum_jet(1e-3);
        assert!((a.h - b.h).abs() < 1e-6 * b.h);
        assert!((a.huu - b.huu).abs() < 1e-6 * b.huu);
        assert!((a.hrr - b.hrr).abs() < 1e-6 * b.hrr);
    }

    #[test]
    fn analytic_stress_matches_finite_differences() {
        for (g, st) in [
            (Geometry::HalfSpace, StateSpec::Vacuum),
            (slab(), StateSpec::Vacuum),
            (slab(), StateSpec::Kms { beta: 1.0 }),
        ] {
            for mu in 0..4 {
                let src = DensitySource::new(
                    g,
                    st,
                    ObservableKind::Stress {
                        xi: 0.1,
                        mu,
                        nu: mu,
                    },
                );
                let a = src.density(0.37).unwrap().0;
                let fd =
                    stress_density_fd(g, st, Normalization::ClosedForm, 0.37, 0.1, mu, mu, 1e-3)
                        .unwrap();
                assert!(
                    (a - fd).abs() < 1e-4 * a.abs().max(1.0),
                    "{g:?} {st:?} {mu} {a} {fd}"
                );
            }
        }
    }

    #[test]
    fn remainder_kernel_symmetric_and_coincident() {
        let w = remainder_kernel(slab(), StateSpec::Kms { beta: 0.8 }).unwrap();
        let x = Point4::new(0.0, 0.1, 0.0, 0.3);
        let y = Point4::new(0.0, -0.2, 0.1, 0.6);
        assert!((w.eval(&x, &y).unwrap() - w.eval(&y, &x).unwrap()).abs() < 1e-12);
        let c = coincidence(
            slab(),
            StateSpec::Kms { beta: 0.8 },
            ImageSeriesConfig::default(),
            0.3,
        )
        .unwrap();
        assert!((w.eval(&x, &x).unwrap() - c.w).abs() < 1e-9 * c.w.abs());
        assert!(w.eval(&x.with_z(1e-9), &y).is_err());
    }

    #[test]
    fn reference_bracket_at_midpoint() {
        for xi in [0.0, 0.3, 1.0 / 6.0] {
            let v = reference_formulas(
                slab(),
                ObservableKind::Stress { xi, mu: 0, nu: 0 },
                0.5,
                1.0,
            )
            .unwrap();
            assert!((v - 1.0 / 1440.0).abs() < 1e-15);
        }
        let v = reference_formulas(
            Geometry::Slab { d: 2.0 },
            ObservableKind::WickSquare,
            1.0,
            2.0,
        )
        .unwrap();
        assert!((v + 1.0 / 96.0).abs() < 1e-16);
    }
}
