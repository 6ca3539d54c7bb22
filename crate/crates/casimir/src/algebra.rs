//! Regular polynomial functionals of the field configuration and their star products.
//!
//! A functional is a finite sum of monomials c·⟨f₁,u⟩⋯⟨f_k,u⟩. The star product built on a
//! bidistribution P contracts n pairs of factors at a time:
//!
//!   F ⋆ G = Σ_n (i/2)ⁿ Σ_{n-matchings} Π P(a, b) · (unmatched factors),
//!
//! which is the usual Σ (iⁿ/2ⁿn!)⟨F⁽ⁿ⁾, P^{⊗n} G⁽ⁿ⁾⟩ written monomial by monomial.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;

use crate::boundary::{casimir_pairing, cp_pairing};
use crate::error::{invalid, Result};
use crate::fields::{image_n, Geometry, PeriodicizedFunction, TestFunction};
use crate::kernels::{
    causal_pairing_kirchhoff, smear2_with, vacuum_kernel, SmearOptions, SmearedValue,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// c·Π⟨f_k, u⟩ with the factors kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coef: Complex64,
    pub factors: Vec<TestFunction>,
}

fn key(f: &TestFunction) -> [u64; 9] {
    let c = f.center.to_array();
    [
        c[0].to_bits(),
        c[1].to_bits(),
        c[2].to_bits(),
        c[3].to_bits(),
        f.radii[0].to_bits(),
        f.radii[1].to_bits(),
        f.radii[2].to_bits(),
        f.radii[3].to_bits(),
        f.amplitude.to_bits(),
    ]
}

fn cmp_fn(a: &TestFunction, b: &TestFunction) -> Ordering {
    key(a).cmp(&key(b))
}

fn cmp_factors(a: &[TestFunction], b: &[TestFunction]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        a.iter()
            .zip(b)
            .map(|(x, y)| cmp_fn(x, y))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    })
}

impl Monomial {
    pub fn new(coef: Complex64, mut factors: Vec<TestFunction>) -> Self {
        factors.sort_by(cmp_fn);
        Self { coef, factors }
    }

    pub fn degree(&self) -> usize {
        self.factors.len()
    }
}

/// Finite sum of monomials; `err` bounds the absolute error of the coefficients that came
/// from numerical pairings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RegularFunctional {
    pub terms: Vec<Monomial>,
    pub err: f64,
}

impl RegularFunctional {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self {
            terms: vec![Monomial::new(c, Vec::new())],
            err: 0.0,
        }
        .normalized()
    }

    pub fn unit() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    /// The linear generator F_f(u) = ⟨f, u⟩.
    pub fn generator(f: &TestFunction) -> Self {
        Self {
            terms: vec![Monomial::new(Complex64::new(1.0, 0.0), vec![*f])],
            err: 0.0,
        }
    }

    /// c·⟨f, u⟩⟨g, u⟩.
    pub fn quadratic(c: Complex64, f: &TestFunction, g: &TestFunction) -> Self {
        Self {
            terms: vec![Monomial::new(c, vec![*f, *g])],
            err: 0.0,
        }
        .normalized()
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Coefficient of 𝟙.
    pub fn scalar(&self) -> Complex64 {
        self.terms
            .iter()
            .filter(|m| m.factors.is_empty())
            .map(|m| m.coef)
            .sum()
    }

    /// Merge equal monomials and drop exact zeros.
    pub fn normalized(mut self) -> Self {
        self.terms
            .sort_by(|a, b| cmp_factors(&a.factors, &b.factors));
        let mut out: Vec<Monomial> = Vec::with_capacity(self.terms.len());
        for m in self.terms {
            match out.last_mut() {
                Some(last) if cmp_factors(&last.factors, &m.factors) == Ordering::Equal => {
                    last.coef += m.coef
                }
                _ => out.push(m),
            }
        }
        out.retain(|m| m.coef != Complex64::new(0.0, 0.0));
        Self {
            terms: out,
            err: self.err,
        }
    }

    pub fn scale(mut self, s: Complex64) -> Self {
        for m in &mut self.terms {
            m.coef *= s;
        }
        self.err *= s.norm();
        self.normalized()
    }

    pub fn plus(mut self, other: &RegularFunctional) -> Self {
        self.terms.extend(other.terms.iter().cloned());
        self.err += other.err;
        self.normalized()
    }

    pub fn minus(self, other: &RegularFunctional) -> Self {
        self.plus(&other.clone().scale(Complex64::new(-1.0, 0.0)))
    }

    /// Pointwise (classical) product.
    pub fn mul(&self, other: &RegularFunctional) -> Self {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let mut f = a.factors.clone();
                f.extend(b.factors.iter().copied());
                terms.push(Monomial::new(a.coef * b.coef, f));
            }
        }
        let err = self.err * other.max_coef() + other.err * self.max_coef();
        Self { terms, err }.normalized()
    }

    /// F*: coefficient conjugation, (F*)(u) = conj F(conj u).
    pub fn star(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|m| Monomial {
                coef: m.coef.conj(),
                factors: m.factors.clone(),
            })
            .collect();
        Self {
            terms,
            err: self.err,
        }
    }

    /// Largest coefficient magnitude.
    pub fn max_coef(&self) -> f64 {
        self.terms.iter().map(|m| m.coef.norm()).fold(0.0, f64::max)
    }

    /// F(u) for a configuration given through its smearings f ↦ ⟨f, u⟩.
    pub fn evaluate(&self, u: impl Fn(&TestFunction) -> Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|m| m.factors.iter().fold(m.coef, |acc, f| acc * u(f)))
            .sum()
    }
}

/// Bidistribution used in the star product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairingKind {
    /// Minkowski causal propagator E.
    MinkowskiE,
    /// E_{ℍ⁴}(f, g) = E(f, g) − E(f, ι_z g).
    HalfSpaceE,
    /// E_Z for plates at z = 0 and z = d.
    SlabE { d: f64 },
    /// −2iH with H the vacuum two-point function; its antisymmetric part is E.
    DeformedH,
}

impl PairingKind {
    /// P(f, g) with its error estimate.
    pub fn pair(&self, f: &TestFunction, g: &TestFunction) -> Result<SmearedValue> {
        match *self {
            PairingKind::MinkowskiE => {
                let e = causal_pairing_kirchhoff(f, g);
                Ok(SmearedValue::real(e.value, e.err))
            }
            PairingKind::HalfSpaceE => {
                let e = cp_pairing(f, g)?;
                Ok(SmearedValue::real(e.value, e.err))
            }
            PairingKind::SlabE { d } => {
                let e = casimir_pairing(f, g, d)?;
                Ok(SmearedValue::real(e.value, e.err))
            }
            PairingKind::DeformedH => {
                let h = smear2_with(&vacuum_kernel(), f, g, &SmearOptions::default())?;
                Ok(SmearedValue::new(
                    h.value * Complex64::new(0.0, -2.0),
                    2.0 * h.err,
                ))
            }
        }
    }
}

/// Memoized pairing values for one product evaluation.
struct PairCache<'a> {
    kind: &'a PairingKind,
    seen: Vec<(TestFunction, TestFunction, SmearedValue)>,
}

impl<'a> PairCache<'a> {
    fn new(kind: &'a PairingKind) -> Self {
        Self {
            kind,
            seen: Vec::new(),
        }
    }

    fn get(&mut self, a: &TestFunction, b: &TestFunction) -> Result<SmearedValue> {
        if let Some((_, _, v)) = self.seen.iter().find(|(x, y, _)| x == a && y == b) {
            return Ok(*v);
        }
        let v = self.kind.pair(a, b)?;
        self.seen.push((*a, *b, v));
        Ok(v)
    }
}

/// All injective partial maps from a subset of 0..p into 0..q, as (i, j) lists.
fn matchings(p: usize, q: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(
        i: usize,
        p: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if i == p {
            out.push(cur.clone());
            return;
        }
        rec(i + 1, p, used, cur, out);
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                cur.push((i, j));
                rec(i + 1, p, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(0, p, &mut vec![false; q], &mut Vec::new(), &mut out);
    out
}

fn star_with(
    f: &RegularFunctional,
    g: &RegularFunctional,
    cache: &mut PairCache,
) -> Result<RegularFunctional> {
    let mut terms = Vec::new();
    let mut err = f.err * g.max_coef() + g.err * f.max_coef();
    for a in &f.terms {
        for b in &g.terms {
            for m in matchings(a.degree(), b.degree()) {
                let mut c = a.coef * b.coef;
                let mut c_err = 0.0;
                for &(i, j) in &m {
                    let p = cache.get(&a.factors[i], &b.factors[j])?;
                    let w = p.value * I * 0.5;
                    c_err = c_err * w.norm() + c.norm() * 0.5 * p.err;
                    c *= w;
                }
                let rest = a
                    .factors
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !m.iter().any(|(x, _)| x == i))
                    .map(|(_, h)| *h)
                    .chain(
                        b.factors
                            .iter()
                            .enumerate()
                            .filter(|(j, _)| !m.iter().any(|(_, y)| y == j))
                            .map(|(_, h)| *h),
                    )
                    .collect();
                err += c_err;
                terms.push(Monomial::new(c, rest));
            }
        }
    }
    Ok(RegularFunctional { terms, err }.normalized())
}

/// F ⋆ G for the chosen pairing; both factors of degree at most 2.
pub fn star_product(
    f: &RegularFunctional,
    g: &RegularFunctional,
    pairing: PairingKind,
) -> Result<RegularFunctional> {
    if f.degree() > 2 || g.degree() > 2 {
        return Err(invalid(
            "star_product takes functionals of degree at most 2",
        ));
    }
    star_with(f, g, &mut PairCache::new(&pairing))
}

/// (F ⋆ G) ⋆ K − F ⋆ (G ⋆ K) with both sides sharing one pairing cache.
pub fn associator(
    f: &RegularFunctional,
    g: &RegularFunctional,
    k: &RegularFunctional,
    pairing: PairingKind,
) -> Result<RegularFunctional> {
    let mut cache = PairCache::new(&pairing);
    let left = star_with(&star_with(f, g, &mut cache)?, k, &mut cache)?;
    let right = star_with(f, &star_with(g, k, &mut cache)?, &mut cache)?;
    Ok(left.minus(&right))
}

/// [F, G]_⋆ = F ⋆ G − G ⋆ F.
pub fn commutator(
    f: &RegularFunctional,
    g: &RegularFunctional,
    pairing: PairingKind,
) -> Result<RegularFunctional> {
    let mut cache = PairCache::new(&pairing);
    let a = star_with(f, g, &mut cache)?;
    let b = star_with(g, f, &mut cache)?;
    Ok(a.minus(&b))
}

/// ω(F) for a quasi-free state with two-point function ω₂, in the algebra of `pairing`.
///
/// Classical products are Wick-paired with the symmetric kernel ω₂ − (i/2)P, so that
/// ω(F_f ⋆ F_g) = ω₂(f, g).
pub fn expectation(
    f: &RegularFunctional,
    pairing: PairingKind,
    two_point: &dyn Fn(&TestFunction, &TestFunction) -> Result<SmearedValue>,
) -> Result<SmearedValue> {
    let mut cache = PairCache::new(&pairing);
    let mut sym = |a: &TestFunction, b: &TestFunction| -> Result<SmearedValue> {
        let w = two_point(a, b)?;
        let p = cache.get(a, b)?;
        Ok(SmearedValue::new(
            w.value - p.value * I * 0.5,
            w.err + 0.5 * p.err,
        ))
    };
    fn wick(
        fs: &[TestFunction],
        sym: &mut dyn FnMut(&TestFunction, &TestFunction) -> Result<SmearedValue>,
    ) -> Result<SmearedValue> {
        if fs.is_empty() {
            return Ok(SmearedValue::real(1.0, 0.0));
        }
        if fs.len() % 2 == 1 {
            return Ok(SmearedValue::real(0.0, 0.0));
        }
        let mut acc = SmearedValue::real(0.0, 0.0);
        for j in 1..fs.len() {
            let head = sym(&fs[0], &fs[j])?;
            let rest: Vec<TestFunction> = fs
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != 0 && *k != j)
                .map(|(_, h)| *h)
                .collect();
            let tail = wick(&rest, sym)?;
            acc = acc.plus(SmearedValue::new(
                head.value * tail.value,
                head.err * tail.value.norm() + tail.err * head.value.norm(),
            ));
        }
        Ok(acc)
    }
    let mut out = SmearedValue::real(0.0, f.err);
    for m in &f.terms {
        let w = wick(&m.factors, &mut sym)?;
        out = out.plus(SmearedValue::new(m.coef * w.value, m.coef.norm() * w.err));
    }
    Ok(out)
}

/// Whether every point of supp f is spacelike to every point of supp g.
pub fn causally_disjoint(f: &TestFunction, g: &TestFunction) -> bool {
    let (a, b) = (f.support(), g.support());
    let gap = |k: usize| (b[k].0 - a[k].1).max(a[k].0 - b[k].1).max(0.0);
    let dt = (a[0].1 - b[0].0).abs().max((b[0].1 - a[0].0).abs());
    let dx = libm::sqrt(gap(1) * gap(1) + gap(2) * gap(2) + gap(3) * gap(3));
    dt < dx
}

/// Bumps whose values enter P(f, g) besides g itself: the image copies for boundary pairings.
pub fn pairing_images(
    f: &TestFunction,
    g: &TestFunction,
    pairing: PairingKind,
) -> Result<Vec<TestFunction>> {
    match pairing {
        PairingKind::MinkowskiE | PairingKind::DeformedH => Ok(vec![*g]),
        PairingKind::HalfSpaceE => Ok(vec![*g, g.with_center_z(-g.center.z)]),
        PairingKind::SlabE { d } => {
            let reach = (g.axis(0).hi() - f.axis(0).lo())
                .abs()
                .max((f.axis(0).hi() - g.axis(0).lo()).abs());
            let (zl, zh) = f.z_support();
            Ok(image_n(*g, d, None)?
                .images_meeting(zl - reach, zh + reach)
                .into_iter()
                .map(|(_, h)| h)
                .collect())
        }
    }
}

/// Outcome of [`ccr_causality_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct CcrReport {
    /// P(f, g).
    pub pairing: SmearedValue,
    /// Coefficient of 𝟙 in [F_f, F_g]_⋆.
    pub commutator_scalar: Complex64,
    /// |commutator_scalar − (i/2)(P(f, g) − P(g, f))|; for an antisymmetric pairing the
    /// reference is i·P(f, g).
    pub ccr_deviation: f64,
    /// The commutator has no field-dependent part.
    pub scalar_only: bool,
    /// supp f is spacelike to supp g and to every image of g entering the pairing.
    pub spacelike: bool,
    /// |commutator_scalar| when `spacelike`, otherwise `None`.
    pub spacelike_deviation: Option<f64>,
    pub err: f64,
}

pub fn ccr_causality_check(
    f: &TestFunction,
    g: &TestFunction,
    pairing: PairingKind,
) -> Result<CcrReport> {
    let c = commutator(
        &RegularFunctional::generator(f),
        &RegularFunctional::generator(g),
        pairing,
    )?;
    let p = pairing.pair(f, g)?;
    let q = pairing.pair(g, f)?;
    let scalar = c.scalar();
    let spacelike = pairing_images(f, g, pairing)?
        .iter()
        .all(|h| causally_disjoint(f, h));
    Ok(CcrReport {
        pairing: p,
        commutator_scalar: scalar,
        ccr_deviation: (scalar - I * 0.5 * (p.value - q.value)).norm(),
        scalar_only: c.terms.iter().all(|m| m.factors.is_empty()),
        spacelike,
        spacelike_deviation: spacelike.then(|| scalar.norm()),
        err: c.err + p.err + q.err,
    })
}

/// (F ⋆ G)* − G* ⋆ F*.
pub fn hermiticity_residual(
    f: &RegularFunctional,
    g: &RegularFunctional,
    pairing: PairingKind,
) -> Result<RegularFunctional> {
    let mut cache = PairCache::new(&pairing);
    let a = star_with(f, g, &mut cache)?.star();
    let b = star_with(&g.star(), &f.star(), &mut cache)?;
    Ok(a.minus(&b))
}

/// Argument of [`sigma_c_pairing`].
#[derive(Debug, Clone, PartialEq)]
pub enum SlabSource {
    Plain(TestFunction),
    Periodic(PeriodicizedFunction),
}

impl From<TestFunction> for SlabSource {
    fn from(f: TestFunction) -> Self {
        SlabSource::Plain(f)
    }
}

impl From<PeriodicizedFunction> for SlabSource {
    fn from(p: PeriodicizedFunction) -> Self {
        SlabSource::Periodic(p)
    }
}

impl SlabSource {
    fn bumps_meeting(&self, lo: f64, hi: f64) -> Vec<(f64, TestFunction)> {
        match self {
            SlabSource::Plain(f) => {
                let (a, b) = f.z_support();
                if b > lo && a < hi {
                    vec![(1.0, *f)]
                } else {
                    Vec::new()
                }
            }
            SlabSource::Periodic(p) => p.images_meeting(lo, hi),
        }
    }
}

/// σ_C(ζ, ζ′) with the raw asymmetry (ζ, Eζ′)_C + (ζ′, Eζ)_C as a diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaC {
    pub value: f64,
    pub err: f64,
    pub asymmetry: f64,
}

/// ∫ d³x̄ ∫₀^d dz ζ·E(ζ′) for one ordering.
fn slab_integral(a: &SlabSource, b: &SlabSource, d: f64) -> Result<(f64, f64)> {
    let mut value = 0.0;
    let mut err = 0.0;
    for (c, h) in a.bumps_meeting(0.0, d) {
        if !h.inside(&Geometry::Slab { d }) {
            return Err(invalid(
                "sigma_c_pairing: a bump crosses a plate, so its restriction is not smooth",
            ));
        }
        let reach = h.radii[0] * 2.0
            + match b {
                SlabSource::Plain(g) => g.radii[0] + (g.center.t - h.center.t).abs(),
                SlabSource::Periodic(p) => p
                    .base
                    .terms
                    .iter()
                    .map(|(_, g)| g.radii[0] + (g.center.t - h.center.t).abs())
                    .fold(0.0, f64::max),
            };
        let (zl, zh) = h.z_support();
        for (cb, k) in b.bumps_meeting(zl - reach, zh + reach) {
            let e = causal_pairing_kirchhoff(&h, &k);
            value += c * cb * e.value;
            err += (c * cb).abs() * e.err;
        }
    }
    Ok((value, err))
}

pub fn sigma_c_pairing(zeta: &SlabSource, zeta_p: &SlabSource, d: f64) -> Result<SigmaC> {
    Geometry::slab(d)?;
    let (v, e1) = slab_integral(zeta, zeta_p, d)?;
    let (w, e2) = slab_integral(zeta_p, zeta, d)?;
    Ok(SigmaC {
        value: 0.5 * (v - w),
        err: 0.5 * (e1 + e2),
        asymmetry: v + w,
    })
}

/// E(f, f′) against σ_C(E∘N f, E∘N f′) = σ_C(N f, N f′).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticComparison {
    pub minkowski: f64,
    pub slab: SigmaC,
    pub difference: f64,
    pub err: f64,
}

pub fn symplectic_comparison(
    f: &TestFunction,
    fp: &TestFunction,
    d: f64,
) -> Result<SymplecticComparison> {
    let e = causal_pairing_kirchhoff(f, fp);
    let s = sigma_c_pairing(
        &image_n(*f, d, None)?.into(),
        &image_n(*fp, d, None)?.into(),
        d,
    )?;
    Ok(SymplecticComparison {
        minkowski: e.value,
        slab: s,
        difference: (s.value - e.value).abs(),
        err: e.err + s.err,
    })
}
