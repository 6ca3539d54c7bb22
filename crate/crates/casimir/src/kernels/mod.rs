//! Minkowski two-point kernels, their ε-regularized smearing, and the causal propagator.

mod correlation;
mod kirchhoff;
mod smear;

use crate::math::Ipow;
use num_complex::Complex64;

use crate::boundary::ImageSeriesConfig;
use crate::error::{domain, invalid, Result};
use crate::fields::Point4;
use crate::math::series::{sum_paired, SeriesControl};
use crate::math::{sqrt, PI};

pub use correlation::{sphere_integral, Correlation1};
pub use kirchhoff::{
    causal_pairing, causal_pairing_kirchhoff, causal_pairing_with, kirchhoff_apply,
    kirchhoff_apply_sum, kirchhoff_pairing_sum, Side,
};
pub use smear::{smear2, smear2_sum, smear2_with, SmearOptions};

/// Quasi-free base state of the massless field on Minkowski space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Vacuum,
    Kms { beta: f64 },
}

impl StateSpec {
    pub fn kms(beta: f64) -> Result<Self> {
        if beta > 0.0 && beta.is_finite() {
            Ok(StateSpec::Kms { beta })
        } else {
            Err(invalid(
                "inverse temperature beta must be positive and finite",
            ))
        }
    }
}

/// A value with a nonnegative error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmearedValue {
    pub value: Complex64,
    pub err: f64,
}

impl SmearedValue {
    pub fn new(value: Complex64, err: f64) -> Self {
        Self { value, err }
    }

    pub fn real(value: f64, err: f64) -> Self {
        Self {
            value: Complex64::new(value, 0.0),
            err,
        }
    }

    pub fn scale(self, s: f64) -> Self {
        Self {
            value: self.value * s,
            err: self.err * s.abs(),
        }
    }

    pub fn plus(self, o: SmearedValue) -> Self {
        Self {
            value: self.value + o.value,
            err: self.err + o.err,
        }
    }

    pub fn minus(self, o: SmearedValue) -> Self {
        Self {
            value: self.value - o.value,
            err: self.err + o.err,
        }
    }
}

/// A real quantity with a nonnegative error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

/// Translation-invariant Minkowski kernel k(Δt − iε, |Δ𝐱|).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Base {
    Vacuum,
    Kms {
        beta: f64,
    },
    /// KMS kernel continued to Δt − iβ + iε (imaginary-time shift of the first argument).
    KmsShifted {
        beta: f64,
    },
}

impl Base {
    pub(crate) fn from_state(s: StateSpec) -> Self {
        match s {
            StateSpec::Vacuum => Base::Vacuum,
            StateSpec::Kms { beta } => Base::Kms { beta },
        }
    }

    /// Kernel at real time difference `dt`, regulator `eps` ≥ 0 and spatial distance `r`.
    pub(crate) fn eval(&self, dt: f64, eps: f64, r: f64) -> Complex64 {
        match *self {
            Base::Vacuum => vacuum_value(Complex64::new(dt, -eps), r),
            Base::Kms { beta } => kms_value(Complex64::new(dt, -eps), r, beta),
            Base::KmsShifted { beta } => kms_value(Complex64::new(dt, eps - beta), r, beta),
        }
    }
}

/// (1/4π²)/(r² − w²).
/// Vacuum kernel at real time difference u, ε = 0.
pub(crate) fn vacuum_value_at(u: f64, r: f64) -> Complex64 {
    vacuum_value(Complex64::new(u, 0.0), r)
}

/// KMS kernel at real time difference u, ε = 0.
pub(crate) fn kms_value_at(u: f64, r: f64, beta: f64) -> Complex64 {
    kms_value(Complex64::new(u, 0.0), r, beta)
}

pub(crate) fn vacuum_value(w: Complex64, r: f64) -> Complex64 {
    let rr = Complex64::new(r, 0.0);
    Complex64::new(1.0 / (4.0 * PI * PI), 0.0) / ((rr - w) * (rr + w))
}

/// (1/4πβr)·sinh(ar)/(cosh(ar) − cosh(aw)) with a = 2π/β, for Im w ∈ [−β, 0].
pub(crate) fn kms_value(w: Complex64, r: f64, beta: f64) -> Complex64 {
    let a = 2.0 * PI / beta;
    let big_a = a * r;
    let big_b = w * a;
    let m = big_a.max(big_b.re.abs());
    if m < 300.0 {
        // cosh A − cosh B = 2 sinh((A+B)/2) sinh((A−B)/2)
        let s_over_r = if big_a < 1e-3 {
            let x2 = big_a * big_a;
            a * (1.0 + x2 / 6.0 + x2 * x2 / 120.0)
        } else {
            libm::sinh(big_a) / r
        };
        let half_sum = (Complex64::new(big_a, 0.0) + big_b) * 0.5;
        let half_diff = (Complex64::new(big_a, 0.0) - big_b) * 0.5;
        let den = half_sum.sinh() * half_diff.sinh() * 2.0;
        Complex64::new(s_over_r / (4.0 * PI * beta), 0.0) / den
    } else {
        let num = libm::exp(big_a - m) - libm::exp(-big_a - m);
        let den = Complex64::new(libm::exp(big_a - m) + libm::exp(-big_a - m), 0.0)
            - (big_b - m).exp()
            - (-big_b - m).exp();
        Complex64::new(num / (4.0 * PI * beta * r), 0.0) / den
    }
}

/// Spatial arrangement of image terms attached to a base kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ImageLayout {
    /// Plain Minkowski kernel.
    Free,
    /// K̃(x, x′) − K̃(ι_z x, x′).
    HalfSpace,
    /// Σ_n [K̃(x, x′ + 2nd e₃) − K̃(x, ι_z x′ + 2nd e₃)].
    Slab { d: f64, series: ImageSeriesConfig },
}

/// Symmetries of a kernel under simultaneous transformations of both arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetryFlags {
    pub z_reflection: bool,
    pub z_translation: bool,
    pub time_translation: bool,
}

/// ε-regularized two-point kernel (x, x′, ε) ↦ complex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonKernel {
    pub(crate) base: Base,
    pub layout: ImageLayout,
    /// Set on the Hadamard parametrix so observables subtract exactly this kernel.
    pub hadamard: bool,
    pub flags: SymmetryFlags,
}

pub fn vacuum_kernel() -> EpsilonKernel {
    EpsilonKernel::free(Base::Vacuum)
}

pub fn kms_kernel(beta: f64) -> Result<EpsilonKernel> {
    StateSpec::kms(beta)?;
    Ok(EpsilonKernel::free(Base::Kms { beta }))
}

/// Massless flat-space parametrix: the vacuum kernel, flagged.
pub fn hadamard_parametrix() -> EpsilonKernel {
    EpsilonKernel {
        hadamard: true,
        ..vacuum_kernel()
    }
}

impl EpsilonKernel {
    pub(crate) fn free(base: Base) -> Self {
        Self {
            base,
            layout: ImageLayout::Free,
            hadamard: false,
            flags: SymmetryFlags {
                z_reflection: true,
                z_translation: true,
                time_translation: true,
            },
        }
    }

    pub(crate) fn with_layout(base: Base, layout: ImageLayout) -> Self {
        let free = layout == ImageLayout::Free;
        Self {
            base,
            layout,
            hadamard: false,
            flags: SymmetryFlags {
                z_reflection: free,
                z_translation: free,
                time_translation: true,
            },
        }
    }

    pub fn state(&self) -> StateSpec {
        match self.base {
            Base::Vacuum => StateSpec::Vacuum,
            Base::Kms { beta } | Base::KmsShifted { beta } => StateSpec::Kms { beta },
        }
    }

    /// The same kernel with the first argument shifted by iβ in time (KMS kernels only).
    pub fn imaginary_time_shifted(&self) -> Result<Self> {
        match self.base {
            Base::Kms { beta } => Ok(Self {
                base: Base::KmsShifted { beta },
                ..*self
            }),
            _ => Err(invalid("imaginary-time shift needs a KMS kernel")),
        }
    }

    /// Value of the Minkowski part at complex time difference `dt` and distance `r`.
    /// For KMS kernels Im(dt) must lie in (−β, 0].
    pub fn eval_dt(&self, dt: Complex64, r: f64) -> Result<Complex64> {
        match self.base {
            Base::Vacuum => {
                if dt.im > 0.0 {
                    return Err(domain("vacuum kernel needs Im(dt) <= 0"));
                }
                Ok(vacuum_value(dt, r))
            }
            Base::Kms { beta } | Base::KmsShifted { beta } => {
                if !(dt.im > -beta && dt.im <= 0.0) {
                    return Err(domain(
                        "Im(dt) outside the KMS analyticity strip (-beta, 0]",
                    ));
                }
                Ok(kms_value(dt, r, beta))
            }
        }
    }

    fn pair(&self, x: &Point4, xp: &Point4, eps: f64) -> Complex64 {
        let d = x.minus(xp);
        self.base
            .eval(d.t, eps, sqrt(d.x * d.x + d.y * d.y + d.z * d.z))
    }

    /// K(x, x′, ε).
    pub fn eval(&self, x: &Point4, xp: &Point4, eps: f64) -> Result<Complex64> {
        Ok(self.eval_with_err(x, xp, eps)?.value)
    }

    /// K(x, x′, ε) together with the image-series truncation estimate.
    pub fn eval_with_err(&self, x: &Point4, xp: &Point4, eps: f64) -> Result<SmearedValue> {
        if !(eps >= 0.0) {
            return Err(invalid("epsilon must be nonnegative"));
        }
        match self.layout {
            ImageLayout::Free => Ok(SmearedValue::new(self.pair(x, xp, eps), 0.0)),
            ImageLayout::HalfSpace => Ok(SmearedValue::new(
                self.pair(x, xp, eps) - self.pair(&x.reflected(), xp, eps),
                0.0,
            )),
            ImageLayout::Slab { d, series } => {
                let rho = sqrt((x.x - xp.x).ipow(2) + (x.y - xp.y).ipow(2));
                let dt = x.t - xp.t;
                let term = |dz: f64| self.base.eval(dt, eps, sqrt(rho * rho + dz * dz));
                let dzp = x.z - xp.z;
                let dzr = x.z + xp.z;
                let c = term(dzp) - term(dzr);
                let out = sum_paired(
                    [c.re, c.im],
                    |n| {
                        let s = 2.0 * d * n as f64;
                        let v = term(dzp - s) + term(dzp + s) - term(dzr - s) - term(dzr + s);
                        Ok([v.re, v.im])
                    },
                    SeriesControl::new(series.n_max, series.tail_tol),
                )?;
                Ok(SmearedValue::new(
                    Complex64::new(out.value[0], out.value[1]),
                    out.err,
                ))
            }
        }
    }
}
