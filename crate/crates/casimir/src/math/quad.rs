//! Gauss–Legendre rules and adaptive Gauss–Kronrod integration.

use alloc::vec::Vec;

use super::{cos, fabs, Value, PI};

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if fabs(dx) < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(move |(&x, &w)| (c + h * x, h * w))
    }

    pub fn integrate<V: Value>(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> V) -> V {
        let mut s = V::zero();
        for (x, w) in self.mapped(a, b) {
            s = s + f(x) * w;
        }
        s
    }

    /// Composite rule: nodes and weights over consecutive panels delimited by `breaks`.
    pub fn composite(&self, breaks: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut xs = Vec::with_capacity(self.len() * breaks.len());
        let mut ws = Vec::with_capacity(self.len() * breaks.len());
        for p in breaks.windows(2) {
            if p[1] > p[0] {
                for (x, w) in self.mapped(p[0], p[1]) {
                    xs.push(x);
                    ws.push(w);
                }
            }
        }
        (xs, ws)
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One 21-point Kronrod panel: (estimate, error estimate).
pub fn gk21<V: Value>(a: f64, b: f64, f: &mut impl FnMut(f64) -> V) -> (V, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[10];
    let mut g = V::zero();
    let mut fv = [V::zero(); 21];
    fv[10] = fc;
    for j in 0..10 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        fv[j] = f1;
        fv[20 - j] = f2;
        k = k + (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            g = g + (f1 + f2) * WG[j / 2];
        }
    }
    let kv = k * h;
    let mean = k * 0.5;
    let mut asc = 0.0;
    for (j, v) in fv.iter().enumerate() {
        let w = if j <= 10 { WGK[j] } else { WGK[20 - j] };
        asc += w * (*v - mean).magnitude();
    }
    asc *= fabs(h);
    let diff = ((k - g) * h).magnitude();
    let mut err = diff;
    if asc > 0.0 && diff > 0.0 {
        let r = libm::pow(200.0 * diff / asc, 1.5);
        err = asc * if r < 1.0 { r } else { 1.0 };
    }
    let floor = 50.0 * f64::EPSILON * kv.magnitude();
    (kv, if err > floor { err } else { floor })
}

/// Absolute/relative tolerance pair.
#[derive(Debug, Clone, Copy)]
pub struct Tol {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Tol {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            max_panels: 4000,
        }
    }

    pub const fn panels(mut self, n: usize) -> Self {
        self.max_panels = n;
        self
    }

    fn target(&self, v: f64) -> f64 {
        let r = self.rel * v;
        if r > self.abs {
            r
        } else {
            self.abs
        }
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quad<V> {
    pub value: V,
    pub err: f64,
    pub converged: bool,
}

struct Panel<V> {
    a: f64,
    b: f64,
    v: V,
    e: f64,
}

/// Globally adaptive Gauss–Kronrod integration over [a, b] with optional interior breakpoints.
pub fn adaptive<V: Value>(
    mut f: impl FnMut(f64) -> V,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tol,
) -> Quad<V> {
    if b <= a {
        return Quad {
            value: V::zero(),
            err: 0.0,
            converged: true,
        };
    }
    let mut pts: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    pts.push(a);
    for &x in breaks {
        if x > a && x < b {
            pts.push(x);
        }
    }
    pts.push(b);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let mut panels: Vec<Panel<V>> = Vec::new();
    for w in pts.windows(2) {
        let (v, e) = gk21(w[0], w[1], &mut f);
        panels.push(Panel {
            a: w[0],
            b: w[1],
            v,
            e,
        });
    }
    let min_width = 1e-13 * (b - a);
    loop {
        let mut total = V::zero();
        let mut err = 0.0;
        let mut worst = 0;
        let mut worst_e = -1.0;
        for (i, p) in panels.iter().enumerate() {
            total = total + p.v;
            err += p.e;
            if p.e > worst_e && (p.b - p.a) > min_width {
                worst_e = p.e;
                worst = i;
            }
        }
        if err <= tol.target(total.magnitude()) {
            return Quad {
                value: total,
                err,
                converged: true,
            };
        }
        if panels.len() >= tol.max_panels || worst_e < 0.0 {
            return Quad {
                value: total,
                err,
                converged: false,
            };
        }
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk21(p.a, m, &mut f);
        let (v2, e2) = gk21(m, p.b, &mut f);
        panels.push(Panel {
            a: p.a,
            b: m,
            v: v1,
            e: e1,
        });
        panels.push(Panel {
            a: m,
            b: p.b,
            v: v2,
            e: e2,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 10, 17, 32, 64] {
            let gl = GaussLegendre::new(n);
            for deg in 0..(2 * n) {
                let v: f64 = gl.integrate(-1.0, 1.0, |x| libm::pow(x, deg as f64));
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!((v - exact).abs() < 1e-13, "n={n} deg={deg} {v} {exact}");
            }
        }
    }

    #[test]
    fn kronrod_constants_consistent_with_gauss10() {
        let gl = GaussLegendre::new(10);
        for j in 0..5 {
            let x = XGK[2 * j + 1];
            let k = gl
                .nodes
                .iter()
                .position(|&n| (n - x).abs() < 1e-15)
                .unwrap();
            assert!((gl.weights[k] - WG[j]).abs() < 1e-15);
        }
        let s: f64 = WGK[..10].iter().sum::<f64>() * 2.0 + WGK[10];
        assert!((s - 2.0).abs() < 1e-15);
        for deg in (0..=30).step_by(2) {
            let mut f = |x: f64| libm::pow(x, deg as f64);
            let (v, _) = gk21(-1.0, 1.0, &mut f);
            assert!((v - 2.0 / (deg as f64 + 1.0)).abs() < 1e-14, "deg {deg}");
        }
    }

    #[test]
    fn adaptive_handles_near_pole() {
        let eps = 1e-6;
        let q = adaptive(
            |x: f64| Complex64::new(1.0, 0.0) / Complex64::new(x, eps),
            -1.0,
            2.0,
            &[0.0],
            Tol::new(1e-12, 1e-12),
        );
        let exact = Complex64::new(2.0, eps).ln() - Complex64::new(-1.0, eps).ln();
        assert!(q.converged);
        assert!((q.value - exact).norm() < 1e-9, "{} {}", q.value, exact);
    }
}
