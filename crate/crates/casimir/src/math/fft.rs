//! In-place radix-2 complex FFT.

use num_complex::Complex64;

use super::PI;

/// Computes X_k = Σ_j x_j e^{sign·2πi jk/n} in place. `sign` is +1 or −1; no normalization.
/// The length must be a power of two.
pub fn fft_in_place(x: &mut [Complex64], sign: f64) {
    let n = x.len();
    assert!(n.is_power_of_two(), "fft length must be a power of two");
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            x.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * PI / len as f64;
        let wl = Complex64::new(libm::cos(ang), libm::sin(ang));
        for start in (0..n).step_by(len) {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = x[start + k];
                let v = x[start + k + len / 2] * w;
                x[start + k] = u + v;
                x[start + k + len / 2] = u - v;
                w *= wl;
            }
        }
        len <<= 1;
    }
}
