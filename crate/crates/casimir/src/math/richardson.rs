//! Polynomial extrapolation to h = 0 (Neville tableau).

use alloc::vec::Vec;

use super::Value;

/// Extrapolated value at h = 0 from samples (h_k, v_k), together with the estimate
/// obtained from all but the first (largest-h) sample. Their difference is the
/// extrapolation error estimate.
pub fn extrapolate_to_zero<V: Value>(h: &[f64], v: &[V]) -> (V, V) {
    assert!(h.len() == v.len() && !h.is_empty());
    let full = neville(h, v);
    let reduced = if h.len() > 1 {
        neville(&h[1..], &v[1..])
    } else {
        full
    };
    (full, reduced)
}

fn neville<V: Value>(h: &[f64], v: &[V]) -> V {
    let n = h.len();
    let mut p: Vec<V> = v.to_vec();
    for m in 1..n {
        for i in 0..n - m {
            // P_{i..i+m}(0) = (h_{i+m} P_{i..i+m-1} − h_i P_{i+1..i+m}) / (h_{i+m} − h_i)
            let num = p[i] * h[i + m] - p[i + 1] * h[i];
            p[i] = num * (1.0 / (h[i + m] - h[i]));
        }
    }
    p[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        let h: [f64; 5] = [0.1, 0.05, 0.025, 0.0125, 0.00625];
        let v: Vec<f64> = h
            .iter()
            .map(|&x| 3.0 - 2.0 * x + 5.0 * x * x - x.powi(3) + 7.0 * x.powi(4))
            .collect();
        let (full, red) = extrapolate_to_zero(&h, &v);
        assert!((full - 3.0).abs() < 1e-12);
        assert!((red - 3.0).abs() < 1e-6);
    }

    #[test]
    fn improves_on_smooth_function() {
        let h: [f64; 5] = [0.1, 0.05, 0.025, 0.0125, 0.00625];
        let v: Vec<f64> = h.iter().map(|&x| libm::exp(-x) / (1.0 + x)).collect();
        let (full, red) = extrapolate_to_zero(&h, &v);
        assert!((full - 1.0).abs() < 1e-7);
        assert!((full - red).abs() < 1e-6);
    }
}
