//! Normalized fast Walsh–Hadamard transform.
//!
//! `W = H^{⊗n}` with `H = [[1, 1], [1, -1]] / √2`, so `W` is a real symmetric
//! involution. The in-place butterfly runs in `O(n·2ⁿ)`.

use std::ops::{Add, Mul, Sub};

/// In-place normalized transform. `data.len()` must be a power of two.
pub fn fwht<T>(data: &mut [T])
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let len = data.len();
    debug_assert!(len.is_power_of_two());
    let mut half = 1;
    while half < len {
        for block in (0..len).step_by(2 * half) {
            for i in block..block + half {
                let a = data[i];
                let b = data[i + half];
                data[i] = a + b;
                data[i + half] = a - b;
            }
        }
        half <<= 1;
    }
    let scale = 1.0 / (len as f64).sqrt();
    for x in data.iter_mut() {
        *x = *x * scale;
    }
}

/// Entry `W[z][k] = (-1)^{popcount(z & k)} / √N`.
pub fn hadamard_entry(z: usize, k: usize, len: usize) -> f64 {
    let sign = if (z & k).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    sign / (len as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive(data: &[f64]) -> Vec<f64> {
        let len = data.len();
        (0..len)
            .map(|z| (0..len).map(|k| hadamard_entry(z, k, len) * data[k]).sum())
            .collect()
    }

    #[test]
    fn matches_naive_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 0..7 {
            let v: Vec<f64> = (0..1usize << n)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let expected = naive(&v);
            let mut fast = v.clone();
            fwht(&mut fast);
            for (a, b) in fast.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn involution_on_complex_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..11 {
            let v: Vec<Complex64> = (0..1usize << n)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let mut w = v.clone();
            fwht(&mut w);
            fwht(&mut w);
            for (a, b) in w.iter().zip(&v) {
                assert!((a - b).norm() <= 1e-13);
            }
        }
    }
}
