//! In-house radix-2 FFT.
//!
//! The forward transform is the unnormalized DFT
//! `X[k] = Σ_t x[t] e^{-j2πkt/n}`; the inverse carries the `1/n` factor so
//! that `fft(Inverse, fft(Forward, v)) == v`. Lengths must be powers of two.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Transform direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Transform `v`, returning a new buffer.
pub fn fft(v: &[Complex64], direction: Direction) -> Result<Vec<Complex64>> {
    let mut buf = v.to_vec();
    fft_in_place(&mut buf, direction)?;
    Ok(buf)
}

/// Transform `buf` in place.
pub fn fft_in_place(buf: &mut [Complex64], direction: Direction) -> Result<()> {
    let n = buf.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    if n == 1 {
        return Ok(());
    }

    // Bit-reversal permutation.
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }

    let sign = match direction {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };

    let mut len = 2;
    while len <= n {
        let angle = sign * 2.0 * std::f64::consts::PI / len as f64;
        let half = len / 2;
        for chunk in buf.chunks_exact_mut(len) {
            for k in 0..half {
                let w = Complex64::from_polar(1.0, angle * k as f64);
                let a = chunk[k];
                let b = chunk[k + half] * w;
                chunk[k] = a + b;
                chunk[k + half] = a - b;
            }
        }
        len <<= 1;
    }

    if direction == Direction::Inverse {
        let scale = 1.0 / n as f64;
        for x in buf.iter_mut() {
            *x *= scale;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn random_vec(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Complex64::new(rng.next_normal(), rng.next_normal()))
            .collect()
    }

    /// Naive O(n²) DFT used as an independent oracle.
    fn naive_dft(v: &[Complex64]) -> Vec<Complex64> {
        let n = v.len();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|t| {
                        let angle = -2.0 * std::f64::consts::PI * (k * t) as f64 / n as f64;
                        v[t] * Complex64::from_polar(1.0, angle)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn impulse_gives_all_ones() {
        let mut v = vec![Complex64::new(0.0, 0.0); 8];
        v[0] = Complex64::new(1.0, 0.0);
        let out = fft(&v, Direction::Forward).unwrap();
        for x in out {
            assert!((x - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn round_trip_length_1024() {
        let v = random_vec(1024, 11);
        let fwd = fft(&v, Direction::Forward).unwrap();
        let back = fft(&fwd, Direction::Inverse).unwrap();
        let err: f64 = v
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-10, "round trip error {err}");
    }

    #[test]
    fn matches_naive_dft_length_16() {
        let v = random_vec(16, 5);
        let fast = fft(&v, Direction::Forward).unwrap();
        let slow = naive_dft(&v);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() <= 1e-10);
        }
    }

    #[test]
    fn parseval() {
        let v = random_vec(256, 9);
        let out = fft(&v, Direction::Forward).unwrap();
        let lhs: f64 = out.iter().map(|x| x.norm_sqr()).sum();
        let rhs: f64 = 256.0 * v.iter().map(|x| x.norm_sqr()).sum::<f64>();
        assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs());
    }

    #[test]
    fn rejects_non_power_of_two() {
        let v = vec![Complex64::new(1.0, 0.0); 12];
        assert!(matches!(
            fft(&v, Direction::Forward),
            Err(Error::NotPowerOfTwo(12))
        ));
    }
}
