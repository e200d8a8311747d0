//! Discrete Fourier plumbing for the circle grid.
//!
//! Conventions: samples live on the equispaced grid `x_j = 2*pi*j/N`.
//! [`forward`] returns Fourier coefficients
//! `c_k = (1/N) * sum_j f(x_j) e^{-i k x_j}` laid out in FFT bin order:
//! bin `b` holds mode `b` for `b <= (N-1)/2` and mode `b - N` above, so for
//! even `N` the half-sample bin `N/2` is read as mode `-N/2`.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Forward transform, normalized so bin `b` is the Fourier coefficient of
/// the mode [`mode_of_bin(b, n)`](mode_of_bin).
pub(crate) fn forward(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    for c in &mut buf {
        *c *= scale;
    }
    buf
}

/// Inverse of [`forward`]: evaluates the trigonometric polynomial with the
/// given bin coefficients on the grid.
pub(crate) fn inverse(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    buf
}

/// Signed mode represented by FFT bin `bin` on an `n`-point grid.
pub(crate) fn mode_of_bin(bin: usize, n: usize) -> i64 {
    if bin <= (n - 1) / 2 {
        bin as i64
    } else {
        bin as i64 - n as i64
    }
}

/// FFT bin holding signed mode `k` (valid whenever `|k| <= n/2`).
pub(crate) fn bin_of_mode(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// In-place phase shift: multiplies bin `b` by `e^{i * mode(b) * t}`, which
/// realizes `f(x) -> f(x + t)` on coefficients.
pub(crate) fn phase_shift(coeffs: &mut [Complex64], t: f64) {
    let n = coeffs.len();
    for (bin, c) in coeffs.iter_mut().enumerate() {
        let k = mode_of_bin(bin, n) as f64;
        *c *= Complex64::from_polar(1.0, k * t);
    }
}

/// In-place spectral derivative: multiplies bin `b` by `i * mode(b)`.
pub(crate) fn differentiate(coeffs: &mut [Complex64]) {
    let n = coeffs.len();
    for (bin, c) in coeffs.iter_mut().enumerate() {
        let k = mode_of_bin(bin, n) as f64;
        *c *= Complex64::new(0.0, k);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_mode_round_trip() {
        for n in [8usize, 9, 64] {
            for bin in 0..n {
                let k = mode_of_bin(bin, n);
                assert_eq!(bin_of_mode(k, n), bin, "n={n} bin={bin}");
                assert!(2 * k.unsigned_abs() as usize <= n);
            }
        }
    }

    #[test]
    fn forward_matches_direct_sum() {
        let n = 16;
        let samples: Vec<Complex64> = (0..n)
            .map(|j| {
                let x = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                Complex64::new((3.0 * x).cos(), x.sin())
            })
            .collect();
        let coeffs = forward(&samples);
        for k in [-5i64, 0, 3] {
            let mut direct = Complex64::new(0.0, 0.0);
            for (j, s) in samples.iter().enumerate() {
                let x = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                direct += s * Complex64::from_polar(1.0, -(k as f64) * x);
            }
            direct /= n as f64;
            let got = coeffs[bin_of_mode(k, n)];
            assert!((got - direct).norm() < 1e-12, "mode {k}: {got} vs {direct}");
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        let n = 32;
        let samples: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new((j as f64).sin(), (j as f64 * 0.7).cos()))
            .collect();
        let back = inverse(&forward(&samples));
        for (a, b) in samples.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
