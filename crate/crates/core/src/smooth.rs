//! 1-D Gaussian smoothing with symmetric boundary padding.

/// Convolve `signal` with a normalized Gaussian kernel truncated at `±4σ`.
///
/// Borders are handled by symmetric (edge-repeating) reflection, which keeps
/// the signal mean unchanged. `sigma = 0` is the identity.
pub fn gaussian_smooth_1d(signal: &[f64], sigma: f64) -> Vec<f64> {
    assert!(!signal.is_empty(), "signal must be non-empty");
    assert!(sigma >= 0.0, "sigma must be non-negative");
    if sigma == 0.0 {
        return signal.to_vec();
    }
    let radius = (4.0 * sigma).ceil() as isize;
    let mut kernel = Vec::with_capacity(2 * radius as usize + 1);
    let mut sum = 0.0;
    for k in -radius..=radius {
        let v = (-((k * k) as f64) / (2.0 * sigma * sigma)).exp();
        kernel.push(v);
        sum += v;
    }
    for v in &mut kernel {
        *v /= sum;
    }

    let n = signal.len() as isize;
    let reflect = |mut i: isize| -> usize {
        // fold until inside; symmetric padding: -1 -> 0, n -> n-1
        loop {
            if i < 0 {
                i = -i - 1;
            } else if i >= n {
                i = 2 * n - 1 - i;
            } else {
                return i as usize;
            }
        }
    };

    (0..n)
        .map(|i| {
            kernel
                .iter()
                .enumerate()
                .map(|(j, &w)| w * signal[reflect(i + j as isize - radius)])
                .sum()
        })
        .collect()
}
