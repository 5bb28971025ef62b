//! Small regression helpers shared by the tail-slope and extrapolation code.

/// Ordinary least-squares slope of `ys` against `xs`.
///
/// Returns `None` with fewer than two distinct abscissae.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    ls_line(xs, ys).map(|(_, b)| b)
}

/// Least-squares line `y = a + b x`, returned as `(a, b)`.
pub fn ls_line(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= f64::EPSILON * mx.abs().max(1.0) {
        return None;
    }
    let b = sxy / sxx;
    Some((my - b * mx, b))
}

/// Fit `v ≈ a + b/k` and return `(a, b)`.
pub fn fit_inverse_k(ks: &[f64], vs: &[f64]) -> Option<(f64, f64)> {
    let inv: Vec<f64> = ks.iter().map(|k| 1.0 / k).collect();
    ls_line(&inv, vs)
}

/// Second differences of samples on a nonuniform grid, scaled to approximate
/// the second derivative.
pub fn second_differences(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    (1..xs.len().saturating_sub(1))
        .map(|i| {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            let d0 = (ys[i] - ys[i - 1]) / h0;
            let d1 = (ys[i + 1] - ys[i]) / h1;
            2.0 * (d1 - d0) / (h0 + h1)
        })
        .collect()
}
