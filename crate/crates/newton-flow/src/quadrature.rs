//! Adaptive Simpson quadrature with forced split points at integrand kinks.

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// ∫_a^b f, adaptive Simpson to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    adaptive(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Integrates over [a, b] with mandatory subdivision at the given split
/// points (kinks or jumps of the integrand), which are clipped to (a, b).
pub fn integrate_with_splits<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, splits: &[f64], tol: f64) -> f64 {
    let mut pts: Vec<f64> = splits.iter().copied().filter(|&s| s > a && s < b).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let mut total = 0.0;
    let mut lo = a;
    let n = pts.len() + 1;
    for &s in pts.iter().chain(std::iter::once(&b)) {
        total += adaptive_simpson(&f, lo, s, tol / n as f64);
        lo = s;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomial_exactly() {
        let v = adaptive_simpson(|t| t * t * t, 0.0, 2.0, 1e-12);
        assert!((v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn integrates_exponential() {
        let v = adaptive_simpson(|t| (-t).exp(), 0.0, 5.0, 1e-12);
        assert!((v - (1.0 - (-5.0f64).exp())).abs() < 1e-10);
    }

    #[test]
    fn handles_kink_with_split() {
        let f = |t: f64| (t - 1.0).abs();
        let v = integrate_with_splits(f, 0.0, 2.0, &[1.0], 1e-12);
        assert!((v - 1.0).abs() < 1e-12);
    }
}
