//! Composite Simpson quadrature.

/// Composite Simpson rule with `panels` subintervals (rounded up to even).
pub fn composite_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let n = panels.max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let x = a + k as f64 * h;
        let coeff = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += coeff * f(x);
    }
    acc * h / 3.0
}

/// Simpson with panel doubling until two successive estimates agree to
/// `rel_tol` (relative), starting from `panels` and capped at 2^20 panels.
pub fn simpson_converged<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    panels: usize,
    rel_tol: f64,
) -> f64 {
    const PANEL_CAP: usize = 1 << 20;
    let mut n = panels.max(2).next_multiple_of(2);
    let mut prev = composite_simpson(&f, a, b, n);
    while n < PANEL_CAP {
        n *= 2;
        let next = composite_simpson(&f, a, b, n);
        if (next - prev).abs() <= rel_tol * next.abs().max(f64::MIN_POSITIVE) {
            return next;
        }
        prev = next;
    }
    prev
}
