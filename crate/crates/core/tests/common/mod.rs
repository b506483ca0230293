//! Shared oracles and scenario generators for the integration suites.
//!
//! The numerical oracles here are deliberately independent of the library's
//! implementation paths: bisection instead of Halley/Lambert, per-panel
//! Simpson instead of the library's composite rule.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sir_threshold::ThresholdProblem;

/// Bisection on a bracketing interval; 200 halvings take the bracket width
/// below 1e-55 of its original size.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(
        flo * f(hi) <= 0.0,
        "bisection oracle needs a sign change on [{lo}, {hi}]"
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if flo * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Independent Simpson oracle: per-panel (h/6)(f(a) + 4 f(mid) + f(b)).
pub fn simpson_oracle<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        let x0 = a + k as f64 * h;
        let x1 = a + (k + 1) as f64 * h;
        acc += (h / 6.0) * (f(x0) + 4.0 * f(0.5 * (x0 + x1)) + f(x1));
    }
    acc
}

/// Closed-form epidemic peak, transcribed directly for oracle use.
pub fn peak_formula(n: f64, r0: f64, s0: f64, rr0: f64) -> f64 {
    (n / r0) * ((n / (r0 * s0)).ln() - 1.0) - rr0 + n
}

/// A random scenario guaranteed to exceed its threshold: R0 comfortably in
/// the equality regime and M placed strictly between I(0) and the peak.
pub fn exceeding_scenario(rng: &mut ChaCha8Rng) -> ThresholdProblem {
    let n = 100.0;
    let gamma = 0.1 + 0.9 * rng.gen::<f64>();
    let rr0 = if rng.gen::<f64>() < 0.3 {
        8.0 * rng.gen::<f64>()
    } else {
        0.0
    };
    let s0 = 65.0 + (n - rr0 - 3.0 - 65.0) * rng.gen::<f64>();
    let i0 = n - s0 - rr0;
    let lo = 1.5 * n / s0;
    let r0 = lo + (7.0 - lo) * rng.gen::<f64>();
    let peak = peak_formula(n, r0, s0, rr0);
    let m = i0 + (0.15 + 0.7 * rng.gen::<f64>()) * (peak - i0);
    ThresholdProblem::from_scenario(n, gamma, r0, s0, i0, rr0, m).unwrap()
}

/// A random scenario in the equality regime whose threshold may or may not
/// be exceeded.
pub fn mixed_scenario(rng: &mut ChaCha8Rng) -> ThresholdProblem {
    let n = 100.0;
    let gamma = 0.1 + 0.9 * rng.gen::<f64>();
    let s0 = 80.0 + 19.0 * rng.gen::<f64>();
    let i0 = n - s0;
    let lo = 1.02 * n / s0;
    let r0 = lo + (6.0 - lo) * rng.gen::<f64>();
    let m = i0 + (0.05 + 0.9 * rng.gen::<f64>()) * (s0 * 0.95);
    ThresholdProblem::from_scenario(n, gamma, r0, s0, i0, 0.0, m).unwrap()
}
