//! Real-valued Lambert W function and the log-equation solvers built on it.
//!
//! `W(x)` is the inverse relation of `w * exp(w)`. Over the reals it has two
//! branches: the principal branch `W0` (values >= -1, defined for x >= -1/e)
//! and the lower branch `W-1` (values <= -1, defined for -1/e <= x < 0).
//! Both meet at the branch point `W(-1/e) = -1`.
//!
//! On top of W, [`solve_log_linear`] finds the positive roots of
//! `ln u = a*u + b` and [`solve_xlogx`] those of `v*ln v = a*v + b`; their
//! root counts follow the case analysis on `a*e^(b+1)` and `b*e^(1-a)`.

use crate::error::{Error, Result};

/// Which real branch of the Lambert W function to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `W0`, defined on x >= -1/e with values >= -1.
    Principal,
    /// `W-1`, defined on -1/e <= x < 0 with values <= -1.
    Lower,
}

const NEG_INV_E: f64 = -1.0 / std::f64::consts::E;
/// Callers compute -1/e in floating point; accept arguments this far below it.
const BRANCH_POINT_SLACK: f64 = 1e-15;
/// Inside this window around -1/e, Halley degenerates (double root); use the
/// branch-point series instead.
const SERIES_WINDOW: f64 = 1e-6;
const MAX_ITER: usize = 50;

/// Expansion of W about the branch point in p = +-sqrt(2*(1 + e*x)).
fn branch_point_series(p: f64) -> f64 {
    // W = -1 + p - p^2/3 + 11 p^3/72 - 43 p^4/540 + 769 p^5/17280 - ...
    -1.0 + p
        * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * (769.0 / 17280.0)))))
}

fn halley(x: f64, mut w: f64) -> f64 {
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            break;
        }
        let w1 = w + 1.0;
        let denom = ew * w1 - (w + 2.0) * f / (2.0 * w1);
        let delta = f / denom;
        w -= delta;
        if delta.abs() <= 1e-14 * (1.0 + w.abs()) {
            break;
        }
    }
    w
}

/// Evaluate the Lambert W function on the requested real branch.
///
/// The result satisfies `|w*exp(w) - x| <= 1e-12 * max(1, |x|)`.
pub fn lambert_w(branch: Branch, x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("lambert_w: x is NaN".into()));
    }
    if x < NEG_INV_E {
        if x >= NEG_INV_E - BRANCH_POINT_SLACK {
            return Ok(-1.0);
        }
        return Err(Error::Domain(format!(
            "lambert_w: x = {x} is below -1/e, outside the real domain"
        )));
    }
    if branch == Branch::Lower && x >= 0.0 {
        return Err(Error::Domain(format!(
            "lambert_w: lower branch requires -1/e <= x < 0, got x = {x}"
        )));
    }

    let p2 = 2.0 * (1.0 + std::f64::consts::E * x);
    if (x - NEG_INV_E).abs() < SERIES_WINDOW {
        let p = p2.max(0.0).sqrt();
        return Ok(match branch {
            Branch::Principal => branch_point_series(p),
            Branch::Lower => branch_point_series(-p),
        });
    }

    let guess = match branch {
        Branch::Principal => {
            if x < -0.27 {
                // near the branch point: seed from the series
                let p = p2.sqrt();
                branch_point_series(p)
            } else if x < 0.28 {
                // Maclaurin series of W0 about 0
                x * (1.0 + x * (-1.0 + x * (1.5 - (8.0 / 3.0) * x)))
            } else if x <= std::f64::consts::E {
                (1.0 + x).ln()
            } else {
                // classic asymptotic L1 - L2 + L2/L1
                let l1 = x.ln();
                let l2 = l1.ln();
                l1 - l2 + l2 / l1
            }
        }
        Branch::Lower => {
            if x <= -0.27 {
                let p = -p2.sqrt();
                branch_point_series(p)
            } else {
                // w = ln(-x) - ln(-w), iterated from w0 = ln(-x)
                let lnx = (-x).ln();
                let mut w = lnx;
                for _ in 0..3 {
                    w = lnx - (-w).ln();
                }
                w
            }
        }
    };

    Ok(halley(x, guess))
}

/// Positive roots of an equation reduced through the Lambert W function,
/// in ascending order (0, 1 or 2 of them).
#[derive(Debug, Clone, PartialEq)]
pub struct LogLinearSolutions {
    roots: Vec<f64>,
}

impl LogLinearSolutions {
    fn none() -> Self {
        Self { roots: Vec::new() }
    }

    fn one(u: f64) -> Self {
        Self { roots: vec![u] }
    }

    fn two(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        Self {
            roots: vec![lo, hi],
        }
    }

    /// Number of positive roots (0, 1 or 2).
    pub fn count(&self) -> usize {
        self.roots.len()
    }

    /// The roots in ascending order.
    pub fn roots(&self) -> &[f64] {
        &self.roots
    }
}

/// Solve `ln u = a*u + b` for u > 0 with a != 0.
///
/// Roots are `W(-a*e^b)/(-a)` over the applicable branches. There are no
/// solutions when `a*e^(b+1) > 1`, two when `0 < a*e^(b+1) < 1`, and one when
/// `a*e^(b+1) = 1` (double root) or `a*e^b < 0`.
pub fn solve_log_linear(a: f64, b: f64) -> Result<LogLinearSolutions> {
    if a == 0.0 {
        return Err(Error::InvalidArgument(
            "solve_log_linear: a must be nonzero".into(),
        ));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(
            "solve_log_linear: coefficients must be finite".into(),
        ));
    }
    let arg = -a * b.exp();
    if !arg.is_finite() {
        return Err(Error::InvalidArgument(
            "solve_log_linear: -a*e^b overflows".into(),
        ));
    }

    if a < 0.0 {
        // a*e^b < 0: single root on the principal branch
        let w = lambert_w(Branch::Principal, arg)?;
        return Ok(LogLinearSolutions::one(w / (-a)));
    }

    let t = a * (b + 1.0).exp();
    if t > 1.0 {
        Ok(LogLinearSolutions::none())
    } else if t == 1.0 {
        // tangency: double root at u = 1/a
        Ok(LogLinearSolutions::one(1.0 / a))
    } else {
        let w0 = lambert_w(Branch::Principal, arg)?;
        let wm1 = lambert_w(Branch::Lower, arg)?;
        // w0 in (-1, 0) gives the root below 1/a, w-1 <= -1 the one above
        Ok(LogLinearSolutions::two(w0 / (-a), wm1 / (-a)))
    }
}

/// Solve `v*ln v = a*v + b` for v > 0 with b != 0.
///
/// Roots are `b/W(b*e^(-a))` over the applicable branches. There are no
/// solutions when `b*e^(1-a) < -1`, two when `-1 < b*e^(1-a) < 0`, and one
/// when `b*e^(1-a) = -1` (branch point) or `b*e^(-a) > 0`.
pub fn solve_xlogx(a: f64, b: f64) -> Result<LogLinearSolutions> {
    if b == 0.0 {
        return Err(Error::InvalidArgument(
            "solve_xlogx: b must be nonzero".into(),
        ));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(
            "solve_xlogx: coefficients must be finite".into(),
        ));
    }
    let arg = b * (-a).exp();
    if !arg.is_finite() {
        return Err(Error::InvalidArgument(
            "solve_xlogx: b*e^(-a) overflows".into(),
        ));
    }

    if b > 0.0 {
        let w = lambert_w(Branch::Principal, arg)?;
        return Ok(LogLinearSolutions::one(b / w));
    }

    let s = b * (1.0 - a).exp();
    if s < -1.0 {
        Ok(LogLinearSolutions::none())
    } else if s == -1.0 {
        // branch point: W = -1, single root v = -b
        Ok(LogLinearSolutions::one(-b))
    } else {
        let w0 = lambert_w(Branch::Principal, arg)?;
        let wm1 = lambert_w(Branch::Lower, arg)?;
        // b < 0 and w-1 <= -1 < w0 < 0, so b/w-1 < b/w0
        Ok(LogLinearSolutions::two(b / wm1, b / w0))
    }
}
