//! Peak control and threshold-exceedance quantification.
//!
//! For a threshold 0 < M < N this module decides whether the infected curve
//! exceeds M, locates the critical reproduction number `R0*` at which the
//! peak equals M exactly, finds the crossing points in both the u and t
//! parametrizations, and evaluates five exceedance quantifiers:
//!
//! * `Q1 = R0 - R0*` — reproduction-number margin (signed),
//! * `Q2 = I_max - M` — peak margin (signed),
//! * `Q3 = integral of (I(t) - M) dt` over the exceedance window,
//! * `Q4 = integral of (I(u) - M) du`, evaluated in closed form,
//! * `Q5 = line integral of (I - M) ds` along the 3-d epidemic curve.
//!
//! Q3-Q5 are zero when the threshold is not exceeded.

use crate::error::{Error, Result};
use crate::lambert::{lambert_w, solve_log_linear, Branch};
use crate::quad::simpson_converged;
use crate::sir::{
    build_curve, derivatives, infected_at, integrate, step, SirParams, SirState, Trajectory,
};

/// A validated threshold problem: model constants, initial state and the
/// capacity threshold M with 0 < M < N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdProblem {
    params: SirParams,
    init: SirState,
    threshold: f64,
}

impl ThresholdProblem {
    // negated comparisons so NaN inputs fail validation too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(params: SirParams, init: SirState, threshold: f64) -> Result<Self> {
        let n = params.population();
        if !(threshold.is_finite() && threshold > 0.0 && threshold < n) {
            return Err(Error::InvalidThreshold(format!(
                "threshold M must satisfy 0 < M < N = {n}, got {threshold}"
            )));
        }
        if !(init.s > 0.0 && init.i > 0.0) {
            return Err(Error::InvalidInitialCondition(format!(
                "S(0) and I(0) must be positive, got S(0) = {}, I(0) = {}",
                init.s, init.i
            )));
        }
        if !(init.r >= 0.0) {
            return Err(Error::InvalidInitialCondition(format!(
                "R(0) must be non-negative, got {}",
                init.r
            )));
        }
        if (init.s + init.i + init.r - n).abs() > 1e-9 * n {
            return Err(Error::InvalidInitialCondition(format!(
                "compartments must sum to the population: {} + {} + {} != {n}",
                init.s, init.i, init.r
            )));
        }
        Ok(Self {
            params,
            init,
            threshold,
        })
    }

    /// Build a problem straight from scalar scenario values.
    pub fn from_scenario(
        n: f64,
        gamma: f64,
        r0: f64,
        s0: f64,
        i0: f64,
        rr0: f64,
        m: f64,
    ) -> Result<Self> {
        let params = SirParams::new(n, gamma, r0)?;
        Self::new(params, SirState::new(0.0, s0, i0, rr0), m)
    }

    pub fn params(&self) -> &SirParams {
        &self.params
    }

    pub fn init(&self) -> &SirState {
        &self.init
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

/// Solver settings; unset fields fall back to the module defaults
/// (dt = 1e-3/gamma, t_max = 60/gamma, 2048 Simpson panels).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub panels: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            dt: None,
            t_max: None,
            panels: 2048,
        }
    }
}

impl SolverOptions {
    pub fn dt_for(&self, params: &SirParams) -> f64 {
        self.dt.unwrap_or_else(|| params.default_dt())
    }

    pub fn t_max_for(&self, params: &SirParams) -> f64 {
        self.t_max.unwrap_or_else(|| params.default_t_max())
    }
}

/// Where the infected curve meets the threshold, in both parametrizations.
///
/// `u_i`/`t_i` mark entry into the exceedance region and `u_f`/`t_f` the
/// exit; u decreases forward in time, so `u_f <= u_star <= u_i` while
/// `t_i <= t_peak <= t_f`. The fields are `None` when there is no crossing
/// (for the tangency case they all sit at the peak with `exceeds = false`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingPoints {
    pub exceeds: bool,
    pub u_i: Option<f64>,
    pub u_f: Option<f64>,
    pub t_i: Option<f64>,
    pub t_f: Option<f64>,
}

/// The five exceedance quantifiers plus the critical values they derive from.
///
/// Units: q1 is dimensionless, q2 persons, q3 person*time, q4 persons*u,
/// q5 persons*arc-length. q1 and q2 are signed (negative = safety margin);
/// q3, q4 and q5 are zero exactly when the threshold is not exceeded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantifierSet {
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub q4: f64,
    pub q5: f64,
    pub r0_critical: f64,
    pub i_max: f64,
}

/// Relative width (in units of N) of the band around the peak treated as
/// tangency; root separation underneath it is dominated by cancellation.
const TANGENCY_BAND: f64 = 1e-12;

/// Cheap sufficient condition for `I_max <= M`: either R0 <= N/S(0)
/// with I(0) <= M, or N/S(0) < R0 <= N/(N - M). One-sided: `false` does not
/// imply exceedance.
pub fn sufficient_condition(problem: &ThresholdProblem) -> bool {
    let n = problem.params.population();
    let r0 = problem.params.r0();
    let s0 = problem.init.s;
    let m = problem.threshold;
    (r0 <= n / s0 && problem.init.i <= m) || (n / s0 < r0 && r0 <= n / (n - m))
}

fn i_max_formula(n: f64, r0: f64, s0: f64, rr0: f64) -> f64 {
    (n / r0) * ((n / (r0 * s0)).ln() - 1.0) - rr0 + n
}

/// Closed-form epidemic peak `(N/R0)*(ln(N/(R0*S(0))) - 1) - R(0) + N`.
///
/// Only valid as an equality for R0 >= N/S(0); outside that regime the
/// formula is merely an upper bound and this returns [`Error::Regime`]
/// (use [`peak_infected`] for the true maximum in both regimes).
pub fn i_max(problem: &ThresholdProblem) -> Result<f64> {
    let n = problem.params.population();
    let r0 = problem.params.r0();
    let s0 = problem.init.s;
    if r0 < n / s0 {
        return Err(Error::Regime(format!(
            "closed-form peak requires R0 >= N/S(0) = {}, got R0 = {r0}",
            n / s0
        )));
    }
    Ok(i_max_formula(n, r0, s0, problem.init.r))
}

/// True maximum of the infected curve: the closed form when R0 >= N/S(0),
/// otherwise I(0) (the curve is non-increasing from the start).
pub fn peak_infected(problem: &ThresholdProblem) -> f64 {
    let n = problem.params.population();
    let r0 = problem.params.r0();
    if r0 >= n / problem.init.s {
        i_max_formula(n, r0, problem.init.s, problem.init.r)
    } else {
        problem.init.i
    }
}

fn check_threshold_window(problem: &ThresholdProblem) -> Result<()> {
    let m = problem.threshold;
    let i0 = problem.init.i;
    let s0 = problem.init.s;
    if m <= i0 {
        return Err(Error::InvalidThreshold(format!(
            "M = {m} <= I(0) = {i0}: threshold already attained at the initial condition"
        )));
    }
    if m >= s0 + i0 {
        return Err(Error::InvalidThreshold(format!(
            "M = {m} >= S(0) + I(0) = {}: threshold can never be attained",
            s0 + i0
        )));
    }
    Ok(())
}

pub(crate) fn critical_r0_raw(n: f64, s0: f64, i0: f64, rr0: f64, m: f64) -> Result<f64> {
    if m <= i0 {
        return Err(Error::InvalidThreshold(format!(
            "M = {m} <= I(0) = {i0}: threshold already attained at the initial condition"
        )));
    }
    if m >= s0 + i0 {
        return Err(Error::InvalidThreshold(format!(
            "M = {m} >= S(0) + I(0) = {}: threshold can never be attained",
            s0 + i0
        )));
    }
    // d = M - N + R(0) lies in (-S(0), 0), so the W argument is in (-1/e, 0)
    let d = m - n + rr0;
    let w = lambert_w(Branch::Lower, d / (s0 * std::f64::consts::E))?;
    Ok(n * w / d)
}

/// The critical reproduction number `R0* = N*W-1((M-N+R(0))/(S(0)e))/(M-N+R(0))`:
/// the peak equals M exactly at `R0*`, stays below for smaller R0 and above
/// for larger. Requires I(0) < M < S(0) + I(0).
pub fn critical_r0(problem: &ThresholdProblem) -> Result<f64> {
    critical_r0_raw(
        problem.params.population(),
        problem.init.s,
        problem.init.i,
        problem.init.r,
        problem.threshold,
    )
}

/// Refine a threshold crossing inside one grid cell by re-integrating the
/// cell with fine substeps and interpolating linearly in the bracketing
/// substep.
fn refine_crossing(params: &SirParams, start: &SirState, dt: f64, m: f64) -> f64 {
    const SUBSTEPS: usize = 64;
    let h = dt / SUBSTEPS as f64;
    let mut prev = *start;
    for _ in 0..SUBSTEPS {
        let next = step(params, &prev, h);
        let d0 = prev.i - m;
        let d1 = next.i - m;
        if d0 == 0.0 {
            return prev.t;
        }
        if (d0 < 0.0) != (d1 < 0.0) || d1 == 0.0 {
            return prev.t + h * d0 / (d0 - d1);
        }
        prev = next;
    }
    start.t + dt
}

/// Locate the threshold crossings of the infected curve.
///
/// When the peak exceeds M, `u_i > u_f` are the two roots of `I(u) = M`
/// (lower and principal Lambert branches) and `t_i < t_f` are located on the
/// trajectory grid by a sign-change scan refined inside the bracketing cell.
/// When the peak equals M to within the tangency band, everything collapses
/// onto the peak and `exceeds` is false.
pub fn crossings(problem: &ThresholdProblem, trajectory: &Trajectory) -> Result<CrossingPoints> {
    check_threshold_window(problem)?;
    let params = &problem.params;
    let n = params.population();
    let m = problem.threshold;
    let curve = build_curve(params, &problem.init)?;
    let i_peak = infected_at(&curve, params, curve.u_star);

    if i_peak - m <= TANGENCY_BAND * n {
        if (i_peak - m).abs() <= TANGENCY_BAND * n {
            // tangency: the double root sits at the peak
            let t_peak = trajectory.peak().t;
            return Ok(CrossingPoints {
                exceeds: false,
                u_i: Some(curve.u_star),
                u_f: Some(curve.u_star),
                t_i: Some(t_peak),
                t_f: Some(t_peak),
            });
        }
        return Ok(CrossingPoints {
            exceeds: false,
            u_i: None,
            u_f: None,
            t_i: None,
            t_f: None,
        });
    }

    // I(u) = M  <=>  ln u = (R0*x0/N)*u + (R0/N)*(M - N)
    let r0 = params.r0();
    let sols = solve_log_linear(r0 * curve.x0 / n, (r0 / n) * (m - n))?;
    if sols.count() != 2 {
        return Err(Error::InvalidArgument(
            "crossing roots degenerate despite peak clearance".into(),
        ));
    }
    let u_f = sols.roots()[0];
    let u_i = sols.roots()[1];

    let states = trajectory.states();
    let dt = trajectory.dt();
    let mut t_in = None;
    let mut t_out = None;
    for k in 0..states.len() - 1 {
        let d0 = states[k].i - m;
        let d1 = states[k + 1].i - m;
        if t_in.is_none() && d0 < 0.0 && d1 >= 0.0 {
            t_in = Some(refine_crossing(params, &states[k], dt, m));
        }
        if d0 >= 0.0 && d1 < 0.0 {
            t_out = Some(refine_crossing(params, &states[k], dt, m));
        }
    }
    let (t_i, t_f) = match (t_in, t_out) {
        (Some(a), Some(b)) => (a, b),
        (None, None) => {
            // the exceedance bump is narrower than one grid cell; collapse
            // the time window onto the sampled peak
            let t_peak = trajectory.peak().t;
            (t_peak, t_peak)
        }
        _ => {
            return Err(Error::InvalidArgument(
                "trajectory does not cover the exceedance window; extend t_max".into(),
            ))
        }
    };

    Ok(CrossingPoints {
        exceeds: true,
        u_i: Some(u_i),
        u_f: Some(u_f),
        t_i: Some(t_i),
        t_f: Some(t_f),
    })
}

/// Trapezoid rule for `(I(t) - M) * weight(state)` over `[t_i, t_f]`, with
/// the end cells integrated against the interpolated crossing times (the
/// integrand vanishes at both ends by construction).
fn trapz_exceedance<F: Fn(&SirState) -> f64>(
    trajectory: &Trajectory,
    m: f64,
    t_i: f64,
    t_f: f64,
    weight: F,
) -> f64 {
    let states = trajectory.states();
    let g = |st: &SirState| (st.i - m) * weight(st);
    let a = states.partition_point(|st| st.t <= t_i).saturating_sub(1);
    let b = states.partition_point(|st| st.t < t_f).saturating_sub(1);
    if b <= a {
        return 0.0;
    }
    let mut acc = 0.5 * g(&states[a + 1]) * (states[a + 1].t - t_i);
    for k in (a + 1)..b {
        acc += 0.5 * (g(&states[k]) + g(&states[k + 1])) * (states[k + 1].t - states[k].t);
    }
    acc += 0.5 * g(&states[b]) * (t_f - states[b].t);
    acc
}

/// |r'(t)| = sqrt(S'^2 + I'^2 + R'^2) from the model rates.
fn curve_speed(params: &SirParams, st: &SirState) -> f64 {
    let (ds, di, dr) = derivatives(params, st);
    (ds * ds + di * di + dr * dr).sqrt()
}

/// Antiderivative of `I(u) - M`: `(N/R0)(u ln u - u) - x0 u^2/2 + (N-M) u`.
fn q4_antiderivative(n: f64, r0: f64, x0: f64, m: f64, u: f64) -> f64 {
    (n / r0) * (u * u.ln() - u) - x0 * u * u / 2.0 + (n - m) * u
}

pub(crate) struct FullAnalysis {
    pub quantifiers: QuantifierSet,
    pub crossing: CrossingPoints,
}

pub(crate) fn analyze_problem(
    problem: &ThresholdProblem,
    opts: &SolverOptions,
) -> Result<FullAnalysis> {
    check_threshold_window(problem)?;
    let params = &problem.params;
    let n = params.population();
    let r0 = params.r0();
    if r0 < n / problem.init.s {
        return Err(Error::Regime(format!(
            "quantifiers require R0 >= N/S(0) = {}, got R0 = {r0}",
            n / problem.init.s
        )));
    }

    let r0_critical = critical_r0(problem)?;
    let peak = i_max(problem)?;
    let m = problem.threshold;
    let q1 = r0 - r0_critical;
    let q2 = peak - m;

    let trajectory = integrate(
        params,
        &problem.init,
        opts.t_max_for(params),
        opts.dt_for(params),
    )?;
    let crossing = crossings(problem, &trajectory)?;

    let (q3, q4, q5) = if crossing.exceeds {
        let (u_i, u_f) = (crossing.u_i.unwrap(), crossing.u_f.unwrap());
        let (t_i, t_f) = (crossing.t_i.unwrap(), crossing.t_f.unwrap());
        let curve = build_curve(params, &problem.init)?;
        let q3 = trapz_exceedance(&trajectory, m, t_i, t_f, |_| 1.0);
        // the area is nonnegative by construction; clamp the roundoff that
        // the antiderivative difference can leave on hairline windows
        let q4 = (q4_antiderivative(n, r0, curve.x0, m, u_i)
            - q4_antiderivative(n, r0, curve.x0, m, u_f))
        .max(0.0);
        let integrand = |u: f64| {
            let i_u = infected_at(&curve, params, u);
            let y = n / (r0 * u);
            (i_u - m) * (2.0 * (curve.x0 * curve.x0 + y * (y - curve.x0))).sqrt()
        };
        let q5 = simpson_converged(integrand, u_f, u_i, opts.panels, 1e-9);
        (q3, q4, q5)
    } else {
        (0.0, 0.0, 0.0)
    };

    Ok(FullAnalysis {
        quantifiers: QuantifierSet {
            q1,
            q2,
            q3,
            q4,
            q5,
            r0_critical,
            i_max: peak,
        },
        crossing,
    })
}

/// Evaluate all five quantifiers with default solver settings.
///
/// Requires I(0) < M < S(0) + I(0) and R0 >= N/S(0).
pub fn quantifiers(problem: &ThresholdProblem) -> Result<QuantifierSet> {
    quantifiers_with(problem, &SolverOptions::default())
}

/// [`quantifiers`] with explicit solver settings.
pub fn quantifiers_with(problem: &ThresholdProblem, opts: &SolverOptions) -> Result<QuantifierSet> {
    Ok(analyze_problem(problem, opts)?.quantifiers)
}

/// Q5 evaluated in the time parametrization:
/// `integral of (I(t) - M)*|r'(t)| dt` over the exceedance window.
///
/// This is the parametrization-invariance check for the u-based Q5, not the
/// production path; the two agree to about 1e-3 relative on the default grid.
pub fn q5_time_parametrization(problem: &ThresholdProblem, trajectory: &Trajectory) -> Result<f64> {
    let crossing = crossings(problem, trajectory)?;
    if !crossing.exceeds {
        return Ok(0.0);
    }
    let (t_i, t_f) = (crossing.t_i.unwrap(), crossing.t_f.unwrap());
    Ok(trapz_exceedance(
        trajectory,
        problem.threshold,
        t_i,
        t_f,
        |st| curve_speed(&problem.params, st),
    ))
}
