//! The SIR model, both as a time-domain ODE system and as the u-parametrized
//! extended solution curve.
//!
//! The ODE system is
//!
//! ```text
//! dS/dt = -gamma*R0*S*I/N,   dI/dt = gamma*R0*S*I/N - gamma*I,   dR/dt = gamma*I
//! ```
//!
//! and the parametric solution, with `u = exp(-(R0/N)*R)` and
//! `x0 = S(0)*exp((R0/N)*R(0))`, is
//!
//! ```text
//! S(u) = x0*u,   I(u) = (N/R0)*ln u - x0*u + N,   R(u) = -(N/R0)*ln u.
//! ```
//!
//! The extended curve over u > 0 contains the epidemic on `[u_inf, u0]`,
//! traversed with u decreasing as time runs forward.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::lambert::solve_log_linear;

/// Model constants: population size N, recovery rate gamma and basic
/// reproduction number R0. The infection rate beta = gamma*R0/N is derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirParams {
    population: f64,
    gamma: f64,
    r0: f64,
}

impl SirParams {
    pub fn new(population: f64, gamma: f64, r0: f64) -> Result<Self> {
        if !(population.is_finite() && population > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "population must be positive and finite, got {population}"
            )));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma must be positive and finite, got {gamma}"
            )));
        }
        // the parametric solution divides by R0
        if !(r0.is_finite() && r0 > population * f64::EPSILON) {
            return Err(Error::InvalidArgument(format!(
                "r0 must be positive and finite, got {r0}"
            )));
        }
        Ok(Self {
            population,
            gamma,
            r0,
        })
    }

    pub fn population(&self) -> f64 {
        self.population
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// Infection rate beta = gamma*R0/N, derived so that beta*N/gamma = R0.
    pub fn beta(&self) -> f64 {
        self.gamma * self.r0 / self.population
    }

    /// Same constants with a different reproduction number.
    pub fn with_r0(&self, r0: f64) -> Result<Self> {
        Self::new(self.population, self.gamma, r0)
    }

    /// Default integration step: 1e-3 recovery times.
    pub fn default_dt(&self) -> f64 {
        1e-3 / self.gamma
    }

    /// Default horizon: 60 recovery times, past burnout for R0 <= 10.
    pub fn default_t_max(&self) -> f64 {
        60.0 / self.gamma
    }
}

/// One sample (t, S, I, R) of the epidemic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirState {
    pub t: f64,
    pub s: f64,
    pub i: f64,
    pub r: f64,
}

impl SirState {
    pub fn new(t: f64, s: f64, i: f64, r: f64) -> Self {
        Self { t, s, i, r }
    }
}

/// Right-hand side of the ODE system: (dS, dI, dR). The three rates sum to
/// zero, so S + I + R is conserved.
pub fn derivatives(params: &SirParams, state: &SirState) -> (f64, f64, f64) {
    let infection = params.gamma * params.r0 * state.s * state.i / params.population;
    let recovery = params.gamma * state.i;
    (-infection, infection - recovery, recovery)
}

fn rk4_step(params: &SirParams, state: &SirState, dt: f64) -> (f64, f64, f64) {
    let eval = |s: f64, i: f64| {
        let st = SirState::new(0.0, s, i, 0.0);
        derivatives(params, &st)
    };
    let (k1s, k1i, k1r) = eval(state.s, state.i);
    let (k2s, k2i, k2r) = eval(state.s + 0.5 * dt * k1s, state.i + 0.5 * dt * k1i);
    let (k3s, k3i, k3r) = eval(state.s + 0.5 * dt * k2s, state.i + 0.5 * dt * k2i);
    let (k4s, k4i, k4r) = eval(state.s + dt * k3s, state.i + dt * k3i);
    let sixth = dt / 6.0;
    (
        state.s + sixth * (k1s + 2.0 * k2s + 2.0 * k3s + k4s),
        state.i + sixth * (k1i + 2.0 * k2i + 2.0 * k3i + k4i),
        state.r + sixth * (k1r + 2.0 * k2r + 2.0 * k3r + k4r),
    )
}

/// Advance one classical RK4 step (the system is autonomous; only S and I
/// feed the rates).
pub(crate) fn step(params: &SirParams, state: &SirState, dt: f64) -> SirState {
    let (s, i, r) = rk4_step(params, state, dt);
    SirState::new(state.t + dt, s, i, r)
}

/// A fixed-step trajectory with strictly increasing times.
#[derive(Debug, Clone)]
pub struct Trajectory {
    states: Vec<SirState>,
    dt: f64,
}

impl Trajectory {
    pub fn states(&self) -> &[SirState] {
        &self.states
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Sample with the largest infected count.
    pub fn peak(&self) -> &SirState {
        self.states
            .iter()
            .max_by(|a, b| a.i.total_cmp(&b.i))
            .expect("trajectory is never empty")
    }

    pub fn first(&self) -> &SirState {
        &self.states[0]
    }

    pub fn last(&self) -> &SirState {
        self.states.last().expect("trajectory is never empty")
    }

    /// Write the trajectory as CSV with header `t,S,I,R`, one row per step,
    /// 17 significant digits per value.
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "t,S,I,R")?;
        for st in &self.states {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                st.t, st.s, st.i, st.r
            )?;
        }
        Ok(())
    }
}

const MAX_STEPS: usize = 50_000_000;

/// Integrate the SIR system with classical fixed-step RK4 from `init` up to
/// (at least) `t_max`.
pub fn integrate(params: &SirParams, init: &SirState, t_max: f64, dt: f64) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dt must be positive, got {dt}"
        )));
    }
    if !(t_max.is_finite() && t_max > init.t) {
        return Err(Error::InvalidArgument(format!(
            "t_max = {t_max} must exceed the initial time {}",
            init.t
        )));
    }
    if init.s < 0.0 || init.i < 0.0 || init.r < 0.0 {
        return Err(Error::InvalidArgument(
            "initial compartments must be non-negative".into(),
        ));
    }
    let n = params.population;
    if (init.s + init.i + init.r - n).abs() > 1e-9 * n {
        return Err(Error::InvalidArgument(format!(
            "initial compartments must sum to the population: {} + {} + {} != {n}",
            init.s, init.i, init.r
        )));
    }
    let steps = ((t_max - init.t) / dt).ceil() as usize;
    let steps = steps.max(1);
    if steps > MAX_STEPS {
        return Err(Error::InvalidArgument(format!(
            "step count {steps} exceeds the {MAX_STEPS} cap; increase dt"
        )));
    }

    let mut states = Vec::with_capacity(steps + 1);
    states.push(*init);
    let mut current = *init;
    for k in 0..steps {
        let (s, i, r) = rk4_step(params, &current, dt);
        // recompute t from the step index to avoid accumulation drift
        current = SirState::new(init.t + (k + 1) as f64 * dt, s, i, r);
        states.push(current);
    }
    Ok(Trajectory { states, dt })
}

/// The u-parametrized extended solution curve.
///
/// `u0` and `u_inf` bound the physical epidemic, `u_star` locates the curve
/// maximum of I, and `removed_final` is the final size R_inf. The chain
/// `exp(-R0) <= u_inf <= u0 <= 1` always holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParametricCurve {
    /// x0 = S(0)*exp((R0/N)*R(0)).
    pub x0: f64,
    /// u at t = 0: exp(-(R0/N)*R(0)).
    pub u0: f64,
    /// u at burnout: the smaller root of I(u) = 0.
    pub u_inf: f64,
    /// Location of the curve maximum of I: N/(R0*x0).
    pub u_star: f64,
    /// Final removed population R_inf = -(N/R0)*ln(u_inf).
    pub removed_final: f64,
}

/// Build the extended curve for an epidemic with S(0) > 0 and I(0) > 0.
// negated comparisons so NaN inputs fail validation too
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn build_curve(params: &SirParams, init: &SirState) -> Result<ParametricCurve> {
    if !(init.s > 0.0) || !(init.i > 0.0) {
        return Err(Error::InvalidInitialCondition(format!(
            "S(0) and I(0) must be positive, got S(0) = {}, I(0) = {}",
            init.s, init.i
        )));
    }
    if init.r < 0.0 {
        return Err(Error::InvalidInitialCondition(format!(
            "R(0) must be non-negative, got {}",
            init.r
        )));
    }
    let n = params.population;
    let r0 = params.r0;
    let x0 = init.s * ((r0 / n) * init.r).exp();
    let u0 = (-(r0 / n) * init.r).exp();
    let u_star = n / (r0 * x0);

    // I(u) = 0  <=>  ln u = (R0*x0/N)*u - R0; I is increasing below u_star,
    // so the physical endpoint u_inf is the root at or below u_star.
    let sols = solve_log_linear(r0 * x0 / n, -r0)?;
    let u_inf = match sols.count() {
        2 => sols.roots()[0],
        1 => sols.roots()[0],
        _ => {
            return Err(Error::InvalidInitialCondition(
                "degenerate curve: I(u) = 0 has no roots".into(),
            ))
        }
    };
    let removed_final = -(n / r0) * u_inf.ln();
    Ok(ParametricCurve {
        x0,
        u0,
        u_inf,
        u_star,
        removed_final,
    })
}

/// Evaluate the parametric solution at u > 0, returning (S, I, R).
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn parametric_state(
    curve: &ParametricCurve,
    params: &SirParams,
    u: f64,
) -> Result<(f64, f64, f64)> {
    if !(u > 0.0) {
        return Err(Error::Domain(format!(
            "parametric_state: u must be positive, got {u}"
        )));
    }
    let n = params.population;
    let log_term = (n / params.r0) * u.ln();
    let s = curve.x0 * u;
    let i = log_term - s + n;
    let r = -log_term;
    Ok((s, i, r))
}

/// Infected count on the extended curve at u > 0.
pub(crate) fn infected_at(curve: &ParametricCurve, params: &SirParams, u: f64) -> f64 {
    let n = params.population;
    (n / params.r0) * u.ln() - curve.x0 * u + n
}
