//! Peak control and threshold-exceedance analysis for the SIR epidemic model.
//!
//! Given model constants (N, gamma, R0), an initial state and a capacity
//! threshold M, this crate answers three questions with closed forms built on
//! the real branches of the Lambert W function, cross-checked against a
//! fixed-step RK4 oracle:
//!
//! 1. Does the infected curve exceed M? ([`threshold::sufficient_condition`],
//!    [`threshold::i_max`], [`threshold::crossings`])
//! 2. At which reproduction number does the peak hit M exactly?
//!    ([`threshold::critical_r0`])
//! 3. How bad is an exceedance? Five quantifiers Q1-Q5
//!    ([`threshold::quantifiers`]), sweepable over (R0, M) grids
//!    ([`sweep::sweep`], [`sweep::r0_profile`]).

pub mod error;
pub mod lambert;
pub mod quad;
pub mod report;
pub mod sir;
pub mod sweep;
pub mod threshold;

pub use error::{Error, Result};
pub use lambert::{lambert_w, solve_log_linear, solve_xlogx, Branch, LogLinearSolutions};
pub use report::{analyze, AnalysisReport};
pub use sir::{
    build_curve, derivatives, integrate, parametric_state, ParametricCurve, SirParams, SirState,
    Trajectory,
};
pub use sweep::{r0_profile, sweep, ProfileRow, ScenarioBase, SweepCell, SweepGrid};
pub use threshold::{
    critical_r0, crossings, i_max, peak_infected, q5_time_parametrization, quantifiers,
    quantifiers_with, sufficient_condition, CrossingPoints, QuantifierSet, SolverOptions,
    ThresholdProblem,
};
