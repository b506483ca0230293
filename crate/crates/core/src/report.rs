//! Flat analysis report combining the critical values, crossing points and
//! quantifiers for one scenario.

use serde::Serialize;

use crate::error::Result;
use crate::threshold::{analyze_problem, SolverOptions, ThresholdProblem};

/// Everything the analysis produces for one scenario, serializable as a flat
/// JSON object. Crossing fields are `null` when the threshold is not
/// exceeded.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub r0: f64,
    pub gamma: f64,
    pub n: f64,
    pub s0: f64,
    pub i0: f64,
    pub rr0: f64,
    pub m: f64,
    pub r0_critical: f64,
    pub i_max: f64,
    pub exceeds: bool,
    pub u_i: Option<f64>,
    pub u_f: Option<f64>,
    pub t_i: Option<f64>,
    pub t_f: Option<f64>,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub q4: f64,
    pub q5: f64,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Run the full threshold analysis for a problem.
pub fn analyze(problem: &ThresholdProblem, opts: &SolverOptions) -> Result<AnalysisReport> {
    let full = analyze_problem(problem, opts)?;
    let q = full.quantifiers;
    let cz = full.crossing;
    let keep = |v: Option<f64>| if cz.exceeds { v } else { None };
    Ok(AnalysisReport {
        r0: problem.params().r0(),
        gamma: problem.params().gamma(),
        n: problem.params().population(),
        s0: problem.init().s,
        i0: problem.init().i,
        rr0: problem.init().r,
        m: problem.threshold(),
        r0_critical: q.r0_critical,
        i_max: q.i_max,
        exceeds: cz.exceeds,
        u_i: keep(cz.u_i),
        u_f: keep(cz.u_f),
        t_i: keep(cz.t_i),
        t_f: keep(cz.t_f),
        q1: q.q1,
        q2: q.q2,
        q3: q.q3,
        q4: q.q4,
        q5: q.q5,
    })
}
