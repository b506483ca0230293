//! wasm-bindgen surface for the browser demo: scenario analysis, infected
//! curves for plotting, and quantifier heat-map data.
//!
//! The demo trades a coarser integration grid for interactivity; the CLI and
//! library defaults remain the reference configuration.

use wasm_bindgen::prelude::*;

use sir_threshold::sweep::{sweep_with, ScenarioBase, SweepGrid};
use sir_threshold::threshold::{SolverOptions, ThresholdProblem};
use sir_threshold::{analyze, integrate, SirParams, SirState};

fn demo_options(gamma: f64) -> SolverOptions {
    SolverOptions {
        dt: Some(5e-3 / gamma),
        t_max: None,
        panels: 512,
    }
}

/// Full analysis report as a JSON string; on invalid input returns
/// `{"error": "..."}` instead.
#[wasm_bindgen]
pub fn analyze_json(n: f64, gamma: f64, r0: f64, s0: f64, i0: f64, rr0: f64, m: f64) -> String {
    let result = ThresholdProblem::from_scenario(n, gamma, r0, s0, i0, rr0, m)
        .and_then(|problem| analyze(&problem, &demo_options(gamma)));
    match result {
        Ok(report) => report.to_json(),
        Err(e) => format!("{{\"error\": {}}}", serde_json_escape(&e.to_string())),
    }
}

fn serde_json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Infected curve samples as a flat [t0, I0, t1, I1, ...] array with
/// `points` samples over [0, t_max]. Empty on invalid input.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn infected_series(
    n: f64,
    gamma: f64,
    r0: f64,
    s0: f64,
    i0: f64,
    rr0: f64,
    t_max: f64,
    points: u32,
) -> Vec<f64> {
    let Ok(params) = SirParams::new(n, gamma, r0) else {
        return Vec::new();
    };
    let init = SirState::new(0.0, s0, i0, rr0);
    let dt = 5e-3 / gamma;
    let Ok(trajectory) = integrate(&params, &init, t_max.max(dt), dt) else {
        return Vec::new();
    };
    let states = trajectory.states();
    let points = points.max(2) as usize;
    let mut out = Vec::with_capacity(2 * points);
    for k in 0..points {
        let idx = k * (states.len() - 1) / (points - 1);
        out.push(states[idx].t);
        out.push(states[idx].i);
    }
    out
}

/// Row-major heat-map values (R0 outer, M inner) of one quantifier
/// (`which` = 1..=5) over the given (R0, M) grid; NaN marks cells outside
/// the quantifier regime. Empty on invalid input.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn quantifier_heatmap(
    n: f64,
    gamma: f64,
    s0: f64,
    i0: f64,
    rr0: f64,
    r0_min: f64,
    r0_max: f64,
    r0_count: u32,
    m_min: f64,
    m_max: f64,
    m_count: u32,
    which: u32,
) -> Vec<f64> {
    if !(1..=5).contains(&which) {
        return Vec::new();
    }
    let base = ScenarioBase {
        n,
        gamma,
        s0,
        i0,
        rr0,
    };
    let Ok(grid) = SweepGrid::new(
        base,
        (r0_min, r0_max),
        r0_count as usize,
        (m_min, m_max),
        m_count as usize,
    ) else {
        return Vec::new();
    };
    let cells = sweep_with(&grid, &demo_options(gamma));
    cells
        .iter()
        .map(|c| match which {
            1 => c.q1,
            2 => c.q2,
            3 => c.q3,
            4 => c.q4,
            _ => c.q5,
        })
        .collect()
}
