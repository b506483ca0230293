//! Parameter sweeps over (R0, M) grids and R0 profiles of the quantifiers.
//!
//! Sweeps emit one cell per grid point in row-major order (R0 outer, M
//! inner). Cells are pure functions of their coordinates, so the output is
//! bitwise identical no matter how many workers compute it. Cells whose
//! (R0, M) pair falls outside the quantifier regime carry NaN markers
//! instead of being dropped, keeping the grid rectangular.

use std::io::{self, Write};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::threshold::{critical_r0_raw, quantifiers_with, SolverOptions, ThresholdProblem};

/// Scenario constants shared by every cell of a sweep or profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioBase {
    pub n: f64,
    pub gamma: f64,
    pub s0: f64,
    pub i0: f64,
    pub rr0: f64,
}

impl ScenarioBase {
    fn validate(&self) -> Result<()> {
        if !(self.n.is_finite() && self.n > 0.0) || !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidArgument(
                "population and gamma must be positive and finite".into(),
            ));
        }
        if !(self.s0 > 0.0 && self.i0 > 0.0 && self.rr0 >= 0.0) {
            return Err(Error::InvalidInitialCondition(
                "S(0) and I(0) must be positive, R(0) non-negative".into(),
            ));
        }
        if (self.s0 + self.i0 + self.rr0 - self.n).abs() > 1e-9 * self.n {
            return Err(Error::InvalidInitialCondition(
                "compartments must sum to the population".into(),
            ));
        }
        Ok(())
    }
}

/// A rectangular (R0, M) grid over a fixed base scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    base: ScenarioBase,
    r0_min: f64,
    r0_max: f64,
    r0_count: usize,
    m_min: f64,
    m_max: f64,
    m_count: usize,
}

impl SweepGrid {
    pub fn new(
        base: ScenarioBase,
        r0_range: (f64, f64),
        r0_count: usize,
        m_range: (f64, f64),
        m_count: usize,
    ) -> Result<Self> {
        base.validate()?;
        let (r0_min, r0_max) = r0_range;
        let (m_min, m_max) = m_range;
        if r0_count == 0 || m_count == 0 {
            return Err(Error::InvalidRange("grid counts must be at least 1".into()));
        }
        if !(r0_min.is_finite() && r0_max.is_finite() && r0_min > 0.0 && r0_min <= r0_max) {
            return Err(Error::InvalidRange(format!(
                "R0 range must satisfy 0 < min <= max, got [{r0_min}, {r0_max}]"
            )));
        }
        if !(m_min.is_finite() && m_max.is_finite() && m_min > 0.0 && m_min <= m_max) {
            return Err(Error::InvalidRange(format!(
                "M range must satisfy 0 < min <= max, got [{m_min}, {m_max}]"
            )));
        }
        if m_max >= base.n {
            return Err(Error::InvalidRange(format!(
                "M range must stay below the population N = {}, got max {m_max}",
                base.n
            )));
        }
        Ok(Self {
            base,
            r0_min,
            r0_max,
            r0_count,
            m_min,
            m_max,
            m_count,
        })
    }

    pub fn base(&self) -> &ScenarioBase {
        &self.base
    }

    pub fn r0_values(&self) -> Vec<f64> {
        linspace(self.r0_min, self.r0_max, self.r0_count)
    }

    pub fn m_values(&self) -> Vec<f64> {
        linspace(self.m_min, self.m_max, self.m_count)
    }
}

/// One sweep cell: the grid coordinates and all five quantifiers, or NaN
/// markers where the (R0, M) pair is outside the quantifier regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub r0: f64,
    pub m: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub q4: f64,
    pub q5: f64,
}

fn evaluate_cell(base: &ScenarioBase, r0: f64, m: f64, opts: &SolverOptions) -> SweepCell {
    let q = ThresholdProblem::from_scenario(base.n, base.gamma, r0, base.s0, base.i0, base.rr0, m)
        .and_then(|problem| quantifiers_with(&problem, opts));
    match q {
        Ok(q) => SweepCell {
            r0,
            m,
            q1: q.q1,
            q2: q.q2,
            q3: q.q3,
            q4: q.q4,
            q5: q.q5,
        },
        Err(_) => SweepCell {
            r0,
            m,
            q1: f64::NAN,
            q2: f64::NAN,
            q3: f64::NAN,
            q4: f64::NAN,
            q5: f64::NAN,
        },
    }
}

/// Evaluate every grid cell, row-major (R0 outer, M inner).
pub fn sweep(grid: &SweepGrid) -> Vec<SweepCell> {
    sweep_with(grid, &SolverOptions::default())
}

/// [`sweep`] with explicit solver settings.
pub fn sweep_with(grid: &SweepGrid, opts: &SolverOptions) -> Vec<SweepCell> {
    let r0s = grid.r0_values();
    let ms = grid.m_values();
    let total = r0s.len() * ms.len();
    let cell = |idx: usize| {
        let r0 = r0s[idx / ms.len()];
        let m = ms[idx % ms.len()];
        evaluate_cell(&grid.base, r0, m, opts)
    };
    #[cfg(feature = "parallel")]
    {
        (0..total).into_par_iter().map(cell).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..total).map(cell).collect()
    }
}

fn write_float<W: Write + ?Sized>(out: &mut W, v: f64) -> io::Result<()> {
    if v.is_nan() {
        write!(out, "nan")
    } else {
        write!(out, "{v:.16e}")
    }
}

/// CSV with header `r0,m,q1,q2,q3,q4,q5`, one row per cell, `nan` markers.
pub fn write_sweep_csv<W: Write + ?Sized>(cells: &[SweepCell], out: &mut W) -> io::Result<()> {
    writeln!(out, "r0,m,q1,q2,q3,q4,q5")?;
    for c in cells {
        for (k, v) in [c.r0, c.m, c.q1, c.q2, c.q3, c.q4, c.q5]
            .into_iter()
            .enumerate()
        {
            if k > 0 {
                write!(out, ",")?;
            }
            write_float(out, v)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// One row of an R0 profile: quantifiers, their finite-difference
/// derivatives, values normalized by the right-endpoint maximum, and
/// logarithmic derivatives (NaN guard where the quantifier is ~0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub r0: f64,
    pub q: [f64; 5],
    pub dq: [f64; 5],
    pub nq: [f64; 5],
    pub lq: [f64; 5],
}

/// Quantifier profile over `[r0_min, r0_max]` (inclusive, `count >= 3`
/// points) at fixed M. The range must start at or above the critical
/// reproduction number for the scenario.
///
/// Derivatives are central finite differences on the sampled grid with
/// one-sided differences at the endpoints; normalized columns divide by the
/// value at `r0_max`; logarithmic derivatives are `dq/q` with a NaN marker
/// where `q <= 1e-12`.
pub fn r0_profile(
    base: &ScenarioBase,
    m: f64,
    r0_range: (f64, f64),
    count: usize,
) -> Result<Vec<ProfileRow>> {
    base.validate()?;
    if count < 3 {
        return Err(Error::InvalidArgument(
            "profile needs at least 3 points".into(),
        ));
    }
    let (r0_min, r0_max) = r0_range;
    if !(r0_min.is_finite() && r0_max.is_finite() && r0_min < r0_max) {
        return Err(Error::InvalidRange(format!(
            "R0 range must satisfy min < max, got [{r0_min}, {r0_max}]"
        )));
    }
    let r0_critical = critical_r0_raw(base.n, base.s0, base.i0, base.rr0, m)?;
    if r0_min < r0_critical {
        return Err(Error::InvalidRange(format!(
            "profile range starts at {r0_min}, below the critical R0* = {r0_critical}"
        )));
    }

    let opts = SolverOptions::default();
    let r0s = linspace(r0_min, r0_max, count);
    let mut qs = Vec::with_capacity(count);
    for &r0 in &r0s {
        let problem =
            ThresholdProblem::from_scenario(base.n, base.gamma, r0, base.s0, base.i0, base.rr0, m)?;
        let q = quantifiers_with(&problem, &opts)?;
        qs.push([q.q1, q.q2, q.q3, q.q4, q.q5]);
    }

    let q_last = qs[count - 1];
    let mut rows = Vec::with_capacity(count);
    for k in 0..count {
        let (lo, hi) = if k == 0 {
            (0, 1)
        } else if k == count - 1 {
            (count - 2, count - 1)
        } else {
            (k - 1, k + 1)
        };
        let h = r0s[hi] - r0s[lo];
        let mut dq = [0.0; 5];
        let mut nq = [0.0; 5];
        let mut lq = [0.0; 5];
        for j in 0..5 {
            dq[j] = (qs[hi][j] - qs[lo][j]) / h;
            nq[j] = qs[k][j] / q_last[j];
            lq[j] = if qs[k][j] <= 1e-12 {
                f64::NAN
            } else {
                dq[j] / qs[k][j]
            };
        }
        rows.push(ProfileRow {
            r0: r0s[k],
            q: qs[k],
            dq,
            nq,
            lq,
        });
    }
    Ok(rows)
}

/// CSV with header `r0,q1..q5,dq1..dq5,nq1..nq5,lq1..lq5`.
pub fn write_profile_csv<W: Write + ?Sized>(rows: &[ProfileRow], out: &mut W) -> io::Result<()> {
    write!(out, "r0")?;
    for prefix in ["q", "dq", "nq", "lq"] {
        for j in 1..=5 {
            write!(out, ",{prefix}{j}")?;
        }
    }
    writeln!(out)?;
    for row in rows {
        write_float(out, row.r0)?;
        for col in [&row.q, &row.dq, &row.nq, &row.lq] {
            for &v in col.iter() {
                write!(out, ",")?;
                write_float(out, v)?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

/// `count` evenly spaced values from `min` to `max` inclusive.
pub fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![min];
    }
    let step = (max - min) / (count - 1) as f64;
    (0..count).map(|k| min + k as f64 * step).collect()
}
