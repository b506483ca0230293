//! Command-line front end: scenario analysis, (R0, M) sweeps and trajectory
//! export.
//!
//! Every flag can also come from a `--config` file with flat `key=value`
//! lines (keys match the flag names); flags override the file. Exit codes:
//! 0 success, 2 validation error, 1 internal error.

use std::collections::HashMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sir_threshold::sweep::{
    r0_profile, sweep_with, write_profile_csv, write_sweep_csv, ScenarioBase, SweepGrid,
};
use sir_threshold::threshold::{SolverOptions, ThresholdProblem};
use sir_threshold::{analyze, integrate, SirParams, SirState};

#[derive(Parser)]
#[command(
    name = "sir-threshold",
    version,
    about = "SIR epidemic threshold analysis: critical R0 and exceedance quantifiers"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analyze one scenario and print the JSON report
    Analyze(CommonArgs),
    /// Emit quantifier CSV over an (R0, M) grid, or an R0 profile with --profile
    Sweep(SweepArgs),
    /// Integrate the trajectory and emit t,S,I,R CSV
    Curve(CommonArgs),
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("`{s}` must be positive"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("`{s}` must be non-negative"))
    }
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Config file with flat key=value lines mirroring the flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Total population N
    #[arg(long, value_parser = positive)]
    n: Option<f64>,
    /// Recovery rate (1/time)
    #[arg(long, value_parser = positive, conflicts_with = "infectious_period")]
    gamma: Option<f64>,
    /// Infectious period in time units; sets gamma = 1/period
    #[arg(long, value_parser = positive)]
    infectious_period: Option<f64>,
    /// Basic reproduction number
    #[arg(long, value_parser = positive)]
    r0: Option<f64>,
    /// Initial susceptible count S(0)
    #[arg(long, value_parser = positive)]
    s0: Option<f64>,
    /// Initial infected count I(0)
    #[arg(long, value_parser = positive)]
    i0: Option<f64>,
    /// Initial removed count R(0)
    #[arg(long, value_parser = non_negative)]
    rr0: Option<f64>,
    /// Capacity threshold M
    #[arg(long, value_parser = positive)]
    m: Option<f64>,
    /// Integration step (default 1e-3/gamma)
    #[arg(long, value_parser = positive)]
    dt: Option<f64>,
    /// Integration horizon (default 60/gamma)
    #[arg(long, value_parser = positive)]
    t_max: Option<f64>,
    /// Simpson panels for the Q5 quadrature
    #[arg(long)]
    panels: Option<usize>,
    /// Output file (default stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_parser = positive)]
    r0_min: Option<f64>,
    #[arg(long, value_parser = positive)]
    r0_max: Option<f64>,
    #[arg(long)]
    r0_count: Option<usize>,
    #[arg(long, value_parser = positive)]
    m_min: Option<f64>,
    #[arg(long, value_parser = positive)]
    m_max: Option<f64>,
    #[arg(long)]
    m_count: Option<usize>,
    /// Emit the R0 profile (quantifiers, derivatives, normalized values,
    /// log-derivatives) at fixed --m over [--r0-min, --r0-max]
    #[arg(long)]
    profile: bool,
}

enum CliError {
    Validation(String),
    Internal(String),
}

impl From<sir_threshold::Error> for CliError {
    fn from(e: sir_threshold::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

/// Parsed key=value config file. Blank lines and `#` comments are skipped.
struct FileConfig(HashMap<String, String>);

const KNOWN_KEYS: &[&str] = &[
    "n",
    "gamma",
    "infectious-period",
    "r0",
    "s0",
    "i0",
    "rr0",
    "m",
    "dt",
    "t-max",
    "panels",
    "out",
    "r0-min",
    "r0-max",
    "r0-count",
    "m-min",
    "m-max",
    "m-count",
    "profile",
];

impl FileConfig {
    fn load(path: Option<&PathBuf>) -> Result<Self, CliError> {
        let mut map = HashMap::new();
        let Some(path) = path else {
            return Ok(Self(map));
        };
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read config file {}: {e}", path.display()))
        })?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Validation(format!(
                    "config line {} is not key=value: `{line}`",
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Validation(format!("unknown config key `{key}`")));
            }
            map.insert(key, value.trim().to_string());
        }
        Ok(Self(map))
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<f64>().map(Some).map_err(|_| {
                CliError::Validation(format!("config key `{key}`: `{raw}` is not a number"))
            }),
        }
    }

    fn usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<usize>().map(Some).map_err(|_| {
                CliError::Validation(format!("config key `{key}`: `{raw}` is not an integer"))
            }),
        }
    }

    fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.0.get(key).map(String::as_str) {
            None => Ok(false),
            Some("true") | Some("1") => Ok(true),
            Some("false") | Some("0") => Ok(false),
            Some(raw) => Err(CliError::Validation(format!(
                "config key `{key}`: `{raw}` is not a boolean"
            ))),
        }
    }
}

/// Fully resolved scenario: flags merged over the config file.
struct Scenario {
    n: f64,
    gamma: f64,
    r0: Option<f64>,
    s0: f64,
    i0: f64,
    rr0: f64,
    m: Option<f64>,
    opts: SolverOptions,
    out: Option<PathBuf>,
}

fn require(value: Option<f64>, flag: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| {
        CliError::Validation(format!(
            "missing required parameter --{flag} (flag or config file)"
        ))
    })
}

fn resolve(args: &CommonArgs, file: &FileConfig) -> Result<Scenario, CliError> {
    let gamma = match (args.gamma, args.infectious_period) {
        (Some(g), _) => Some(g),
        (None, Some(period)) => Some(1.0 / period),
        (None, None) => match (file.f64("gamma")?, file.f64("infectious-period")?) {
            (Some(_), Some(_)) => {
                return Err(CliError::Validation(
                    "config sets both gamma and infectious-period".into(),
                ))
            }
            (Some(g), None) => Some(g),
            (None, Some(period)) => Some(1.0 / period),
            (None, None) => None,
        },
    };
    let opts = SolverOptions {
        dt: args.dt.or(file.f64("dt")?),
        t_max: args.t_max.or(file.f64("t-max")?),
        panels: args.panels.or(file.usize("panels")?).unwrap_or(2048),
    };
    Ok(Scenario {
        n: require(args.n.or(file.f64("n")?), "n")?,
        gamma: require(gamma, "gamma")?,
        r0: args.r0.or(file.f64("r0")?),
        s0: require(args.s0.or(file.f64("s0")?), "s0")?,
        i0: require(args.i0.or(file.f64("i0")?), "i0")?,
        rr0: args.rr0.or(file.f64("rr0")?).unwrap_or(0.0),
        m: args.m.or(file.f64("m")?),
        opts,
        out: args
            .out
            .clone()
            .or_else(|| file.0.get("out").map(PathBuf::from)),
    })
}

fn with_output<F>(out: Option<&PathBuf>, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match out {
        Some(path) => {
            let file = fs::File::create(path)?;
            let mut writer = BufWriter::new(file);
            body(&mut writer)?;
            writer.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)?;
        }
    }
    Ok(())
}

/// The effective settings echoed back in the analyze report.
#[derive(Serialize)]
struct EffectiveConfig {
    n: f64,
    gamma: f64,
    r0: f64,
    s0: f64,
    i0: f64,
    rr0: f64,
    m: f64,
    dt: f64,
    t_max: f64,
    panels: usize,
}

#[derive(Serialize)]
struct ReportWithConfig<'a> {
    #[serde(flatten)]
    report: &'a sir_threshold::AnalysisReport,
    config: EffectiveConfig,
}

fn cmd_analyze(args: &CommonArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_ref())?;
    let sc = resolve(args, &file)?;
    let r0 = require(sc.r0, "r0")?;
    let m = require(sc.m, "m")?;
    let problem = ThresholdProblem::from_scenario(sc.n, sc.gamma, r0, sc.s0, sc.i0, sc.rr0, m)?;
    let report = analyze(&problem, &sc.opts)?;
    let params = problem.params();
    let wrapped = ReportWithConfig {
        report: &report,
        config: EffectiveConfig {
            n: sc.n,
            gamma: sc.gamma,
            r0,
            s0: sc.s0,
            i0: sc.i0,
            rr0: sc.rr0,
            m,
            dt: sc.opts.dt_for(params),
            t_max: sc.opts.t_max_for(params),
            panels: sc.opts.panels,
        },
    };
    let json =
        serde_json::to_string_pretty(&wrapped).map_err(|e| CliError::Internal(e.to_string()))?;
    with_output(sc.out.as_ref(), |w| writeln!(w, "{json}"))
}

fn cmd_curve(args: &CommonArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_ref())?;
    let sc = resolve(args, &file)?;
    let r0 = require(sc.r0, "r0")?;
    let params = SirParams::new(sc.n, sc.gamma, r0)?;
    let init = SirState::new(0.0, sc.s0, sc.i0, sc.rr0);
    let trajectory = integrate(
        &params,
        &init,
        sc.opts.t_max_for(&params),
        sc.opts.dt_for(&params),
    )?;
    with_output(sc.out.as_ref(), |w| trajectory.write_csv(w))
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_ref())?;
    let sc = resolve(&args.common, &file)?;
    let base = ScenarioBase {
        n: sc.n,
        gamma: sc.gamma,
        s0: sc.s0,
        i0: sc.i0,
        rr0: sc.rr0,
    };

    let r0_min = require(args.r0_min.or(file.f64("r0-min")?), "r0-min")?;
    let r0_max = require(args.r0_max.or(file.f64("r0-max")?), "r0-max")?;
    let r0_count = args
        .r0_count
        .or(file.usize("r0-count")?)
        .ok_or_else(|| CliError::Validation("missing required parameter --r0-count".into()))?;

    if args.profile || file.flag("profile")? {
        let m = require(sc.m, "m")?;
        let rows = r0_profile(&base, m, (r0_min, r0_max), r0_count)?;
        return with_output(sc.out.as_ref(), |w| write_profile_csv(&rows, w));
    }

    let m_min = require(args.m_min.or(file.f64("m-min")?), "m-min")?;
    let m_max = require(args.m_max.or(file.f64("m-max")?), "m-max")?;
    let m_count = args
        .m_count
        .or(file.usize("m-count")?)
        .ok_or_else(|| CliError::Validation("missing required parameter --m-count".into()))?;

    if m_min <= sc.i0 {
        return Err(CliError::Validation(format!(
            "m-min = {m_min} <= I(0) = {}: the M range must start above the initial infected count",
            sc.i0
        )));
    }
    if m_max >= sc.s0 + sc.i0 {
        return Err(CliError::Validation(format!(
            "m-max = {m_max} >= S(0) + I(0) = {}: the M range must stay attainable",
            sc.s0 + sc.i0
        )));
    }

    let grid = SweepGrid::new(base, (r0_min, r0_max), r0_count, (m_min, m_max), m_count)?;
    let cells = sweep_with(&grid, &sc.opts);
    with_output(sc.out.as_ref(), |w| write_sweep_csv(&cells, w))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Analyze(args) => cmd_analyze(args),
        Cmd::Sweep(args) => cmd_sweep(args),
        Cmd::Curve(args) => cmd_curve(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}
