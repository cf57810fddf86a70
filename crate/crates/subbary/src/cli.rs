//! `subbary` command-line interface.
//!
//! Exit codes: 0 success, 1 a checked property was violated, 2 input or parse
//! error, 3 domain error (a well-formed value outside its admissible range).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use subbary_core::eckardt;
use subbary_core::invariants::{self, discrete_s_tilde, stability_report, InvariantError, ValuationRecord};
use subbary_core::number::{format_rational, parse_rational, to_f64};
use subbary_core::profile::{check_weighted_nh, ConcaveProfile, SLACK_TOLERANCE};
use subbary_core::{Direction, Rational, Side, SliceSpec};

use crate::io::{self, fmt_real, InputError, NumberStyle};
use crate::verifier::{self, Suite, SuiteConfig};

pub const SEED_ENV: &str = "SUBBARY_SEED";
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "subbary",
    version,
    about = "Sub-barycenters, volume quantiles and stability thresholds of convex bodies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Omit the `meta` block (version, timestamp) so output is byte-reproducible.
    #[arg(long, global = true)]
    pub no_meta: bool,
    /// Output format; csv is available for tabular commands.
    #[arg(long, global = true, value_enum, default_value_t = Emit::Json)]
    pub emit: Emit,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print exact values as "p/q" where they exist.
    #[arg(long, global = true)]
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Ge,
    Le,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Volume, barycenter and sub-barycenter of one half-space slice.
    Slice {
        #[arg(long)]
        body: PathBuf,
        /// `x<i>` (1-based axis) or comma-separated rational components.
        #[arg(long, default_value = "x1")]
        direction: String,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, value_enum, default_value_t = SideArg::Ge)]
        side: SideArg,
    },
    /// Stability reports for a set of candidate valuations.
    Invariants {
        #[arg(long)]
        valuations: PathBuf,
        /// A single value in [0, 1] or `grid:N` for N equally spaced values.
        #[arg(long, default_value = "grid:11")]
        tau: String,
        /// Dimension; defaults to the dimension of the first body.
        #[arg(long)]
        n: Option<usize>,
        /// Accept log discrepancy A = 0.
        #[arg(long)]
        allow_zero_a: bool,
        /// Jumping-number file for the discrete invariant.
        #[arg(long)]
        jumping: Option<PathBuf>,
        /// Number of sections used by the discrete invariant (defaults to d_k).
        #[arg(long, requires = "jumping")]
        m: Option<usize>,
    },
    /// Randomized verification suites.
    Verify(VerifyArgs),
    /// Reference curves for the Eckardt-point example.
    Eckardt {
        #[arg(long, default_value_t = 101)]
        samples: usize,
        /// Also compare the generic pipeline against the closed form on N points.
        #[arg(long)]
        cross_validate: Option<usize>,
    },
    /// Functional inequality slacks for a concave profile.
    ProfileCheck {
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        profile: Option<PathBuf>,
        /// Draw a random profile instead of reading one.
        #[arg(long)]
        random: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n: usize,
        /// Weight exponent.
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 11)]
        t_grid: usize,
        /// Evaluate at this single t instead of a grid.
        #[arg(long, conflicts_with = "t_grid")]
        t: Option<f64>,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: Suite,
    #[arg(long)]
    pub bodies: Option<usize>,
    /// Comma-separated dimensions for the body suites.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Full report including every violation.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub profiles: Option<usize>,
    #[arg(long)]
    pub t_grid: Option<usize>,
    #[arg(long)]
    pub tau_grid: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub okounkov_bodies: Option<usize>,
    #[arg(long)]
    pub mc_bodies: Option<usize>,
    #[arg(long)]
    pub mc_samples: Option<usize>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn invariant_error(e: InvariantError) -> CliError {
    match e {
        InvariantError::TauOutOfRange(_)
        | InvariantError::UndefinedRatio { .. }
        | InvariantError::DimensionMismatch { .. }
        | InvariantError::MOutOfRange { .. } => domain(e),
        _ => CliError::Input(e.to_string()),
    }
}

/// Value printed on success plus whether a checked property failed.
struct Output {
    body: String,
    violated: bool,
}

pub fn seed_from_env() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Input(format!("{SEED_ENV}: `{s}` is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

pub fn parse_direction(s: &str, dim: usize) -> Result<Direction, CliError> {
    let s = s.trim();
    let direction = if let Some(idx) = s.strip_prefix('x') {
        let i: usize = idx
            .parse()
            .map_err(|_| CliError::Input(format!("direction: cannot parse `{s}`")))?;
        if i == 0 {
            return Err(CliError::Input("direction: axes are numbered from 1".into()));
        }
        Direction::Axis(i - 1)
    } else {
        let inner = s.trim_start_matches('(').trim_end_matches(')');
        let v = inner
            .split(',')
            .map(|c| parse_rational(c).map_err(|e| CliError::Input(format!("direction: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Direction::vector(v).map_err(|e| CliError::Input(format!("direction: {e}")))?
    };
    direction.check(dim).map_err(|e| domain(format!("direction: {e}")))?;
    Ok(direction)
}

/// `--tau` value: one number in `[0, 1]` or `grid:N` (`N >= 2` points from 0 to 1).
pub fn parse_tau_spec(s: &str) -> Result<Vec<f64>, CliError> {
    if let Some(count) = s.strip_prefix("grid:") {
        let n: usize = count
            .parse()
            .map_err(|_| CliError::Input(format!("tau: cannot parse grid size `{count}`")))?;
        if n < 2 {
            return Err(CliError::Input("tau: grid needs at least 2 points".into()));
        }
        return Ok((0..n).map(|i| i as f64 / (n - 1) as f64).collect());
    }
    let tau = parse_rational(s).map_err(|e| CliError::Input(format!("tau: {e}")))?;
    let tau = to_f64(&tau);
    if !(0.0..=1.0).contains(&tau) {
        return Err(domain(format!("tau: {tau} is outside [0, 1]")));
    }
    Ok(vec![tau])
}

fn meta(command: &str) -> Value {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "tool": "subbary",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "generated_unix": now,
    })
}

fn render_json(mut value: Value, command: &str, output: &OutputArgs) -> String {
    if !output.no_meta {
        if let Value::Object(map) = &mut value {
            map.insert("meta".into(), meta(command));
        }
    }
    let mut s = serde_json::to_string_pretty(&value).expect("json values serialize");
    s.push('\n');
    s
}

fn render_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn require_json(output: &OutputArgs, command: &str) -> Result<(), CliError> {
    if output.emit == Emit::Csv {
        return Err(CliError::Input(format!("--emit csv is not available for `{command}`")));
    }
    Ok(())
}

fn write_output(output: &OutputArgs, text: &str) -> Result<(), CliError> {
    match &output.out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn cmd_slice(body: &Path, direction: &str, t: &str, side: SideArg, output: &OutputArgs) -> Result<Output, CliError> {
    require_json(output, "slice")?;
    let body = io::parse_body(&io::read_json(body)?, "")?;
    let direction = parse_direction(direction, body.dim())?;
    let t = parse_rational(t).map_err(|e| CliError::Input(format!("t: {e}")))?;
    let style = NumberStyle { exact: output.exact };
    let (lo, hi) = body.support(&direction).map_err(domain)?;
    let bracket = |q: &Rational| {
        if output.exact {
            format_rational(q)
        } else {
            fmt_real(to_f64(q))
        }
    };
    if t < lo || t > hi {
        return Err(domain(format!("t outside support [{},{}]", bracket(&lo), bracket(&hi))));
    }
    let side = match side {
        SideArg::Ge => Side::Ge,
        SideArg::Le => Side::Le,
    };
    let slice = body
        .clip(&SliceSpec::new(direction.clone(), t.clone(), side))
        .map_err(domain)?
        .ok_or_else(|| domain(format!("slice on side {side:?} of t = {} has zero volume", bracket(&t))))?;
    let tau = slice.volume() / body.volume();
    let value = json!({
        "direction": direction.to_string(),
        "side": match side { Side::Ge => "ge", Side::Le => "le" },
        "t": style.rational(&t),
        "support": [style.rational(&lo), style.rational(&hi)],
        "volume": style.rational(body.volume()),
        "barycenter": style.point(body.barycenter()),
        "slice_volume": style.rational(slice.volume()),
        "sub_barycenter": style.point(slice.barycenter()),
        "tau": style.rational(&tau),
    });
    Ok(Output {
        body: render_json(value, "slice", output),
        violated: false,
    })
}

fn optional(style: &NumberStyle, x: Option<f64>) -> Value {
    x.map_or(Value::Null, |x| style.real(x))
}

#[allow(clippy::too_many_arguments)]
fn cmd_invariants(
    valuations: &Path,
    tau: &str,
    n: Option<usize>,
    allow_zero_a: bool,
    jumping: Option<&Path>,
    m: Option<usize>,
    output: &OutputArgs,
) -> Result<Output, CliError> {
    let taus = parse_tau_spec(tau)?;
    let candidates: Vec<ValuationRecord> = io::parse_valuations(&io::read_json(valuations)?, allow_zero_a)?;
    let n = n.unwrap_or_else(|| candidates[0].dim());
    if n == 0 {
        return Err(CliError::Input("n: must be positive".into()));
    }
    let style = NumberStyle { exact: output.exact };
    let mut rows = Vec::with_capacity(taus.len());
    for &tau in &taus {
        let r = stability_report(&candidates, tau, n).map_err(invariant_error)?;
        for s in &r.skipped {
            log::warn!("tau = {tau}: candidate {s:?} skipped (S vanishes)");
        }
        rows.push(r);
    }
    let discrete = match jumping {
        Some(path) => {
            let data = io::parse_jumping(&io::read_json(path)?)?;
            let m = m.unwrap_or(data.d_k());
            let value = discrete_s_tilde(&data, m, n).map_err(invariant_error)?;
            Some((data, m, value))
        }
        None => None,
    };

    let body = match output.emit {
        Emit::Csv => {
            let header = [
                "tau",
                "delta_tau",
                "delta_tilde_tau",
                "alpha_tilde",
                "threshold",
                "weak_threshold",
                "verdict",
                "weak_verdict",
                "argmin",
            ];
            let lines: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        fmt_real(r.tau),
                        fmt_real(r.delta_tau),
                        fmt_real(r.delta_tilde_tau),
                        if r.tau == 0.0 {
                            fmt_real(r.delta_tilde_tau)
                        } else {
                            String::new()
                        },
                        fmt_real(r.threshold),
                        fmt_real(r.weak_threshold),
                        r.verdict.to_string(),
                        r.weak_verdict.to_string(),
                        r.argmin.clone(),
                    ]
                })
                .collect();
            render_csv(&header, &lines)
        }
        Emit::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "tau": style.real(r.tau),
                        "n": r.n,
                        "delta_tau": style.real(r.delta_tau),
                        "delta_tau_argmin": r.delta_tau_argmin,
                        "delta_tilde_tau": style.real(r.delta_tilde_tau),
                        "alpha": optional(&style, (r.tau == 0.0).then_some(r.delta_tau)),
                        "alpha_tilde": optional(&style, (r.tau == 0.0).then_some(r.delta_tilde_tau)),
                        "threshold": style.real(r.threshold),
                        "weak_threshold": style.real(r.weak_threshold),
                        "verdict": r.verdict.as_str(),
                        "weak_verdict": r.weak_verdict.as_str(),
                        "argmin": r.argmin,
                        "skipped": r.skipped,
                    })
                })
                .collect();
            let candidates: Vec<Value> = candidates
                .iter()
                .map(|v| {
                    json!({
                        "name": v.name(),
                        "A": style.real(v.log_discrepancy()),
                        "sigma": style.real(invariants::sigma(v)),
                        "S0": style.real(invariants::s0(v)),
                    })
                })
                .collect();
            let mut value = json!({
                "n": n,
                "candidates": candidates,
                "bounds": "minima over the supplied candidates; upper bounds for the infima over all valuations",
                "rows": rows,
            });
            if let Some((data, m, s)) = &discrete {
                value["discrete_s_tilde"] = json!({
                    "k": data.k(),
                    "d_k": data.d_k(),
                    "m": m,
                    "value": style.real(*s),
                });
            }
            render_json(value, "invariants", output)
        }
    };
    Ok(Output { body, violated: false })
}

fn suite_config(args: &VerifyArgs) -> Result<SuiteConfig, CliError> {
    let seed = match args.seed {
        Some(s) => s,
        None => seed_from_env()?.unwrap_or(DEFAULT_SEED),
    };
    let mut c = SuiteConfig {
        seed,
        ..SuiteConfig::default()
    };
    if let Some(x) = args.bodies {
        c.bodies = x;
    }
    if let Some(x) = &args.dims {
        c.dims = x.clone();
    }
    if let Some(x) = args.profiles {
        c.profiles = x;
    }
    if let Some(x) = args.t_grid {
        c.t_grid = x;
    }
    if let Some(x) = args.tau_grid {
        c.tau_grid = x;
    }
    if let Some(x) = args.tolerance {
        c.tolerance = x;
    }
    if let Some(x) = args.okounkov_bodies {
        c.okounkov_bodies = x;
    }
    if let Some(x) = args.mc_bodies {
        c.mc_bodies = x;
    }
    if let Some(x) = args.mc_samples {
        c.mc_samples = x;
    }
    c.validate().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(c)
}

fn cmd_verify(args: &VerifyArgs, output: &OutputArgs) -> Result<Output, CliError> {
    require_json(output, "verify")?;
    let config = suite_config(args)?;
    let run = || verifier::run_suite(&config, args.suite);
    let result = match args.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Input(format!("threads: {e}")))?
            .install(run),
        None => run(),
    }
    .map_err(|e| CliError::Input(e.to_string()))?;

    let stats: Map<String, Value> = result
        .stats
        .iter()
        .map(|(k, s)| {
            (
                k.clone(),
                json!({
                    "checks": s.checks,
                    "min_slack": fmt_real(s.min_slack),
                    "argmin_instance": s.argmin_instance,
                    "tolerance": fmt_real(s.tolerance),
                }),
            )
        })
        .collect();
    let violations: Vec<Value> = result
        .violations
        .iter()
        .map(|v| {
            json!({
                "check": v.check,
                "instance": v.instance,
                "inputs_digest": v.inputs_digest,
                "slack": fmt_real(v.slack),
            })
        })
        .collect();
    let summary = json!({
        "suite": args.suite.name(),
        "seed": config.seed,
        "passed": result.passed(),
        "checks_run": result.checks_run,
        "violation_count": result.violations.len(),
        "instance_errors": result.instance_errors,
        "digest": result.digest,
        "stats": stats,
    });
    if let Some(path) = &args.report {
        let mut report = summary.clone();
        report["config"] = serde_json::to_value(&config).expect("config serializes");
        report["violations"] = Value::Array(violations);
        if !output.no_meta {
            report["runtime_secs"] = json!(result.runtime_secs);
            let per_suite: Map<String, Value> = result
                .suite_runtimes
                .iter()
                .map(|(s, t)| (s.name().to_string(), json!(t)))
                .collect();
            report["suite_runtime_secs"] = Value::Object(per_suite);
        }
        write_file(path, &render_json(report, "verify", output))?;
    }
    if !output.no_meta {
        log::info!("verification finished in {:.1} s", result.runtime_secs);
    }
    Ok(Output {
        body: render_json(summary, "verify", output),
        violated: !result.passed(),
    })
}

fn cmd_eckardt(samples: usize, cross_validate: Option<usize>, output: &OutputArgs) -> Result<Output, CliError> {
    if samples < 2 {
        return Err(CliError::Input("samples: need at least 2".into()));
    }
    let rows = eckardt::eck_curve_table(samples);
    let scan = eckardt::eck_verify_stability(samples);
    let cv = match cross_validate {
        Some(grid) => Some(eckardt::eck_cross_validate(grid).map_err(invariant_error)?),
        None => None,
    };
    let violated = scan.min_margin <= 0.0 || cv.is_some_and(|c| c.max_abs_error > 1e-9);
    let body = match output.emit {
        Emit::Csv => {
            let lines: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        fmt_real(r.tau),
                        fmt_real(r.ratio),
                        fmt_real(r.threshold),
                        fmt_real(r.margin),
                    ]
                })
                .collect();
            render_csv(&["tau", "ratio", "threshold", "margin"], &lines)
        }
        Emit::Json => {
            let style = NumberStyle::default();
            let table: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "tau": style.real(r.tau),
                        "ratio": style.real(r.ratio),
                        "threshold": style.real(r.threshold),
                        "margin": style.real(r.margin),
                    })
                })
                .collect();
            let mut value = json!({
                "A": style.real(eckardt::A),
                "n": eckardt::N,
                "min_margin": style.real(scan.min_margin),
                "argmin_tau": style.real(scan.argmin_tau),
                "rows": table,
            });
            if let Some(c) = cv {
                value["cross_validation"] = json!({
                    "points": c.points,
                    "max_abs_error": style.real(c.max_abs_error),
                    "argmax_tau": style.real(c.argmax_tau),
                });
            }
            render_json(value, "eckardt", output)
        }
    };
    Ok(Output { body, violated })
}

#[allow(clippy::too_many_arguments)]
fn cmd_profile_check(
    profile: Option<&Path>,
    seed: Option<u64>,
    n: usize,
    p: f64,
    t_grid: usize,
    t: Option<f64>,
    output: &OutputArgs,
) -> Result<Output, CliError> {
    if n == 0 {
        return Err(CliError::Input("n: must be positive".into()));
    }
    if !(p.is_finite() && p >= 0.0) {
        return Err(CliError::Input(format!("p: {p} must be finite and non-negative")));
    }
    let f: ConcaveProfile = match profile {
        Some(path) => io::parse_profile(&io::read_json(path)?)?,
        None => {
            let seed = match seed {
                Some(s) => s,
                None => seed_from_env()?.unwrap_or(DEFAULT_SEED),
            };
            verifier::gen_profile(&mut ChaCha8Rng::seed_from_u64(seed))
        }
    };
    let ts: Vec<f64> = match t {
        Some(t) => {
            if !(0.0..=f.length()).contains(&t) {
                return Err(domain(format!("t outside support [0,{}]", fmt_real(f.length()))));
            }
            vec![t]
        }
        None => {
            if t_grid < 2 {
                return Err(CliError::Input("t-grid: need at least 2 points".into()));
            }
            (0..t_grid)
                .map(|i| f.length() * i as f64 / (t_grid - 1) as f64)
                .collect()
        }
    };
    let mut rows = Vec::with_capacity(ts.len());
    for &t in &ts {
        rows.push((t, check_weighted_nh(&f, n, p, t).map_err(domain)?));
    }
    let min_slack = rows.iter().map(|(_, c)| c.slack).fold(f64::INFINITY, f64::min);
    let violated = min_slack < -SLACK_TOLERANCE;
    let body = match output.emit {
        Emit::Csv => {
            let lines: Vec<Vec<String>> = rows
                .iter()
                .map(|(t, c)| vec![fmt_real(*t), fmt_real(c.lhs), fmt_real(c.rhs), fmt_real(c.slack)])
                .collect();
            render_csv(&["t", "lhs", "rhs", "slack"], &lines)
        }
        Emit::Json => {
            let style = NumberStyle::default();
            let table: Vec<Value> = rows
                .iter()
                .map(|(t, c)| {
                    json!({
                        "t": style.real(*t),
                        "lhs": style.real(c.lhs),
                        "rhs": style.real(c.rhs),
                        "slack": style.real(c.slack),
                    })
                })
                .collect();
            let value = json!({
                "n": n,
                "p": style.real(p),
                "profile": io::profile_to_json(&f),
                "min_slack": style.real(min_slack),
                "rows": table,
            });
            render_json(value, "profile-check", output)
        }
    };
    Ok(Output { body, violated })
}

fn dispatch(cli: &Cli) -> Result<Output, CliError> {
    let output = &cli.output;
    match &cli.command {
        Command::Slice {
            body,
            direction,
            t,
            side,
        } => cmd_slice(body, direction, t, *side, output),
        Command::Invariants {
            valuations,
            tau,
            n,
            allow_zero_a,
            jumping,
            m,
        } => cmd_invariants(valuations, tau, *n, *allow_zero_a, jumping.as_deref(), *m, output),
        Command::Verify(args) => cmd_verify(args, output),
        Command::Eckardt {
            samples,
            cross_validate,
        } => cmd_eckardt(*samples, *cross_validate, output),
        Command::ProfileCheck {
            profile,
            random: _,
            seed,
            n,
            p,
            t_grid,
            t,
        } => cmd_profile_check(profile.as_deref(), *seed, *n, *p, *t_grid, *t, output),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli).and_then(|out| write_output(&cli.output, &out.body).map(|()| out.violated)) {
        Ok(false) => 0,
        Ok(true) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
