//! Randomized property suites.
//!
//! Every suite is a list of independent instances. Instance `i` draws its inputs
//! from a ChaCha8 stream keyed by `(seed, family, i)`, so the same instance index
//! sees the same body in every body suite and results do not depend on the number
//! of worker threads. Outcomes are merged in instance order.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::time::Instant;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use subbary_core::invariants::{check_fujita_first, check_fujita_second, ValuationRecord};
use subbary_core::number::{format_rational, int, rat, to_f64};
use subbary_core::profile::{check_functional_nh, check_weighted_nh, ConcaveProfile};
use subbary_core::{ConvexBody, Direction, Point, Rational, Side, SliceSpec};

/// Denominator of the coordinate grid for random vertices.
pub const GRID_DENOMINATOR: i64 = 1 << 16;
pub const STRUCTURED_PROBABILITY: f64 = 0.2;
pub const MAX_RETRIES: usize = 100;
/// Reciprocal of the relative width of the band at each support end left out of `t`-grids.
pub const BAND_DENOMINATOR: i64 = 1_000_000;
/// Allowed distance of the band-edge bounds from their classical limits,
/// relative to the oscillation of `p`.
pub const LIMIT_TOLERANCE: f64 = 1e-4;
/// Tolerance for slacks that must vanish identically.
pub const EQUALITY_TOLERANCE: f64 = 1e-12;
/// Width of the Monte Carlo acceptance window, in standard errors.
pub const MC_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    GenHammer,
    FunctionalNh,
    WeightedNh,
    Fujita1,
    Fujita2,
    ClassicalNhLimits,
    MassBalance,
    McOracle,
    All,
}

impl Suite {
    pub const EACH: [Suite; 8] = [
        Suite::GenHammer,
        Suite::FunctionalNh,
        Suite::WeightedNh,
        Suite::Fujita1,
        Suite::Fujita2,
        Suite::ClassicalNhLimits,
        Suite::MassBalance,
        Suite::McOracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::GenHammer => "gen-hammer",
            Suite::FunctionalNh => "functional-nh",
            Suite::WeightedNh => "weighted-nh",
            Suite::Fujita1 => "fujita-1",
            Suite::Fujita2 => "fujita-2",
            Suite::ClassicalNhLimits => "classical-nh-limits",
            Suite::MassBalance => "mass-balance",
            Suite::McOracle => "mc-oracle",
            Suite::All => "all",
        }
    }

    fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Suite::EACH.to_vec(),
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Random bodies for the body suites.
    pub bodies: usize,
    pub dims: Vec<usize>,
    pub vertices_per_body: RangeInclusive<usize>,
    pub t_grid: usize,
    pub tau_grid: usize,
    pub tolerance: f64,
    pub profiles: usize,
    pub profile_dims: Vec<usize>,
    pub profile_t_grid: usize,
    pub exponents: Vec<f64>,
    /// Bodies for the Fujita-type suites; about half are shifted off the origin.
    pub okounkov_bodies: usize,
    pub mc_bodies: usize,
    pub mc_samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            bodies: 500,
            dims: vec![2, 3, 4, 5],
            vertices_per_body: 4..=10,
            t_grid: 32,
            tau_grid: 64,
            tolerance: 1e-9,
            profiles: 500,
            profile_dims: (1..=6).collect(),
            profile_t_grid: 64,
            exponents: vec![0.0, 0.5, 1.0, 2.0],
            okounkov_bodies: 300,
            mc_bodies: 50,
            mc_samples: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("{0} must be positive")]
    ZeroCount(&'static str),
    #[error("dimension {dim} is outside {allowed:?} for {what}")]
    DimensionOutOfRange {
        what: &'static str,
        dim: usize,
        allowed: RangeInclusive<usize>,
    },
    #[error("vertices_per_body range is empty")]
    EmptyVertexRange,
    #[error("tolerance must be finite and non-negative")]
    BadTolerance,
    #[error("exponent {0} must be finite and non-negative")]
    BadExponent(f64),
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let counts = [
            ("bodies", self.bodies),
            ("t_grid", self.t_grid),
            ("tau_grid", self.tau_grid),
            ("profiles", self.profiles),
            ("profile_t_grid", self.profile_t_grid),
            ("okounkov_bodies", self.okounkov_bodies),
            ("mc_bodies", self.mc_bodies),
            ("mc_samples", self.mc_samples),
            ("dims", self.dims.len()),
            ("profile_dims", self.profile_dims.len()),
            ("exponents", self.exponents.len()),
        ];
        for (name, c) in counts {
            if c == 0 {
                return Err(ConfigError::ZeroCount(name));
            }
        }
        if self.t_grid < 2 || self.tau_grid < 2 || self.profile_t_grid < 2 {
            return Err(ConfigError::ZeroCount("grid spacing"));
        }
        for &dim in &self.dims {
            if !(2..=8).contains(&dim) {
                return Err(ConfigError::DimensionOutOfRange {
                    what: "body suites",
                    dim,
                    allowed: 2..=8,
                });
            }
        }
        for &dim in &self.profile_dims {
            if !(1..=8).contains(&dim) {
                return Err(ConfigError::DimensionOutOfRange {
                    what: "profile suites",
                    dim,
                    allowed: 1..=8,
                });
            }
        }
        if self.vertices_per_body.is_empty() {
            return Err(ConfigError::EmptyVertexRange);
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return Err(ConfigError::BadTolerance);
        }
        if let Some(&p) = self.exponents.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(ConfigError::BadExponent(p));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub check: String,
    pub instance: usize,
    pub inputs_digest: String,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckStats {
    pub checks: u64,
    pub min_slack: f64,
    pub argmin_instance: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suites: Vec<Suite>,
    pub checks_run: u64,
    pub violations: Vec<Violation>,
    pub stats: BTreeMap<String, CheckStats>,
    pub instance_errors: Vec<String>,
    pub runtime_secs: f64,
    /// Wall-clock time per expanded suite, in run order.
    pub suite_runtimes: Vec<(Suite, f64)>,
    /// SHA-256 over the configuration and every reported value except runtime.
    pub digest: String,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.instance_errors.is_empty()
    }

    pub fn min_slack(&self, check: &str) -> Option<f64> {
        self.stats.get(check).map(|s| s.min_slack)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenerationError {
    #[error("no full-dimensional body after {MAX_RETRIES} draws in dimension {dim}")]
    GenerationExhausted { dim: usize },
    #[error("need at least {min} vertices in dimension {dim}, got {found}")]
    TooFewVertices { dim: usize, min: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BodyKind {
    Random,
    Simplex,
    Cube,
    CrossPolytope,
    /// Random simplex cut by a random half-space.
    CutSimplex,
}

fn dyadic(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(0..=GRID_DENOMINATOR), GRID_DENOMINATOR)
}

fn dyadic_point(rng: &mut ChaCha8Rng, n: usize) -> Point {
    (0..n).map(|_| dyadic(rng)).collect()
}

/// Convex hull of `v_count` random dyadic points in `[0,1]^n`.
pub fn gen_random_body(rng: &mut ChaCha8Rng, n: usize, v_count: usize) -> Result<ConvexBody, GenerationError> {
    if v_count < n + 1 {
        return Err(GenerationError::TooFewVertices {
            dim: n,
            min: n + 1,
            found: v_count,
        });
    }
    for _ in 0..MAX_RETRIES {
        let pts = (0..v_count).map(|_| dyadic_point(rng, n)).collect();
        if let Ok(body) = ConvexBody::build(pts, n) {
            return Ok(body);
        }
    }
    Err(GenerationError::GenerationExhausted { dim: n })
}

pub fn gen_structured(rng: &mut ChaCha8Rng, n: usize, kind: BodyKind) -> Result<ConvexBody, GenerationError> {
    let exhausted = |_| GenerationError::GenerationExhausted { dim: n };
    match kind {
        BodyKind::Random => gen_random_body(rng, n, n + 1),
        BodyKind::Simplex => ConvexBody::standard_simplex(n).map_err(exhausted),
        BodyKind::Cube => ConvexBody::unit_cube(n).map_err(exhausted),
        BodyKind::CrossPolytope => ConvexBody::cross_polytope(n).map_err(exhausted),
        BodyKind::CutSimplex => {
            let simplex = gen_random_body(rng, n, n + 1)?;
            let direction = Direction::Axis(rng.gen_range(0..n));
            let (lo, hi) = simplex.support(&direction).map_err(exhausted)?;
            // cut strictly inside the support: at a dyadic fraction in [1/8, 7/8]
            let frac = rat(rng.gen_range(8..=56), 64);
            let t = &lo + (&hi - &lo) * frac;
            let side = if rng.gen_bool(0.5) { Side::Ge } else { Side::Le };
            simplex
                .clip(&SliceSpec::new(direction, t, side))
                .map_err(exhausted)?
                .ok_or(GenerationError::GenerationExhausted { dim: n })
        }
    }
}

/// A random body: structured with probability [`STRUCTURED_PROBABILITY`], otherwise
/// the hull of `v_count` random dyadic points.
pub fn gen_body(rng: &mut ChaCha8Rng, n: usize, v_count: usize) -> Result<(ConvexBody, BodyKind), GenerationError> {
    if rng.gen_bool(STRUCTURED_PROBABILITY) {
        let kind = [
            BodyKind::Simplex,
            BodyKind::Cube,
            BodyKind::CrossPolytope,
            BodyKind::CutSimplex,
        ][rng.gen_range(0..4)];
        return Ok((gen_structured(rng, n, kind)?, kind));
    }
    Ok((gen_random_body(rng, n, v_count)?, BodyKind::Random))
}

/// Half the time a coordinate axis, otherwise a nonzero integer vector with
/// entries in `[-3, 3]`.
pub fn gen_direction(rng: &mut ChaCha8Rng, n: usize) -> Direction {
    if rng.gen_bool(0.5) {
        return Direction::Axis(rng.gen_range(0..n));
    }
    loop {
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        if v.iter().any(|c| *c != 0) {
            return Direction::Vector(v.into_iter().map(int).collect());
        }
    }
}

/// A random concave profile. Breakpoints, slopes and the left value lie on a
/// 1/64 grid so the piecewise-linear data is exactly representable.
pub fn gen_profile(rng: &mut ChaCha8Rng) -> ConcaveProfile {
    let grid = |rng: &mut ChaCha8Rng, lo: i64, hi: i64| rng.gen_range(lo..=hi) as f64 / 64.0;
    let length = grid(rng, 16, 256);
    if rng.gen_bool(STRUCTURED_PROBABILITY) {
        let made = match rng.gen_range(0..4) {
            0 => ConcaveProfile::constant(length, 1.0),
            1 => ConcaveProfile::tent(length),
            2 => ConcaveProfile::new(length, vec![0.0, length], vec![length, 0.0]),
            _ => ConcaveProfile::new(length, vec![0.0, length], vec![0.0, length]),
        };
        return made.expect("structured profiles are valid");
    }
    let pieces = rng.gen_range(1..=8);
    let mut xs: Vec<f64> = (0..pieces - 1)
        .map(|_| grid(rng, 1, 64 * 64 - 1) / 64.0 * length)
        .collect();
    xs.push(0.0);
    xs.push(length);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut slopes: Vec<f64> = (0..xs.len() - 1).map(|_| grid(rng, -128, 128)).collect();
    slopes.sort_by(|a, b| b.total_cmp(a));
    let mut ys = vec![grid(rng, 0, 128)];
    for i in 1..xs.len() {
        ys.push(ys[i - 1] + slopes[i - 1] * (xs[i] - xs[i - 1]));
    }
    let low = ys.iter().copied().fold(0.0, f64::min);
    let mut ys: Vec<f64> = ys.iter().map(|y| y - low).collect();
    if ys.iter().all(|y| *y == 0.0) {
        ys.iter_mut().for_each(|y| *y = 1.0);
    }
    ConcaveProfile::new(length, xs, ys).expect("generated profile is valid")
}

const FAMILY_BODIES: u64 = 1;
const FAMILY_PROFILES: u64 = 2;
const FAMILY_OKOUNKOV: u64 = 3;
const FAMILY_MC: u64 = 4;

fn instance_rng(seed: u64, family: u64, instance: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(family.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
    rng.set_stream(instance as u64);
    rng
}

fn short_digest(text: &str) -> String {
    hex::encode(&Sha256::digest(text.as_bytes())[..8])
}

fn describe_body(body: &ConvexBody) -> String {
    let mut s = format!("dim={};", body.dim());
    for v in body.vertices() {
        s.push('[');
        for (k, c) in v.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            s.push_str(&format_rational(c));
        }
        s.push(']');
    }
    s
}

/// Per-instance accumulator; violations keep a digest of their inputs.
#[derive(Default)]
struct Outcome {
    stats: BTreeMap<&'static str, (u64, f64, f64)>,
    violations: Vec<(&'static str, String, f64)>,
    errors: Vec<String>,
}

impl Outcome {
    fn record(&mut self, check: &'static str, tolerance: f64, slack: f64, inputs: impl FnOnce() -> String) {
        let entry = self.stats.entry(check).or_insert((0, f64::INFINITY, tolerance));
        entry.0 += 1;
        if slack < entry.1 || slack.is_nan() {
            entry.1 = slack;
        }
        if slack.is_nan() || slack < -tolerance {
            self.violations.push((check, short_digest(&inputs()), slack));
        }
    }

    fn error(&mut self, what: impl fmt::Display) {
        self.errors.push(what.to_string());
    }
}

/// `t_grid` values spread over the support with the endpoint bands removed.
/// `count` points spread over `[lo + band·osc, hi − band·osc]` with band `1/BAND_DENOMINATOR`.
/// Fractions are exact with denominator `BAND_DENOMINATOR·(count − 1)`, which keeps
/// downstream rational arithmetic small.
fn band_grid(lo: &Rational, hi: &Rational, count: usize) -> Vec<Rational> {
    let osc = hi - lo;
    let steps = (count - 1) as i64;
    let den = BAND_DENOMINATOR * steps;
    (0..count as i64)
        .map(|i| lo + &osc * Rational::new((steps + (BAND_DENOMINATOR - 2) * i).into(), den.into()))
        .collect()
}

struct BodyInstance {
    body: ConvexBody,
    direction: Direction,
    label: String,
}

fn body_instance(config: &SuiteConfig, family: u64, i: usize) -> Result<BodyInstance, GenerationError> {
    let mut rng = instance_rng(config.seed, family, i);
    let n = config.dims[i % config.dims.len()];
    let lo = config.vertices_per_body.start().max(&(n + 1)).to_owned();
    let hi = (*config.vertices_per_body.end()).max(lo);
    let v_count = rng.gen_range(lo..=hi);
    let (body, kind) = gen_body(&mut rng, n, v_count)?;
    let direction = gen_direction(&mut rng, n);
    Ok(BodyInstance {
        label: format!("{kind:?}"),
        body,
        direction,
    })
}

/// Fixed structured bodies appended to the random ones: simplex, cube and
/// cross-polytope in every configured dimension, sliced along the first axis.
fn structured_instances(config: &SuiteConfig) -> Vec<BodyInstance> {
    let mut out = Vec::new();
    for &n in &config.dims {
        for (label, body) in [
            ("simplex", ConvexBody::standard_simplex(n)),
            ("cube", ConvexBody::unit_cube(n)),
            ("cross-polytope", ConvexBody::cross_polytope(n)),
        ] {
            out.push(BodyInstance {
                body: body.expect("structured bodies are full-dimensional"),
                direction: Direction::Axis(0),
                label: label.into(),
            });
        }
    }
    out
}

fn hammer_instance(inst: &BodyInstance, config: &SuiteConfig, out: &mut Outcome) {
    let (lo, hi) = inst.body.support(&inst.direction).expect("direction matches");
    for t in band_grid(&lo, &hi, config.t_grid) {
        for (check, side) in [("hammer-upper", Side::Ge), ("hammer-lower", Side::Le)] {
            match inst.body.hammer_check(&inst.direction, &t, side) {
                Ok(c) => out.record(check, config.tolerance, c.slack, || {
                    format!("{}|{}|{}|{:?}", describe_body(&inst.body), inst.direction, t, side)
                }),
                Err(e) => out.error(format!("{check} on {}: {e}", inst.label)),
            }
        }
    }
}

fn limits_instance(inst: &BodyInstance, out: &mut Outcome) {
    let body = &inst.body;
    let n = body.dim() as f64;
    let (lo, hi) = body.support(&inst.direction).expect("direction matches");
    let osc = &hi - &lo;
    let bc = inst.direction.eval(body.barycenter()) - &lo;
    let nn = int(body.dim() as i64);
    let describe = || format!("{}|{}", describe_body(body), inst.direction);
    // exact classical bounds, scaled by osc
    let lower = (&bc - &osc / (&nn + int(1))) / &osc;
    let upper = (&osc * &nn / (&nn + int(1)) - &bc) / &osc;
    out.record("lemma-lower", 0.0, to_f64(&lower), describe);
    out.record("lemma-upper", 0.0, to_f64(&upper), describe);

    // band-edge values of the sub-barycenter bounds approach the classical limits
    let oscf = to_f64(&osc);
    let edge = &osc / int(BAND_DENOMINATOR);
    let top = &hi - &edge;
    let bottom = &lo + &edge;
    match body.hammer_check(&inst.direction, &top, Side::Ge) {
        Ok(c) => {
            let slice_bc = c.lhs * to_f64(&bc);
            let bound = slice_bc / c.rhs;
            let gap = (bound - n / (n + 1.0) * oscf).abs() / oscf;
            out.record("limit-upper", 0.0, LIMIT_TOLERANCE - gap, describe);
        }
        Err(e) => out.error(format!("limit-upper on {}: {e}", inst.label)),
    }
    match body.hammer_check(&inst.direction, &bottom, Side::Le) {
        Ok(c) => {
            let slice_gap = c.lhs * (oscf - to_f64(&bc));
            let bound = oscf - slice_gap / c.rhs;
            let gap = (bound - oscf / (n + 1.0)).abs() / oscf;
            out.record("limit-lower", 0.0, LIMIT_TOLERANCE - gap, describe);
        }
        Err(e) => out.error(format!("limit-lower on {}: {e}", inst.label)),
    }
}

/// `0` for an exact zero, otherwise a strictly negative magnitude.
fn exact_slack(gap: &Rational) -> f64 {
    if gap.is_zero() {
        0.0
    } else {
        -to_f64(gap).abs().max(f64::MIN_POSITIVE)
    }
}

fn mass_balance_instance(inst: &BodyInstance, config: &SuiteConfig, out: &mut Outcome) {
    let body = &inst.body;
    let (lo, hi) = body.support(&inst.direction).expect("direction matches");
    for t in band_grid(&lo, &hi, config.t_grid) {
        let part = |side| body.clip(&SliceSpec::new(inst.direction.clone(), t.clone(), side));
        let (Ok(Some(up)), Ok(Some(down))) = (part(Side::Ge), part(Side::Le)) else {
            out.error(format!(
                "mass-balance on {}: empty slice inside the support",
                inst.label
            ));
            continue;
        };
        let describe = || format!("{}|{}|{}", describe_body(body), inst.direction, t);
        let volume_gap = up.volume() + down.volume() - body.volume();
        out.record("clip-partition", 0.0, exact_slack(&volume_gap), describe);
        let mut moment_gap = 0.0f64;
        for k in 0..body.dim() {
            let gap = up.volume() * &up.barycenter()[k] + down.volume() * &down.barycenter()[k]
                - body.volume() * &body.barycenter()[k];
            moment_gap = moment_gap.min(exact_slack(&gap));
        }
        out.record("barycenter-decomposition", 0.0, moment_gap, describe);
    }
}

fn mc_instance(inst: &BodyInstance, config: &SuiteConfig, seed: u64, out: &mut Outcome) {
    let est = inst.body.mc_volume_oracle(config.mc_samples, seed);
    let exact = to_f64(inst.body.volume());
    let slack = (MC_SIGMAS * est.std_error - (est.estimate - exact).abs()) / exact;
    out.record("mc-volume", config.tolerance, slack, || {
        format!("{}|{}|{}", describe_body(&inst.body), config.mc_samples, seed)
    });
}

fn profile_instance(config: &SuiteConfig, i: usize, weighted: bool, out: &mut Outcome) {
    let mut rng = instance_rng(config.seed, FAMILY_PROFILES, i);
    let f = gen_profile(&mut rng);
    let exponents: &[f64] = if weighted { &config.exponents } else { &[1.0] };
    for &n in &config.profile_dims {
        for &p in exponents {
            for k in 0..config.profile_t_grid {
                let t = f.length() * k as f64 / (config.profile_t_grid - 1) as f64;
                let describe = || format!("{:?}|n={n}|p={p}|t={t}", f);
                let result = if weighted {
                    check_weighted_nh(&f, n, p, t)
                } else {
                    check_functional_nh(&f, n, t)
                };
                match result {
                    Ok(c) => {
                        let check = if weighted { "weighted-nh" } else { "functional-nh" };
                        out.record(check, config.tolerance, c.slack, describe);
                        if weighted && p == 0.0 {
                            out.record(
                                "weighted-p0-equality",
                                0.0,
                                EQUALITY_TOLERANCE - c.slack.abs(),
                                describe,
                            );
                        }
                    }
                    Err(e) => out.error(format!("profile {i}: {e}")),
                }
            }
        }
    }
}

fn okounkov_instance(config: &SuiteConfig, i: usize, second: bool, out: &mut Outcome) {
    let mut rng = instance_rng(config.seed, FAMILY_OKOUNKOV, i);
    let n = config.dims[i % config.dims.len()];
    let lo = (*config.vertices_per_body.start()).max(n + 1);
    let hi = (*config.vertices_per_body.end()).max(lo);
    let v_count = rng.gen_range(lo..=hi);
    let body = match gen_body(&mut rng, n, v_count) {
        Ok((b, _)) => b,
        Err(e) => return out.error(format!("okounkov body {i}: {e}")),
    };
    let body = if rng.gen_bool(0.5) {
        let mut offset = vec![int(0); n];
        offset[0] = rat(rng.gen_range(1..=128), 64);
        body.translated(&offset)
    } else {
        body
    };
    let v = ValuationRecord::new("candidate", 1.0, 1.0, body).expect("A = 1 and C = 1 are valid");
    let vref = &v;
    let describe = |tau: f64| move || format!("{}|tau={tau}", describe_body(vref.body()));
    for k in 0..config.tau_grid {
        let tau = k as f64 / (config.tau_grid - 1) as f64;
        if second {
            match check_fujita_second(&v, tau, n) {
                Ok(s) => {
                    out.record("fujita-interpolation", config.tolerance, s.interpolation, describe(tau));
                    if tau == 0.0 || tau == 1.0 {
                        out.record(
                            "fujita-interpolation-endpoints",
                            0.0,
                            EQUALITY_TOLERANCE - s.interpolation.abs(),
                            describe(tau),
                        );
                    }
                    if k == 0 {
                        out.record("fujita-barycenter", config.tolerance, s.barycenter, describe(tau));
                    }
                }
                Err(e) => out.error(format!("okounkov body {i}: {e}")),
            }
        } else {
            match check_fujita_first(&v, tau, n) {
                Ok(s) => {
                    out.record("fujita-first", config.tolerance, s, describe(tau));
                    if tau == 1.0 {
                        out.record(
                            "fujita-first-endpoint",
                            0.0,
                            EQUALITY_TOLERANCE - s.abs(),
                            describe(tau),
                        );
                    }
                }
                Err(e) => out.error(format!("okounkov body {i}: {e}")),
            }
        }
    }
}

fn run_instances(count: usize, job: impl Fn(usize, &mut Outcome) + Sync) -> Vec<Outcome> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut out = Outcome::default();
            job(i, &mut out);
            out
        })
        .collect()
}

fn body_suite(config: &SuiteConfig, count: usize, job: impl Fn(&BodyInstance, &mut Outcome) + Sync) -> Vec<Outcome> {
    let extra = structured_instances(config);
    run_instances(count + extra.len(), |i, out| {
        if i < count {
            match body_instance(config, FAMILY_BODIES, i) {
                Ok(inst) => job(&inst, out),
                Err(e) => out.error(format!("body {i}: {e}")),
            }
        } else {
            job(&extra[i - count], out);
        }
    })
}

fn run_one(config: &SuiteConfig, suite: Suite) -> Vec<Outcome> {
    match suite {
        Suite::GenHammer => body_suite(config, config.bodies, |inst, out| hammer_instance(inst, config, out)),
        Suite::ClassicalNhLimits => body_suite(config, config.bodies, limits_instance),
        Suite::MassBalance => body_suite(config, config.bodies, |inst, out| {
            mass_balance_instance(inst, config, out)
        }),
        Suite::McOracle => run_instances(config.mc_bodies, |i, out| {
            match body_instance(config, FAMILY_BODIES, i) {
                Ok(inst) => {
                    let seed = instance_rng(config.seed, FAMILY_MC, i).gen();
                    mc_instance(&inst, config, seed, out)
                }
                Err(e) => out.error(format!("body {i}: {e}")),
            }
        }),
        Suite::FunctionalNh => run_instances(config.profiles, |i, out| profile_instance(config, i, false, out)),
        Suite::WeightedNh => run_instances(config.profiles, |i, out| profile_instance(config, i, true, out)),
        Suite::Fujita1 => run_instances(config.okounkov_bodies, |i, out| {
            okounkov_instance(config, i, false, out)
        }),
        Suite::Fujita2 => run_instances(config.okounkov_bodies, |i, out| okounkov_instance(config, i, true, out)),
        Suite::All => unreachable!("expanded before dispatch"),
    }
}

/// Runs the named suite(s) and merges the outcomes in instance order.
pub fn run_suite(config: &SuiteConfig, which: Suite) -> Result<SuiteResult, ConfigError> {
    config.validate()?;
    let start = Instant::now();
    let suites = which.expand();
    let mut stats: BTreeMap<String, CheckStats> = BTreeMap::new();
    let mut violations = Vec::new();
    let mut instance_errors = Vec::new();
    let mut suite_runtimes = Vec::with_capacity(suites.len());
    for &suite in &suites {
        let suite_start = Instant::now();
        let outcomes = run_one(config, suite);
        suite_runtimes.push((suite, suite_start.elapsed().as_secs_f64()));
        for (instance, outcome) in outcomes.into_iter().enumerate() {
            for (check, (count, min, tolerance)) in outcome.stats {
                let key = format!("{suite}/{check}");
                let entry = stats.entry(key).or_insert(CheckStats {
                    checks: 0,
                    min_slack: f64::INFINITY,
                    argmin_instance: instance,
                    tolerance,
                });
                entry.checks += count;
                if min < entry.min_slack {
                    entry.min_slack = min;
                    entry.argmin_instance = instance;
                }
            }
            violations.extend(
                outcome
                    .violations
                    .into_iter()
                    .map(|(check, inputs_digest, slack)| Violation {
                        check: format!("{suite}/{check}"),
                        instance,
                        inputs_digest,
                        slack,
                    }),
            );
            instance_errors.extend(outcome.errors.into_iter().map(|e| format!("{suite}[{instance}]: {e}")));
        }
    }
    let checks_run = stats.values().map(|s| s.checks).sum();
    let mut result = SuiteResult {
        suites,
        checks_run,
        violations,
        stats,
        instance_errors,
        runtime_secs: start.elapsed().as_secs_f64(),
        suite_runtimes,
        digest: String::new(),
    };
    result.digest = digest(config, &result);
    Ok(result)
}

fn digest(config: &SuiteConfig, result: &SuiteResult) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(config).expect("config serializes"));
    for s in &result.suites {
        h.update(s.name().as_bytes());
    }
    for (name, s) in &result.stats {
        h.update(name.as_bytes());
        h.update(s.checks.to_le_bytes());
        h.update(s.min_slack.to_bits().to_le_bytes());
        h.update((s.argmin_instance as u64).to_le_bytes());
    }
    for v in &result.violations {
        h.update(v.check.as_bytes());
        h.update((v.instance as u64).to_le_bytes());
        h.update(v.inputs_digest.as_bytes());
        h.update(v.slack.to_bits().to_le_bytes());
    }
    for e in &result.instance_errors {
        h.update(e.as_bytes());
    }
    hex::encode(h.finalize())
}
