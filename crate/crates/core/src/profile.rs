//! Concave piecewise-linear profiles `f: [0, T] → R≥0` and the functional form of
//! the sub-barycenter inequality.
//!
//! For a dimension `n` the profile carries the measure `f(s)^{n−1} ds` (for `n = 1`
//! this is plain `ds`). All moments of that measure against `s^p` are integrated per
//! linear piece: exactly through a Bernstein expansion when `p` is an integer, and by
//! adaptive 16-point Gauss–Legendre otherwise.

use alloc::vec::Vec;

use crate::convexbody::{ConvexBody, Direction, GeometryError, VolumeProfile};
use crate::number::{abs, one_minus_pow_complement, powf, powi, to_f64, Rational};

/// Slack below which an inequality counts as violated.
pub const SLACK_TOLERANCE: f64 = 1e-9;
/// Concavity test tolerance on consecutive slopes.
pub const CONCAVITY_TOLERANCE: f64 = 1e-12;
/// Target accuracy of the non-integer-exponent quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-12;
/// Grid size for the auxiliary-function comparison in [`proof_diagnostics`].
pub const DIAGNOSTIC_GRID: usize = 1000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProfileError {
    #[error("{breakpoints} breakpoints but {values} values")]
    LengthMismatch { breakpoints: usize, values: usize },
    #[error("a profile needs at least two breakpoints")]
    TooFewBreakpoints,
    #[error("interval length T = {0} is not positive")]
    NonPositiveLength(f64),
    #[error("breakpoints must start at 0 and end at T = {length}")]
    BadEndpoints { length: f64 },
    #[error("breakpoint {index} is not finite")]
    NonFinite { index: usize },
    #[error("breakpoint {index} does not increase")]
    NotIncreasing { index: usize },
    #[error("value at breakpoint {index} is negative")]
    Negative { index: usize },
    #[error("profile is not concave at breakpoint {index}")]
    NotConcave { index: usize },
    #[error("profile is identically zero")]
    IdenticallyZero,
    #[error("t = {t} is outside [0, {length}]")]
    OutOfDomain { t: f64, length: f64 },
    #[error("t = 0 leaves no mass below t; the auxiliary rescaling is undefined")]
    DegenerateScaling,
    #[error("dimension must be at least {min}, got {found}")]
    DimensionTooLow { min: usize, found: usize },
    #[error("weight exponent {0} must be finite and non-negative")]
    InvalidExponent(f64),
    #[error("grid needs at least two points")]
    GridTooSmall,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcaveProfile {
    length: f64,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl ConcaveProfile {
    pub fn new(length: f64, breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, ProfileError> {
        if breakpoints.len() != values.len() {
            return Err(ProfileError::LengthMismatch {
                breakpoints: breakpoints.len(),
                values: values.len(),
            });
        }
        if breakpoints.len() < 2 {
            return Err(ProfileError::TooFewBreakpoints);
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(ProfileError::NonPositiveLength(length));
        }
        for (index, (s, v)) in breakpoints.iter().zip(&values).enumerate() {
            if !s.is_finite() || !v.is_finite() {
                return Err(ProfileError::NonFinite { index });
            }
            if *v < 0.0 {
                return Err(ProfileError::Negative { index });
            }
        }
        if breakpoints[0] != 0.0 || breakpoints[breakpoints.len() - 1] != length {
            return Err(ProfileError::BadEndpoints { length });
        }
        for index in 1..breakpoints.len() {
            if breakpoints[index] <= breakpoints[index - 1] {
                return Err(ProfileError::NotIncreasing { index });
            }
        }
        let slope = |i: usize| (values[i + 1] - values[i]) / (breakpoints[i + 1] - breakpoints[i]);
        for index in 1..breakpoints.len() - 1 {
            let (left, right) = (slope(index - 1), slope(index));
            let scale = abs(left).max(abs(right)).max(1.0);
            if right > left + CONCAVITY_TOLERANCE * scale {
                return Err(ProfileError::NotConcave { index });
            }
        }
        if values.iter().all(|v| *v == 0.0) {
            return Err(ProfileError::IdenticallyZero);
        }
        Ok(ConcaveProfile {
            length,
            breakpoints,
            values,
        })
    }

    pub fn constant(length: f64, value: f64) -> Result<Self, ProfileError> {
        Self::new(length, alloc::vec![0.0, length], alloc::vec![value, value])
    }

    /// The tent `s ↦ min(s, T − s)`.
    pub fn tent(length: f64) -> Result<Self, ProfileError> {
        let mid = length / 2.0;
        Self::new(length, alloc::vec![0.0, mid, length], alloc::vec![0.0, mid, 0.0])
    }

    /// `T`.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Piecewise-linear interpolant; zero outside `[0, T]`.
    pub fn value_at(&self, s: f64) -> f64 {
        if !(0.0..=self.length).contains(&s) {
            return 0.0;
        }
        let i = match self.breakpoints.partition_point(|b| *b <= s) {
            0 => 0,
            k => (k - 1).min(self.breakpoints.len() - 2),
        };
        let (a, b) = (self.breakpoints[i], self.breakpoints[i + 1]);
        let x = (s - a) / (b - a);
        self.values[i] * (1.0 - x) + self.values[i + 1] * x
    }

    /// `∫_a^b s^p f(s)^{n−1} ds` for `0 <= a <= b <= T`.
    fn weighted_integral(&self, n: usize, p: f64, a: f64, b: f64) -> f64 {
        let m = n - 1;
        let mut total = 0.0;
        for i in 0..self.breakpoints.len() - 1 {
            let (s0, s1) = (self.breakpoints[i], self.breakpoints[i + 1]);
            let lo = s0.max(a);
            let hi = s1.min(b);
            if hi <= lo {
                continue;
            }
            let f_lo = if lo == s0 { self.values[i] } else { self.value_at(lo) };
            let f_hi = if hi == s1 {
                self.values[i + 1]
            } else {
                self.value_at(hi)
            };
            total += piece_integral(lo, hi, f_lo, f_hi, m, p);
        }
        total
    }
}

fn integer_exponent(p: f64) -> Option<usize> {
    ((0.0..=64.0).contains(&p) && p == libm::trunc(p)).then_some(p as usize)
}

/// `∫_u^w s^p g(s)^m ds` with `g` linear from `gu` to `gw`.
fn piece_integral(u: f64, w: f64, gu: f64, gw: f64, m: usize, p: f64) -> f64 {
    let h = w - u;
    match integer_exponent(p) {
        Some(p) => {
            // s = u + h x, g = gu (1−x) + gw x; ∫ x^{j+k} (1−x)^{m−k} dx is a beta integral.
            let mut sum = 0.0;
            let mut binom_p = 1.0;
            for j in 0..=p {
                if j > 0 {
                    binom_p = binom_p * (p - j + 1) as f64 / j as f64;
                }
                let outer = binom_p * powi(u, p - j) * powi(h, j);
                if outer == 0.0 {
                    continue;
                }
                // m! / (j+m+1)!
                let mut lead = 1.0;
                for r in m + 1..=j + m + 1 {
                    lead /= r as f64;
                }
                let mut inner = 0.0;
                // (j+k)!/k! grows as k increases
                let mut rise = (1..=j).map(|r| r as f64).product::<f64>();
                for k in 0..=m {
                    if k > 0 {
                        rise = rise * (j + k) as f64 / k as f64;
                    }
                    inner += powi(gu, m - k) * powi(gw, k) * rise;
                }
                sum += outer * lead * inner;
            }
            h * sum
        }
        None => {
            let g = |s: f64| {
                let x = (s - u) / h;
                powf(s, p) * powi(gu * (1.0 - x) + gw * x, m)
            };
            adaptive_gauss(&g, u, w, 0)
        }
    }
}

const GL_NODES: [f64; 8] = [
    0.09501250983763745,
    0.2816035507792589,
    0.45801677765722737,
    0.6178762444026438,
    0.755404408355003,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GL_WEIGHTS: [f64; 8] = [
    0.18945061045506859,
    0.1826034150449236,
    0.16915651939500262,
    0.14959598881657676,
    0.12462897125553403,
    0.09515851168249259,
    0.062253523938647706,
    0.027152459411754037,
];

fn gauss16(g: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL_NODES.iter().zip(&GL_WEIGHTS) {
        acc += w * (g(c - r * x) + g(c + r * x));
    }
    acc * r
}

fn adaptive_gauss(g: &impl Fn(f64) -> f64, a: f64, b: f64, depth: u32) -> f64 {
    let whole = gauss16(g, a, b);
    let mid = 0.5 * (a + b);
    let halves = gauss16(g, a, mid) + gauss16(g, mid, b);
    if abs(whole - halves) <= QUADRATURE_TOLERANCE * abs(halves).max(f64::MIN_POSITIVE) || depth >= 48 {
        return halves;
    }
    adaptive_gauss(g, a, mid, depth + 1) + adaptive_gauss(g, mid, b, depth + 1)
}

/// Masses and partial barycenters of `f^{n−1} ds` split at `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub t: f64,
    pub v_le: f64,
    pub v_ge: f64,
    pub b_le: Option<f64>,
    pub b_ge: Option<f64>,
    /// `V_{>=t} / V_{>=0}`.
    pub tau_ge: f64,
}

fn check_domain(f: &ConcaveProfile, n: usize, t: f64) -> Result<(), ProfileError> {
    if n == 0 {
        return Err(ProfileError::DimensionTooLow { min: 1, found: 0 });
    }
    if !(0.0..=f.length).contains(&t) {
        return Err(ProfileError::OutOfDomain { t, length: f.length });
    }
    Ok(())
}

pub fn moments(f: &ConcaveProfile, n: usize, t: f64) -> Result<MomentSet, ProfileError> {
    check_domain(f, n, t)?;
    let big_t = f.length;
    let v_le = f.weighted_integral(n, 0.0, 0.0, t);
    let v_ge = f.weighted_integral(n, 0.0, t, big_t);
    let m_le = f.weighted_integral(n, 1.0, 0.0, t);
    let m_ge = f.weighted_integral(n, 1.0, t, big_t);
    Ok(MomentSet {
        t,
        v_le,
        v_ge,
        b_le: (v_le > 0.0).then(|| m_le / v_le),
        b_ge: (v_ge > 0.0).then(|| m_ge / v_ge),
        tau_ge: v_ge / (v_le + v_ge),
    })
}

/// One evaluated inequality `lhs >= rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NhCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl NhCheck {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        NhCheck {
            lhs,
            rhs,
            slack: lhs - rhs,
        }
    }

    pub fn holds(&self, tolerance: f64) -> bool {
        self.slack >= -tolerance
    }
}

/// `∫_t^T s f^{n−1} / ∫_0^T s f^{n−1}  >=  1 − (1 − τ)^{(n+1)/n}`.
pub fn check_functional_nh(f: &ConcaveProfile, n: usize, t: f64) -> Result<NhCheck, ProfileError> {
    check_weighted_nh(f, n, 1.0, t)
}

/// `∫_t^T s^p f^{n−1} / ∫_0^T s^p f^{n−1}  >=  1 − (1 − τ)^{(n+p)/n}`, with `τ`
/// taken from the unweighted masses of the same profile.
pub fn check_weighted_nh(f: &ConcaveProfile, n: usize, p: f64, t: f64) -> Result<NhCheck, ProfileError> {
    check_domain(f, n, t)?;
    if !(p.is_finite() && p >= 0.0) {
        return Err(ProfileError::InvalidExponent(p));
    }
    let big_t = f.length;
    let tau = f.weighted_integral(n, 0.0, t, big_t) / f.weighted_integral(n, 0.0, 0.0, big_t);
    let lhs = f.weighted_integral(n, p, t, big_t) / f.weighted_integral(n, p, 0.0, big_t);
    let rhs = one_minus_pow_complement(tau, (n as f64 + p) / n as f64);
    Ok(NhCheck::new(lhs, rhs))
}

/// Intermediate quantities of the comparison argument at `t`:
/// `F(s) = (1−τ)^{−1/n} f((1−τ)^{1/n} s)` dominates `f` on `[0, T]`, and the
/// rescaled threshold `(1−τ)^{−1/n} t` stays within `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProofDiagnostics {
    pub tau: f64,
    /// `min (F − f)` over a uniform grid on `[0, T]`.
    pub f_minus_f_min: f64,
    pub scaled_t: f64,
    pub length: f64,
}

pub fn proof_diagnostics(f: &ConcaveProfile, n: usize, t: f64) -> Result<ProofDiagnostics, ProfileError> {
    check_domain(f, n, t)?;
    if t == 0.0 {
        return Err(ProfileError::DegenerateScaling);
    }
    let big_t = f.length;
    let tau = f.weighted_integral(n, 0.0, t, big_t) / f.weighted_integral(n, 0.0, 0.0, big_t);
    let c = powf(1.0 - tau, 1.0 / n as f64);
    let mut min_gap = f64::INFINITY;
    for i in 0..DIAGNOSTIC_GRID {
        let s = big_t * i as f64 / (DIAGNOSTIC_GRID - 1) as f64;
        let aux = f.value_at((c * s).min(big_t)) / c;
        min_gap = min_gap.min(aux - f.value_at(s));
    }
    Ok(ProofDiagnostics {
        tau,
        f_minus_f_min: min_gap,
        scaled_t: t / c,
        length: big_t,
    })
}

/// Profile `s ↦ |p^{−1}(min p + s) ∩ K|^{1/(n−1)}` sampled on a uniform grid of
/// `grid` points (plus every vertex level) and projected onto concave functions.
pub fn body_to_profile(body: &ConvexBody, direction: &Direction, grid: usize) -> Result<ConcaveProfile, ProfileError> {
    let n = body.dim();
    if n < 2 {
        return Err(ProfileError::DimensionTooLow { min: 2, found: n });
    }
    if grid < 2 {
        return Err(ProfileError::GridTooSmall);
    }
    let vp = VolumeProfile::new(body, direction)?;
    let (lo, hi) = vp.support();
    let span = &hi - &lo;
    let mut ts: Vec<Rational> = (0..grid)
        .map(|i| &lo + &span * Rational::new((i as i64).into(), ((grid - 1) as i64).into()))
        .collect();
    ts.extend(vp.levels().iter().cloned());
    ts.sort();
    ts.dedup();

    let root = 1.0 / (n as f64 - 1.0);
    let mut xs: Vec<f64> = Vec::with_capacity(ts.len());
    let mut ys: Vec<f64> = Vec::with_capacity(ts.len());
    for t in &ts {
        let x = to_f64(&(t - &lo));
        if xs.last().is_some_and(|prev| *prev >= x) {
            continue;
        }
        xs.push(x);
        ys.push(powf(to_f64(&vp.cross_section(t)).max(0.0), root));
    }
    let length = to_f64(&span);
    *xs.last_mut().expect("grid has points") = length;

    let projected = concave_projection(&xs, &ys);
    let moved = projected.iter().zip(&ys).map(|(a, b)| abs(a - b)).fold(0.0, f64::max);
    if moved > 1e-6 {
        log::warn!("concave projection moved a sampled profile value by {moved:e}");
    }
    ConcaveProfile::new(length, xs, projected)
}

/// Pool-adjacent-violators on the slopes (weighted by piece length) so they become
/// non-increasing, then re-integrated from the left value.
fn concave_projection(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    struct Block {
        slope: f64,
        weight: f64,
        count: usize,
    }
    let mut blocks: Vec<Block> = Vec::new();
    for i in 0..xs.len() - 1 {
        let w = xs[i + 1] - xs[i];
        let mut b = Block {
            slope: (ys[i + 1] - ys[i]) / w,
            weight: w,
            count: 1,
        };
        while let Some(prev) = blocks.last() {
            if prev.slope >= b.slope {
                break;
            }
            let prev = blocks.pop().expect("checked");
            let weight = prev.weight + b.weight;
            b = Block {
                slope: (prev.slope * prev.weight + b.slope * b.weight) / weight,
                weight,
                count: prev.count + b.count,
            };
        }
        blocks.push(b);
    }
    let mut out = Vec::with_capacity(xs.len());
    out.push(ys[0]);
    let mut i = 0;
    for b in &blocks {
        for _ in 0..b.count {
            out.push(out[i] + b.slope * (xs[i + 1] - xs[i]));
            i += 1;
        }
    }
    // Rounding in the running sum can leave an endpoint a hair below zero; a uniform
    // lift keeps the slopes intact.
    let lift = out.iter().cloned().fold(0.0, f64::min);
    out.iter_mut().for_each(|v| *v -= lift);
    out
}
