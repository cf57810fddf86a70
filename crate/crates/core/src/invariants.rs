//! Stability invariants computed from Okounkov-type bodies.
//!
//! A candidate valuation is a named body `Δ ⊂ R^n` whose first coordinate is the
//! vanishing order, together with a log discrepancy `A` and a scale `C`. Every
//! quantity that depends on the valuation (`A`, `σ`, `S_0`, `S_τ`, `Q(τ)`) is
//! multiplied by `C`, so all ratios are scale-free.
//!
//! Infima over valuations are taken over the supplied candidates only; the
//! resulting `δ_τ`, `δ̃_τ` are upper bounds for the true invariants.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::convexbody::{ConvexBody, Direction, GeometryError, VolumeProfile};
use crate::number::{one_minus_pow_complement, powf, to_f64, Rational};

/// Margin around the threshold separating the verdicts.
pub const VERDICT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InvariantError {
    #[error("no candidate valuations supplied")]
    EmptyCandidates,
    #[error("S vanishes for every candidate ({skipped:?}); the ratio is undefined")]
    UndefinedRatio { skipped: Vec<String> },
    #[error("tau = {0} is outside [0, 1]")]
    TauOutOfRange(f64),
    #[error("valuation {name:?}: body has dimension {found}, expected n = {expected}")]
    DimensionMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("valuation {name:?}: log discrepancy A = {a} must be positive")]
    NonPositiveA { name: String, a: f64 },
    #[error("valuation {name:?}: scale C = {scale} must be positive")]
    NonPositiveScale { name: String, scale: f64 },
    #[error("jumping numbers: expected d_k = {expected} entries, found {found}")]
    JumpCountMismatch { expected: usize, found: usize },
    #[error("jumping numbers must be non-decreasing (entry {index})")]
    JumpsNotSorted { index: usize },
    #[error("jumping number {index} is negative or not finite")]
    InvalidJump { index: usize },
    #[error("k and d_k must be positive")]
    ZeroCount,
    #[error("m = {m} is outside [1, {d_k}]")]
    MOutOfRange { m: usize, d_k: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn check_tau(tau: f64) -> Result<(), InvariantError> {
    if (0.0..=1.0).contains(&tau) {
        Ok(())
    } else {
        Err(InvariantError::TauOutOfRange(tau))
    }
}

#[derive(Debug, Clone)]
pub struct ValuationRecord {
    name: String,
    a: f64,
    scale: f64,
    body: ConvexBody,
    profile: VolumeProfile,
}

impl ValuationRecord {
    /// Requires `A > 0`.
    pub fn new(name: impl Into<String>, a: f64, scale: f64, body: ConvexBody) -> Result<Self, InvariantError> {
        let name = name.into();
        if !(a > 0.0 && a.is_finite()) {
            return Err(InvariantError::NonPositiveA { name, a });
        }
        Self::new_lenient(name, a, scale, body)
    }

    /// Accepts `A >= 0`.
    pub fn new_lenient(name: impl Into<String>, a: f64, scale: f64, body: ConvexBody) -> Result<Self, InvariantError> {
        let name = name.into();
        if !(a >= 0.0 && a.is_finite()) {
            return Err(InvariantError::NonPositiveA { name, a });
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(InvariantError::NonPositiveScale { name, scale });
        }
        let profile = VolumeProfile::new(&body, &Direction::Axis(0))?;
        Ok(ValuationRecord {
            name,
            a,
            scale,
            body,
            profile,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Log discrepancy of the unscaled valuation.
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    /// `C · A`.
    pub fn log_discrepancy(&self) -> f64 {
        self.scale * self.a
    }

    /// Same record with another scale.
    pub fn rescaled(&self, scale: f64) -> Result<Self, InvariantError> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(InvariantError::NonPositiveScale {
                name: self.name.clone(),
                scale,
            });
        }
        Ok(ValuationRecord { scale, ..self.clone() })
    }

    fn check_dim(&self, n: usize) -> Result<(), InvariantError> {
        if self.dim() == n {
            Ok(())
        } else {
            Err(InvariantError::DimensionMismatch {
                name: self.name.clone(),
                expected: n,
                found: self.dim(),
            })
        }
    }

    /// Unscaled quantile threshold `t` with `|Δ_{>=t}| = τ|Δ|`.
    pub fn quantile_exact(&self, tau: f64) -> Result<Rational, InvariantError> {
        check_tau(tau)?;
        Ok(self.profile.quantile(tau)?)
    }

    /// Unscaled `p_1(Bc Δ_{>=Q(τ)})`; at `τ = 0` the maximal vanishing order.
    pub fn s_tau_exact(&self, tau: f64) -> Result<Rational, InvariantError> {
        let t = self.quantile_exact(tau)?;
        if tau == 0.0 {
            return Ok(t);
        }
        let mass = self.profile.upper_volume(&t);
        if mass.is_zero() {
            return Err(GeometryError::EmptySlice.into());
        }
        Ok(self.profile.upper_moment(&t) / mass)
    }
}

/// `σ = C · min_Δ p_1`.
pub fn sigma(v: &ValuationRecord) -> f64 {
    v.scale * to_f64(&v.profile.support().0)
}

/// `S_0 = C · max_Δ p_1`.
pub fn s0(v: &ValuationRecord) -> f64 {
    v.scale * to_f64(&v.profile.support().1)
}

pub fn s_tau(v: &ValuationRecord, tau: f64, n: usize) -> Result<f64, InvariantError> {
    v.check_dim(n)?;
    Ok(v.scale * to_f64(&v.s_tau_exact(tau)?))
}

/// `C · Q(τ)`.
pub fn quantile(v: &ValuationRecord, tau: f64) -> Result<f64, InvariantError> {
    Ok(v.scale * to_f64(&v.quantile_exact(tau)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileSample {
    pub tau: f64,
    pub q: f64,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantileCurve {
    pub valuation: String,
    pub n: usize,
    pub samples: Vec<QuantileSample>,
}

/// Which monotonicity law a curve breaks, and between which samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveDefect {
    TauNotIncreasing(usize),
    QuantileIncreases(usize),
    SIncreases(usize),
    TauSDecreases(usize),
}

impl QuantileCurve {
    pub fn sample(v: &ValuationRecord, n: usize, taus: &[f64]) -> Result<Self, InvariantError> {
        v.check_dim(n)?;
        let samples = taus
            .iter()
            .map(|&tau| {
                Ok(QuantileSample {
                    tau,
                    q: quantile(v, tau)?,
                    s: v.scale * to_f64(&v.s_tau_exact(tau)?),
                })
            })
            .collect::<Result<_, InvariantError>>()?;
        Ok(QuantileCurve {
            valuation: v.name.clone(),
            n,
            samples,
        })
    }

    /// Monotonicity defects beyond `tolerance` (relative to the larger value).
    pub fn defects(&self, tolerance: f64) -> Vec<CurveDefect> {
        let mut out = Vec::new();
        let tol = |a: f64, b: f64| tolerance * a.abs().max(b.abs()).max(1.0);
        for (i, w) in self.samples.windows(2).enumerate() {
            let (x, y) = (w[0], w[1]);
            if y.tau <= x.tau {
                out.push(CurveDefect::TauNotIncreasing(i + 1));
            }
            if y.q > x.q + tol(x.q, y.q) {
                out.push(CurveDefect::QuantileIncreases(i + 1));
            }
            if y.s > x.s + tol(x.s, y.s) {
                out.push(CurveDefect::SIncreases(i + 1));
            }
            let (a, b) = (x.tau * x.s, y.tau * y.s);
            if b < a - tol(a, b) {
                out.push(CurveDefect::TauSDecreases(i + 1));
            }
        }
        out
    }
}

/// Jumping numbers `j_{k,1} <= … <= j_{k,d_k}` of `kL` along a valuation.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpingData {
    k: usize,
    j: Vec<f64>,
}

impl JumpingData {
    pub fn new(k: usize, d_k: usize, j: Vec<f64>) -> Result<Self, InvariantError> {
        if k == 0 || d_k == 0 {
            return Err(InvariantError::ZeroCount);
        }
        if j.len() != d_k {
            return Err(InvariantError::JumpCountMismatch {
                expected: d_k,
                found: j.len(),
            });
        }
        for (index, x) in j.iter().enumerate() {
            if !(x.is_finite() && *x >= 0.0) {
                return Err(InvariantError::InvalidJump { index });
            }
            if index > 0 && *x < j[index - 1] {
                return Err(InvariantError::JumpsNotSorted { index });
            }
        }
        Ok(JumpingData { k, j })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d_k(&self) -> usize {
        self.j.len()
    }

    pub fn jumps(&self) -> &[f64] {
        &self.j
    }
}

/// `S̃_{k,m}`: the mean of the `m` smallest jumping numbers divided by `k`, plus the
/// largest one weighted by `((d_k − m)/m)(1 − (1 − m/d_k)^{1/n}) / k`.
pub fn discrete_s_tilde(data: &JumpingData, m: usize, n: usize) -> Result<f64, InvariantError> {
    let d_k = data.d_k();
    if m == 0 || m > d_k {
        return Err(InvariantError::MOutOfRange { m, d_k });
    }
    let (k, m_f, d_f) = (data.k as f64, m as f64, d_k as f64);
    let head: f64 = data.j[..m].iter().sum::<f64>() / (k * m_f);
    let weight = (d_f - m_f) / m_f * one_minus_pow_complement(m_f / d_f, 1.0 / n as f64);
    Ok(head + weight * data.j[d_k - 1] / k)
}

/// Minimum of `A/S` over candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub argmin: String,
    /// Candidates left out because their denominator vanished.
    pub skipped: Vec<String>,
}

fn minimize(
    candidates: &[ValuationRecord],
    n: usize,
    tau: f64,
    denominator: impl Fn(&ValuationRecord) -> Result<f64, InvariantError>,
) -> Result<Extremum, InvariantError> {
    check_tau(tau)?;
    if candidates.is_empty() {
        return Err(InvariantError::EmptyCandidates);
    }
    let mut best: Option<(f64, &str)> = None;
    let mut skipped = Vec::new();
    for v in candidates {
        v.check_dim(n)?;
        let s = denominator(v)?;
        if s == 0.0 {
            log::warn!("candidate {:?} has vanishing S at tau = {tau}; skipped", v.name);
            skipped.push(v.name.clone());
            continue;
        }
        let ratio = v.log_discrepancy() / s;
        if best.is_none_or(|(b, _)| ratio < b) {
            best = Some((ratio, &v.name));
        }
    }
    match best {
        Some((value, name)) => Ok(Extremum {
            value,
            argmin: name.into(),
            skipped,
        }),
        None => Err(InvariantError::UndefinedRatio { skipped }),
    }
}

/// `min A/S_τ` over the candidates (an upper bound for `δ_τ`).
pub fn delta_tau(candidates: &[ValuationRecord], tau: f64, n: usize) -> Result<Extremum, InvariantError> {
    minimize(candidates, n, tau, |v| s_tau(v, tau, n))
}

/// `S_τ` plus the `σ` correction of the big-class normalization.
pub fn s_tilde_tau(v: &ValuationRecord, tau: f64, n: usize) -> Result<f64, InvariantError> {
    check_tau(tau)?;
    let nf = n as f64;
    if tau == 0.0 {
        return Ok(s0(v) + sigma(v) / nf);
    }
    let correction = (1.0 - tau) / tau * one_minus_pow_complement(tau, 1.0 / nf) * sigma(v);
    Ok(s_tau(v, tau, n)? + correction)
}

/// `min A/S̃_τ` over the candidates; at `τ = 0` this is `α̃`.
pub fn delta_tilde_tau(candidates: &[ValuationRecord], tau: f64, n: usize) -> Result<Extremum, InvariantError> {
    minimize(candidates, n, tau, |v| s_tilde_tau(v, tau, n))
}

/// Level that `δ̃_τ` must clear: `n/(n+1)` at `τ = 0`, else `τ / (1 − (1−τ)^{(n+1)/n})`.
pub fn threshold(tau: f64, n: usize) -> f64 {
    let nf = n as f64;
    if tau == 0.0 {
        nf / (nf + 1.0)
    } else {
        tau / one_minus_pow_complement(tau, (nf + 1.0) / nf)
    }
}

/// `n / (n + 1 − τ^{1/n})`.
pub fn weak_threshold(tau: f64, n: usize) -> f64 {
    let nf = n as f64;
    nf / (nf + 1.0 - powf(tau, 1.0 / nf))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    StableCriterionMet,
    SemistableCriterionMet,
    Inconclusive,
}

impl Verdict {
    pub fn classify(value: f64, threshold: f64) -> Self {
        if value > threshold + VERDICT_TOLERANCE {
            Verdict::StableCriterionMet
        } else if value >= threshold - VERDICT_TOLERANCE {
            Verdict::SemistableCriterionMet
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::StableCriterionMet => "stable-criterion-met",
            Verdict::SemistableCriterionMet => "semistable-criterion-met",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub tau: f64,
    pub n: usize,
    pub delta_tau: f64,
    pub delta_tau_argmin: String,
    pub delta_tilde_tau: f64,
    pub threshold: f64,
    pub weak_threshold: f64,
    pub verdict: Verdict,
    /// The same comparison against the weaker interpolating bound.
    pub weak_verdict: Verdict,
    pub argmin: String,
    pub skipped: Vec<String>,
}

pub fn stability_report(candidates: &[ValuationRecord], tau: f64, n: usize) -> Result<StabilityReport, InvariantError> {
    let plain = delta_tau(candidates, tau, n)?;
    let tilde = delta_tilde_tau(candidates, tau, n)?;
    let thr = threshold(tau, n);
    let weak = weak_threshold(tau, n);
    let mut skipped = plain.skipped;
    for s in tilde.skipped {
        if !skipped.contains(&s) {
            skipped.push(s);
        }
    }
    Ok(StabilityReport {
        tau,
        n,
        delta_tau: plain.value,
        delta_tau_argmin: plain.argmin,
        delta_tilde_tau: tilde.value,
        threshold: thr,
        weak_threshold: weak,
        verdict: Verdict::classify(tilde.value, thr),
        weak_verdict: Verdict::classify(tilde.value, weak),
        argmin: tilde.argmin,
        skipped,
    })
}

/// Slack of the lower bound of `S_τ` by the translated-simplex comparison.
pub fn check_fujita_first(v: &ValuationRecord, tau: f64, n: usize) -> Result<f64, InvariantError> {
    check_tau(tau)?;
    let nf = n as f64;
    let (sig, s_one) = (sigma(v), s_tau(v, 1.0, n)?);
    if tau == 0.0 {
        return Ok(s0(v) - ((nf + 1.0) / nf * s_one - sig / nf));
    }
    let bound = one_minus_pow_complement(tau, (nf + 1.0) / nf) / tau * (s_one - sig) + sig;
    Ok(s_tau(v, tau, n)? - bound)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FujitaSecond {
    /// `S_τ − [(1 − τ^{1/n}) S_0 + τ^{1/n} S_1]`.
    pub interpolation: f64,
    /// `S_1 − [S_0 + nσ] / (n + 1)`.
    pub barycenter: f64,
}

pub fn check_fujita_second(v: &ValuationRecord, tau: f64, n: usize) -> Result<FujitaSecond, InvariantError> {
    check_tau(tau)?;
    let nf = n as f64;
    let (sig, top, s_one) = (sigma(v), s0(v), s_tau(v, 1.0, n)?);
    let w = powf(tau, 1.0 / nf);
    Ok(FujitaSecond {
        interpolation: s_tau(v, tau, n)? - ((1.0 - w) * top + w * s_one),
        barycenter: s_one - (top / (nf + 1.0) + nf * sig / (nf + 1.0)),
    })
}
