//! Closed forms for the exceptional divisor over an Eckardt point of a cubic
//! surface, and their comparison with the generic polytope pipeline.
//!
//! The body is the quadrilateral `(0,0), (1,1), (3,0), (1,−1)`: its slice at
//! height `t` has width `2t` on `[0,1]` and `3 − t` on `[1,3]`, total area 3.

use alloc::vec::Vec;

use crate::convexbody::ConvexBody;
use crate::invariants::{s_tau, threshold, InvariantError, ValuationRecord};
use crate::number::{int, powf, sqrt};

pub const A: f64 = 2.0;
pub const SIGMA: f64 = 0.0;
pub const S0: f64 = 3.0;
pub const N: usize = 2;
/// Where the quantile crosses the kink of the width function.
pub const TAU_STAR: f64 = 2.0 / 3.0;
/// Smallest `τ` evaluated by the scans; the `τ → 0` limit is `S_0`.
pub const TAU_FLOOR: f64 = 1e-6;

pub fn quadrilateral() -> ConvexBody {
    ConvexBody::build(
        alloc::vec![
            alloc::vec![int(0), int(0)],
            alloc::vec![int(1), int(1)],
            alloc::vec![int(3), int(0)],
            alloc::vec![int(1), int(-1)],
        ],
        2,
    )
    .expect("quadrilateral is full-dimensional")
}

pub fn valuation() -> ValuationRecord {
    ValuationRecord::new("eckardt", A, 1.0, quadrilateral()).expect("A > 0")
}

pub fn eck_t_of_tau(tau: f64) -> f64 {
    if tau < TAU_STAR {
        3.0 - sqrt(6.0 * tau)
    } else {
        sqrt(3.0 * (1.0 - tau))
    }
}

pub fn eck_s_tau(tau: f64) -> f64 {
    if tau == 0.0 {
        S0
    } else if tau < TAU_STAR {
        3.0 - 2.0 / 3.0 * sqrt(6.0 * tau)
    } else {
        2.0 / (3.0 * tau) * (2.0 - sqrt(3.0) * powf(1.0 - tau, 1.5))
    }
}

/// `A / S_τ`; `2/3` at `τ = 0`.
pub fn eck_ratio(tau: f64) -> f64 {
    A / eck_s_tau(tau)
}

/// `∫_t^3 s dμ` for the normalized slice measure, i.e. `τ S_τ` at `t = t(τ)`.
pub fn eck_upper_moment(t: f64) -> f64 {
    if t <= 1.0 {
        4.0 / 3.0 - 2.0 / 9.0 * t * t * t
    } else {
        (3.0 - t) * (3.0 - t) * (2.0 * t + 3.0) / 18.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityScan {
    pub min_margin: f64,
    pub argmin_tau: f64,
}

fn scan_grid(grid: usize) -> Vec<f64> {
    let mut taus: Vec<f64> = (1..=grid).map(|i| i as f64 / grid as f64).collect();
    taus.extend([TAU_STAR, TAU_FLOOR, 1.0]);
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    taus
}

/// Smallest `A/S_τ − threshold(τ, 2)` over a uniform grid on `(0, 1]` together with
/// the kink and both ends.
pub fn eck_verify_stability(grid: usize) -> StabilityScan {
    let mut best = StabilityScan {
        min_margin: f64::INFINITY,
        argmin_tau: f64::NAN,
    };
    for tau in scan_grid(grid.max(2)) {
        let margin = eck_ratio(tau) - threshold(tau, N);
        if margin < best.min_margin {
            best = StabilityScan {
                min_margin: margin,
                argmin_tau: tau,
            };
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossValidation {
    pub max_abs_error: f64,
    pub argmax_tau: f64,
    pub points: usize,
}

/// Largest deviation of the generic `S_τ` on [`quadrilateral`] from [`eck_s_tau`]
/// over `grid` equally spaced `τ ∈ [0, 1]`.
pub fn eck_cross_validate(grid: usize) -> Result<CrossValidation, InvariantError> {
    let v = valuation();
    let grid = grid.max(2);
    let mut out = CrossValidation {
        max_abs_error: 0.0,
        argmax_tau: 0.0,
        points: grid,
    };
    for i in 0..grid {
        let tau = i as f64 / (grid - 1) as f64;
        let err = (s_tau(&v, tau, N)? - eck_s_tau(tau)).abs();
        if err > out.max_abs_error {
            out.max_abs_error = err;
            out.argmax_tau = tau;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub tau: f64,
    pub ratio: f64,
    pub threshold: f64,
    pub margin: f64,
}

/// `samples` rows from `τ = TAU_FLOOR` to `τ = 1`.
pub fn eck_curve_table(samples: usize) -> Vec<CurveRow> {
    let samples = samples.max(2);
    (0..samples)
        .map(|i| {
            let tau = if i + 1 == samples {
                1.0
            } else {
                TAU_FLOOR + (1.0 - TAU_FLOOR) * i as f64 / (samples - 1) as f64
            };
            let (ratio, thr) = (eck_ratio(tau), threshold(tau, N));
            CurveRow {
                tau,
                ratio,
                threshold: thr,
                margin: ratio - thr,
            }
        })
        .collect()
}
