//! The two sub-barycenter inequalities generalizing Neumann–Hammer:
//!
//! ```text
//! (p(Bc K_{>=t}) − min p) / (p(Bc K) − min p)  >=  (1 − (1 − τ)^{(n+1)/n}) / τ,   τ = |K_{>=t}|/|K|
//! (max p − p(Bc K_{<=t})) / (max p − p(Bc K))  >=  (1 − (1 − τ)^{(n+1)/n}) / τ,   τ = |K_{<=t}|/|K|
//! ```
//!
//! The first is meaningful for `t ∈ [min p, max p)`, the second for `t ∈ (min p, max p]`.

use super::{ConvexBody, Direction, GeometryError, Side, SliceSpec};
use crate::number::{one_minus_pow_complement, to_f64, Rational};

/// One side of the inequality at a given `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HammerCheck {
    pub tau: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// `(1 − (1 − τ)^{(n+1)/n}) / τ`, which tends to `(n+1)/n` as `τ → 0`.
pub fn hammer_rhs(tau: f64, n: usize) -> f64 {
    let a = (n as f64 + 1.0) / n as f64;
    if tau == 0.0 {
        a
    } else {
        one_minus_pow_complement(tau, a) / tau
    }
}

impl ConvexBody {
    /// Evaluates the inequality for the slice on `side` of `t`. The ratio on the
    /// left is computed exactly and rounded once.
    pub fn hammer_check(&self, direction: &Direction, t: &Rational, side: Side) -> Result<HammerCheck, GeometryError> {
        let (lo, hi) = self.support(direction)?;
        let slice = self
            .clip(&SliceSpec::new(direction.clone(), t.clone(), side))?
            .ok_or(GeometryError::EmptySlice)?;
        let whole = direction.eval(self.barycenter());
        let part = direction.eval(slice.barycenter());
        let lhs = match side {
            Side::Ge => (part - &lo) / (whole - &lo),
            Side::Le => (&hi - part) / (&hi - whole),
        };
        let tau = to_f64(&(slice.volume() / self.volume()));
        let lhs = to_f64(&lhs);
        let rhs = hammer_rhs(tau, self.dim());
        Ok(HammerCheck {
            tau,
            lhs,
            rhs,
            slack: lhs - rhs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{int, rat};
    use alloc::vec;

    #[test]
    fn triangle_closed_form() {
        // conv{0, e1, e2}, p = x1: K_{>=t} is a scaled copy with τ = (1−t)² and
        // p(Bc K_{>=t}) = t + (1−t)/3, so the left side is 1 + 2t.
        let tri = ConvexBody::standard_simplex(2).unwrap();
        for k in 0..8 {
            let t = rat(k, 8);
            let tf = k as f64 / 8.0;
            let c = tri.hammer_check(&Direction::Axis(0), &t, Side::Ge).unwrap();
            let tau = (1.0 - tf) * (1.0 - tf);
            assert!((c.tau - tau).abs() < 1e-15);
            assert!((c.lhs - (1.0 + 2.0 * tf)).abs() < 1e-15);
            let rhs = (1.0 - (1.0 - tau).powf(1.5)) / tau;
            assert!((c.rhs - rhs).abs() < 1e-12);
            assert!(c.slack >= 0.0);
        }
    }

    #[test]
    fn endpoints() {
        let sq = ConvexBody::unit_cube(2).unwrap();
        let full = sq.hammer_check(&Direction::Axis(1), &int(0), Side::Ge).unwrap();
        assert_eq!((full.tau, full.lhs), (1.0, 1.0));
        assert!(full.slack.abs() < 1e-15);
        assert_eq!(
            sq.hammer_check(&Direction::Axis(1), &int(1), Side::Ge),
            Err(GeometryError::EmptySlice)
        );
        assert_eq!(
            sq.hammer_check(&Direction::Axis(1), &int(0), Side::Le),
            Err(GeometryError::EmptySlice)
        );
        assert_eq!(hammer_rhs(0.0, 3), 4.0 / 3.0);
        assert!((hammer_rhs(1e-300, 3) - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn lower_form_mirrors_upper_form() {
        // Reflecting x1 ↦ −x1 swaps the two inequalities.
        let pts = vec![
            vec![int(0), int(0)],
            vec![int(2), int(1)],
            vec![rat(1, 2), int(2)],
            vec![int(3), rat(-1, 3)],
        ];
        let body = ConvexBody::build(pts.clone(), 2).unwrap();
        let mirror =
            ConvexBody::build(pts.into_iter().map(|p| vec![-p[0].clone(), p[1].clone()]).collect(), 2).unwrap();
        for k in 1..10 {
            let t = rat(3 * k, 10);
            let a = body.hammer_check(&Direction::Axis(0), &t, Side::Ge).unwrap();
            let b = mirror.hammer_check(&Direction::Axis(0), &-t, Side::Le).unwrap();
            assert_eq!(a, b);
        }
    }
}
