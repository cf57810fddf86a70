//! Exact piecewise-polynomial form of `t ↦ |K_{>=t}|` and its monotone inversion.
//!
//! Between two consecutive vertex levels of `p` the upper-slice volume is a
//! polynomial of degree at most `n` in `t`. Each piece is recovered exactly by
//! interpolating `n + 1` exact clip volumes, so evaluating the profile at any
//! rational `t` equals clipping the body there. The first moment of `p` over
//! an upper slice follows by integrating the same pieces, since
//! `∫_{K_{>=t}} p = t·|K_{>=t}| + ∫_t^{max p} |K_{>=s}| ds`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{ConvexBody, Direction, GeometryError, SliceSpec};
use crate::number::{common_denominator, from_f64, to_f64, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeProfile {
    direction: Direction,
    levels: Vec<Rational>,
    volumes: Vec<Rational>,
    /// Monomial coefficients of piece `j` in the local variable `x = (t - a)/(b - a)`.
    pieces: Vec<Vec<Rational>>,
    /// `∫_{levels[j]}^{max p} |K_{>=s}| ds`.
    tails: Vec<Rational>,
}

/// Bracket width, relative to the support oscillation, at which bisection stops.
pub const QUANTILE_RELATIVE_WIDTH: f64 = 1e-12;

impl VolumeProfile {
    pub fn new(body: &ConvexBody, direction: &Direction) -> Result<Self, GeometryError> {
        direction.check(body.dim())?;
        let mut levels: Vec<Rational> = body.vertices().iter().map(|v| direction.eval(v)).collect();
        levels.sort();
        levels.dedup();

        let upper = |t: &Rational| -> Result<Rational, GeometryError> {
            Ok(body
                .clip(&SliceSpec::ge(direction.clone(), t.clone()))?
                .map(|b| b.volume().clone())
                .unwrap_or_else(Rational::zero))
        };

        let last = levels.len() - 1;
        let mut volumes = Vec::with_capacity(levels.len());
        for (j, t) in levels.iter().enumerate() {
            volumes.push(if j == 0 {
                body.volume().clone()
            } else if j == last {
                Rational::zero()
            } else {
                upper(t)?
            });
        }

        let n = body.dim();
        let degree = Rational::from_integer((n as i64).into());
        let mut pieces = Vec::with_capacity(last);
        for j in 0..last {
            let (a, b) = (&levels[j], &levels[j + 1]);
            let nodes: Vec<Rational> = (0..=n)
                .map(|k| Rational::from_integer((k as i64).into()) / &degree)
                .collect();
            let mut values = Vec::with_capacity(n + 1);
            for (k, x) in nodes.iter().enumerate() {
                values.push(if k == 0 {
                    volumes[j].clone()
                } else if k == n {
                    volumes[j + 1].clone()
                } else {
                    upper(&(a + (b - a) * x))?
                });
            }
            pieces.push(interpolate(&nodes, values));
        }

        let mut tails = alloc::vec![Rational::zero(); levels.len()];
        for j in (0..last).rev() {
            let width = &levels[j + 1] - &levels[j];
            tails[j] = &tails[j + 1] + width * antiderivative(&pieces[j], &Rational::one());
        }

        Ok(VolumeProfile {
            direction: direction.clone(),
            levels,
            volumes,
            pieces,
            tails,
        })
    }

    pub fn direction(&self) -> &Direction {
        &self.direction
    }

    /// Distinct values of `p` over the vertices, ascending.
    pub fn levels(&self) -> &[Rational] {
        &self.levels
    }

    /// `|K_{>=level}|` for each level.
    pub fn level_volumes(&self) -> &[Rational] {
        &self.volumes
    }

    pub fn total(&self) -> &Rational {
        &self.volumes[0]
    }

    pub fn support(&self) -> (Rational, Rational) {
        (self.levels[0].clone(), self.levels[self.levels.len() - 1].clone())
    }

    fn locate(&self, t: &Rational) -> Option<(usize, Rational)> {
        let last = self.levels.len() - 1;
        if *t < self.levels[0] || *t > self.levels[last] {
            return None;
        }
        let j = match self.levels.binary_search(t) {
            Ok(j) => j.min(last - 1),
            Err(j) => j - 1,
        };
        let (a, b) = (&self.levels[j], &self.levels[j + 1]);
        Some((j, (t - a) / (b - a)))
    }

    /// Exact `|K_{>=t}|`; clamps to `|K|` below the support and `0` above it.
    pub fn upper_volume(&self, t: &Rational) -> Rational {
        if *t <= self.levels[0] {
            return self.total().clone();
        }
        match self.locate(t) {
            Some((j, x)) => horner(&self.pieces[j], &x),
            None => Rational::zero(),
        }
    }

    /// Exact `∫_{K_{>=t}} p`, so that `upper_moment(t) / upper_volume(t)` is the
    /// value of `p` at the barycenter of the upper slice. Clamps like
    /// [`upper_volume`](Self::upper_volume).
    pub fn upper_moment(&self, t: &Rational) -> Rational {
        let t = if *t < self.levels[0] { &self.levels[0] } else { t };
        let Some((j, x)) = self.locate(t) else {
            return Rational::zero();
        };
        let (a, b) = (&self.levels[j], &self.levels[j + 1]);
        let coeffs = &self.pieces[j];
        let rest = (b - a) * (antiderivative(coeffs, &Rational::one()) - antiderivative(coeffs, &x));
        t * horner(coeffs, &x) + rest + &self.tails[j + 1]
    }

    /// Exact `(n−1)`-volume of the cross-section `{p = t}` measured against `dp`,
    /// i.e. `−d/dt |K_{>=t}|`. At a vertex level the piece to the right is used,
    /// except at the top of the support.
    pub fn cross_section(&self, t: &Rational) -> Rational {
        let Some((j, x)) = self.locate(t) else {
            return Rational::zero();
        };
        let (a, b) = (&self.levels[j], &self.levels[j + 1]);
        let coeffs = &self.pieces[j];
        let mut acc = Rational::zero();
        for k in (1..coeffs.len()).rev() {
            acc = acc * &x + &coeffs[k] * Rational::from_integer((k as i64).into());
        }
        -acc / (b - a)
    }

    /// The unique `t` with `|K_{>=t}| = τ|K|`, found by bisection on the exact piece
    /// that brackets the target, to a width of `1e-12 · osc p`.
    pub fn quantile(&self, tau: f64) -> Result<Rational, GeometryError> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(GeometryError::TauOutOfRange(tau));
        }
        let (lo_t, hi_t) = self.support();
        if tau == 0.0 {
            return Ok(hi_t);
        }
        if tau == 1.0 {
            return Ok(lo_t);
        }
        let target = from_f64(tau).expect("finite") * self.total();
        let j = (0..self.pieces.len())
            .find(|&j| self.volumes[j + 1] <= target)
            .expect("target lies between |K| and 0");
        if self.volumes[j] == target {
            return Ok(self.levels[j].clone());
        }
        if self.volumes[j + 1] == target {
            return Ok(self.levels[j + 1].clone());
        }

        let (a, b) = (&self.levels[j], &self.levels[j + 1]);
        let rel = to_f64(&((b - a) / (&hi_t - &lo_t)));
        let steps = libm::ceil(libm::log2(rel / QUANTILE_RELATIVE_WIDTH)).max(0.0) as u32 + 1;
        // integer form of piece − target: only its sign at dyadic points matters
        let mut shifted = self.pieces[j].clone();
        shifted[0] -= &target;
        let scale = common_denominator(&shifted);
        let ints: Vec<BigInt> = shifted.iter().map(|c| (c * &scale).to_integer()).collect();

        // the bracket is [lo, lo + 1] / 2^k
        let mut lo = BigInt::zero();
        let mut k = 0usize;
        for _ in 0..steps {
            k += 1;
            lo <<= 1;
            let mid = &lo + 1;
            let v = dyadic_sign(&ints, &mid, k);
            if v.is_zero() {
                return Ok(a + (b - a) * Rational::new(mid, BigInt::one() << k));
            }
            if v.is_positive() {
                lo = mid;
            }
        }
        let denom = BigInt::one() << k;
        let (x_lo, x_hi) = (Rational::new(lo.clone(), denom.clone()), Rational::new(lo + 1, denom));
        // any point of the final bracket is within tolerance; the simplest keeps later arithmetic cheap
        Ok(simplest_between(&(a + (b - a) * x_lo), &(a + (b - a) * x_hi)))
    }
}

/// The rational with the smallest denominator in `[lo, hi]`, by continued fractions.
fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    let floor = lo.floor();
    if &floor == lo {
        return floor;
    }
    let next = &floor + Rational::one();
    if &next <= hi {
        return next;
    }
    floor.clone() + simplest_between(&(hi - &floor).recip(), &(lo - &floor).recip()).recip()
}

/// `2^{k·d} · q(m / 2^k)` for an integer polynomial `q` of degree `d`; same sign as `q(m / 2^k)`.
fn dyadic_sign(q: &[BigInt], m: &BigInt, k: usize) -> BigInt {
    let d = q.len() - 1;
    let mut acc = q[d].clone();
    for i in (0..d).rev() {
        acc = acc * m + (&q[i] << (k * (d - i)));
    }
    acc
}

/// `∫_0^x` of the polynomial with monomial coefficients `coeffs`.
fn antiderivative(coeffs: &[Rational], x: &Rational) -> Rational {
    coeffs.iter().enumerate().rev().fold(Rational::zero(), |acc, (k, c)| {
        (acc + c / Rational::from_integer(((k + 1) as i64).into())) * x
    })
}

fn horner(coeffs: &[Rational], x: &Rational) -> Rational {
    coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

/// Newton divided differences, expanded to monomial coefficients.
fn interpolate(nodes: &[Rational], mut values: Vec<Rational>) -> Vec<Rational> {
    let m = nodes.len();
    for level in 1..m {
        for i in (level..m).rev() {
            values[i] = (&values[i] - &values[i - 1]) / (&nodes[i] - &nodes[i - level]);
        }
    }
    let mut poly: Vec<Rational> = alloc::vec![values[m - 1].clone()];
    for k in (0..m - 1).rev() {
        // poly <- poly * (x - nodes[k]) + values[k]
        let mut next = alloc::vec![Rational::zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * &nodes[k];
        }
        next[0] += &values[k];
        poly = next;
    }
    poly
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{int, rat};
    use alloc::vec;

    #[test]
    fn interpolation_recovers_cubic() {
        // 2 - x + 3x^3
        let p = |x: &Rational| int(2) - x + int(3) * x * x * x;
        let nodes: Vec<Rational> = (0..4).map(|k| rat(k, 3)).collect();
        let values = nodes.iter().map(p).collect();
        let c = interpolate(&nodes, values);
        assert_eq!(c, vec![int(2), int(-1), int(0), int(3)]);
        assert_eq!(horner(&c, &rat(5, 7)), p(&rat(5, 7)));
    }

    #[test]
    fn simplest_rational_in_bracket() {
        assert_eq!(simplest_between(&rat(3, 10), &rat(4, 10)), rat(1, 3));
        assert_eq!(simplest_between(&rat(-7, 4), &rat(-8, 5)), rat(-5, 3));
        assert_eq!(simplest_between(&rat(1, 2), &rat(1, 2)), rat(1, 2));
        assert_eq!(simplest_between(&rat(1, 2), &rat(5, 2)), int(1));
        // brute force: no smaller denominator fits
        for (lo, hi) in [(rat(314159, 100000), rat(314160, 100000)), (rat(-2, 7), rat(-27, 100))] {
            let q = simplest_between(&lo, &hi);
            assert!(lo <= q && q <= hi);
            let d: i64 = q.denom().try_into().unwrap();
            for den in 1..d {
                let n = (lo.clone() * int(den)).ceil();
                assert!(n / int(den) > hi, "denominator {den} fits");
            }
        }
    }
}
