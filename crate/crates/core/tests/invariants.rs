use proptest::prelude::*;
use subbary_core::invariants::{
    check_fujita_first, check_fujita_second, delta_tau, delta_tilde_tau, discrete_s_tilde, s0, s_tau, sigma,
    stability_report, threshold, weak_threshold, InvariantError, JumpingData, QuantileCurve, ValuationRecord, Verdict,
};
use subbary_core::number::{int, rat, to_f64};
use subbary_core::{ConvexBody, Point};

const CLOSE: f64 = 1e-12;

fn rhombus() -> ConvexBody {
    ConvexBody::build(
        vec![
            vec![int(0), int(0)],
            vec![int(1), int(1)],
            vec![int(3), int(0)],
            vec![int(1), int(-1)],
        ],
        2,
    )
    .unwrap()
}

fn eckardt() -> ValuationRecord {
    ValuationRecord::new("eckardt", 2.0, 1.0, rhombus()).unwrap()
}

/// Sutherland–Hodgman clip of a counter-clockwise polygon to `x >= t`.
fn clip_right(poly: &[(f64, f64)], t: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let (ina, inb) = (a.0 >= t, b.0 >= t);
        if ina {
            out.push(a);
        }
        if ina != inb {
            let l = (t - a.0) / (b.0 - a.0);
            out.push((t, a.1 + l * (b.1 - a.1)));
        }
    }
    out
}

fn area_centroid(poly: &[(f64, f64)]) -> (f64, f64) {
    let (mut a2, mut cx) = (0.0, 0.0);
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        let c = p.0 * q.1 - q.0 * p.1;
        a2 += c;
        cx += (p.0 + q.0) * c;
    }
    (a2 / 2.0, cx / (3.0 * a2))
}

/// `S_τ` of a planar body by floating-point bisection on clipped areas.
fn planar_s_tau(body: &ConvexBody, tau: f64) -> f64 {
    let mut pts: Vec<(f64, f64)> = body.vertices().iter().map(|v| (to_f64(&v[0]), to_f64(&v[1]))).collect();
    let c = pts.iter().fold((0.0, 0.0), |s, p| (s.0 + p.0, s.1 + p.1));
    let c = (c.0 / pts.len() as f64, c.1 / pts.len() as f64);
    pts.sort_by(|p, q| (p.1 - c.1).atan2(p.0 - c.0).total_cmp(&(q.1 - c.1).atan2(q.0 - c.0)));
    let total = area_centroid(&pts).0;
    let (mut lo, mut hi) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p.0), h.max(p.0)));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if area_centroid(&clip_right(&pts, mid)).0 > tau * total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    area_centroid(&clip_right(&pts, 0.5 * (lo + hi))).1
}

fn okounkov(dim: usize) -> impl Strategy<Value = ConvexBody> {
    let coord = (0i64..=16).prop_map(|k| rat(k, 4));
    let points = prop::collection::vec(prop::collection::vec(coord, dim), dim + 1..=dim + 5);
    (points, 0i64..=8).prop_filter_map("full-dimensional", move |(pts, shift)| {
        let pts: Vec<Point> = pts
            .into_iter()
            .map(|mut p| {
                p[0] += rat(shift, 4);
                p
            })
            .collect();
        ConvexBody::build(pts, dim).ok()
    })
}

#[test]
fn s_tau_examples() {
    let v = eckardt();
    assert!((s_tau(&v, 1.0, 2).unwrap() - 4.0 / 3.0).abs() < CLOSE);
    assert!((s_tau(&v, 2.0 / 3.0, 2).unwrap() - 5.0 / 3.0).abs() < 1e-11);
    assert_eq!(s_tau(&v, 0.0, 2).unwrap(), 3.0);
    assert!((s_tau(&v, 1e-8, 2).unwrap() - 3.0).abs() < 1e-3);
    assert_eq!((sigma(&v), s0(&v)), (0.0, 3.0));
    assert!(matches!(s_tau(&v, 2.0, 2), Err(InvariantError::TauOutOfRange(_))));
    assert!(matches!(
        s_tau(&v, 0.5, 3),
        Err(InvariantError::DimensionMismatch { .. })
    ));
}

#[test]
fn sigma_and_s0_follow_translation_and_scale() {
    let moved = ValuationRecord::new("moved", 2.0, 1.0, rhombus().translated(&[int(1), int(0)])).unwrap();
    assert_eq!((sigma(&moved), s0(&moved)), (1.0, 4.0));
    let doubled = eckardt().rescaled(2.0).unwrap();
    assert_eq!((sigma(&doubled), s0(&doubled)), (0.0, 6.0));
    assert_eq!(doubled.log_discrepancy(), 4.0);
}

#[test]
fn delta_examples() {
    let v = [eckardt()];
    assert!((delta_tau(&v, 1.0, 2).unwrap().value - 1.5).abs() < CLOSE);
    assert!((delta_tau(&v, 0.0, 2).unwrap().value - 2.0 / 3.0).abs() < CLOSE);

    let square = ConvexBody::unit_cube(2).unwrap();
    // S_1 = 1/2 for the unit square, so A = 0.45 and 0.55 give ratios 0.9 and 1.1
    let first = ValuationRecord::new("first", 0.45, 1.0, square.clone()).unwrap();
    let second = ValuationRecord::new("second", 0.55, 1.0, square.clone()).unwrap();
    let e = delta_tau(&[second.clone(), first.clone()], 1.0, 2).unwrap();
    assert!((e.value - 0.9).abs() < CLOSE);
    assert_eq!(e.argmin, "first");
    let twin = ValuationRecord::new("twin", 0.45, 1.0, square).unwrap();
    assert_eq!(delta_tau(&[first, twin], 1.0, 2).unwrap().argmin, "first");
    assert_eq!(delta_tau(&[], 0.5, 2).unwrap_err(), InvariantError::EmptyCandidates);
}

#[test]
fn delta_tilde_examples() {
    // σ = 1, S_0 = 3: a triangle with first coordinate spanning [1, 3]
    let body = ConvexBody::build(
        vec![vec![int(1), int(0)], vec![int(3), int(0)], vec![int(1), int(1)]],
        2,
    )
    .unwrap();
    let v = [ValuationRecord::new("v", 2.0, 1.0, body).unwrap()];
    assert!((delta_tilde_tau(&v, 0.0, 2).unwrap().value - 4.0 / 7.0).abs() < CLOSE);
    assert_eq!(
        delta_tilde_tau(&v, 1.0, 2).unwrap().value,
        delta_tau(&v, 1.0, 2).unwrap().value
    );
    for tau in [0.1, 0.5, 0.9] {
        assert!(delta_tilde_tau(&v, tau, 2).unwrap().value < delta_tau(&v, tau, 2).unwrap().value);
    }
}

#[test]
fn threshold_examples() {
    assert!((threshold(0.0, 2) - 2.0 / 3.0).abs() < CLOSE);
    for n in 1..=6 {
        assert!((threshold(1.0, n) - 1.0).abs() < CLOSE);
        assert!((weak_threshold(1.0, n) - 1.0).abs() < CLOSE);
    }
    assert!((threshold(0.5, 2) - 0.5 / (1.0 - 0.5f64.powf(1.5))).abs() < CLOSE);
    assert!((threshold(0.5, 2) - 0.773_459).abs() < 1e-6);
}

#[test]
fn thresholds_are_ordered_and_continuous() {
    for n in 1..=6 {
        let mut prev = threshold(0.0, n);
        for i in 1..=1024 {
            let tau = i as f64 / 1024.0;
            let t = threshold(tau, n);
            assert!(t <= weak_threshold(tau, n) + CLOSE, "n={n} tau={tau}");
            assert!((t - prev).abs() < 1e-2);
            prev = t;
        }
        assert!((threshold(1e-12, n) - threshold(0.0, n)).abs() < 1e-9);
    }
}

#[test]
fn report_examples() {
    let r = stability_report(&[eckardt()], 0.5, 2).unwrap();
    let closed = 6.0 / (9.0 - 2.0 * 3f64.sqrt());
    assert!((r.delta_tilde_tau - closed).abs() < 1e-10);
    assert_eq!(r.verdict, Verdict::StableCriterionMet);
    assert_eq!(r.argmin, "eckardt");

    assert_eq!(Verdict::classify(0.8, 0.8), Verdict::SemistableCriterionMet);
    assert_eq!(Verdict::classify(0.7, 0.8), Verdict::Inconclusive);
    assert_eq!(Verdict::classify(0.9, 0.8), Verdict::StableCriterionMet);
}

#[test]
fn discrete_examples() {
    let data = JumpingData::new(1, 4, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
    let expected = 0.5 + (1.0 - 0.5f64.sqrt()) * 3.0;
    assert!((discrete_s_tilde(&data, 2, 2).unwrap() - expected).abs() < CLOSE);
    assert!((discrete_s_tilde(&data, 4, 2).unwrap() - 1.5).abs() < CLOSE);
    let doubled = JumpingData::new(2, 4, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
    assert!((discrete_s_tilde(&doubled, 2, 2).unwrap() - expected / 2.0).abs() < CLOSE);
    assert!(matches!(
        discrete_s_tilde(&data, 5, 2),
        Err(InvariantError::MOutOfRange { .. })
    ));
    assert!(matches!(
        JumpingData::new(1, 3, vec![2.0, 1.0, 3.0]),
        Err(InvariantError::JumpsNotSorted { index: 1 })
    ));
}

#[test]
fn fujita_examples() {
    let v = eckardt();
    assert!((check_fujita_first(&v, 0.0, 2).unwrap() - 1.0).abs() < CLOSE);
    let expected = 5.0 / 3.0 - 1.5 * (1.0 - (1.0f64 / 3.0).powf(1.5)) * 4.0 / 3.0;
    assert!((check_fujita_first(&v, 2.0 / 3.0, 2).unwrap() - expected).abs() < 1e-10);
    assert!(check_fujita_first(&v, 1.0, 2).unwrap().abs() < CLOSE);

    let second = check_fujita_second(&v, 2.0 / 3.0, 2).unwrap();
    let expected = 5.0 / 3.0 - (3.0 - 5.0 / 3.0 * (2.0f64 / 3.0).sqrt());
    assert!((second.interpolation - expected).abs() < 1e-10);
    assert!((second.barycenter - 1.0 / 3.0).abs() < CLOSE);
    for tau in [0.0, 1.0] {
        assert!(check_fujita_second(&v, tau, 2).unwrap().interpolation.abs() < CLOSE);
    }
}

#[test]
fn zero_log_discrepancy_needs_lenient_constructor() {
    assert!(matches!(
        ValuationRecord::new("lc", 0.0, 1.0, rhombus()),
        Err(InvariantError::NonPositiveA { .. })
    ));
    assert!(ValuationRecord::new_lenient("lc", 0.0, 1.0, rhombus()).is_ok());
    assert!(matches!(
        ValuationRecord::new("bad", 1.0, 0.0, rhombus()),
        Err(InvariantError::NonPositiveScale { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn planar_s_tau_matches_float_oracle(body in okounkov(2), tau in 0.01f64..=1.0) {
        let v = ValuationRecord::new("v", 1.0, 1.0, body.clone()).unwrap();
        let exact = s_tau(&v, tau, 2).unwrap();
        prop_assert!((exact - planar_s_tau(&body, tau)).abs() < 1e-9 * exact.abs().max(1.0));
    }

    #[test]
    fn curves_are_monotone(body in (2usize..=4).prop_flat_map(okounkov)) {
        let n = body.dim();
        let v = ValuationRecord::new("v", 1.0, 1.0, body).unwrap();
        let taus: Vec<f64> = (1..=64).map(|i| i as f64 / 64.0).collect();
        let curve = QuantileCurve::sample(&v, n, &taus).unwrap();
        prop_assert!(curve.defects(1e-12).is_empty(), "{:?}", curve.defects(1e-12));
    }

    #[test]
    fn tilde_agrees_at_one_and_for_zero_sigma(body in (2usize..=4).prop_flat_map(okounkov), tau in 0.0f64..=1.0) {
        let n = body.dim();
        let v = [ValuationRecord::new("v", 1.5, 1.0, body.clone()).unwrap()];
        let one = (delta_tilde_tau(&v, 1.0, n).unwrap().value, delta_tau(&v, 1.0, n).unwrap().value);
        prop_assert!((one.0 - one.1).abs() <= CLOSE);
        let (lo, _) = body.support(&subbary_core::Direction::Axis(0)).unwrap();
        let mut shift = vec![int(0); n];
        shift[0] = -lo;
        let based = [ValuationRecord::new("v", 1.5, 1.0, body.translated(&shift)).unwrap()];
        prop_assert_eq!(sigma(&based[0]), 0.0);
        let pair = (delta_tilde_tau(&based, tau, n).unwrap().value, delta_tau(&based, tau, n).unwrap().value);
        prop_assert!((pair.0 - pair.1).abs() <= CLOSE);
    }

    #[test]
    fn rescaling_leaves_ratios_and_verdicts(body in (2usize..=3).prop_flat_map(okounkov), c in 0.1f64..10.0, tau in 0.0f64..=1.0) {
        let n = body.dim();
        let v = ValuationRecord::new("v", 0.8, 1.0, body).unwrap();
        let w = v.rescaled(c).unwrap();
        let (a, b) = (stability_report(&[v], tau, n).unwrap(), stability_report(&[w], tau, n).unwrap());
        prop_assert!((a.delta_tau - b.delta_tau).abs() <= CLOSE * a.delta_tau.max(1.0));
        prop_assert!((a.delta_tilde_tau - b.delta_tilde_tau).abs() <= CLOSE * a.delta_tilde_tau.max(1.0));
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert_eq!(a.argmin, b.argmin);
    }

    #[test]
    fn fujita_bounds_hold(body in (2usize..=4).prop_flat_map(okounkov), tau in 0.0f64..=1.0) {
        let n = body.dim();
        let v = ValuationRecord::new("v", 1.0, 1.0, body).unwrap();
        prop_assert!(check_fujita_first(&v, tau, n).unwrap() >= -1e-9);
        let second = check_fujita_second(&v, tau, n).unwrap();
        prop_assert!(second.interpolation >= -1e-9 && second.barycenter >= -1e-9);
    }

    #[test]
    fn stable_criterion_implies_delta_at_least_one(
        bodies in prop::collection::vec(okounkov(2), 1..=3),
        a in prop::collection::vec(0.5f64..4.0, 3),
        tau in 0.0f64..=1.0,
    ) {
        let candidates: Vec<ValuationRecord> = bodies
            .into_iter()
            .zip(&a)
            .enumerate()
            .map(|(i, (b, &a))| ValuationRecord::new(format!("v{i}"), a, 1.0, b).unwrap())
            .collect();
        let report = stability_report(&candidates, tau, 2).unwrap();
        if report.verdict == Verdict::StableCriterionMet {
            prop_assert!(delta_tau(&candidates, 1.0, 2).unwrap().value > 1.0 - 1e-9);
        }
    }
}
