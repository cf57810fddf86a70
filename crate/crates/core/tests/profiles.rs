use proptest::prelude::*;
use subbary_core::number::{int, rat};
use subbary_core::profile::{
    body_to_profile, check_functional_nh, check_weighted_nh, moments, proof_diagnostics, ConcaveProfile, ProfileError,
};
use subbary_core::{ConvexBody, Direction, Side};

const CLOSE: f64 = 1e-12;

/// Composite Simpson rule on each linear piece of `f` after substituting `s = u²`,
/// which keeps `s^p` smooth at the origin; 400 panels per piece.
fn simpson(f: &ConcaveProfile, n: usize, p: f64, a: f64, b: f64) -> f64 {
    let xs = f.breakpoints();
    let g = |u: f64| {
        let s = u * u;
        2.0 * u * s.powf(p) * f.value_at(s.min(f.length())).powi(n as i32 - 1)
    };
    let mut total = 0.0;
    for w in xs.windows(2) {
        let (lo, hi) = (w[0].max(a), w[1].min(b));
        if hi <= lo {
            continue;
        }
        let (lo, hi) = (lo.sqrt(), hi.sqrt());
        let panels = 4000;
        let h = (hi - lo) / panels as f64;
        let mut acc = g(lo) + g(hi);
        for i in 1..panels {
            acc += g(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        total += acc * h / 3.0;
    }
    total
}

fn profile() -> impl Strategy<Value = ConcaveProfile> {
    (1usize..=6, 1u32..=64)
        .prop_flat_map(|(pieces, len)| {
            (
                Just(len as f64 / 8.0),
                prop::collection::btree_set(1u32..1024, pieces - 1),
                prop::collection::vec(-64i32..=64, pieces),
                0u32..=64,
            )
        })
        .prop_filter_map("valid profile", |(length, cuts, mut slopes, start)| {
            let mut xs = vec![0.0];
            xs.extend(cuts.iter().map(|&c| c as f64 / 1024.0 * length));
            xs.push(length);
            slopes.sort_by(|a, b| b.cmp(a));
            let mut ys = vec![start as f64 / 8.0];
            for i in 1..xs.len() {
                ys.push(ys[i - 1] + slopes[i - 1] as f64 / 8.0 * (xs[i] - xs[i - 1]));
            }
            let low = ys.iter().copied().fold(0.0, f64::min);
            let ys = ys.into_iter().map(|y| y - low).collect();
            ConcaveProfile::new(length, xs, ys).ok()
        })
}

#[test]
fn moment_examples() {
    let one = ConcaveProfile::constant(1.0, 1.0).unwrap();
    let m = moments(&one, 2, 0.5).unwrap();
    assert!((m.v_le - 0.5).abs() < CLOSE && (m.v_ge - 0.5).abs() < CLOSE);
    assert!((m.tau_ge - 0.5).abs() < CLOSE);
    assert!((m.b_le.unwrap() - 0.25).abs() < CLOSE && (m.b_ge.unwrap() - 0.75).abs() < CLOSE);

    let long = ConcaveProfile::constant(5.0, 2.0).unwrap();
    for t in [0.0, 1.0, 2.5, 4.75] {
        let m = moments(&long, 1, t).unwrap();
        assert!((m.tau_ge - (5.0 - t) / 5.0).abs() < CLOSE);
        assert!((m.b_ge.unwrap() - (5.0 + t) / 2.0).abs() < CLOSE);
    }
    let m = moments(&long, 1, 5.0).unwrap();
    assert_eq!((m.v_ge, m.b_ge), (0.0, None));

    // widths of the rhombus (0,0),(1,1),(3,0),(1,-1): 2s then 3-s
    let eck = ConcaveProfile::new(3.0, vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 0.0]).unwrap();
    assert!((moments(&eck, 2, 1.0).unwrap().tau_ge - 2.0 / 3.0).abs() < CLOSE);
}

#[test]
fn inequality_examples() {
    let one = ConcaveProfile::constant(1.0, 1.0).unwrap();
    let c = check_functional_nh(&one, 2, 0.5).unwrap();
    assert!((c.lhs - 0.75).abs() < CLOSE);
    assert!((c.rhs - (1.0 - 0.5f64.powf(1.5))).abs() < CLOSE);
    assert!((c.slack - 0.103_553_390_593_273_8).abs() < 1e-12);

    let c = check_weighted_nh(&one, 2, 2.0, 0.5).unwrap();
    assert!((c.lhs - 7.0 / 8.0).abs() < CLOSE && (c.rhs - 0.75).abs() < CLOSE);
    assert!((c.slack - 0.125).abs() < CLOSE);

    for t in [0.0, 0.1, 0.37, 0.9, 1.0] {
        assert!(check_functional_nh(&one, 1, t).unwrap().slack.abs() < CLOSE);
    }
    let tent = ConcaveProfile::tent(2.0).unwrap();
    for n in 1..=6 {
        assert!(check_functional_nh(&tent, n, 0.0).unwrap().slack.abs() < CLOSE);
        let end = check_functional_nh(&tent, n, 2.0).unwrap();
        assert!(end.lhs.abs() < CLOSE && end.rhs.abs() < CLOSE);
    }
}

#[test]
fn validation_errors() {
    assert_eq!(
        ConcaveProfile::new(1.0, vec![0.0, 0.5, 1.0], vec![1.0, 0.0, 1.0]),
        Err(ProfileError::NotConcave { index: 1 })
    );
    assert_eq!(
        ConcaveProfile::new(1.0, vec![0.0, 1.0], vec![0.0, 0.0]),
        Err(ProfileError::IdenticallyZero)
    );
    assert!(matches!(
        ConcaveProfile::new(1.0, vec![0.0, 2.0], vec![1.0, 1.0]),
        Err(ProfileError::BadEndpoints { .. })
    ));
    let one = ConcaveProfile::constant(1.0, 1.0).unwrap();
    assert!(matches!(
        check_functional_nh(&one, 2, 1.5),
        Err(ProfileError::OutOfDomain { .. })
    ));
    assert_eq!(proof_diagnostics(&one, 2, 0.0), Err(ProfileError::DegenerateScaling));
}

#[test]
fn diagnostics_examples() {
    let one = ConcaveProfile::constant(1.0, 1.0).unwrap();
    let d = proof_diagnostics(&one, 3, 0.4).unwrap();
    assert!((d.f_minus_f_min - ((1.0 - d.tau).powf(-1.0 / 3.0) - 1.0)).abs() < CLOSE);

    let tent = ConcaveProfile::tent(2.0).unwrap();
    for k in 1..=20 {
        let d = proof_diagnostics(&tent, 2, k as f64 / 10.0).unwrap();
        assert!(d.f_minus_f_min >= -1e-9 && d.scaled_t <= d.length + 1e-9);
    }
    let d = proof_diagnostics(&tent, 4, 2.0).unwrap();
    assert_eq!(d.tau, 0.0);
    assert!(d.f_minus_f_min.abs() < CLOSE && (d.scaled_t - 2.0).abs() < CLOSE);
}

#[test]
fn profiles_of_bodies() {
    let x = Direction::Axis(0);
    let square = body_to_profile(&ConvexBody::unit_cube(2).unwrap(), &x, 17).unwrap();
    for s in [0.0, 0.3, 1.0] {
        assert!((square.value_at(s) - 1.0).abs() < 1e-12);
    }
    let tri = body_to_profile(&ConvexBody::standard_simplex(2).unwrap(), &x, 17).unwrap();
    for s in [0.0, 0.25, 0.9, 1.0] {
        assert!((tri.value_at(s) - (1.0 - s)).abs() < 1e-12);
    }
    let rhombus = ConvexBody::build(
        vec![
            vec![int(0), int(0)],
            vec![int(1), int(1)],
            vec![int(3), int(0)],
            vec![int(1), int(-1)],
        ],
        2,
    )
    .unwrap();
    let eck = body_to_profile(&rhombus, &x, 31).unwrap();
    for s in [0.0, 0.5, 1.0, 2.0, 2.9] {
        let width = if s <= 1.0 { 2.0 * s } else { 3.0 - s };
        assert!((eck.value_at(s) - width).abs() < 1e-12, "{s}");
    }
    let line = ConvexBody::unit_cube(1).unwrap();
    assert!(matches!(
        body_to_profile(&line, &x, 8),
        Err(ProfileError::DimensionTooLow { .. })
    ));
}

#[test]
fn body_profile_matches_direct_check() {
    let body = ConvexBody::build(
        vec![
            vec![int(0), int(0), int(0)],
            vec![int(2), int(0), int(0)],
            vec![int(0), int(3), int(0)],
            vec![int(1), int(1), int(2)],
            vec![rat(3, 2), rat(1, 2), int(1)],
        ],
        3,
    )
    .unwrap();
    let x = Direction::Axis(0);
    let f = body_to_profile(&body, &x, 4000).unwrap();
    for k in 1..8 {
        let direct = body.hammer_check(&x, &rat(k, 4), Side::Ge).unwrap();
        let functional = check_functional_nh(&f, 3, k as f64 / 4.0).unwrap();
        // the functional form is the direct ratio form multiplied through by τ
        assert!((functional.slack - direct.tau * direct.slack).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integrals_match_simpson(f in profile(), n in 1usize..=6, p in prop::sample::select(vec![0.0, 0.5, 1.0, 2.0, 1.5]), frac in 0.0f64..1.0) {
        let t = frac * f.length();
        let c = check_weighted_nh(&f, n, p, t).unwrap();
        let tau = simpson(&f, n, 0.0, t, f.length()) / simpson(&f, n, 0.0, 0.0, f.length());
        let lhs = simpson(&f, n, p, t, f.length()) / simpson(&f, n, p, 0.0, f.length());
        prop_assert!((c.lhs - lhs).abs() < 1e-8, "lhs {} vs {}", c.lhs, lhs);
        prop_assert!((c.rhs - (1.0 - (1.0 - tau).powf((n as f64 + p) / n as f64))).abs() < 1e-9);
    }

    #[test]
    fn functional_inequality_holds(f in profile(), n in 1usize..=6) {
        for k in 0..=32 {
            let t = f.length() * k as f64 / 32.0;
            prop_assert!(check_functional_nh(&f, n, t).unwrap().slack >= -1e-9);
        }
    }

    #[test]
    fn weighted_inequality_holds(f in profile(), n in 1usize..=6, p in 0.0f64..4.0) {
        for k in 0..=16 {
            let t = f.length() * k as f64 / 16.0;
            prop_assert!(check_weighted_nh(&f, n, p, t).unwrap().slack >= -1e-9);
        }
    }

    #[test]
    fn p_zero_is_equality(f in profile(), n in 1usize..=6, frac in 0.0f64..=1.0) {
        prop_assert!(check_weighted_nh(&f, n, 0.0, frac * f.length()).unwrap().slack.abs() <= 1e-12);
    }

    #[test]
    fn p_one_reduces_to_functional(f in profile(), n in 1usize..=6, frac in 0.0f64..=1.0) {
        let t = frac * f.length();
        let a = check_functional_nh(&f, n, t).unwrap();
        let b = check_weighted_nh(&f, n, 1.0, t).unwrap();
        prop_assert!((a.slack - b.slack).abs() <= 1e-10);
    }

    #[test]
    fn mass_balance(f in profile(), n in 1usize..=6, frac in 0.0f64..=1.0) {
        let t = frac * f.length();
        let whole = moments(&f, n, 0.0).unwrap();
        let m = moments(&f, n, t).unwrap();
        let total = whole.v_ge;
        prop_assert!((m.v_le + m.v_ge - total).abs() <= 1e-10 * total.max(1.0));
        prop_assert!((m.tau_ge - m.v_ge / (m.v_le + m.v_ge)).abs() <= 1e-15);
        if let (Some(bl), Some(bg)) = (m.b_le, m.b_ge) {
            let first = whole.b_ge.unwrap() * total;
            prop_assert!((m.v_le * bl + m.v_ge * bg - first).abs() <= 1e-10 * first.abs().max(1.0));
        }
    }

    #[test]
    fn diagnostics_contracts(f in profile(), n in 1usize..=6, frac in 0.01f64..=1.0) {
        let d = proof_diagnostics(&f, n, frac * f.length()).unwrap();
        prop_assert!(d.f_minus_f_min >= -1e-9);
        prop_assert!(d.scaled_t <= d.length + 1e-9);
    }
}
