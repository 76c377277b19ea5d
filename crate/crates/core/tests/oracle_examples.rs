use heavy_core::cf_core::rational::rat;
use heavy_core::cf_core::{parse_theta, ContinuedFraction, Real};
use heavy_core::heavy_set::{build_levels, isolated_points, membership, strictly_heavy, Cover, Membership, EXPORT_BITS};
use heavy_core::oracle::*;

fn cf(s: &str) -> ContinuedFraction {
    parse_theta(s).unwrap()
}

#[test]
fn levels_examples() {
    for (t, depth) in [("[(2)]", 4), ("[1;(2)]", 6), ("target_d(1/2)", 3)] {
        let r = verify_levels_for(&cf(t), depth, Some(10_000), 10).unwrap();
        assert_eq!((r.failed, r.ambiguous), (0, 0), "{t}: {r:?}");
        assert!(r.passed > 0);
    }
}

#[test]
fn cover_json_round_trip_gives_same_verdicts() {
    let theta = cf("[1;(2)]");
    let levels = build_levels(&theta, 4).unwrap();
    let pts = isolated_points(&levels, &rat(1, 1 << 40)).unwrap();
    let cover = levels.to_cover(&pts, EXPORT_BITS);
    let text = serde_json::to_string(&cover.to_json()).unwrap();
    let back = Cover::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    let a = verify_levels(&theta, &cover, Some(5000), 4).unwrap();
    let b = verify_levels(&theta, &back, Some(5000), 4).unwrap();
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn strictly_heavy_point_is_strict() {
    // midpoint of H*_{√2/2}: S_n >= 1 through 10^5
    let theta = cf("[1;(2)]");
    let h = strictly_heavy(&theta, &rat(1, 1_000_000_000)).unwrap();
    let x = Point::from_real(h.value());
    assert!(heavy_up_to_threshold(&x, &theta, 100_000, 1).unwrap().is_heavy());
}

#[test]
fn reversal_pairs() {
    let theta = cf("[1;(2)]");
    let g = cf("[3;(2)]");
    let a = heavy_up_to(&Point::rational(rat(49, 100)), &theta, 1000).unwrap();
    let b = heavy_up_to(&Point::rational(rat(1, 100)), &g, 1000).unwrap();
    assert_eq!(a, b);
    let h = strictly_heavy(&theta, &rat(1, 1_000_000_000)).unwrap().value();
    let mirrored = Real::rational(rat(1, 2)).sub(&h);
    assert!(heavy_up_to(&Point::from_real(h), &theta, 10_000).unwrap().is_heavy());
    assert!(heavy_up_to(&Point::from_real(mirrored), &g, 10_000).unwrap().is_heavy());
}

#[test]
fn heavy_point_in_upper_window() {
    // H_θ ∩ [θ, 1/2] = H*_θ + θ
    let theta = cf("[3;(2)]");
    let h = strictly_heavy(&theta, &rat(1, 1 << 60)).unwrap();
    let shifted = Point::from_real(h.value()).rotated(1, &theta).unwrap();
    assert!(heavy_up_to(&shifted, &theta, 20_000).unwrap().is_heavy());
    let target = h.value().add(&theta.value(128).unwrap()).to_f64();
    let (lo, hi) = (theta.value(64).unwrap().to_f64(), 0.5);
    let grid = 400;
    for j in 0..=grid {
        let x = lo + (hi - lo) * j as f64 / grid as f64;
        if (x - target).abs() < 2e-3 {
            continue;
        }
        let xr = rat((x * 1e9).round() as i64, 1_000_000_000);
        if theta.compare(&xr).unwrap().is_gt() {
            continue;
        }
        let v = heavy_up_to(&Point::rational(xr.clone()), &theta, 20_000).unwrap();
        assert!(!v.is_heavy(), "{xr} looks heavy");
    }
}

#[test]
fn always_infinite() {
    for t in ["[1;(2)]", "[(2)]"] {
        let r = verify_always_infinite(&cf(t), 5, 10_000).unwrap();
        assert_eq!((r.passed, r.failed), (5, 0), "{t}");
    }
}

#[test]
fn membership_matches_oracle_on_grid() {
    let theta = cf("[(2)]");
    let levels = build_levels(&theta, 4).unwrap();
    let pts = isolated_points(&levels, &rat(1, 1 << 60)).unwrap();
    for j in 0..200 {
        let x = rat(2 * j + 1, 400);
        let v = heavy_up_to(&Point::rational(x.clone()), &theta, 100_000).unwrap();
        if let Membership::Excluded { .. } = membership(&levels, &pts, &x) {
            assert!(!v.is_heavy(), "{x} excluded but heavy");
        }
    }
}

#[test]
fn report_json_shape() {
    let r = verify_reversal(&cf("[1;(2)]"), 100, 10).unwrap();
    let v = r.to_json();
    for key in ["claim", "params", "checked", "passed", "failed", "ambiguous", "inconclusive", "counterexample"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(r.passed + r.failed + r.ambiguous + r.inconclusive, r.checked);
}

#[test]
fn isolated_point_born_gap_is_excluded() {
    let theta = cf("[1;(2)]");
    let levels = build_levels(&theta, 4).unwrap();
    let pts = isolated_points(&levels, &rat(1, 1 << 60)).unwrap();
    let cover = levels.to_cover(&pts, EXPORT_BITS);
    for i in 1..=4 {
        for g in cover.gaps(i) {
            let v = heavy_up_to(&Point::rational(g.midpoint()), &theta, 100_000).unwrap();
            assert!(!v.is_heavy(), "gap {g} at level {i}");
        }
    }
}
