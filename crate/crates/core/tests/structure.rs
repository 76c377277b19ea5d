//! Structural invariants of the trajectory and the covers.

mod common;

use std::cmp::Ordering;

use common::{periodic, theta};
use heavy_core::cf_core::rational::{half, pow2_neg, rat};
use heavy_core::cf_core::{ContinuedFraction, Real};
use heavy_core::heavy_set::{build_levels, strictly_heavy};
use heavy_core::renorm::{conjugacy_enclosures, delta, g_step, trajectory};
use num_traits::One;
use proptest::prelude::*;

fn same(a: &Real, b: &Real) -> bool {
    a.cmp_real(b) == Some(Ordering::Equal)
}

fn level(t: &ContinuedFraction, depth: usize) -> Vec<(Real, Real)> {
    let lv = build_levels(t, depth).unwrap();
    lv.deepest().intervals.iter().map(|iv| (iv.left.clone(), iv.right.clone())).collect()
}

#[test]
fn conjugacy_on_random_theta() {
    for seed in 0..100 {
        let t = ContinuedFraction::random(seed, 512).unwrap();
        let (digits, formula) = conjugacy_enclosures(&t, &pow2_neg(100)).unwrap();
        assert!(digits.intersects(&formula), "seed {seed}");
    }
}

#[test]
fn delta_decays() {
    for seed in 0..50 {
        let t = ContinuedFraction::random(seed, 2048).unwrap();
        let tr = trajectory(&t, 60);
        for k in 0..=tr.len() / 2 {
            let bound = pow2_neg(k as u64);
            assert!(tr.big_delta[2 * k].lower() <= bound, "seed {seed}, k {k}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn gaps_at_least_interval_length((pre, per) in periodic()) {
        let t = theta(&pre, &per);
        let lv = build_levels(&t, 3).unwrap();
        for l in &lv.levels {
            for w in l.intervals.windows(2) {
                let gap = w[1].left.sub(&w[0].right);
                prop_assert_ne!(gap.cmp_real(&l.length), Some(Ordering::Less));
            }
        }
    }

    #[test]
    fn reversal_of_covers((pre, per) in periodic(), d in 1usize..3) {
        // a1 = 1: E_{d+1}(θ) = 1/2 − E_d(g θ)
        let mut pre = pre;
        pre.insert(0, 1);
        let t = theta(&pre, &per);
        let g = g_step(&t).unwrap().next;
        let mine = level(&t, d + 1);
        let theirs = level(&g, d);
        prop_assert_eq!(mine.len(), theirs.len());
        let h = Real::rational(half());
        for ((l, r), (gl, gr)) in mine.iter().zip(theirs.iter().rev()) {
            prop_assert!(same(l, &h.sub(gr)) && same(r, &h.sub(gl)));
        }
    }

    #[test]
    fn rescaling_of_covers((pre, per) in periodic(), d in 1usize..3) {
        let t = theta(&pre, &per);
        prop_assume!(!t.a(1).unwrap().is_one());
        let dl = delta(&t).unwrap();
        let g = g_step(&t).unwrap().next;
        let inside: Vec<_> = level(&t, d).into_iter().filter(|(_, r)| r.cmp_real(&dl) == Some(Ordering::Less)).collect();
        let scaled: Vec<_> = level(&g, d - 1).into_iter().map(|(l, r)| (l.mul(&dl), r.mul(&dl))).collect();
        prop_assert_eq!(inside.len(), scaled.len());
        for ((l, r), (sl, sr)) in inside.iter().zip(&scaled) {
            prop_assert!(same(l, sl) && same(r, sr));
        }
    }

    #[test]
    fn depth_one_exclusion_zones((pre, per) in periodic()) {
        let t = theta(&pre, &per);
        let a1 = t.a(1).unwrap();
        prop_assume!(!a1.is_one());
        let dl = delta(&t).unwrap();
        let th = t.value(200).unwrap();
        let lo1 = dl.mul_rational(&half());
        let lo2 = lo1.add(&th);
        for (l, r) in level(&t, 1) {
            // no overlap with (δ/2, δ) or (δ/2 + θ, 1)
            let avoids1 = r.cmp_real(&lo1) != Some(Ordering::Greater) || l.cmp_real(&dl) != Some(Ordering::Less);
            let avoids2 = r.cmp_real(&lo2) != Some(Ordering::Greater);
            prop_assert!(avoids1 && avoids2);
        }
    }

    #[test]
    fn strict_point_below_half_delta((pre, per) in periodic()) {
        let t = theta(&pre, &per);
        prop_assume!(!t.a(1).unwrap().is_one());
        let h = strictly_heavy(&t, &rat(1, 1 << 40)).unwrap().value();
        let cut = delta(&t).unwrap().mul_rational(&half());
        prop_assert_ne!(h.cmp_real(&cut), Some(Ordering::Greater));
    }
}
