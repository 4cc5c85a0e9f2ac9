use discrete_maximal::constants::weak_ratio;
use discrete_maximal::Error;
use discrete_maximal::function::LatticeFunction;
use discrete_maximal::geometry::{lattice_count, BodySpec};
use discrete_maximal::multiplier::{multiplier, FrequencyPoint};
use discrete_maximal::operators::{maximal, semigroup_apply, ScaleSelector};
use proptest::prelude::*;

fn body(kind: u8, d: usize) -> BodySpec {
    match kind {
        0 => BodySpec::cube(d),
        1 => BodySpec::qball(2.0, d).unwrap(),
        2 => BodySpec::qball(1.0, d).unwrap(),
        _ => BodySpec::ellipsoid_family_default(d).unwrap(),
    }
}

fn atoms(d: usize) -> impl Strategy<Value = Vec<(Vec<i64>, f64)>> {
    prop::collection::vec((prop::collection::vec(-6i64..=6, d), 0.1f64..4.0), 1..5)
}

fn torus_dist(x: f64) -> f64 {
    (x - x.round()).abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weak_ratio_ignores_translation_and_scaling(
        kind in 0u8..4,
        d in 1usize..3,
        seed_atoms in atoms(2),
        shift in prop::collection::vec(-20i64..20, 2),
        c in 0.01f64..100.0,
    ) {
        let b = body(kind, d);
        let pts: Vec<(Vec<i64>, f64)> = seed_atoms.into_iter().map(|(x, w)| (x[..d].to_vec(), w)).collect();
        let f = LatticeFunction::from_atoms(d, &pts).unwrap();
        let sel = ScaleSelector::All { t_max: 15.0 };
        let base = weak_ratio(&b, &sel, &f).unwrap().ratio;
        let moved = weak_ratio(&b, &sel, &f.translated(&shift[..d])).unwrap().ratio;
        let scaled = weak_ratio(&b, &sel, &f.scaled(c)).unwrap().ratio;
        prop_assert!((base - moved).abs() <= 1e-12 * base);
        prop_assert!((base - scaled).abs() <= 1e-12 * base);
    }

    #[test]
    fn multiplier_is_periodic_and_even(
        kind in 0u8..4,
        d in 1usize..4,
        n in 0.5f64..6.0,
        xi in prop::collection::vec(-0.5f64..0.5, 3),
        k in 0usize..3,
    ) {
        let b = body(kind, d);
        let xi = xi[..d].to_vec();
        let m = multiplier(&b, n, &FrequencyPoint::new(xi.clone())).unwrap();
        let mut shifted = xi.clone();
        shifted[k % d] += 1.0;
        let neg: Vec<f64> = xi.iter().map(|v| -v).collect();
        let mp = multiplier(&b, n, &FrequencyPoint::new(shifted)).unwrap();
        let mn = multiplier(&b, n, &FrequencyPoint::new(neg)).unwrap();
        prop_assert!((m - mp).abs() < 1e-9);
        prop_assert!((m - mn).abs() < 1e-12);
        prop_assert!(m.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn maximal_grows_with_the_scale_set(
        kind in 0u8..4,
        d in 1usize..3,
        seed_atoms in atoms(2),
        t_small in 1.0f64..5.0,
        extra in 0.5f64..6.0,
        cut in 0.0f64..3.0,
    ) {
        let b = body(kind, d);
        let pts: Vec<(Vec<i64>, f64)> = seed_atoms.into_iter().map(|(x, w)| (x[..d].to_vec(), w)).collect();
        let f = LatticeFunction::from_atoms(d, &pts).unwrap();
        let small = maximal(&b, &ScaleSelector::All { t_max: t_small }, &f).unwrap();
        let large = maximal(&b, &ScaleSelector::All { t_max: t_small + extra }, &f).unwrap();
        // A window with no breakpoint is rejected rather than read as empty.
        let tail = maximal(&b, &ScaleSelector::GreaterThan { d: cut, t_max: t_small + extra }, &f);
        prop_assume!(!matches!(tail, Err(Error::EmptyScales)));
        let tail = tail.unwrap();
        for (x, v) in small.iter() {
            prop_assert!(v <= large.get(&x) + 1e-12);
            prop_assert!(f.get(&x) <= v + 1e-12);
        }
        for (x, v) in tail.iter() {
            prop_assert!(v <= large.get(&x) + 1e-12);
        }
    }

    #[test]
    fn semigroup_law(s in 0.0f64..4.0, t in 0.0f64..4.0, seed in any::<u64>(), d in 1usize..3) {
        let f = LatticeFunction::random(vec![-1; d], vec![4; d], seed).unwrap();
        let two = semigroup_apply(s, &semigroup_apply(t, &f).unwrap()).unwrap();
        let one = semigroup_apply(s + t, &f).unwrap();
        for (x, v) in two.iter() {
            prop_assert!((v - one.get(&x)).abs() < 1e-8);
        }
        for (x, v) in one.iter() {
            prop_assert!((v - two.get(&x)).abs() < 1e-8);
        }
    }

    #[test]
    fn sine_is_comparable_to_torus_distance(eta in -3.0f64..3.0) {
        let n = torus_dist(eta);
        let s = (std::f64::consts::PI * eta).sin().abs();
        prop_assert!(2.0 * n <= s + 1e-12);
        prop_assert!(s <= std::f64::consts::PI * n + 1e-12);
    }

    #[test]
    fn counts_grow_with_radius(kind in 0u8..4, d in 1usize..4, t in 0.0f64..6.0, dt in 0.0f64..2.0) {
        let b = body(kind, d);
        let lo = lattice_count(&b, t).unwrap().count;
        let hi = lattice_count(&b, t + dt).unwrap().count;
        prop_assert!(lo <= hi);
        if kind == 0 {
            let side = 2 * t.floor() as u128 + 1;
            prop_assert_eq!(lo, side.pow(d as u32).into());
        }
    }
}
