use proptest::prelude::*;

use spincert::arith::{
    affine_positivity_interval, format_rational, intersect_all, parse_rational, rat, AffineInY,
    Endpoint, Rational, RationalInterval,
};
use spincert::linseries::{
    complementary_sequence, is_compatible, Compatibility, VanishingSequence,
};

fn rational() -> impl Strategy<Value = Rational> {
    (-60i64..=60, 1i64..=24).prop_map(|(p, q)| rat(p, q))
}

fn endpoint() -> impl Strategy<Value = Endpoint> {
    prop_oneof![
        1 => Just(Endpoint::Unbounded),
        3 => rational().prop_map(Endpoint::Closed),
        3 => rational().prop_map(Endpoint::Open),
    ]
}

fn interval() -> impl Strategy<Value = RationalInterval> {
    (endpoint(), endpoint()).prop_map(|(lo, hi)| RationalInterval::new(lo, hi))
}

fn affine() -> impl Strategy<Value = AffineInY> {
    (rational(), rational()).prop_map(|(a, b)| AffineInY::new(a, b))
}

fn same_set(a: &RationalInterval, b: &RationalInterval, probes: &[Rational]) -> bool {
    a.is_empty() == b.is_empty() && probes.iter().all(|y| a.contains(y) == b.contains(y))
}

/// Strictly increasing sequences in `0..=d`, of length between 1 and `d+1`.
fn sequence() -> impl Strategy<Value = VanishingSequence> {
    (1i64..=14).prop_flat_map(|d| {
        proptest::collection::btree_set(0..=d, 1..=(d as usize + 1))
            .prop_map(move |set| VanishingSequence::new(set.into_iter().collect(), d).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn intersection_ignores_order(ivs in proptest::collection::vec(interval(), 1..6), probes in proptest::collection::vec(rational(), 40)) {
        let forward = intersect_all(ivs.iter());
        let backward = intersect_all(ivs.iter().rev());
        prop_assert!(same_set(&forward, &backward, &probes));
        for y in &probes {
            prop_assert_eq!(forward.contains(y), ivs.iter().all(|iv| iv.contains(y)));
        }
    }

    #[test]
    fn positivity_interval_matches_sign(f in affine(), ys in proptest::collection::vec(rational(), 100)) {
        let unit = RationalInterval::unit();
        let pos = affine_positivity_interval(&f, &unit);
        for y in &ys {
            let expected = unit.contains(y) && f.eval(y) > rat(0, 1);
            prop_assert_eq!(pos.contains(y), expected, "f={} y={}", f, y);
        }
    }

    #[test]
    fn affine_arithmetic(a in affine(), b in affine(), y in rational()) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!((&a + &b).eval(&y), a.eval(&y) + b.eval(&y));
        prop_assert_eq!((&a * &y).eval(&rat(1, 1)), a.eval(&rat(1, 1)) * &y);
    }

    #[test]
    fn rationals_round_trip_through_text(x in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
    }

    #[test]
    fn complement_is_an_involution(a in sequence()) {
        let b = complementary_sequence(&a);
        prop_assert_eq!(complementary_sequence(&b), a.clone());
        prop_assert_eq!(is_compatible(&a, &b).unwrap(), Compatibility::Refined);
        prop_assert_eq!(b.rank(), a.rank());
    }

    #[test]
    fn compatibility_is_symmetric(a in sequence(), shift in 0i64..3) {
        // raise the complement entrywise where room allows
        let c = complementary_sequence(&a);
        let d = a.degree();
        let r = c.entries().len();
        let raised: Vec<i64> = c
            .entries()
            .iter()
            .enumerate()
            .map(|(i, &x)| (x + shift).min(d - (r - 1 - i) as i64))
            .collect();
        let mut fixed = raised.clone();
        for i in 1..fixed.len() {
            if fixed[i] <= fixed[i - 1] {
                fixed[i] = fixed[i - 1] + 1;
            }
        }
        if let Ok(b) = VanishingSequence::new(fixed, d) {
            let ab = is_compatible(&a, &b).unwrap();
            prop_assert_eq!(ab, is_compatible(&b, &a).unwrap());
            prop_assert_ne!(ab, Compatibility::Incompatible);
        }
    }
}

#[test]
fn empty_and_unbounded_intervals() {
    let unit = RationalInterval::unit();
    assert!(RationalInterval::empty().is_empty());
    assert!(RationalInterval::open(rat(1, 2), rat(1, 2)).is_empty());
    assert!(!RationalInterval::closed(rat(1, 2), rat(1, 2)).is_empty());
    assert_eq!(unit.intersect(&RationalInterval::unbounded()), unit);
    let f = AffineInY::new(rat(-1, 3), rat(1, 1));
    assert_eq!(
        affine_positivity_interval(&f, &unit),
        RationalInterval::new(Endpoint::Open(rat(1, 3)), Endpoint::Closed(rat(1, 1)))
    );
}
