use chatelet::arith::{
    conic_oracle, hilbert_minus_one, odd_prime_factors, valuation, ExactRational, Place, Prime,
    Sign,
};
use chatelet::brauer::classify;
use chatelet::density::sample_cells;
use chatelet::local::{real_invariant_set, two_adic_invariant_set};
use chatelet::surface::{build_representatives, orbit, stratify, SurfaceTuple, DEFAULT_SEARCH_BOUND};
use proptest::prelude::*;

fn places() -> impl Strategy<Value = Place> {
    prop_oneof![
        Just(Place::Real),
        prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 19, 23]).prop_map(|p| Place::prime(p).unwrap()),
    ]
}

fn nonzero(bound: i128) -> impl Strategy<Value = i128> {
    (-bound..=bound).prop_filter("nonzero", |n| *n != 0)
}

/// Valid tuples of moderate height, built from a coprime pair.
fn tuples() -> impl Strategy<Value = SurfaceTuple> {
    (1i64..=400, -400i64..=400, any::<bool>(), -4i64..=4).prop_filter_map("coprime, nonzero", |(a, c, plus, k)| {
        if c == 0 {
            return None;
        }
        let (g, s, t) = chatelet::arith::xgcd(a as i128, c as i128).ok()?;
        if g != 1 {
            return None;
        }
        let e = if plus { 1 } else { -1 };
        let b = (-t * e) as i64 + k * a;
        let d = (s * e) as i64 + k * c;
        SurfaceTuple::new(a, b, c, d).ok()
    })
}

proptest! {
    #[test]
    fn hilbert_symbol_is_multiplicative(m in nonzero(1 << 20), n in nonzero(1 << 20), v in places()) {
        let lhs = hilbert_minus_one(m * n, v).unwrap();
        let rhs = hilbert_minus_one(m, v).unwrap() * hilbert_minus_one(n, v).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hilbert_symbol_ignores_squares(n in nonzero(1 << 20), k in nonzero(1 << 10), v in places()) {
        prop_assert_eq!(hilbert_minus_one(n * k * k, v).unwrap(), hilbert_minus_one(n, v).unwrap());
    }

    #[test]
    fn product_formula(n in nonzero(1 << 40)) {
        let mut product = hilbert_minus_one(n, Place::Real).unwrap()
            * hilbert_minus_one(n, Place::Prime(Prime::TWO)).unwrap();
        for q in odd_prime_factors(n) {
            product = product * hilbert_minus_one(n, Place::prime(q).unwrap()).unwrap();
        }
        prop_assert_eq!(product, Sign::Plus);
    }

    #[test]
    fn symbol_agrees_with_conic_oracle(n in nonzero(5000), p in prop::sample::select(vec![2u64, 3, 7, 11])) {
        let p = Prime::new(p).unwrap();
        let k = valuation(n, p).unwrap() + if p.is_two() { 3 } else { 2 };
        prop_assume!(p.get().checked_pow(k).is_some_and(|m| m <= 1 << 20));
        let symbol = hilbert_minus_one(n, Place::Prime(p)).unwrap();
        prop_assert_eq!(conic_oracle(n, p, k).unwrap(), symbol.is_plus());
    }

    #[test]
    fn rational_arithmetic_round_trips(a in -1000i128..1000, b in 1i128..1000, c in -1000i128..1000, d in 1i128..1000) {
        let x = ExactRational::new(a, b).unwrap();
        let y = ExactRational::new(c, d).unwrap();
        prop_assert_eq!(&(&x + &y) - &y, x.clone());
        let parsed: ExactRational = x.to_string().parse().unwrap();
        prop_assert_eq!(parsed, x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verdict_is_constant_on_orbits(u in tuples()) {
        let verdict = classify(&u).unwrap().verdict;
        for v in orbit(&u) {
            prop_assert_eq!(classify(&v).unwrap().verdict, verdict);
        }
    }

    #[test]
    fn negating_both_factors_negates_both_sets(u in tuples()) {
        // (c, d, a, b) with a sign flip when c < 0 is the other factor; the
        // surface is the same, so each set is either kept or negated.
        let v = u.swap_factors();
        let (ru, rv) = (real_invariant_set(&u), real_invariant_set(&v));
        let (tu, tv) = (two_adic_invariant_set(&u).unwrap(), two_adic_invariant_set(&v).unwrap());
        if u.c() > 0 {
            prop_assert_eq!((ru, tu), (rv, tv));
        } else {
            prop_assert_eq!((ru.negated(), tu.negated()), (rv, tv));
        }
    }

    #[test]
    fn strata_are_valid(u in tuples()) {
        let s = stratify(&u);
        prop_assert!(s.cell.has_valid_shape());
        prop_assert!(s.cell.has_unit_residues());
        prop_assert!(s.cell.satisfies_determinant_congruence());
    }

    #[test]
    fn representatives_land_in_their_cell(seed in any::<u64>()) {
        for cell in sample_cells(seed, 3) {
            let reps = build_representatives(&cell, 3, DEFAULT_SEARCH_BOUND).unwrap();
            prop_assert_eq!(reps.len(), 3);
            for u in reps {
                prop_assert_eq!(stratify(&u).cell, cell);
            }
        }
    }
}
