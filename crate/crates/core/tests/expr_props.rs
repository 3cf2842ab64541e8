use num_bigint::BigInt;
use num_integer::Integer;
use proptest::prelude::*;

use uctkit::expr::{
    canonicalize, ext_from_fg, hom_from_fg, invariants, parse_expr, quotient_by, torsion_subgroup_at,
};
use uctkit::fg::{ext_group, hom_group};
use uctkit::{FgGroup, GroupExpr};

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5])
}

fn atom() -> impl Strategy<Value = GroupExpr> {
    prop_oneof![
        (0u64..3).prop_map(GroupExpr::Free),
        Just(GroupExpr::FreeCountable),
        (1u64..13).prop_map(GroupExpr::cyclic),
        prime().prop_map(|p| GroupExpr::prufer(p).unwrap()),
        (prime(), 0u64..3, 0i64..3)
            .prop_filter_map("valid rule", |(p, a, b)| GroupExpr::inf_sum(p, a, b).ok()),
        (2u64..7).prop_map(|d| GroupExpr::inf_product(GroupExpr::cyclic(d)).unwrap()),
        (prime(), 1u64..3).prop_map(|(p, r)| GroupExpr::padic(p, GroupExpr::Free(r)).unwrap()),
    ]
}

fn expr() -> impl Strategy<Value = GroupExpr> {
    prop_oneof![
        atom(),
        prop::collection::vec(atom(), 0..4).prop_map(GroupExpr::sum),
        (atom(), prop::collection::vec(atom(), 1..3))
            .prop_map(|(a, rest)| GroupExpr::sum([a, GroupExpr::sum(rest)])),
    ]
}

fn fg() -> impl Strategy<Value = FgGroup> {
    prop::collection::vec(prop::sample::select(vec![0u64, 2, 3, 4, 6, 9]), 0..4)
        .prop_map(FgGroup::from_cyclic_orders)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn canonicalize_is_idempotent(e in expr()) {
        let c = canonicalize(&e);
        prop_assert_eq!(canonicalize(&c), c);
    }

    #[test]
    fn canonical_form_keeps_invariants(e in expr()) {
        prop_assert_eq!(invariants(&canonicalize(&e)), invariants(&e));
    }

    #[test]
    fn printing_round_trips(e in expr()) {
        let c = canonicalize(&e);
        prop_assert_eq!(parse_expr(&c.to_string()).unwrap(), c.clone());
        prop_assert_eq!(canonicalize(&parse_expr(&e.to_string()).unwrap()), c);
    }

    #[test]
    fn torsion_and_quotient_are_idempotent(e in expr(), n in 1u64..13) {
        let n = BigInt::from(n);
        if let Ok(t) = torsion_subgroup_at(&e, &n) {
            prop_assert_eq!(canonicalize(&torsion_subgroup_at(&t, &n).unwrap()), canonicalize(&t));
        }
        if let Ok(q) = quotient_by(&e, &n) {
            prop_assert_eq!(canonicalize(&quotient_by(&q, &n).unwrap()), canonicalize(&q));
        }
    }

    #[test]
    fn torsion_splits_over_coprime_orders(e in expr(), a in 1u64..10, b in 1u64..10) {
        prop_assume!(a.gcd(&b) == 1);
        let (a, b) = (BigInt::from(a), BigInt::from(b));
        let (Ok(ta), Ok(tb), Ok(tab)) =
            (torsion_subgroup_at(&e, &a), torsion_subgroup_at(&e, &b), torsion_subgroup_at(&e, &(&a * &b)))
        else {
            return Ok(());
        };
        prop_assert_eq!(canonicalize(&GroupExpr::sum([ta, tb])), canonicalize(&tab));
    }

    #[test]
    fn nested_torsion_takes_the_gcd(e in expr(), a in 1u64..13, b in 1u64..13) {
        let (a, b) = (BigInt::from(a), BigInt::from(b));
        if let Ok(ta) = torsion_subgroup_at(&e, &a) {
            let nested = torsion_subgroup_at(&ta, &b).unwrap();
            prop_assert_eq!(canonicalize(&nested), canonicalize(&torsion_subgroup_at(&e, &a.gcd(&b)).unwrap()));
        }
    }

    #[test]
    fn fg_functors_agree_with_exact_groups(g in fg(), h in fg()) {
        let target = GroupExpr::from_fg(&h);
        prop_assert_eq!(canonicalize(&hom_from_fg(&g, &target).unwrap()), GroupExpr::from_fg(&hom_group(&g, &h).0));
        prop_assert_eq!(canonicalize(&ext_from_fg(&g, &target).unwrap()), GroupExpr::from_fg(&ext_group(&g, &h)));
    }

    #[test]
    fn profiles_of_sums_combine(a in expr(), b in expr()) {
        let whole = invariants(&GroupExpr::sum([a.clone(), b.clone()]));
        prop_assert_eq!(whole, invariants(&a).direct_sum(&invariants(&b)));
    }

    #[test]
    fn hom_and_ext_from_fg_are_additive(g in fg(), a in expr(), b in expr()) {
        let sum = GroupExpr::sum([a.clone(), b.clone()]);
        if let (Ok(x), Ok(y), Ok(s)) = (hom_from_fg(&g, &a), hom_from_fg(&g, &b), hom_from_fg(&g, &sum)) {
            prop_assert_eq!(canonicalize(&GroupExpr::sum([x, y])), canonicalize(&s));
        }
        if let (Ok(x), Ok(y), Ok(s)) = (ext_from_fg(&g, &a), ext_from_fg(&g, &b), ext_from_fg(&g, &sum)) {
            prop_assert_eq!(canonicalize(&GroupExpr::sum([x, y])), canonicalize(&s));
        }
    }

    #[test]
    fn valid_expressions_validate(e in expr()) {
        prop_assert!(e.validate().is_ok());
        prop_assert!(canonicalize(&e).validate().is_ok());
    }
}
