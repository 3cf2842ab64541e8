mod common;

use proptest::prelude::*;

use common::{all_targets, catalog_towers, fg_targets};
use uctkit::fg::{ext_group, hom_group};
use uctkit::tower::{
    apply_ext, apply_hom, image_chain, lim1, parse_tower, pext, FgInverse, Lim1Verdict, RuleVerdict,
};
use uctkit::{DirectTower, GroupExpr, InverseTower};

const WINDOW: usize = 12;
const WIDE_WINDOW: usize = 20;

fn tower() -> impl Strategy<Value = DirectTower> {
    prop::sample::select(catalog_towers())
}

fn target() -> impl Strategy<Value = GroupExpr> {
    prop::sample::select(all_targets())
}

fn fg_target() -> impl Strategy<Value = GroupExpr> {
    prop::sample::select(fg_targets())
}

fn inverse(t: &DirectTower, h: &GroupExpr, hom: bool) -> InverseTower {
    if hom {
        apply_hom(t, h)
    } else {
        apply_ext(t, h)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn direct_towers_are_injective_and_reproducible(t in tower(), i in 1usize..8) {
        let f = t.map(i);
        prop_assert!(f.is_injective());
        prop_assert_eq!(f.source(), &t.stage(i));
        prop_assert_eq!(f.target(), &t.stage(i + 1));
        let again = parse_tower(&t.to_string()).unwrap();
        prop_assert_eq!(again.stage(i), t.stage(i));
        prop_assert_eq!(again.map(i), f);
        let two = t.map(i + 1).compose(&t.map(i)).unwrap();
        prop_assert_eq!(t.map_between(i, i + 2), two);
    }

    #[test]
    fn fg_stages_match_the_functors(t in tower(), h in fg_target(), i in 1usize..6) {
        let f = h.as_fg().unwrap();
        prop_assert_eq!(FgInverse::hom(&t, &f).stage(i), hom_group(&t.stage(i), &f).0);
        prop_assert_eq!(FgInverse::ext(&t, &f).stage(i), ext_group(&t.stage(i), &f));
    }

    #[test]
    fn image_chains_decrease(t in tower(), h in target(), hom in any::<bool>(), i in 1usize..4) {
        let inv = inverse(&t, &h, hom);
        if let Ok(chain) = image_chain(&inv, i, 6, None) {
            prop_assert_eq!(chain.images.len(), 7);
            for w in chain.images.windows(2) {
                prop_assert!(w[0].contains_subgroup(&w[1]).unwrap());
            }
        }
    }

    #[test]
    fn certificates_replay(t in tower(), h in target(), hom in any::<bool>()) {
        let r = lim1(&inverse(&t, &h, hom), WINDOW);
        prop_assert!(r.certificate.verify());
        let zero = r.verdict == Lim1Verdict::Zero;
        prop_assert_eq!(zero, r.value_hint.is_some());
    }

    #[test]
    fn restriction_maps_of_ext_towers_are_onto(t in tower(), h in fg_target()) {
        let f = h.as_fg().unwrap();
        let ext = FgInverse::ext(&t, &f);
        for i in 1..=6 {
            prop_assert!(ext.map(i).is_surjective());
        }
        prop_assert_eq!(lim1(&apply_ext(&t, &h), WINDOW).verdict, Lim1Verdict::Zero);
    }

    #[test]
    fn pext_rules_never_contradict_the_window(t in tower(), h in target()) {
        let r = pext(&t, &h, WINDOW).unwrap();
        if r.rule == RuleVerdict::Zero {
            prop_assert_eq!(r.verdict, Lim1Verdict::Zero);
        }
        if r.verdict != Lim1Verdict::Inconclusive {
            prop_assert!(r.certificate.verify());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn certified_verdicts_survive_a_wider_window(t in tower(), h in target(), hom in any::<bool>()) {
        let inv = inverse(&t, &h, hom);
        let narrow = lim1(&inv, WINDOW);
        prop_assume!(narrow.verdict != Lim1Verdict::Inconclusive);
        prop_assert_eq!(lim1(&inv, WIDE_WINDOW).verdict, narrow.verdict);
    }
}
