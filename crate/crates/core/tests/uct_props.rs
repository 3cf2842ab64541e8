mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{all_targets, catalog_towers, fg_targets, finite_groups};
use uctkit::expr::{canonicalize, Tri};
use uctkit::fg::{ext_group, hom_group};
use uctkit::tower::Lim1Verdict;
use uctkit::uct::{
    fine_structure, finite_model_check, jensen_obstruction, kk_group, kl_group, milnor_obstruction,
    random_finite_data, topology_report,
};
use uctkit::{DirectTower, FgGroup, GroupExpr, KTheoryData};

const WINDOW: usize = 12;

fn data() -> impl Strategy<Value = KTheoryData> {
    (
        prop::sample::select(catalog_towers()),
        prop::sample::select(catalog_towers()),
        prop::sample::select(all_targets()),
        prop::sample::select(all_targets()),
    )
        .prop_map(|(a0, a1, b0, b1)| KTheoryData::new(a0, a1, b0, b1))
}

fn countable() -> Vec<GroupExpr> {
    all_targets()
        .into_iter()
        .filter(|h| !matches!(h, GroupExpr::InfProduct(_) | GroupExpr::Padic(..)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn stable_kk_is_the_graded_hom_ext_sum(
        g0 in prop::sample::select(finite_groups(12)),
        g1 in prop::sample::select(vec![FgGroup::free(1), FgGroup::trivial(), FgGroup::cyclic(6)]),
        b0 in prop::sample::select(fg_targets()),
        b1 in prop::sample::select(fg_targets()),
        n in 0usize..2,
    ) {
        let data = KTheoryData::new(DirectTower::stable(g0.clone()), DirectTower::stable(g1.clone()), b0.clone(), b1.clone());
        let kb = [b0.as_fg().unwrap(), b1.as_fg().unwrap()];
        let ga = [g0, g1];
        let mut expected = FgGroup::trivial();
        for j in 0..2 {
            expected = expected
                .direct_sum(&hom_group(&ga[j], &kb[(j + n) % 2]).0)
                .direct_sum(&ext_group(&ga[j], &kb[(j + n + 1) % 2]));
        }
        let kk = kk_group(&data, n, WINDOW).unwrap();
        let got = kk.group.as_expr().map(canonicalize);
        prop_assert_eq!(got, Some(GroupExpr::from_fg(&expected)));
    }

    #[test]
    fn kk_profile_is_hom_plus_ext(d in data(), n in 0usize..2) {
        let kk = kk_group(&d, n, WINDOW).unwrap();
        prop_assert_eq!(kk.group.profile.clone(), kk.hom.profile.direct_sum(&kk.ext.profile));
    }

    #[test]
    fn stable_data_over_countable_groups_is_countable(
        g0 in prop::sample::select(finite_groups(12)),
        b0 in prop::sample::select(countable()),
        b1 in prop::sample::select(countable()),
        n in 0usize..2,
    ) {
        let data = KTheoryData::new(DirectTower::stable(g0), DirectTower::stable(FgGroup::free(1)), b0, b1);
        let kk = kk_group(&data, n, WINDOW).unwrap();
        prop_assert_eq!(kk.group.profile.cardinality.is_countable(), Some(true));
    }

    #[test]
    fn milnor_vanishing_forces_jensen_vanishing(d in data(), n in 0usize..2) {
        let m = milnor_obstruction(&d, n, WINDOW).unwrap();
        let j = jensen_obstruction(&d, n, WINDOW).unwrap();
        if m.verdict.vanishes() {
            prop_assert!(j.verdict.vanishes(), "{:?}", j.verdict);
        }
    }

    #[test]
    fn fine_structure_matches_hausdorff_flag(d in data(), n in 0usize..2) {
        let z = fine_structure(&d, n, WINDOW).unwrap();
        let top = topology_report(&d, n, WINDOW).unwrap();
        let expected = match z.verdict {
            Lim1Verdict::Zero => Tri::Yes,
            Lim1Verdict::NonzeroCertified => Tri::No,
            Lim1Verdict::Inconclusive => Tri::Unknown,
        };
        prop_assert_eq!(top.hausdorff, expected);
        if z.verdict == Lim1Verdict::Zero {
            let kk = kk_group(&d, n, WINDOW).unwrap();
            let kl = kl_group(&d, n, WINDOW);
            let clash = kk.group.profile.separating_fields(&kl.profile);
            prop_assert!(clash.is_empty(), "KK and KL differ in {:?}", clash);
        }
    }

    #[test]
    fn random_finite_models_pass(seed in any::<u64>(), n in 0usize..2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_finite_data(&mut rng, 16, 1024);
        let r = finite_model_check(&d, n).unwrap();
        let failed: Vec<_> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
        prop_assert!(failed.is_empty(), "{:?}", failed);
    }
}
