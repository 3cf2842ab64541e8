mod common;

use num_bigint::BigInt;
use proptest::prelude::*;

use uctkit::fg::{
    ext_group, ext_induced_co, ext_induced_contra, fg_from_presentation, hom_group, hom_induced, hom_induced_co,
    six_term_check, smith_normal_form, ExtGroup, HomGroup, ShortExactSequence,
};
use uctkit::{FgGroup, FgHom, IntMatrix, Subgroup};

fn group() -> impl Strategy<Value = FgGroup> {
    prop::collection::vec(prop::sample::select(vec![0u64, 2, 3, 4, 6, 8, 9, 12]), 0..4)
        .prop_map(FgGroup::from_cyclic_orders)
}

fn finite_group(max: u64) -> impl Strategy<Value = FgGroup> {
    prop::sample::select(common::finite_groups(max))
}

fn coords(n: usize) -> impl Strategy<Value = Vec<BigInt>> {
    prop::collection::vec(-20i64..20, n).prop_map(|v| v.into_iter().map(BigInt::from).collect())
}

/// A random homomorphism `g → h`, drawn from the coordinates of Hom(g, h).
fn hom(g: FgGroup, h: FgGroup) -> impl Strategy<Value = FgHom> {
    let hg = HomGroup::new(&g, &h);
    coords(hg.group().ngens()).prop_map(move |w| hg.hom_at(&w))
}

fn chain3() -> impl Strategy<Value = (FgHom, FgHom)> {
    (group(), group(), group())
        .prop_flat_map(|(a, b, c)| (hom(a, b.clone()), hom(b, c)))
}

fn same_map(a: &FgHom, b: &FgHom) -> bool {
    a.source() == b.source()
        && a.target() == b.target()
        && a.matrix()
            .columns()
            .iter()
            .zip(b.matrix().columns())
            .all(|(x, y)| a.target().reduce(x) == a.target().reduce(&y))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(-9i64..10, rows * cols).prop_map(move |v| {
        IntMatrix::from_vec(rows, cols, v.into_iter().map(BigInt::from).collect()).unwrap()
    })
}

/// Product of elementary row operations: unimodular by construction.
fn unimodular(n: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((0..n, 0..n, -3i64..4, any::<bool>()), 0..12).prop_map(move |ops| {
        let mut m = IntMatrix::identity(n);
        for (i, j, c, swap) in ops {
            let mut e = IntMatrix::identity(n);
            if swap {
                e[(i, i)] = BigInt::from(0);
                e[(j, j)] = BigInt::from(0);
                e[(i, j)] = BigInt::from(1);
                e[(j, i)] = BigInt::from(1);
                if i == j {
                    e[(i, i)] = BigInt::from(-1);
                }
            } else if i != j {
                e[(i, j)] = BigInt::from(c);
            }
            m = e.mul(&m);
        }
        m
    })
}

fn presentation() -> impl Strategy<Value = (IntMatrix, IntMatrix, IntMatrix)> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| (matrix(r, c), unimodular(r), unimodular(c)))
}

/// A short exact sequence `0 → S → H → H/S → 0` inside a finite group.
fn ses() -> impl Strategy<Value = ShortExactSequence> {
    finite_group(32)
        .prop_filter("nontrivial", |h| !h.is_trivial())
        .prop_flat_map(|h| {
            let elems = h.elements();
            (Just(h), prop::collection::vec(prop::sample::select(elems), 1..3))
        })
        .prop_map(|(h, gens)| {
            let sub = Subgroup::from_elements(&h, &gens);
            let pres = sub.structure_presentation();
            let iota = FgHom::new(pres.group.clone(), h, sub.generators().mul(&pres.from_canon)).unwrap();
            ShortExactSequence::new(iota, sub.projection()).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_is_invariant_under_unimodular_change((m, u, v) in presentation()) {
        let moved = u.mul(&m).mul(&v);
        prop_assert_eq!(fg_from_presentation(&m), fg_from_presentation(&moved));
        let f = smith_normal_form(&m);
        prop_assert_eq!(f.u.mul(&m).mul(&f.v), f.s.clone());
        let d = f.diagonal();
        prop_assert!(d.windows(2).all(|w| (&w[1] % &w[0]) == BigInt::from(0)));
        prop_assert_eq!(f.u.mul(&f.u_inv), IntMatrix::identity(m.rows()));
    }

    #[test]
    fn hom_and_ext_are_additive(a in group(), b in group(), h in group()) {
        let sum = a.direct_sum(&b);
        prop_assert_eq!(hom_group(&sum, &h).0, hom_group(&a, &h).0.direct_sum(&hom_group(&b, &h).0));
        prop_assert_eq!(ext_group(&sum, &h), ext_group(&a, &h).direct_sum(&ext_group(&b, &h)));
        prop_assert_eq!(hom_group(&h, &sum).0, hom_group(&h, &a).0.direct_sum(&hom_group(&h, &b).0));
        prop_assert_eq!(ext_group(&h, &sum), ext_group(&h, &a).direct_sum(&ext_group(&h, &b)));
    }

    #[test]
    fn hom_group_basis_spans_coordinates(g in group(), h in group(), w in coords(8)) {
        let hg = HomGroup::new(&g, &h);
        let n = hg.group().ngens();
        let w = hg.group().reduce(&w[..n.min(8)].iter().cloned().chain(std::iter::repeat(BigInt::from(0))).take(n).collect::<Vec<_>>());
        prop_assert_eq!(hg.coords(&hg.hom_at(&w)).unwrap(), w);
        prop_assert_eq!(hg.basis().len(), n);
    }

    #[test]
    fn contravariant_functors_reverse_composition((f, f2) in chain3(), h in group()) {
        let comp = f2.compose(&f).unwrap();
        let lhs = hom_induced(&comp, &h);
        let rhs = hom_induced(&f, &h).compose(&hom_induced(&f2, &h)).unwrap();
        prop_assert!(same_map(&lhs, &rhs));
        let lhs = ext_induced_contra(&comp, &h);
        let rhs = ext_induced_contra(&f, &h).compose(&ext_induced_contra(&f2, &h)).unwrap();
        prop_assert!(same_map(&lhs, &rhs));
    }

    #[test]
    fn covariant_functors_preserve_composition((r, r2) in chain3(), g in group()) {
        let comp = r2.compose(&r).unwrap();
        let lhs = hom_induced_co(&g, &comp);
        let rhs = hom_induced_co(&g, &r2).compose(&hom_induced_co(&g, &r)).unwrap();
        prop_assert!(same_map(&lhs, &rhs));
        let lhs = ext_induced_co(&g, &comp);
        let rhs = ext_induced_co(&g, &r2).compose(&ext_induced_co(&g, &r)).unwrap();
        prop_assert!(same_map(&lhs, &rhs));
    }

    #[test]
    fn identities_induce_identities(g in group(), h in group()) {
        let id_g = FgHom::identity(&g);
        let id_h = FgHom::identity(&h);
        let hom = HomGroup::new(&g, &h).group().clone();
        let ext = ExtGroup::new(&g, &h).group().clone();
        prop_assert!(same_map(&hom_induced(&id_g, &h), &FgHom::identity(&hom)));
        prop_assert!(same_map(&hom_induced_co(&g, &id_h), &FgHom::identity(&hom)));
        prop_assert!(same_map(&ext_induced_contra(&id_g, &h), &FgHom::identity(&ext)));
        prop_assert!(same_map(&ext_induced_co(&g, &id_h), &FgHom::identity(&ext)));
    }

    #[test]
    fn six_term_sequences_are_exact(s in ses(), g in group()) {
        let report = six_term_check(&s, &g).unwrap();
        prop_assert!(report.exact(), "{:?}", report.nodes);
        prop_assert_eq!(report.groups.len(), 6);
    }

    #[test]
    fn finite_hom_matches_oracle(g in finite_group(24), h in finite_group(24)) {
        prop_assert_eq!(common::order_statistics(&hom_group(&g, &h).0), common::hom_oracle(&g, &h));
    }
}
