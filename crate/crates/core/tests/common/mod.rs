//! Independent oracles and shared catalogs for the integration suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use uctkit::fg::FgGroup;
use uctkit::{DirectTower, GroupExpr, KTheoryData};

/// Every finite abelian group of order at most `max`, as invariant factors.
pub fn finite_groups(max: u64) -> Vec<FgGroup> {
    fn chains(prefix: &mut Vec<u64>, product: u64, max: u64, out: &mut Vec<Vec<u64>>) {
        out.push(prefix.clone());
        let last = prefix.last().copied().unwrap_or(1);
        // Next factor is a multiple of the last one; factors are stored
        // smallest first, so d_1 | d_2 | ... holds.
        let mut d = if prefix.is_empty() { 2 } else { last };
        while product * d <= max {
            if d % last == 0 && d > 1 {
                prefix.push(d);
                chains(prefix, product * d, max, out);
                prefix.pop();
            }
            d += 1;
        }
    }
    let mut out = Vec::new();
    chains(&mut Vec::new(), 1, max, &mut out);
    out.into_iter()
        .map(|c| FgGroup::new(0, c.into_iter().map(BigInt::from).collect()).unwrap())
        .collect()
}

fn order_of(g: &FgGroup, x: &[BigInt]) -> u64 {
    g.element_order(x).unwrap().to_u64().unwrap()
}

fn add(g: &FgGroup, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
    g.reduce(&x.iter().zip(y).map(|(a, b)| a + b).collect::<Vec<_>>())
}

fn scale(g: &FgGroup, x: &[BigInt], n: u64) -> Vec<BigInt> {
    g.reduce(&x.iter().map(|a| a * n).collect::<Vec<_>>())
}

/// `order -> number of elements` of a finite group given by such a table
/// for each cyclic factor of a direct product.
fn product_profile(factors: &[BTreeMap<u64, u64>]) -> BTreeMap<u64, u64> {
    let mut acc = BTreeMap::from([(1u64, 1u64)]);
    for f in factors {
        let mut next = BTreeMap::new();
        for (&a, &m) in &acc {
            for (&b, &k) in f {
                *next.entry(a.lcm(&b)).or_insert(0) += m * k;
            }
        }
        acc = next;
    }
    acc
}

/// Element-order statistics, which determine a finite abelian group up to
/// isomorphism. Computed from invariant factors by counting in each cyclic
/// factor.
pub fn order_statistics(g: &FgGroup) -> BTreeMap<u64, u64> {
    let factors: Vec<BTreeMap<u64, u64>> = g
        .torsion()
        .iter()
        .map(|d| {
            let d = d.to_u64().unwrap();
            let mut m = BTreeMap::new();
            for x in 0..d {
                *m.entry(d / x.gcd(&d)).or_insert(0) += 1;
            }
            m
        })
        .collect();
    product_profile(&factors)
}

/// Hom(G, H) by enumerating, for each generator of `g` of order `d`, the
/// admissible images `x ∈ H` with `d·x = 0`. The assignments are
/// independent, so the homomorphisms form the product of these sets; the
/// result is the element-order statistics of that product.
pub fn hom_oracle(g: &FgGroup, h: &FgGroup) -> BTreeMap<u64, u64> {
    assert_eq!(g.rank(), 0);
    let elems = h.elements();
    let factors: Vec<BTreeMap<u64, u64>> = g
        .torsion()
        .iter()
        .map(|d| {
            let d = d.to_u64().unwrap();
            let mut m = BTreeMap::new();
            for x in &elems {
                if h.is_zero_element(&scale(h, x, d)) {
                    *m.entry(order_of(h, x)).or_insert(0) += 1;
                }
            }
            m
        })
        .collect();
    product_profile(&factors)
}

/// Number of classes of extensions `0 → H → E_h → Z/a → 0` with
/// `E_h = (H ⊕ Z)/⟨(−h, a)⟩`. `E_h ≅ E_h'` over `H` and `Z/a` exactly when
/// the generator `t` of `E_h` can be sent to `x + t'` in `E_h'`, i.e. when
/// some `x ∈ H` gives `a·x + h' = h`; the witness `x` is searched for.
pub fn ext_class_oracle(a: u64, h: &FgGroup) -> u64 {
    let elems = h.elements();
    let mut reps: Vec<Vec<BigInt>> = Vec::new();
    for e in &elems {
        let equivalent = reps
            .iter()
            .any(|r| elems.iter().any(|x| add(h, &scale(h, x, a), r) == h.reduce(e)));
        if !equivalent {
            reps.push(h.reduce(e));
        }
    }
    reps.len() as u64
}

pub fn order(g: &FgGroup) -> u64 {
    g.order_u64().unwrap()
}

pub fn is_zero(x: &BigInt) -> bool {
    x.is_zero()
}

pub fn e(s: &str) -> GroupExpr {
    s.parse().unwrap()
}

pub fn t(s: &str) -> DirectTower {
    uctkit::tower::parse_tower(s).unwrap()
}

/// Direct towers covering every catalog shape.
pub fn catalog_towers() -> Vec<DirectTower> {
    [
        "stable(0)",
        "stable(Z)",
        "stable(Sum(Z, Z/6))",
        "prufer(2)",
        "prufer(3)",
        "prufer(5)",
        "elementary(2,1)",
        "elementary(3,2)",
        "free(1)",
        "free(2)",
        "affine(2; n)",
        "affine(3; 2*n+1)",
        "explicit([Z/2, Z/4], [[[2]]])",
        "explicit([Z, Sum(Z, Z/2)], [[[1],[0]]])",
    ]
    .into_iter()
    .map(t)
    .collect()
}

/// Finitely generated coefficient groups.
pub fn fg_targets() -> Vec<GroupExpr> {
    ["0", "Z", "Z/4", "Z/6", "Sum(Z^2, Z/2)", "Z/9"].into_iter().map(e).collect()
}

/// Coefficient groups outside the finitely generated range.
pub fn wild_targets() -> Vec<GroupExpr> {
    [
        "Prufer(2)",
        "Prufer(3)",
        "InfSum(2; n)",
        "InfSum(3; n)",
        "InfSum(2; 1)",
        "Z^(omega)",
        "InfProduct(Z/2)",
        "Sum(Z, Prufer(2))",
    ]
    .into_iter()
    .map(e)
    .collect()
}

pub fn all_targets() -> Vec<GroupExpr> {
    let mut v = fg_targets();
    v.extend(wild_targets());
    v
}

/// K-theory data sets used by the catalog-wide suites.
pub fn catalog_data() -> Vec<KTheoryData> {
    let zero = || t("stable(0)");
    let mut out = vec![
        KTheoryData::new(t("elementary(2,1)"), zero(), e("Z/2"), e("0")),
        KTheoryData::new(t("elementary(2,1)"), zero(), e("0"), e("Z")),
        KTheoryData::new(t("prufer(2)"), zero(), e("0"), e("InfSum(2; n)")),
        KTheoryData::new(t("prufer(3)"), zero(), e("0"), e("InfSum(3; n)")),
        KTheoryData::new(t("prufer(2)"), t("free(1)"), e("Z"), e("Prufer(2)")),
        KTheoryData::new(t("affine(2; n)"), t("stable(Z/4)"), e("Z/4"), e("Z")),
        KTheoryData::new(t("stable(Sum(Z, Z/6))"), t("stable(Z/4)"), e("Z/6"), e("Z^(omega)")),
        KTheoryData::new(t("explicit([Z/2, Z/4], [[[2]]])"), t("stable(Z/3)"), e("Z/4"), e("Z/6")),
        KTheoryData::new(t("elementary(3,1)"), t("prufer(3)"), e("Z/9"), e("Z")),
    ];
    out.push(KTheoryData::new(t("free(2)"), zero(), e("InfSum(2; n)"), e("Z/2")));
    out
}
