//! Normal forms.
//!
//! Outside the p-adic completions every expression is a direct sum of a free
//! group, Prüfer groups, and cyclic p-groups with cardinal multiplicities
//! (bounded groups, including countable products of finite groups, are direct
//! sums of cyclics). Such a group is determined by its free rank, its Prüfer
//! counts and, for each prime, the multiplicity function `k ↦ m_p(k)` of
//! `Z/p^k`. The normal form is computed from exactly these invariants.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::{GroupExpr, InfSum};
use crate::fg::FgGroup;
use crate::num::{factor_big, pow, split_prime};

#[derive(Default)]
struct Decomp {
    free: u64,
    free_countable: bool,
    finite: Vec<BigInt>,
    prufer: BTreeMap<u64, u64>,
    progressions: Vec<InfSum>,
    countable: BTreeSet<(u64, u32)>,
    continuum: BTreeSet<(u64, u32)>,
    padic: BTreeMap<u64, Vec<GroupExpr>>,
}

impl Decomp {
    fn add(&mut self, e: &GroupExpr) {
        match e {
            GroupExpr::Free(r) => self.free += r,
            GroupExpr::FreeCountable => self.free_countable = true,
            GroupExpr::Cyclic(d) => {
                if !d.is_one() {
                    self.finite.push(d.clone());
                }
            }
            GroupExpr::Prufer(p) => *self.prufer.entry(*p).or_default() += 1,
            GroupExpr::InfSum(s) if s.is_bounded() => {
                self.countable.insert((s.p, s.first()));
            }
            GroupExpr::InfSum(s) => self.progressions.push(*s),
            GroupExpr::InfProduct(b) => {
                for d in finite_base_factors(b) {
                    for (p, v) in factor_big(&d).expect("invariant factor of a product base fits in u64") {
                        self.continuum.insert((p, v));
                    }
                }
            }
            GroupExpr::Padic(p, x) => {
                for a in canonicalize(x).atoms() {
                    self.add_completed(*p, &a);
                }
            }
            GroupExpr::Sum(xs) => xs.iter().for_each(|x| self.add(x)),
        }
    }

    /// Adds the p-adic completion of a canonical atom.
    fn add_completed(&mut self, p: u64, a: &GroupExpr) {
        match a {
            GroupExpr::Free(_) | GroupExpr::FreeCountable => {
                self.padic.entry(p).or_default().push(a.clone())
            }
            GroupExpr::Cyclic(d) => {
                let (v, _) = split_prime(d, p);
                if v > 0 {
                    self.finite.push(pow(p, v));
                }
            }
            GroupExpr::InfSum(s) if s.p == p => {
                if s.is_bounded() {
                    self.countable.insert((p, s.first()));
                } else {
                    self.padic.entry(p).or_default().push(a.clone());
                }
            }
            GroupExpr::InfProduct(b) => {
                for d in finite_base_factors(b) {
                    let (v, _) = split_prime(&d, p);
                    if v > 0 {
                        self.continuum.insert((p, v));
                    }
                }
            }
            GroupExpr::Padic(q, inner) if *q == p => self
                .padic
                .entry(p)
                .or_default()
                .extend(inner.atoms()),
            // Divisible by p: Prüfer groups, q-groups and q-adic groups.
            _ => {}
        }
    }
}

/// Invariant factors of a product base, which must be finite.
fn finite_base_factors(b: &GroupExpr) -> Vec<BigInt> {
    let g = b.as_fg().filter(FgGroup::is_finite);
    let g = g.unwrap_or_else(|| panic!("InfProduct base {b} is not a finite group"));
    g.torsion().to_vec()
}

/// Canonical progressions and remainder for one prime.
struct PrimePart {
    progressions: Vec<InfSum>,
    remainder: Vec<(u32, u64)>,
}

fn covers(s: &InfSum, k: u32) -> bool {
    let k = k as i64;
    k >= s.first() as i64 && (k - s.offset).rem_euclid(s.slope as i64) == 0
}

/// Rewrites the finite-multiplicity part of one prime: `finite[k]` copies of
/// `Z/p^k` plus the given progressions, with `wild` the positions already
/// carrying infinitely many copies.
fn prime_part(p: u64, finite: &BTreeMap<u32, u64>, progs: &[InfSum], wild: &BTreeSet<u32>) -> PrimePart {
    let count = |k: u32| progs.iter().filter(|s| covers(s, k)).count() as u64;
    let mult = |k: u32| finite.get(&k).copied().unwrap_or(0) + count(k);
    if progs.is_empty() {
        let remainder = finite
            .iter()
            .filter(|(k, _)| !wild.contains(k))
            .map(|(&k, &m)| (k, m))
            .collect();
        return PrimePart {
            progressions: Vec::new(),
            remainder,
        };
    }
    let l = progs.iter().fold(1u64, |acc, s| acc.lcm(&s.slope)) as u32;
    let k0 = finite
        .keys()
        .chain(wild.iter())
        .copied()
        .chain(progs.iter().map(InfSum::first))
        .max()
        .unwrap_or(0)
        + 1;
    let period = (1..=l)
        .filter(|d| l.is_multiple_of(*d))
        .find(|&d| (k0..k0 + l).all(|k| count(k) == count(k + d)))
        .expect("the lcm of the slopes is a period");
    let mut progressions = Vec::new();
    let mut used: BTreeMap<u32, u64> = BTreeMap::new();
    for k in k0..k0 + period {
        let tail = count(k);
        // Positions of this class below k0, descending.
        let below: Vec<u32> = (1..k0).rev().filter(|j| (k - j) % period == 0).collect();
        for level in 1..=tail {
            let mut start = k;
            for &j in &below {
                if wild.contains(&j) || mult(j) >= level {
                    start = j;
                } else {
                    break;
                }
            }
            progressions.push(InfSum {
                p,
                slope: period as u64,
                offset: start as i64 - period as i64,
            });
            for &j in &below {
                if j >= start && !wild.contains(&j) {
                    *used.entry(j).or_default() += 1;
                }
            }
        }
    }
    let mut remainder = Vec::new();
    for k in 1..k0 {
        if wild.contains(&k) {
            continue;
        }
        let m = mult(k) - used.get(&k).copied().unwrap_or(0);
        if m > 0 {
            remainder.push((k, m));
        }
    }
    PrimePart {
        progressions,
        remainder,
    }
}

fn assemble(mut d: Decomp) -> GroupExpr {
    // Completions first: their canonical inner parts may shed finite pieces.
    let mut padic_atoms = Vec::new();
    for (p, pieces) in std::mem::take(&mut d.padic) {
        let inner = canonicalize_fragment(GroupExpr::Sum(pieces));
        let mut kept = Vec::new();
        for a in inner.atoms() {
            match a {
                GroupExpr::Free(_) | GroupExpr::FreeCountable => kept.push(a),
                GroupExpr::InfSum(s) if !s.is_bounded() => kept.push(a),
                other => d.add_completed(p, &other),
            }
        }
        if !kept.is_empty() {
            let inner = if kept.len() == 1 {
                kept.pop().unwrap()
            } else {
                GroupExpr::Sum(kept)
            };
            padic_atoms.push(GroupExpr::Padic(p, Box::new(inner)));
        }
    }

    let mut primes: BTreeSet<u64> = d.prufer.keys().copied().collect();
    primes.extend(d.progressions.iter().map(|s| s.p));
    primes.extend(d.countable.iter().map(|&(p, _)| p));
    primes.extend(d.continuum.iter().map(|&(p, _)| p));

    let mut residual: Vec<BigInt> = Vec::new();
    let mut finite_by_prime: BTreeMap<u64, BTreeMap<u32, u64>> = BTreeMap::new();
    for x in d.finite {
        let mut x = x;
        for &p in &primes {
            let (v, rest) = split_prime(&x, p);
            if v > 0 {
                *finite_by_prime.entry(p).or_default().entry(v).or_default() += 1;
                x = rest;
            }
        }
        if !x.is_one() {
            residual.push(x);
        }
    }

    let mut inf_sums = Vec::new();
    let mut products = Vec::new();
    for &p in &primes {
        let wild: BTreeSet<u32> = d
            .countable
            .iter()
            .chain(d.continuum.iter())
            .filter(|(q, _)| *q == p)
            .map(|&(_, k)| k)
            .collect();
        for &k in &wild {
            if d.continuum.contains(&(p, k)) {
                products.push((p, k));
            } else {
                inf_sums.push(InfSum::constant(p, k));
            }
        }
        let progs: Vec<InfSum> = d.progressions.iter().filter(|s| s.p == p).copied().collect();
        let empty = BTreeMap::new();
        let part = prime_part(p, finite_by_prime.get(&p).unwrap_or(&empty), &progs, &wild);
        inf_sums.extend(part.progressions);
        for (k, m) in part.remainder {
            for _ in 0..m {
                residual.push(pow(p, k));
            }
        }
    }

    let mut atoms = Vec::new();
    if d.free_countable {
        atoms.push(GroupExpr::FreeCountable);
    }
    let fin = FgGroup::from_cyclic_orders(residual);
    if d.free > 0 && !d.free_countable {
        atoms.push(GroupExpr::Free(d.free));
    }
    atoms.extend(fin.torsion().iter().cloned().map(GroupExpr::Cyclic));
    for (&p, &c) in &d.prufer {
        for _ in 0..c {
            atoms.push(GroupExpr::Prufer(p));
        }
    }
    inf_sums.sort();
    atoms.extend(inf_sums.into_iter().map(GroupExpr::InfSum));
    products.sort();
    atoms.extend(
        products
            .into_iter()
            .map(|(p, k)| GroupExpr::InfProduct(Box::new(GroupExpr::Cyclic(pow(p, k))))),
    );
    atoms.extend(padic_atoms);
    if atoms.len() == 1 {
        atoms.pop().unwrap()
    } else {
        GroupExpr::Sum(atoms)
    }
}

fn canonicalize_fragment(e: GroupExpr) -> GroupExpr {
    let mut d = Decomp::default();
    d.add(&e);
    debug_assert!(d.padic.is_empty());
    assemble(d)
}

/// Normal form. Idempotent; on expressions without p-adic completions two
/// expressions are isomorphic iff their normal forms are equal.
pub fn canonicalize(e: &GroupExpr) -> GroupExpr {
    let mut d = Decomp::default();
    d.add(e);
    assemble(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> GroupExpr {
        s.parse().unwrap()
    }

    fn c(s: &str) -> String {
        canonicalize(&e(s)).to_string()
    }

    #[test]
    fn basic_merges() {
        assert_eq!(c("Sum(Z/2, Z/3)"), "Z/6");
        assert_eq!(c("Sum(Prufer(2), Z^0)"), "Prufer(2)");
        assert_eq!(c("InfSum(2; 1)"), "InfSum(2; 1)");
        assert_eq!(c("InfProduct(Z/2)"), "InfProduct(Z/2)");
        assert_ne!(c("InfSum(2; 1)"), c("InfProduct(Z/2)"));
        assert_eq!(c("Sum(Z, Z^(omega), Z/3)"), "Sum(Z^(omega), Z/3)");
        assert_eq!(c("InfProduct(Sum(Z/2, Z/6))"), "Sum(InfProduct(Z/2), InfProduct(Z/3))");
    }

    #[test]
    fn progressions_absorb_shifts() {
        // Z/2 ⊕ ⊕_{n≥2} Z/2^n = ⊕_{n≥1} Z/2^n
        assert_eq!(c("Sum(Z/2, InfSum(2; n+1))"), "InfSum(2; n)");
        // odd and even exponents recombine
        assert_eq!(c("Sum(InfSum(3; 2*n-1), InfSum(3; 2*n))"), "InfSum(3; n)");
        assert_eq!(
            c("Sum(InfSum(2; n), InfSum(2; 2*n))"),
            "Sum(InfSum(2; 2*n-1), InfSum(2; 2*n), InfSum(2; 2*n))"
        );
    }

    #[test]
    fn finite_remainders_survive() {
        // a gap in the sequence leaves nothing to absorb
        assert_eq!(c("Sum(Z/8, InfSum(2; n+4))"), "Sum(Z/8, InfSum(2; n+4))");
        // countable copies swallow everything at their exponent
        assert_eq!(c("Sum(Z/4, InfSum(2; 2), InfSum(2; n))"), "Sum(InfSum(2; 2), InfSum(2; n))");
    }

    #[test]
    fn completions() {
        assert_eq!(c("Padic(2; Sum(Z/12, Prufer(2), InfSum(3; n)))"), "Z/4");
        assert_eq!(c("Padic(2; Sum(Z, InfSum(2; n)))"), "Padic(2; Sum(Z, InfSum(2; n)))");
        assert_eq!(c("Padic(2; Padic(2; InfSum(2; n)))"), "Padic(2; InfSum(2; n))");
        assert_eq!(c("Padic(3; Padic(2; Z))"), "0");
        assert_eq!(c("Padic(5; InfSum(5; 3))"), "InfSum(5; 3)");
        assert_eq!(
            c("Sum(Padic(2; Z), Padic(2; InfSum(2; n)))"),
            "Padic(2; Sum(Z, InfSum(2; n)))"
        );
    }

    #[test]
    fn idempotent_on_samples() {
        for s in [
            "Sum(Z/2, InfSum(2; n+1), Prufer(3), Z^2, InfProduct(Z/4))",
            "Sum(InfSum(2; n), InfSum(2; 2*n), Z/16, Z/16)",
            "Padic(2; Sum(Z^(omega), InfSum(2; 3*n+1), Z/6))",
        ] {
            let once = canonicalize(&e(s));
            assert_eq!(canonicalize(&once), once, "{s}");
        }
    }
}
