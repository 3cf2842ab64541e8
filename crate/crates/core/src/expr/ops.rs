use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::canon::canonicalize;
use super::profile::invariants;
use super::{GroupExpr, InfSum};
use crate::error::{Error, Result};
use crate::fg::{ext_group, hom_group, FgGroup};
use crate::num::{factor_big, pow, valuation};

fn require_positive(n: &BigInt, what: &str) -> Result<()> {
    if n < &BigInt::one() {
        return Err(Error::InvalidExpr(format!("{what} needs a positive integer, got {n}")));
    }
    Ok(())
}

/// `⊕_n Z/p^{min(e_n, v)}` for a progression, split into the finitely many
/// short summands and the constant tail.
fn truncate_progression(s: &InfSum, v: u32, out: &mut Vec<GroupExpr>) {
    if v == 0 {
        return;
    }
    if s.is_bounded() {
        out.push(GroupExpr::InfSum(InfSum::constant(s.p, s.first().min(v))));
        return;
    }
    let mut n = 1;
    while s.exponent(n) < v {
        out.push(GroupExpr::Cyclic(pow(s.p, s.exponent(n))));
        n += 1;
    }
    out.push(GroupExpr::InfSum(InfSum::constant(s.p, v)));
}

/// `e[d] = {x : dx = 0}`.
pub fn torsion_subgroup_at(e: &GroupExpr, d: &BigInt) -> Result<GroupExpr> {
    require_positive(d, "torsion_subgroup_at")?;
    let mut out = Vec::new();
    for a in canonicalize(e).atoms() {
        match &a {
            GroupExpr::Free(_) | GroupExpr::FreeCountable => {}
            GroupExpr::Cyclic(c) => out.push(GroupExpr::Cyclic(c.gcd(d))),
            GroupExpr::Prufer(p) => out.push(GroupExpr::Cyclic(pow(*p, valuation(d, *p)))),
            GroupExpr::InfSum(s) => truncate_progression(s, valuation(d, s.p), &mut out),
            GroupExpr::InfProduct(b) => {
                let base = b.as_fg().expect("finite product base");
                let c = base.exponent().expect("finite").gcd(d);
                out.push(GroupExpr::InfProduct(Box::new(GroupExpr::Cyclic(c))));
            }
            GroupExpr::Padic(p, inner) => {
                // Torsion of the completion of ⊕ Z/p^{e_n} with e_n → ∞ is the
                // full product of the torsion of the summands.
                let v = valuation(d, *p);
                if v == 0 {
                    continue;
                }
                for x in inner.atoms() {
                    if let GroupExpr::InfSum(s) = x {
                        let mut n = 1;
                        while s.exponent(n) < v {
                            out.push(GroupExpr::Cyclic(pow(s.p, s.exponent(n))));
                            n += 1;
                        }
                        out.push(GroupExpr::InfProduct(Box::new(GroupExpr::Cyclic(pow(*p, v)))));
                    }
                }
            }
            GroupExpr::Sum(_) => unreachable!("atoms are not sums"),
        }
    }
    Ok(canonicalize(&GroupExpr::Sum(out)))
}

/// `e / n·e`.
pub fn quotient_by(e: &GroupExpr, n: &BigInt) -> Result<GroupExpr> {
    require_positive(n, "quotient_by")?;
    let mut out = Vec::new();
    for a in canonicalize(e).atoms() {
        match &a {
            GroupExpr::Free(r) => {
                for _ in 0..*r {
                    out.push(GroupExpr::Cyclic(n.clone()));
                }
            }
            GroupExpr::FreeCountable => {
                for (q, v) in factor_big(n)? {
                    out.push(GroupExpr::InfSum(InfSum::constant(q, v)));
                }
            }
            GroupExpr::Cyclic(c) => out.push(GroupExpr::Cyclic(c.gcd(n))),
            GroupExpr::Prufer(_) => {}
            GroupExpr::InfSum(s) => truncate_progression(s, valuation(n, s.p), &mut out),
            GroupExpr::InfProduct(b) => {
                let base = b.as_fg().expect("finite product base");
                let c = base.exponent().expect("finite").gcd(n);
                out.push(GroupExpr::InfProduct(Box::new(GroupExpr::Cyclic(c))));
            }
            GroupExpr::Padic(p, inner) => {
                // Ĥ / p^v Ĥ = H / p^v H.
                let v = valuation(n, *p);
                if v > 0 {
                    out.push(quotient_by(inner, &pow(*p, v))?);
                }
            }
            GroupExpr::Sum(_) => unreachable!("atoms are not sums"),
        }
    }
    Ok(canonicalize(&GroupExpr::Sum(out)))
}

/// `Hom(g, h)`: `h^r ⊕ ⊕_j h[d_j]`.
pub fn hom_from_fg(g: &FgGroup, h: &GroupExpr) -> Result<GroupExpr> {
    if let Some(hf) = h.as_fg() {
        return Ok(GroupExpr::from_fg(&hom_group(g, &hf).0));
    }
    let mut out = vec![h.clone(); g.rank()];
    for d in g.torsion() {
        out.push(torsion_subgroup_at(h, d)?);
    }
    Ok(canonicalize(&GroupExpr::Sum(out)))
}

/// `Ext(g, h)`: `⊕_j h / d_j h`.
pub fn ext_from_fg(g: &FgGroup, h: &GroupExpr) -> Result<GroupExpr> {
    if let Some(hf) = h.as_fg() {
        return Ok(GroupExpr::from_fg(&ext_group(g, &hf)));
    }
    let mut out = Vec::new();
    for d in g.torsion() {
        out.push(quotient_by(h, d)?);
    }
    Ok(canonicalize(&GroupExpr::Sum(out)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum IsoVerdict {
    Equal,
    Distinct { fields: Vec<String> },
    Undecided,
}

/// Isomorphism test. Never wrong: outside the decidable fragment it answers
/// only when the invariant profiles separate the groups or the normal forms
/// agree verbatim.
pub fn iso_check(a: &GroupExpr, b: &GroupExpr) -> IsoVerdict {
    let (ca, cb) = (canonicalize(a), canonicalize(b));
    if ca == cb {
        return IsoVerdict::Equal;
    }
    let fields = invariants(&ca).separating_fields(&invariants(&cb));
    if !fields.is_empty() {
        return IsoVerdict::Distinct {
            fields: fields.into_iter().map(String::from).collect(),
        };
    }
    if a.in_fragment() && b.in_fragment() {
        IsoVerdict::Distinct {
            fields: vec!["normal_form".into()],
        }
    } else {
        IsoVerdict::Undecided
    }
}
