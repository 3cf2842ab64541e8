//! Expressions for the countable (and some continuum-size) abelian groups
//! that arise as K-theory inputs and as outputs of limit computations.

mod canon;
mod ops;
mod parse;
mod profile;

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fg::FgGroup;
use crate::num::is_prime;

pub use canon::canonicalize;
pub use ops::{ext_from_fg, hom_from_fg, iso_check, quotient_by, torsion_subgroup_at, IsoVerdict};
pub use parse::parse_expr;
pub use profile::{invariants, Cardinality, Exponent, InvariantProfile, Tri};

/// `⊕_{n ≥ 1} Z/p^{e_n}` with `e_n = slope · n + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InfSum {
    pub p: u64,
    pub slope: u64,
    pub offset: i64,
}

impl InfSum {
    pub fn new(p: u64, slope: u64, offset: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidExpr(format!("{p} is not prime")));
        }
        if slope as i64 + offset < 1 {
            return Err(Error::InvalidExpr(format!(
                "exponent rule {slope}*n{offset:+} is not positive at n = 1"
            )));
        }
        Ok(InfSum { p, slope, offset })
    }

    pub fn constant(p: u64, e: u32) -> Self {
        InfSum {
            p,
            slope: 0,
            offset: e as i64,
        }
    }

    /// `e_n` for `n ≥ 1`.
    pub fn exponent(&self, n: u64) -> u32 {
        (self.slope as i64 * n as i64 + self.offset) as u32
    }

    pub fn first(&self) -> u32 {
        self.exponent(1)
    }

    pub fn is_bounded(&self) -> bool {
        self.slope == 0
    }

    fn rule_string(&self) -> String {
        let b = self.offset;
        match self.slope {
            0 => format!("{b}"),
            a => {
                let lead = if a == 1 { "n".to_string() } else { format!("{a}*n") };
                match b {
                    0 => lead,
                    b if b > 0 => format!("{lead}+{b}"),
                    b => format!("{lead}-{}", -b),
                }
            }
        }
    }
}

/// A group expression. Use [`canonicalize`] to obtain the normal form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum GroupExpr {
    /// `Z^r`.
    Free(u64),
    /// Free group of countably infinite rank, `Z^(omega)`.
    FreeCountable,
    /// `Z/d`, `d ≥ 1`.
    Cyclic(BigInt),
    /// `Z(p^∞)`.
    Prufer(u64),
    InfSum(InfSum),
    /// Countable product of copies of a finite group.
    InfProduct(Box<GroupExpr>),
    /// p-adic completion `lim H/p^n H`.
    Padic(u64, Box<GroupExpr>),
    /// Finite direct sum; `Sum([])` is the trivial group.
    Sum(Vec<GroupExpr>),
}

impl GroupExpr {
    pub fn zero() -> Self {
        GroupExpr::Sum(Vec::new())
    }

    pub fn z() -> Self {
        GroupExpr::Free(1)
    }

    pub fn cyclic(d: impl Into<BigInt>) -> Self {
        GroupExpr::Cyclic(d.into())
    }

    pub fn prufer(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidExpr(format!("{p} is not prime")));
        }
        Ok(GroupExpr::Prufer(p))
    }

    pub fn inf_sum(p: u64, slope: u64, offset: i64) -> Result<Self> {
        Ok(GroupExpr::InfSum(InfSum::new(p, slope, offset)?))
    }

    pub fn inf_product(base: GroupExpr) -> Result<Self> {
        let c = canonicalize(&base);
        if c.as_fg().is_none_or(|g| !g.is_finite()) {
            return Err(Error::InvalidExpr(format!(
                "InfProduct needs a finite base, got {c}"
            )));
        }
        Ok(GroupExpr::InfProduct(Box::new(base)))
    }

    pub fn padic(p: u64, of: GroupExpr) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidExpr(format!("{p} is not prime")));
        }
        Ok(GroupExpr::Padic(p, Box::new(of)))
    }

    pub fn sum(parts: impl IntoIterator<Item = GroupExpr>) -> Self {
        GroupExpr::Sum(parts.into_iter().collect())
    }

    pub fn from_fg(g: &FgGroup) -> Self {
        let mut parts = Vec::new();
        if g.rank() > 0 {
            parts.push(GroupExpr::Free(g.rank() as u64));
        }
        parts.extend(g.torsion().iter().cloned().map(GroupExpr::Cyclic));
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            GroupExpr::Sum(parts)
        }
    }

    /// The finitely generated group this expression denotes, if it is one.
    pub fn as_fg(&self) -> Option<FgGroup> {
        let mut rank = 0usize;
        let mut torsion = Vec::new();
        for a in canonicalize(self).atoms() {
            match a {
                GroupExpr::Free(r) => rank += r as usize,
                GroupExpr::Cyclic(d) => torsion.push(d),
                _ => return None,
            }
        }
        FgGroup::new(rank, torsion).ok()
    }

    pub fn is_zero(&self) -> bool {
        matches!(canonicalize(self), GroupExpr::Sum(ref xs) if xs.is_empty())
    }

    /// Summands of a canonical expression.
    pub fn atoms(&self) -> Vec<GroupExpr> {
        match self {
            GroupExpr::Sum(xs) => xs.clone(),
            x => vec![x.clone()],
        }
    }

    /// True when the expression contains no p-adic completion, i.e. lies in
    /// the fragment where isomorphism is decided by normal forms.
    pub fn in_fragment(&self) -> bool {
        match canonicalize(self) {
            GroupExpr::Sum(xs) => xs.iter().all(|x| !matches!(x, GroupExpr::Padic(..))),
            GroupExpr::Padic(..) => false,
            _ => true,
        }
    }

    /// Checks primes and exponent rules recursively.
    pub fn validate(&self) -> Result<()> {
        match self {
            GroupExpr::Free(_) | GroupExpr::FreeCountable => Ok(()),
            GroupExpr::Cyclic(d) => {
                if d < &BigInt::one() {
                    Err(Error::InvalidExpr(format!("Z/{d} needs d >= 1")))
                } else {
                    Ok(())
                }
            }
            GroupExpr::Prufer(p) => GroupExpr::prufer(*p).map(|_| ()),
            GroupExpr::InfSum(s) => InfSum::new(s.p, s.slope, s.offset).map(|_| ()),
            GroupExpr::InfProduct(b) => {
                b.validate()?;
                GroupExpr::inf_product((**b).clone()).map(|_| ())
            }
            GroupExpr::Padic(p, x) => {
                x.validate()?;
                GroupExpr::padic(*p, (**x).clone()).map(|_| ())
            }
            GroupExpr::Sum(xs) => xs.iter().try_for_each(GroupExpr::validate),
        }
    }
}

impl fmt::Display for GroupExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupExpr::Free(0) => write!(f, "0"),
            GroupExpr::Free(1) => write!(f, "Z"),
            GroupExpr::Free(r) => write!(f, "Z^{r}"),
            GroupExpr::FreeCountable => write!(f, "Z^(omega)"),
            GroupExpr::Cyclic(d) if d.is_one() => write!(f, "0"),
            GroupExpr::Cyclic(d) => write!(f, "Z/{d}"),
            GroupExpr::Prufer(p) => write!(f, "Prufer({p})"),
            GroupExpr::InfSum(s) => write!(f, "InfSum({}; {})", s.p, s.rule_string()),
            GroupExpr::InfProduct(b) => write!(f, "InfProduct({b})"),
            GroupExpr::Padic(p, x) => write!(f, "Padic({p}; {x})"),
            GroupExpr::Sum(xs) if xs.is_empty() => write!(f, "0"),
            GroupExpr::Sum(xs) => {
                write!(f, "Sum(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for GroupExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl std::str::FromStr for GroupExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_expr(s)
    }
}

impl Serialize for GroupExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_expr(&s).map_err(serde::de::Error::custom)
    }
}

impl From<&FgGroup> for GroupExpr {
    fn from(g: &FgGroup) -> Self {
        GroupExpr::from_fg(g)
    }
}
