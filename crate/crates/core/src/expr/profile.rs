use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::canon::canonicalize;
use super::GroupExpr;
use crate::num::pow;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl Tri {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }

    /// Property of a finite direct sum that holds iff it holds for every
    /// summand.
    pub fn all(xs: impl IntoIterator<Item = Tri>) -> Tri {
        let mut acc = Tri::Yes;
        for x in xs {
            match x {
                Tri::No => return Tri::No,
                Tri::Unknown => acc = Tri::Unknown,
                Tri::Yes => {}
            }
        }
        acc
    }

    pub fn is_yes(self) -> bool {
        self == Tri::Yes
    }

    pub fn is_no(self) -> bool {
        self == Tri::No
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Cardinality {
    Finite(#[serde(with = "crate::num::serde_big")] BigInt),
    CountablyInfinite,
    Continuum,
    Unknown,
}

impl Cardinality {
    fn rank(&self) -> u8 {
        match self {
            Cardinality::Finite(_) => 0,
            Cardinality::CountablyInfinite => 1,
            Cardinality::Continuum => 2,
            Cardinality::Unknown => 3,
        }
    }

    /// Cardinality of a direct sum (or of any extension).
    pub fn combine(&self, other: &Cardinality) -> Cardinality {
        match (self, other) {
            (Cardinality::Finite(a), Cardinality::Finite(b)) => Cardinality::Finite(a * b),
            (Cardinality::Unknown, _) | (_, Cardinality::Unknown) => {
                // Continuum is the largest size any of our groups can have.
                if self == &Cardinality::Continuum || other == &Cardinality::Continuum {
                    Cardinality::Continuum
                } else {
                    Cardinality::Unknown
                }
            }
            _ => {
                if self.rank() >= other.rank() {
                    self.clone()
                } else {
                    other.clone()
                }
            }
        }
    }

    pub fn is_countable(&self) -> Option<bool> {
        match self {
            Cardinality::Finite(_) | Cardinality::CountablyInfinite => Some(true),
            Cardinality::Continuum => Some(false),
            Cardinality::Unknown => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Exponent {
    Finite(#[serde(with = "crate::num::serde_big")] BigInt),
    Infinite,
    Unknown,
}

impl Exponent {
    /// Exponent of a direct sum.
    pub fn combine(&self, other: &Exponent) -> Exponent {
        match (self, other) {
            (Exponent::Finite(a), Exponent::Finite(b)) => Exponent::Finite(a.lcm(b)),
            (Exponent::Infinite, _) | (_, Exponent::Infinite) => Exponent::Infinite,
            _ => Exponent::Unknown,
        }
    }

    pub fn is_finite(&self) -> Option<bool> {
        match self {
            Exponent::Finite(_) => Some(true),
            Exponent::Infinite => Some(false),
            Exponent::Unknown => None,
        }
    }
}

/// Structural invariants used by the vanishing criteria.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct InvariantProfile {
    pub cardinality: Cardinality,
    pub exponent: Exponent,
    pub divisible: Tri,
    pub torsionfree: Tri,
    pub reduced: Tri,
    pub sum_of_cyclics: Tri,
    pub algebraically_compact: Tri,
}

impl InvariantProfile {
    pub fn trivial() -> Self {
        InvariantProfile {
            cardinality: Cardinality::Finite(BigInt::one()),
            exponent: Exponent::Finite(BigInt::one()),
            divisible: Tri::Yes,
            torsionfree: Tri::Yes,
            reduced: Tri::Yes,
            sum_of_cyclics: Tri::Yes,
            algebraically_compact: Tri::Yes,
        }
    }

    pub fn unknown() -> Self {
        InvariantProfile {
            cardinality: Cardinality::Unknown,
            exponent: Exponent::Unknown,
            divisible: Tri::Unknown,
            torsionfree: Tri::Unknown,
            reduced: Tri::Unknown,
            sum_of_cyclics: Tri::Unknown,
            algebraically_compact: Tri::Unknown,
        }
    }

    /// Profile of a finite direct sum.
    pub fn direct_sum(&self, other: &InvariantProfile) -> InvariantProfile {
        InvariantProfile {
            cardinality: self.cardinality.combine(&other.cardinality),
            exponent: self.exponent.combine(&other.exponent),
            divisible: Tri::all([self.divisible, other.divisible]),
            torsionfree: Tri::all([self.torsionfree, other.torsionfree]),
            reduced: Tri::all([self.reduced, other.reduced]),
            sum_of_cyclics: Tri::all([self.sum_of_cyclics, other.sum_of_cyclics]),
            algebraically_compact: Tri::all([self.algebraically_compact, other.algebraically_compact]),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.cardinality == Cardinality::Finite(BigInt::one())
    }

    /// Fields on which two profiles provably differ.
    pub fn separating_fields(&self, other: &InvariantProfile) -> Vec<&'static str> {
        let mut out = Vec::new();
        let known = |a: &Cardinality, b: &Cardinality| {
            a != &Cardinality::Unknown && b != &Cardinality::Unknown && a != b
        };
        if known(&self.cardinality, &other.cardinality) {
            out.push("cardinality");
        }
        if self.exponent != Exponent::Unknown && other.exponent != Exponent::Unknown && self.exponent != other.exponent {
            out.push("exponent");
        }
        let tri = |a: Tri, b: Tri| a != Tri::Unknown && b != Tri::Unknown && a != b;
        for (name, a, b) in [
            ("divisible", self.divisible, other.divisible),
            ("torsionfree", self.torsionfree, other.torsionfree),
            ("reduced", self.reduced, other.reduced),
            ("sum_of_cyclics", self.sum_of_cyclics, other.sum_of_cyclics),
            ("algebraically_compact", self.algebraically_compact, other.algebraically_compact),
        ] {
            if tri(a, b) {
                out.push(name);
            }
        }
        out
    }
}

fn atom_profile(a: &GroupExpr) -> InvariantProfile {
    use Tri::{No, Yes};
    let infinite_exp = Exponent::Infinite;
    match a {
        GroupExpr::Free(0) => InvariantProfile::trivial(),
        GroupExpr::Free(_) | GroupExpr::FreeCountable => InvariantProfile {
            cardinality: Cardinality::CountablyInfinite,
            exponent: infinite_exp,
            divisible: No,
            torsionfree: Yes,
            reduced: Yes,
            sum_of_cyclics: Yes,
            algebraically_compact: No,
        },
        GroupExpr::Cyclic(d) if d.is_one() => InvariantProfile::trivial(),
        GroupExpr::Cyclic(d) => InvariantProfile {
            cardinality: Cardinality::Finite(d.clone()),
            exponent: Exponent::Finite(d.clone()),
            divisible: No,
            torsionfree: No,
            reduced: Yes,
            sum_of_cyclics: Yes,
            algebraically_compact: Yes,
        },
        GroupExpr::Prufer(_) => InvariantProfile {
            cardinality: Cardinality::CountablyInfinite,
            exponent: infinite_exp,
            divisible: Yes,
            torsionfree: No,
            reduced: No,
            sum_of_cyclics: No,
            algebraically_compact: Yes,
        },
        GroupExpr::InfSum(s) => InvariantProfile {
            cardinality: Cardinality::CountablyInfinite,
            exponent: if s.is_bounded() {
                Exponent::Finite(pow(s.p, s.first()))
            } else {
                infinite_exp
            },
            divisible: No,
            torsionfree: No,
            reduced: Yes,
            sum_of_cyclics: Yes,
            // Bounded groups are algebraically compact; unbounded reduced
            // direct sums of cyclics are not.
            algebraically_compact: Tri::from_bool(s.is_bounded()),
        },
        GroupExpr::InfProduct(b) => {
            let base = b.as_fg().expect("finite product base");
            InvariantProfile {
                cardinality: Cardinality::Continuum,
                exponent: Exponent::Finite(base.exponent().unwrap()),
                divisible: Tri::from_bool(base.is_trivial()),
                torsionfree: Tri::from_bool(base.is_trivial()),
                reduced: Yes,
                sum_of_cyclics: Yes,
                algebraically_compact: Yes,
            }
        }
        GroupExpr::Padic(_, inner) => {
            let torsionfree = inner
                .atoms()
                .iter()
                .all(|x| matches!(x, GroupExpr::Free(_) | GroupExpr::FreeCountable));
            InvariantProfile {
                cardinality: Cardinality::Continuum,
                exponent: infinite_exp,
                divisible: No,
                torsionfree: Tri::from_bool(torsionfree),
                reduced: Yes,
                // A nonzero p-adically complete group has elements of infinite
                // order and is q-divisible for q ≠ p, which no direct sum of
                // cyclic groups with such elements is.
                sum_of_cyclics: No,
                algebraically_compact: Tri::Unknown,
            }
        }
        GroupExpr::Sum(xs) => xs
            .iter()
            .map(atom_profile)
            .fold(InvariantProfile::trivial(), |acc, p| acc.direct_sum(&p)),
    }
}

/// Invariant profile; total on all expressions.
pub fn invariants(e: &GroupExpr) -> InvariantProfile {
    atom_profile(&canonicalize(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prof(s: &str) -> InvariantProfile {
        invariants(&s.parse().unwrap())
    }

    #[test]
    fn atom_table() {
        let p = prof("InfProduct(Z/2)");
        assert_eq!(p.cardinality, Cardinality::Continuum);
        assert_eq!(p.exponent, Exponent::Finite(BigInt::from(2)));
        assert_eq!(p.reduced, Tri::Yes);

        let p = prof("Prufer(3)");
        assert_eq!((p.divisible, p.torsionfree), (Tri::Yes, Tri::No));

        let p = prof("InfSum(5; n)");
        assert_eq!(p.cardinality, Cardinality::CountablyInfinite);
        assert_eq!(p.exponent, Exponent::Infinite);
        assert_eq!((p.reduced, p.sum_of_cyclics), (Tri::Yes, Tri::Yes));
        assert_eq!(p.algebraically_compact, Tri::No);
    }

    #[test]
    fn sums_combine() {
        let p = prof("Sum(Z/4, Z/6)");
        assert_eq!(p.cardinality, Cardinality::Finite(BigInt::from(24)));
        assert_eq!(p.exponent, Exponent::Finite(BigInt::from(12)));
        let p = prof("Sum(Prufer(2), Prufer(3))");
        assert!(p.divisible.is_yes());
        let p = prof("Sum(Prufer(2), Z)");
        assert!(p.divisible.is_no() && p.reduced.is_no());
        assert!(prof("0").is_trivial());
    }
}
