use serde::Serialize;

use crate::expr::{canonicalize, invariants, Cardinality, Exponent, GroupExpr, InvariantProfile, Tri};
use crate::tower::{Certificate, Lim1Verdict, LimValue, PextResult, ValueHint};

/// Whether a short exact sequence is known to split.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Split {
    Yes,
    /// Known not to split, by the named external result.
    No { rule: String },
    Unknown,
}

/// `0 → sub → E → quotient → 0` with `E` not identified.
#[derive(Clone, Debug, Serialize)]
pub struct ExtensionDescriptor {
    pub sub: GroupValue,
    pub quotient: GroupValue,
    pub split: Split,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Value {
    Expr { value: GroupExpr },
    /// An inverse limit without a closed form.
    Pro { description: String },
    Extension(Box<ExtensionDescriptor>),
    /// A named group known only through verdicts and its profile.
    Described { description: String },
    Sum { summands: Vec<GroupValue> },
}

/// A group in a report: its value, invariant profile and supporting
/// certificates.
#[derive(Clone, Debug, Serialize)]
pub struct GroupValue {
    pub value: Value,
    pub profile: InvariantProfile,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<Certificate>,
}

fn extension_profile(sub: &InvariantProfile, quotient: &InvariantProfile, split: &Split) -> InvariantProfile {
    if *split == Split::Yes {
        return sub.direct_sum(quotient);
    }
    let exponent = match (&sub.exponent, &quotient.exponent) {
        (Exponent::Infinite, _) | (_, Exponent::Infinite) => Exponent::Infinite,
        // Without a splitting the exponent is only bounded by the product.
        _ => Exponent::Unknown,
    };
    let both = |a: Tri, b: Tri| if a.is_yes() && b.is_yes() { Tri::Yes } else { Tri::Unknown };
    InvariantProfile {
        cardinality: sub.cardinality.combine(&quotient.cardinality),
        exponent,
        divisible: both(sub.divisible, quotient.divisible),
        torsionfree: if sub.torsionfree.is_no() {
            Tri::No
        } else {
            both(sub.torsionfree, quotient.torsionfree)
        },
        reduced: if sub.reduced.is_no() { Tri::No } else { Tri::Unknown },
        sum_of_cyclics: Tri::Unknown,
        algebraically_compact: Tri::Unknown,
    }
}

impl GroupValue {
    pub fn expr(e: GroupExpr) -> Self {
        let e = canonicalize(&e);
        GroupValue {
            profile: invariants(&e),
            value: Value::Expr { value: e },
            certificates: Vec::new(),
        }
    }

    pub fn zero() -> Self {
        Self::expr(GroupExpr::zero())
    }

    pub fn with_certificate(mut self, c: Certificate) -> Self {
        self.certificates.push(c);
        self
    }

    pub fn from_lim(v: LimValue, c: Certificate) -> Self {
        let g = match v {
            LimValue::Expr { value } => Self::expr(value),
            LimValue::Pro(d) => GroupValue {
                value: Value::Pro {
                    description: d.description,
                },
                profile: d.profile,
                certificates: Vec::new(),
            },
        };
        g.with_certificate(c)
    }

    /// `Pext(G, H)` as a value: zero, or a described group whose profile
    /// carries whatever the verdict licenses.
    pub fn from_pext(label: String, r: &PextResult) -> Self {
        let g = match (r.verdict, &r.value_hint) {
            (Lim1Verdict::Zero, _) => Self::zero(),
            (_, Some(ValueHint::Expr { value })) => Self::expr(value.clone()),
            (_, hint) => {
                let mut profile = match hint {
                    Some(ValueHint::Profile { profile }) => profile.clone(),
                    _ => InvariantProfile::unknown(),
                };
                if profile.cardinality == Cardinality::Unknown && r.verdict == Lim1Verdict::Inconclusive {
                    profile.cardinality = Cardinality::Unknown;
                }
                GroupValue {
                    value: Value::Described { description: label },
                    profile,
                    certificates: Vec::new(),
                }
            }
        };
        g.with_certificate(r.certificate.clone())
    }

    pub fn extension(sub: GroupValue, quotient: GroupValue, split: Split) -> Self {
        if sub.is_zero() {
            let mut q = quotient;
            q.certificates.extend(sub.certificates);
            return q;
        }
        GroupValue {
            profile: extension_profile(&sub.profile, &quotient.profile, &split),
            value: Value::Extension(Box::new(ExtensionDescriptor { sub, quotient, split })),
            certificates: Vec::new(),
        }
    }

    /// Direct sum. Expression summands are merged into one canonical
    /// expression.
    pub fn sum(parts: Vec<GroupValue>) -> Self {
        let mut exprs = Vec::new();
        let mut certificates = Vec::new();
        let mut others = Vec::new();
        for p in parts {
            match p.value {
                Value::Expr { value } => {
                    exprs.push(value);
                    certificates.extend(p.certificates);
                }
                Value::Sum { summands } => {
                    let inner = GroupValue::sum(summands);
                    certificates.extend(p.certificates);
                    match inner.value {
                        Value::Expr { value } => {
                            exprs.push(value);
                            certificates.extend(inner.certificates);
                        }
                        Value::Sum { summands } => {
                            for s in summands {
                                match s.value {
                                    Value::Expr { value } => exprs.push(value),
                                    _ => others.push(s),
                                }
                            }
                            certificates.extend(inner.certificates);
                        }
                        _ => others.push(inner),
                    }
                }
                _ => others.push(p),
            }
        }
        let merged = canonicalize(&GroupExpr::Sum(exprs));
        if others.is_empty() {
            let mut g = GroupValue::expr(merged);
            g.certificates = certificates;
            return g;
        }
        let mut summands = Vec::new();
        if !merged.is_zero() {
            summands.push(GroupValue::expr(merged));
        }
        summands.extend(others);
        if summands.len() == 1 {
            let mut g = summands.pop().unwrap();
            g.certificates.extend(certificates);
            return g;
        }
        let profile = summands
            .iter()
            .fold(InvariantProfile::trivial(), |acc, s| acc.direct_sum(&s.profile));
        GroupValue {
            value: Value::Sum { summands },
            profile,
            certificates,
        }
    }

    pub fn as_expr(&self) -> Option<&GroupExpr> {
        match &self.value {
            Value::Expr { value } => Some(value),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_expr().is_some_and(GroupExpr::is_zero)
    }

    pub fn describe(&self) -> String {
        match &self.value {
            Value::Expr { value } => value.to_string(),
            Value::Pro { description } | Value::Described { description } => description.clone(),
            Value::Extension(d) => format!("extension of {} by {}", d.quotient.describe(), d.sub.describe()),
            Value::Sum { summands } => {
                let parts: Vec<String> = summands.iter().map(GroupValue::describe).collect();
                format!("Sum({})", parts.join(", "))
            }
        }
    }

    pub fn as_extension(&self) -> Option<&ExtensionDescriptor> {
        match &self.value {
            Value::Extension(d) => Some(d),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> GroupExpr {
        s.parse().unwrap()
    }

    #[test]
    fn sums_merge_expressions() {
        let g = GroupValue::sum(vec![GroupValue::expr(e("Z/2")), GroupValue::zero(), GroupValue::expr(e("Z/3"))]);
        assert_eq!(g.as_expr(), Some(&e("Z/6")));
    }

    #[test]
    fn extension_profiles() {
        let sub = GroupValue {
            value: Value::Described {
                description: "P".into(),
            },
            profile: InvariantProfile::unknown(),
            certificates: Vec::new(),
        };
        let q = GroupValue::expr(e("Padic(2; InfSum(2; n))"));
        let x = GroupValue::extension(sub, q, Split::Unknown);
        assert_eq!(x.profile.cardinality, Cardinality::Continuum);
        assert_eq!(x.profile.exponent, Exponent::Infinite);
        let y = GroupValue::extension(GroupValue::zero(), GroupValue::expr(e("Z/4")), Split::Unknown);
        assert_eq!(y.as_expr(), Some(&e("Z/4")));
    }
}
