use serde::Serialize;

use super::analysis::{lim1, split_product, Lim1Verdict, LimValue, ValueHint};
use super::certificate::Certificate;
use super::direct::{colimit_group, DirectKind, DirectTower};
use super::inverse::apply_hom;
use crate::error::{Error, Result};
use crate::expr::{canonicalize, invariants, quotient_by, GroupExpr, InvariantProfile, Tri};
use crate::fg::{ext_induced_contra, kernel_subgroup};
use crate::num::pow;

/// Verdict of the structural vanishing rules for `Pext(G, H)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleVerdict {
    Zero,
    Divisible,
    NoVerdict,
}

/// Which rule fired, by name.
pub fn pext_rule(g: &InvariantProfile, h: &InvariantProfile) -> (RuleVerdict, Option<&'static str>) {
    if g.sum_of_cyclics.is_yes() {
        (RuleVerdict::Zero, Some("source_sum_of_cyclics"))
    } else if h.algebraically_compact.is_yes() {
        (RuleVerdict::Zero, Some("target_algebraically_compact"))
    } else if g.torsionfree.is_yes() {
        (RuleVerdict::Divisible, Some("source_torsionfree"))
    } else if h.torsionfree.is_yes() {
        (RuleVerdict::Divisible, Some("target_torsionfree"))
    } else {
        (RuleVerdict::NoVerdict, None)
    }
}

pub fn pext_rules(g: &InvariantProfile, h: &InvariantProfile) -> RuleVerdict {
    pext_rule(g, h).0
}

#[derive(Clone, Debug, Serialize)]
pub struct PextResult {
    pub verdict: Lim1Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_hint: Option<ValueHint>,
    pub certificate: Certificate,
    pub rule: RuleVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule_name: Option<&'static str>,
    /// Verdict of the window computation alone.
    pub window_verdict: Lim1Verdict,
}

/// `Pext(colim G_i, h) ≅ lim¹ Hom(G_i, h)`, cross-checked against the
/// structural rules.
pub fn pext(t: &DirectTower, h: &GroupExpr, window: usize) -> Result<PextResult> {
    let l = lim1(&apply_hom(t, h), window);
    if !l.certificate.verify() {
        return Err(Error::Internal(format!("certificate for Pext({t}, {h}) does not replay")));
    }
    let (rule, rule_name) = pext_rule(&invariants(&colimit_group(t)), &invariants(h));
    let zero_hint = Some(ValueHint::Expr {
        value: GroupExpr::zero(),
    });
    let (verdict, value_hint, certificate) = match (rule, l.verdict) {
        (RuleVerdict::Zero, Lim1Verdict::NonzeroCertified) => {
            return Err(Error::Internal(format!(
                "Pext({t}, {h}): rule {} says zero but the window certifies nonzero",
                rule_name.unwrap_or("?")
            )))
        }
        (RuleVerdict::Zero, Lim1Verdict::Inconclusive) => (
            Lim1Verdict::Zero,
            zero_hint,
            Certificate::RuleDerived {
                rule: rule_name.unwrap().into(),
            },
        ),
        (_, Lim1Verdict::Zero) => (Lim1Verdict::Zero, zero_hint, l.certificate),
        (RuleVerdict::Divisible, v) => {
            let hint = (v == Lim1Verdict::NonzeroCertified).then(|| ValueHint::Profile {
                profile: InvariantProfile {
                    divisible: Tri::Yes,
                    ..InvariantProfile::unknown()
                },
            });
            (v, hint, l.certificate)
        }
        (_, v) => (v, None, l.certificate),
    };
    Ok(PextResult {
        verdict,
        value_hint,
        certificate,
        rule,
        rule_name,
        window_verdict: l.verdict,
    })
}

/// `∩_n n·E` against a Pext verdict.
#[derive(Clone, Debug, Serialize)]
pub struct ZadicReport {
    pub ext_value: GroupExpr,
    /// Whether the intersection was computed (expression in the fragment).
    pub decided: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closure_of_zero: Option<GroupExpr>,
    pub pext_verdict: Lim1Verdict,
    pub consistent: bool,
    /// The Z-adic topology is discrete iff some `nE` vanishes.
    pub zadic_discrete: Tri,
}

/// Computes `∩_n n·E` and checks it against the Pext verdict: a trivial
/// intersection forbids a nonzero verdict and a nontrivial one forbids zero.
pub fn zadic_closure_check(ext_value: &GroupExpr, pext: &PextResult) -> Result<ZadicReport> {
    let e = canonicalize(ext_value);
    let decided = e.in_fragment();
    let closure = decided.then(|| {
        // Only divisible summands survive every multiplication; all other
        // atoms in the fragment are reduced with no infinitely divisible
        // elements.
        canonicalize(&GroupExpr::Sum(
            e.atoms().into_iter().filter(|a| matches!(a, GroupExpr::Prufer(_))).collect(),
        ))
    });
    let consistent = match (&closure, pext.verdict) {
        (Some(c), Lim1Verdict::NonzeroCertified) => !c.is_zero(),
        (Some(c), Lim1Verdict::Zero) => c.is_zero(),
        _ => true,
    };
    if !consistent {
        return Err(Error::Internal(format!(
            "closure of zero in {e} is {} but Pext verdict is {:?}",
            closure.as_ref().unwrap(),
            pext.verdict
        )));
    }
    let zadic_discrete = match invariants(&e).exponent.is_finite() {
        Some(b) => Tri::from_bool(b),
        None => Tri::Unknown,
    };
    Ok(ZadicReport {
        ext_value: e,
        decided,
        closure_of_zero: closure,
        pext_verdict: pext.verdict,
        consistent,
        zadic_discrete,
    })
}

/// `Ker(Ext(G, h) → Ext(G_i, h))` at one stage.
#[derive(Clone, Debug, Serialize)]
pub struct KernelDescriptor {
    pub stage: usize,
    pub trivial: Tri,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<GroupExpr>,
    pub description: String,
}

/// Kernels of `Ext(G, h) → Ext(G_i, h)` for `i = 1..=window`. Since the Ext
/// tower is onto, each kernel is an extension of
/// `Ker(lim_j Ext(G_j, h) → Ext(G_i, h))` by `Pext(G, h)`.
pub fn jensen_kernel_profile(t: &DirectTower, h: &GroupExpr, window: usize) -> Result<Vec<KernelDescriptor>> {
    let h = canonicalize(h);
    let mut out = Vec::with_capacity(window);
    match t.kind() {
        DirectKind::Stable(_) | DirectKind::Explicit { .. } => {
            let n = t.stable_from().unwrap();
            for i in 1..=window {
                if i >= n {
                    out.push(KernelDescriptor {
                        stage: i,
                        trivial: Tri::Yes,
                        value: Some(GroupExpr::zero()),
                        description: format!("G = G_{n} is reached by stage {i}"),
                    });
                    continue;
                }
                match h.as_fg() {
                    Some(f) => {
                        let k = kernel_subgroup(&ext_induced_contra(&t.map_between(i, n), &f)).structure();
                        out.push(KernelDescriptor {
                            stage: i,
                            trivial: Tri::from_bool(k.is_trivial()),
                            value: Some(GroupExpr::from_fg(&k)),
                            description: format!("kernel of Ext(G_{n}, {h}) -> Ext(G_{i}, {h})"),
                        });
                    }
                    None => out.push(KernelDescriptor {
                        stage: i,
                        trivial: Tri::Unknown,
                        value: None,
                        description: format!("kernel of Ext(G_{n}, {h}) -> Ext(G_{i}, {h}) with infinite coefficients"),
                    }),
                }
            }
        }
        DirectKind::Prufer { p } => {
            let pe = pext(t, &h, window)?;
            for i in 1..=window {
                // lim_j h/p^j h → h/p^i h has kernel the closure of p^i h,
                // which vanishes iff p^i h = p^(i+1) h, i.e. h/p^(i+1) h is
                // killed by p^i.
                let q = quotient_by(&h, &pow(*p, i as u32 + 1))?;
                let moves = match invariants(&q).exponent {
                    crate::expr::Exponent::Finite(e) => Some(!(pow(*p, i as u32) % e).eq(&0.into())),
                    _ => None,
                };
                let (trivial, description) = match (moves, pe.verdict) {
                    (Some(true), _) => (Tri::No, format!("contains the closure of {p}^{i}·{h} in the completion")),
                    (Some(false), Lim1Verdict::Zero) => (Tri::Yes, "equals Pext, which vanishes".to_string()),
                    (Some(false), Lim1Verdict::NonzeroCertified) => (Tri::No, "equals Pext, which is nonzero".to_string()),
                    _ => (Tri::Unknown, "contains Pext".to_string()),
                };
                out.push(KernelDescriptor {
                    stage: i,
                    trivial,
                    value: (trivial == Tri::Yes).then(GroupExpr::zero),
                    description,
                });
            }
        }
        kind => {
            // Sums of cyclic groups have Pext = 0, so the kernel is the
            // product of Ext(C_n, h) over the summands beyond stage i.
            for i in 1..=window {
                let v = split_product(kind, &h, false, i as u64 + 1);
                let trivial = match &v {
                    LimValue::Expr { value } => Tri::from_bool(value.is_zero()),
                    LimValue::Pro(d) => {
                        if d.profile.is_trivial() {
                            Tri::Yes
                        } else {
                            Tri::Unknown
                        }
                    }
                };
                out.push(KernelDescriptor {
                    stage: i,
                    trivial,
                    value: v.as_expr().cloned(),
                    description: format!("product of Ext(C_n, {h}) over n > {i}"),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> GroupExpr {
        s.parse().unwrap()
    }

    #[test]
    fn remark24() {
        let t = DirectTower::elementary(2, 1).unwrap();
        let r = pext(&t, &GroupExpr::z(), 12).unwrap();
        assert_eq!(r.verdict, Lim1Verdict::Zero);
        assert_eq!(r.rule, RuleVerdict::Zero);
        let z = zadic_closure_check(&e("InfProduct(Z/2)"), &r).unwrap();
        assert!(z.consistent && z.decided);
        assert_eq!(z.zadic_discrete, Tri::Yes);
        let ks = jensen_kernel_profile(&t, &GroupExpr::z(), 12).unwrap();
        assert!(ks.iter().all(|k| k.trivial == Tri::No && k.value == Some(e("InfProduct(Z/2)"))));
    }

    #[test]
    fn example53() {
        for p in [2, 3] {
            let t = DirectTower::prufer(p).unwrap();
            let h = GroupExpr::inf_sum(p, 1, 0).unwrap();
            let r = pext(&t, &h, 12).unwrap();
            assert_eq!(r.verdict, Lim1Verdict::NonzeroCertified);
            assert!(matches!(r.certificate, Certificate::SelfSimilarStrictDescent { .. }));
            let ks = jensen_kernel_profile(&t, &h, 4).unwrap();
            assert!(ks.iter().all(|k| k.trivial == Tri::No));
        }
    }

    #[test]
    fn rules() {
        let prof = |s: &str| invariants(&e(s));
        assert_eq!(pext_rules(&prof("InfSum(2; 1)"), &prof("Z")), RuleVerdict::Zero);
        assert_eq!(pext_rules(&prof("Prufer(2)"), &prof("Prufer(3)")), RuleVerdict::Zero);
        assert_eq!(pext_rules(&prof("Prufer(2)"), &prof("InfSum(2; n)")), RuleVerdict::NoVerdict);
        assert_eq!(pext_rules(&prof("Prufer(2)"), &prof("Z^(omega)")), RuleVerdict::Divisible);
    }

    #[test]
    fn stable_towers_have_discrete_kernels() {
        let t = DirectTower::explicit(
            vec!["Z/2".parse::<GroupExpr>().unwrap().as_fg().unwrap(), crate::fg::FgGroup::cyclic(4)],
            vec![crate::fg::FgHom::new(
                crate::fg::FgGroup::cyclic(2),
                crate::fg::FgGroup::cyclic(4),
                crate::fg::IntMatrix::from_rows(&[[2]]),
            )
            .unwrap()],
        )
        .unwrap();
        let ks = jensen_kernel_profile(&t, &e("Z/4"), 3).unwrap();
        assert_eq!(ks[0].value, Some(e("Z/2")));
        assert_eq!(ks[1].trivial, Tri::Yes);
    }
}
